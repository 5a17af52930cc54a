"""Synthetic fleet-maintenance log cleaning benchmark (C++ core bindings)."""

from fleetlog._core import (
    Datastore,
    evaluate,
    generate_environment,
    run_episodes,
)

__all__ = [
    "Datastore",
    "evaluate",
    "generate_environment",
    "run_episodes",
]
