"""Smoke tests for the fleetlog python bindings."""

import json

import pytest

import fleetlog


@pytest.fixture(scope="module")
def env_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("env")
    summary = fleetlog.generate_environment(
        config={"fleet_size": 14, "seed": 7}, out_dir=str(out)
    )
    assert summary["records"] == 14
    assert sum(summary["label_counts"].values()) == 14
    assert set(summary["label_counts"]) == {f"M{i}" for i in range(7)}
    return out


def test_environment_files(env_dir):
    for name in (
        "fleet_registry.csv",
        "service_catalog.csv",
        "signal_odometer.csv",
        "maintenance_log_clean.csv",
        "maintenance_log_noisy.csv",
        "labels.jsonl",
        "meta.json",
    ):
        assert (env_dir / name).exists(), name
    meta = json.loads((env_dir / "meta.json").read_text())
    assert meta["config"]["fleet_size"] == 14
    assert 0.0 < meta["theta"]["temperature"] < 0.2


def test_datastore_tools(env_dir):
    store = fleetlog.Datastore(str(env_dir))
    assert store.list_tables() == [
        "fleet_registry",
        "service_catalog",
        "signal_odometer",
    ]

    schema = dict(store.describe_table("signal_odometer"))
    assert schema["odometer"] == "integer"
    assert schema["date"] == "date"

    count = store.run_sql("SELECT COUNT(*) FROM fleet_registry")
    assert count["rows"][0][0] == 14

    bad = store.run_sql("DROP TABLE fleet_registry")
    assert "read-only" in bad["error"]

    catalog = store.run_sql(
        "SELECT System, COUNT(*) AS n FROM service_catalog GROUP BY System "
        "ORDER BY System"
    )
    assert len(catalog["rows"]) == 10
    assert sum(r[1] for r in catalog["rows"]) == 142


def test_oracle_round_trip(env_dir, tmp_path):
    episodes = tmp_path / "episodes.jsonl"
    results = fleetlog.run_episodes(
        str(env_dir), agent="oracle", episodes_out=str(episodes)
    )
    assert len(results) == 14
    assert all(r["status"] != "failed" for r in results)

    report = fleetlog.evaluate(str(env_dir), str(episodes))
    assert {row["noise_type"] for row in report["per_type"]} == {
        f"M{i}" for i in range(7)
    }
    for row in report["per_type"]:
        assert row["edr"] == 1.0
        if row["ecr"] is not None:
            assert row["ecr"] == 1.0
        assert row["failed"] == 0


def test_baseline_hits_entity_noise(env_dir, tmp_path):
    episodes = tmp_path / "episodes.jsonl"
    fleetlog.run_episodes(str(env_dir), agent="baseline", episodes_out=str(episodes))
    report = fleetlog.evaluate(str(env_dir), str(episodes))
    rows = {row["noise_type"]: row for row in report["per_type"]}
    assert rows["M0"]["edr"] == 1.0
    assert rows["M1"]["edr"] == 1.0
    assert rows["M1"]["ecr"] == 1.0
    assert rows["M2"]["edr"] == 1.0
    assert rows["M5"]["edr"] == 1.0
