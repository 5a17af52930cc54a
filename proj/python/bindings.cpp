#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>

#include "fleetlog/config.hpp"
#include "fleetlog/environment.hpp"
#include "fleetlog/orchestrator.hpp"

namespace py = pybind11;
using namespace fleetlog;

namespace {

Json py_to_json(const py::handle& obj) {
  if (obj.is_none()) return nullptr;
  if (py::isinstance<py::bool_>(obj)) return obj.cast<bool>();
  if (py::isinstance<py::int_>(obj)) return obj.cast<long long>();
  if (py::isinstance<py::float_>(obj)) return obj.cast<double>();
  if (py::isinstance<py::str>(obj)) return obj.cast<std::string>();
  if (py::isinstance<py::dict>(obj)) {
    Json out = Json::object();
    for (auto item : obj.cast<py::dict>()) {
      out[item.first.cast<std::string>()] = py_to_json(item.second);
    }
    return out;
  }
  if (py::isinstance<py::list>(obj) || py::isinstance<py::tuple>(obj)) {
    Json out = Json::array();
    for (auto item : obj.cast<py::sequence>()) out.push_back(py_to_json(item));
    return out;
  }
  throw py::type_error("unsupported value type for JSON conversion");
}

py::object json_to_py(const Json& j) {
  switch (j.type()) {
    case Json::value_t::null: return py::none();
    case Json::value_t::boolean: return py::bool_(j.get<bool>());
    case Json::value_t::number_integer:
    case Json::value_t::number_unsigned:
      return py::int_(j.get<long long>());
    case Json::value_t::number_float: return py::float_(j.get<double>());
    case Json::value_t::string: return py::str(j.get<std::string>());
    case Json::value_t::array: {
      py::list out;
      for (const auto& item : j) out.append(json_to_py(item));
      return out;
    }
    case Json::value_t::object: {
      py::dict out;
      for (const auto& [key, value] : j.items()) {
        out[py::str(key)] = json_to_py(value);
      }
      return out;
    }
    default: return py::none();
  }
}

py::dict generate_env(const py::dict& config, const py::object& mix,
                      const std::string& out_dir) {
  const NoiseTaxonomy taxonomy = NoiseTaxonomy::standard();
  GenerationConfig gen_config = generation_config_from_json(py_to_json(config));
  NoiseMix noise_mix = mix.is_none()
                           ? NoiseMix::uniform(taxonomy)
                           : noise_mix_from_json(py_to_json(mix));
  auto theta_rng = RngStream::derive(gen_config.seed, "theta");
  DecodingParams theta = ThetaSpace{}.sample(theta_rng);

  Environment env = generate_environment(gen_config, noise_mix, taxonomy,
                                         Catalog::standard(), theta);
  write_environment(env, out_dir);

  py::dict counts;
  for (const auto& label : env.labels) {
    std::string id = label.noise_type;
    counts[py::str(id)] =
        py::int_(counts.contains(py::str(id))
                     ? counts[py::str(id)].cast<long long>() + 1
                     : 1LL);
  }
  py::dict summary;
  summary["out_dir"] = out_dir;
  summary["records"] = py::int_(static_cast<long long>(env.noisy_log.size()));
  summary["label_counts"] = counts;
  return summary;
}

py::list run_episodes(const std::string& env_dir, const std::string& agent_name,
                      const py::object& episodes_out) {
  const NoiseTaxonomy taxonomy = NoiseTaxonomy::standard();
  LoadedEnvironment env = load_environment(env_dir);
  Datastore store = Datastore::load(env_dir);

  std::unique_ptr<Agent> agent;
  if (agent_name == "oracle") {
    agent = make_oracle_agent(env.labels, taxonomy);
  } else if (agent_name == "baseline") {
    agent = make_rule_baseline_agent(env.config.plate_pattern);
  } else {
    throw py::value_error("agent must be 'oracle' or 'baseline'");
  }

  RetryPolicy policy;
  std::ofstream out;
  if (!episodes_out.is_none()) {
    out.open(episodes_out.cast<std::string>(), std::ios::binary);
  }

  py::list results;
  for (const auto& record : env.noisy_log) {
    EpisodeResult result =
        run_episode(record, *agent, store, policy, env.theta);
    Json line = episode_to_json(record, result, agent_name);
    if (out.is_open()) out << line.dump() << "\n";
    py::dict summary;
    summary["wo_num"] = record.wo_num;
    summary["status"] = episode_status_name(result.outcome.status);
    summary["action"] =
        result.action ? json_to_py(action_to_payload(*result.action))
                      : py::object(py::none());
    summary["tool_calls"] =
        py::int_(result.transcript.attempts.tool_calls);
    results.append(std::move(summary));
  }
  return results;
}

py::dict report_to_py(const EvaluationReport& report) {
  py::list rows;
  for (const auto& row : report.per_type) {
    py::dict r;
    r["noise_type"] = row.noise_type;
    r["label"] = row.report_label;
    r["n"] = row.n;
    r["failed"] = row.failed;
    r["edr"] = row.edr;
    r["strict_edr"] = row.strict_edr;
    r["ecr"] = row.ecr ? py::object(py::float_(*row.ecr))
                       : py::object(py::none());
    rows.append(std::move(r));
  }
  py::dict usage;
  usage["request_tokens"] = py::int_(report.usage.request_tokens);
  usage["response_tokens"] = py::int_(report.usage.response_tokens);
  usage["wall_time_seconds"] = report.usage.wall_time_seconds;
  usage["cost_usd"] = report.usage.cost_usd;
  usage["estimated"] = report.usage.estimated;
  py::dict out;
  out["per_type"] = rows;
  out["usage"] = usage;
  return out;
}

py::dict evaluate(const std::string& env_dir, const std::string& episodes,
                  double price_in, double price_out) {
  const NoiseTaxonomy taxonomy = NoiseTaxonomy::standard();
  LoadedEnvironment env = load_environment(env_dir);
  return report_to_py(
      evaluate_episode_file(episodes, env, taxonomy, price_in, price_out));
}

class PyDatastore {
 public:
  explicit PyDatastore(const std::string& env_dir)
      : store_(Datastore::load(env_dir)) {}

  std::vector<std::string> list_tables() const { return store_.list_tables(); }

  py::list describe_table(const std::string& name) const {
    TableSchema schema = store_.describe_table(name);
    py::list out;
    for (const auto& [col, type] : schema.columns) {
      out.append(py::make_tuple(col, type));
    }
    return out;
  }

  py::dict run_sql(const std::string& query, int limit) const {
    auto outcome = store_.run_sql(query, limit);
    py::dict out;
    if (outcome.error) {
      out["error"] = *outcome.error;
      return out;
    }
    out["columns"] = outcome.result->columns;
    py::list rows;
    for (const auto& row : outcome.result->rows) {
      py::list r;
      for (const auto& v : row) {
        if (std::holds_alternative<std::monostate>(v)) {
          r.append(py::none());
        } else if (const auto* i = std::get_if<long long>(&v)) {
          r.append(py::int_(*i));
        } else if (const auto* d = std::get_if<double>(&v)) {
          r.append(py::float_(*d));
        } else {
          r.append(py::str(std::get<std::string>(v)));
        }
      }
      rows.append(std::move(r));
    }
    out["rows"] = rows;
    out["truncated"] = outcome.result->truncated;
    return out;
  }

 private:
  Datastore store_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Synthetic fleet-maintenance log cleaning benchmark (C++ core)";

  m.def("generate_environment", &generate_env, py::arg("config") = py::dict(),
        py::arg("mix") = py::none(), py::arg("out_dir"),
        "Generate one environment directory (clean + noisy + labels + meta).");

  m.def("run_episodes", &run_episodes, py::arg("env_dir"),
        py::arg("agent") = "oracle", py::arg("episodes_out") = py::none(),
        "Run one cleaning episode per noisy record with the oracle or rule "
        "baseline agent.");

  m.def("evaluate", &evaluate, py::arg("env_dir"), py::arg("episodes"),
        py::arg("price_in") = 0.0, py::arg("price_out") = 0.0,
        "Score a persisted episodes.jsonl file against the environment's "
        "ground truth.");

  py::class_<PyDatastore>(m, "Datastore")
      .def(py::init<const std::string&>(), py::arg("env_dir"))
      .def("list_tables", &PyDatastore::list_tables)
      .def("describe_table", &PyDatastore::describe_table, py::arg("name"))
      .def("run_sql", &PyDatastore::run_sql, py::arg("query"),
           py::arg("limit") = 200);
}
