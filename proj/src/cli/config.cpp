#include "netxfer/cli/config.hpp"

#include <fstream>
#include <initializer_list>

#include "netxfer/errors.hpp"
#include "netxfer/netsim/scenario_io.hpp"

namespace netxfer::cli {

using nlohmann::json;

namespace {

void expect_object(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [k, v] : j.items()) {
    bool known = false;
    for (const char* key : keys) known = known || k == key;
    if (!known) throw ConfigError(where + ": unknown key '" + k + "'");
  }
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + ": wrong type");
  }
}

netsim::TrafficKind traffic_kind(const std::string& s, const std::string& where) {
  if (s == "poisson") return netsim::TrafficKind::Poisson;
  if (s == "onoff") return netsim::TrafficKind::OnOff;
  if (s == "heavytail") return netsim::TrafficKind::HeavyTail;
  if (s == "replay") return netsim::TrafficKind::Replay;
  throw ConfigError(where + ": unknown traffic kind '" + s + "'");
}

rnmodel::TrainConfig train_from_json(const json& j, rnmodel::TrainConfig c, const std::string& where) {
  expect_object(j, where, {"lr", "max_epochs", "patience", "batch_size", "seed"});
  read(j, "lr", c.lr, where);
  read(j, "max_epochs", c.max_epochs, where);
  read(j, "patience", c.patience, where);
  read(j, "batch_size", c.batch_size, where);
  read(j, "seed", c.seed, where);
  c.validate();
  return c;
}

DatasetSpec dataset_from_json(const json& j, const std::string& where, const std::filesystem::path& base) {
  expect_object(j, where, {"template", "counts", "seed"});
  DatasetSpec d;
  if (!j.contains("template")) throw ConfigError(where + ": missing 'template'");
  d.scenario = template_from_json(j.at("template"), where + ".template", base);
  if (!j.contains("counts")) throw ConfigError(where + ": missing 'counts'");
  const json& c = j.at("counts");
  expect_object(c, where + ".counts", {"training", "validation", "evaluation"});
  read(c, "training", d.counts[0], where + ".counts");
  read(c, "validation", d.counts[1], where + ".counts");
  read(c, "evaluation", d.counts[2], where + ".counts");
  if (j.contains("seed")) {
    std::uint64_t s = 0;
    read(j, "seed", s, where);
    d.seed = s;
  }
  return d;
}

TransferSpec transfer_from_json(const json& j) {
  const std::string where = "transfer";
  expect_object(j, where, {"method", "policy", "autofreeze", "l2sp", "gtot"});
  TransferSpec t;
  read(j, "method", t.method, where);
  if (j.contains("policy")) {
    std::string code;
    read(j, "policy", code, where);
    t.policy = transfer::parse_policy(code);
  }
  if (j.contains("autofreeze")) {
    const json& a = j.at("autofreeze");
    expect_object(a, where + ".autofreeze", {"eta", "k"});
    read(a, "eta", t.autofreeze.eta, where + ".autofreeze");
    read(a, "k", t.autofreeze.k, where + ".autofreeze");
    t.autofreeze.validate();
  }
  if (j.contains("l2sp")) {
    const json& a = j.at("l2sp");
    expect_object(a, where + ".l2sp", {"alpha", "beta"});
    read(a, "alpha", t.l2sp.alpha, where + ".l2sp");
    read(a, "beta", t.l2sp.beta, where + ".l2sp");
    t.l2sp.validate();
  }
  if (j.contains("gtot")) {
    const json& a = j.at("gtot");
    expect_object(a, where + ".gtot", {"lambda", "epsilon", "iterations"});
    read(a, "lambda", t.gtot.lambda, where + ".gtot");
    read(a, "epsilon", t.gtot.epsilon, where + ".gtot");
    read(a, "iterations", t.gtot.iterations, where + ".gtot");
    t.gtot.validate();
  }
  make_method(t.method, std::nullopt, t);
  return t;
}

}  // namespace

netsim::ScenarioTemplate template_from_json(const json& j, const std::string& where, const std::filesystem::path& base) {
  expect_object(j, where,
                {"min_nodes", "max_nodes", "extra_edge_probability", "capacities_bps", "min_propagation_s",
                 "max_propagation_s", "buffer_packets", "min_flows", "max_flows", "traffic_kinds", "packet_size",
                 "min_on_mean_s", "max_on_mean_s", "min_off_mean_s", "max_off_mean_s", "heavy_tail_sigma", "replay_path",
                 "min_utilization", "max_utilization", "utilization_cap", "min_duration_s", "max_duration_s",
                 "topology_seed", "fixed_routing", "fidelity"});
  netsim::ScenarioTemplate t;
  read(j, "min_nodes", t.min_nodes, where);
  read(j, "max_nodes", t.max_nodes, where);
  read(j, "extra_edge_probability", t.extra_edge_probability, where);
  read(j, "capacities_bps", t.capacities_bps, where);
  read(j, "min_propagation_s", t.min_propagation_s, where);
  read(j, "max_propagation_s", t.max_propagation_s, where);
  if (j.contains("buffer_packets")) {
    if (j.at("buffer_packets").is_null()) t.buffer_packets = netsim::kUnlimitedBuffer;
    else read(j, "buffer_packets", t.buffer_packets, where);
  }
  read(j, "min_flows", t.min_flows, where);
  read(j, "max_flows", t.max_flows, where);
  if (j.contains("traffic_kinds")) {
    std::vector<std::string> kinds;
    read(j, "traffic_kinds", kinds, where);
    t.traffic_kinds.clear();
    for (const auto& k : kinds) t.traffic_kinds.push_back(traffic_kind(k, where + ".traffic_kinds"));
  }
  if (j.contains("packet_size")) {
    const json& p = j.at("packet_size");
    expect_object(p, where + ".packet_size", {"exponential", "mean_bytes"});
    read(p, "exponential", t.packet_size.exponential, where + ".packet_size");
    read(p, "mean_bytes", t.packet_size.mean_bytes, where + ".packet_size");
  }
  read(j, "min_on_mean_s", t.min_on_mean_s, where);
  read(j, "max_on_mean_s", t.max_on_mean_s, where);
  read(j, "min_off_mean_s", t.min_off_mean_s, where);
  read(j, "max_off_mean_s", t.max_off_mean_s, where);
  read(j, "heavy_tail_sigma", t.heavy_tail_sigma, where);
  read(j, "replay_path", t.replay_path, where);
  if (!t.replay_path.empty() && std::filesystem::path(t.replay_path).is_relative() && !base.empty())
    t.replay_path = (base / t.replay_path).string();
  read(j, "min_utilization", t.min_utilization, where);
  read(j, "max_utilization", t.max_utilization, where);
  read(j, "utilization_cap", t.utilization_cap, where);
  read(j, "min_duration_s", t.min_duration_s, where);
  read(j, "max_duration_s", t.max_duration_s, where);
  if (j.contains("topology_seed") && !j.at("topology_seed").is_null()) {
    std::uint64_t s = 0;
    read(j, "topology_seed", s, where);
    t.topology_seed = s;
  }
  read(j, "fixed_routing", t.fixed_routing, where);
  if (j.contains("fidelity")) {
    const json& f = j.at("fidelity");
    expect_object(f, where + ".fidelity", {"mode", "processing_delay", "capacity_derating", "jitter_sd"});
    try {
      t.fidelity = netsim::fidelity_from_json(f);
    } catch (const json::exception&) {
      throw ConfigError(where + ".fidelity: wrong type or missing mode");
    }
  }
  t.validate();
  return t;
}

ExperimentConfig parse_config(const json& j, const std::filesystem::path& base) {
  expect_object(j, "config",
                {"output_dir", "seed", "write_traces", "simulated", "real", "model", "train", "finetune", "transfer", "sweep"});
  ExperimentConfig c;
  std::string out = c.output_dir.string();
  read(j, "output_dir", out, "config");
  c.output_dir = std::filesystem::path(out).is_relative() && !base.empty() ? base / out : std::filesystem::path(out);
  read(j, "seed", c.seed, "config");
  read(j, "write_traces", c.write_traces, "config");
  if (!j.contains("simulated")) throw ConfigError("config: missing 'simulated'");
  if (!j.contains("real")) throw ConfigError("config: missing 'real'");
  c.simulated = dataset_from_json(j.at("simulated"), "simulated", base);
  c.real = dataset_from_json(j.at("real"), "real", base);
  if (c.simulated.counts[0] == 0 || c.simulated.counts[1] == 0)
    throw ConfigError("simulated.counts: training and validation must be nonzero");
  if (j.contains("model")) c.model = rnmodel::model_config_from_json(j.at("model"));
  if (j.contains("train")) c.train = train_from_json(j.at("train"), c.train, "train");
  c.finetune = transfer::finetune_config(c.train);
  if (j.contains("finetune")) c.finetune = train_from_json(j.at("finetune"), c.finetune, "finetune");
  if (j.contains("transfer")) c.transfer = transfer_from_json(j.at("transfer"));
  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    expect_object(s, "sweep", {"counts", "seeds"});
    read(s, "counts", c.sweep.counts, "sweep");
    read(s, "seeds", c.sweep.seeds, "sweep");
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return parse_config(j, path.parent_path());
}

transfer::TransferMethod make_method(const std::string& method, const std::optional<std::string>& policy,
                                     const TransferSpec& spec) {
  if (method == "manual" || method.starts_with("manual:")) {
    transfer::BlockPolicy p = spec.policy;
    if (method.size() > 7) p = transfer::parse_policy(method.substr(7));
    if (policy) p = transfer::parse_policy(*policy);
    return transfer::ManualMethod{p};
  }
  if (policy) throw ConfigError("--policy only applies to the manual method");
  if (method == "autofreeze") return transfer::AutoFreezeMethod{spec.autofreeze};
  if (method == "l2sp") return transfer::L2spMethod{spec.l2sp};
  if (method == "gtot") return transfer::GtotMethod{spec.gtot};
  throw ConfigError("unknown transfer method '" + method + "' (manual:<POLICY>, autofreeze, l2sp, gtot)");
}

}  // namespace netxfer::cli
