#include "netxfer/cli/commands.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "netxfer/cli/manifest.hpp"
#include "netxfer/dataio/dataset_io.hpp"
#include "netxfer/dataio/normalizer.hpp"
#include "netxfer/errors.hpp"
#include "netxfer/evalx/report.hpp"
#include "netxfer/evalx/sweep.hpp"
#include "netxfer/netsim/scenario_io.hpp"
#include "netxfer/netsim/simulator.hpp"
#include "netxfer/rnmodel/checkpoint.hpp"
#include "netxfer/transfer/finetune.hpp"

namespace netxfer::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

std::ostream& log(const Context& ctx) { return ctx.log ? *ctx.log : std::cerr; }

fs::path models_dir(const Context& ctx) { return ctx.config.output_dir / "models"; }
fs::path reports_dir(const Context& ctx) { return ctx.config.output_dir / "reports"; }

std::string scenario_file(const char* prefix, std::uint64_t id, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%05llu.%s", prefix, static_cast<unsigned long long>(id), ext);
  return buf;
}

std::ofstream open_out(const fs::path& path) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

void record(const Context& ctx, const std::string& command, json inputs, json outputs, json metrics, json seeds,
            Clock::time_point start) {
  const double wall = std::chrono::duration<double>(Clock::now() - start).count();
  append_manifest(ctx.config.output_dir, {{"command", command},
                                          {"config_hash", ctx.config_hash},
                                          {"seeds", std::move(seeds)},
                                          {"inputs", std::move(inputs)},
                                          {"outputs", std::move(outputs)},
                                          {"metrics", std::move(metrics)},
                                          {"wall_time_s", wall}});
}

dataio::Dataset load(const Context& ctx, const char* name) {
  const fs::path dir = ctx.config.output_dir / name;
  if (!fs::exists(dir / "partition.json"))
    throw DataError("missing dataset " + dir.string() + "; run 'netxfer generate' first");
  return dataio::load_dataset(dir);
}

rnmodel::Model load_donor(const Context& ctx) {
  const fs::path path = models_dir(ctx) / "donor.json";
  if (!fs::exists(path)) throw DataError("missing donor checkpoint " + path.string() + "; run 'netxfer train' first");
  return rnmodel::load_model(path);
}

json generate_dataset(const Context& ctx, const char* name, const DatasetSpec& spec) {
  const std::size_t total = spec.counts[0] + spec.counts[1] + spec.counts[2];
  const fs::path dir = ctx.config.output_dir / name;
  const std::uint64_t seed = spec.seed.value_or(ctx.config.seed);
  fs::create_directories(dir / "scenarios");
  fs::create_directories(dir / "windows");
  if (ctx.config.write_traces) fs::create_directories(dir / "traces");
  const auto scenarios = netsim::gen_scenarios(spec.scenario, total, seed);
  std::vector<std::uint64_t> delivered(total, 0);
  evalx::parallel_for(total, ctx.threads, [&](std::size_t i) {
    const auto& s = scenarios[i];
    const auto trace = netsim::simulate(s);
    const auto ws = dataio::windowize(trace, s, ctx.config.model.window_length);
    if (ws.packet_total() != trace.delivered())
      throw DataError("scenario " + std::to_string(s.id) + ": windowed packet count differs from the delivered total");
    netsim::write_scenario(dir / "scenarios" / scenario_file("scenario", s.id, "json"), s);
    dataio::write_windowed(dataio::windows_file(dir, s.id), ws);
    if (ctx.config.write_traces) {
      std::ofstream out(dir / "traces" / scenario_file("scenario", s.id, "ndjson"));
      netsim::write_trace_ndjson(out, trace);
    }
    delivered[i] = trace.delivered();
  });
  std::vector<std::uint64_t> ids;
  for (const auto& s : scenarios) ids.push_back(s.id);
  dataio::write_partition(dir / "partition.json", dataio::split_counts(ids, spec.counts, seed));
  std::uint64_t packets = 0;
  for (auto d : delivered) packets += d;
  log(ctx) << "generate: " << name << ": " << total << " scenarios, " << packets << " delivered packets\n";
  return {{"scenarios", total}, {"delivered_packets", packets}, {"seed", seed}};
}

void write_history(const fs::path& path, const rnmodel::TrainHistory& h) {
  auto out = open_out(path);
  rnmodel::write_history_csv(out, h);
}

}  // namespace

Context make_context(const fs::path& config_path, std::optional<std::size_t> threads, std::ostream& log) {
  Context ctx;
  ctx.config = load_config(config_path);
  ctx.config_hash = git_blob_hash_file(config_path);
  if (const char* dir = std::getenv("NETXFER_OUTPUT_DIR"); dir && *dir) ctx.config.output_dir = dir;
  ctx.threads = 1;
  if (threads) {
    ctx.threads = *threads;
  } else if (const char* env = std::getenv("NETXFER_THREADS"); env && *env) {
    try {
      ctx.threads = std::stoul(env);
    } catch (const std::exception&) {
      throw ConfigError(std::string("NETXFER_THREADS: not a number: ") + env);
    }
  }
  if (ctx.threads == 0) throw ConfigError("thread count must be >= 1");
  ctx.log = &log;
  return ctx;
}

void cmd_generate(const Context& ctx, bool force) {
  const auto start = Clock::now();
  const fs::path& out = ctx.config.output_dir;
  if (fs::exists(out) && !fs::is_empty(out)) {
    if (!force) throw ConfigError("output directory " + out.string() + " already exists; use --force to regenerate");
    for (const char* sub : {"simulated", "real", "models", "reports"}) fs::remove_all(out / sub);
  }
  fs::create_directories(out);
  json metrics;
  metrics["simulated"] = generate_dataset(ctx, "simulated", ctx.config.simulated);
  metrics["real"] = generate_dataset(ctx, "real", ctx.config.real);
  json outputs = hash_tree(out / "simulated", out);
  outputs.update(hash_tree(out / "real", out));
  record(ctx, "generate", json::object(), std::move(outputs), std::move(metrics), {{"experiment", ctx.config.seed}}, start);
}

void cmd_train(const Context& ctx, const std::string& target) {
  const auto start = Clock::now();
  const char* dataset = target == "donor" ? "simulated" : target == "baseline" ? "real" : nullptr;
  if (!dataset) throw ConfigError("train: --target must be 'donor' or 'baseline'");
  const auto ds = load(ctx, dataset);
  const auto train_ws = ds.training();
  const auto val_ws = ds.validation();
  if (train_ws.empty() || val_ws.empty()) throw DataError(std::string("train: ") + dataset + " needs training and validation scenarios");
  rnmodel::Model model(ctx.config.model, dataio::fit_normalizer(train_ws));
  model.init(ctx.config.train.seed);
  const auto train_set = rnmodel::prepare_all(train_ws, model.normalizer());
  const auto val_set = rnmodel::prepare_all(val_ws, model.normalizer());
  const auto history = rnmodel::train(model, train_set, val_set, ctx.config.train);
  const fs::path ckpt = models_dir(ctx) / (target + ".json"), hist = models_dir(ctx) / (target + "_history.csv");
  fs::create_directories(models_dir(ctx));
  rnmodel::save_model(ckpt, model);
  write_history(hist, history);
  log(ctx) << "train " << target << ": best validation MAPE " << 100.0 * history.best_val_loss << "% at epoch "
           << history.best_epoch << " of " << history.epochs.size() - 1 << '\n';
  json outputs = hash_tree(ckpt, ctx.config.output_dir);
  outputs.update(hash_tree(hist, ctx.config.output_dir));
  record(ctx, "train:" + target, hash_tree(ctx.config.output_dir / dataset / "partition.json", ctx.config.output_dir),
         std::move(outputs),
         {{"best_val_mape", 100.0 * history.best_val_loss}, {"best_epoch", history.best_epoch}, {"epochs", history.epochs.size() - 1}},
         {{"train", ctx.config.train.seed}}, start);
}

std::string cmd_transfer(const Context& ctx, const std::string& method_arg, const std::optional<std::string>& policy) {
  const auto start = Clock::now();
  const auto method = make_method(method_arg, policy, ctx.config.transfer);
  const auto donor = load_donor(ctx);
  if (!(donor.config() == ctx.config.model)) throw ConfigError("transfer: donor checkpoint was trained with a different model config");
  const auto ds = load(ctx, "real");
  const auto train_ws = ds.training();
  const auto val_ws = ds.validation();
  if (train_ws.empty() || val_ws.empty()) throw DataError("transfer: real dataset needs training and validation scenarios");
  const auto result = transfer::finetune(donor, train_ws, val_ws, method, ctx.config.finetune, ctx.config.finetune.seed);

  std::string name = "transfer_" + transfer::method_name(method);
  for (char& c : name)
    if (c == ':') c = '_';
  const fs::path ckpt = models_dir(ctx) / (name + ".json"), hist = models_dir(ctx) / (name + "_history.csv");
  rnmodel::save_model(ckpt, result.model);
  write_history(hist, result.history);
  json outputs = hash_tree(ckpt, ctx.config.output_dir);
  outputs.update(hash_tree(hist, ctx.config.output_dir));
  if (!result.freeze_states.empty()) {
    const fs::path path = models_dir(ctx) / (name + "_freeze.csv");
    auto out = open_out(path);
    out.precision(10);
    out << "epoch,encoding_norm,mpa_norm,readout_norm,frozen\n";
    for (std::size_t e = 0; e < result.freeze_states.size(); ++e) {
      const auto& n = result.grad_norms[e];
      const auto& f = result.freeze_states[e];
      out << e + 1 << ',' << n[0] << ',' << n[1] << ',' << n[2] << ',' << (f[0] ? 'E' : '-') << (f[1] ? 'M' : '-')
          << (f[2] ? 'R' : '-') << '\n';
    }
    out.close();
    outputs.update(hash_tree(path, ctx.config.output_dir));
  }
  log(ctx) << "transfer " << transfer::method_name(method) << ": best validation MAPE " << 100.0 * result.history.best_val_loss
           << "% at epoch " << result.history.best_epoch << '\n';
  json inputs = hash_tree(models_dir(ctx) / "donor.json", ctx.config.output_dir);
  inputs.update(hash_tree(ctx.config.output_dir / "real" / "partition.json", ctx.config.output_dir));
  record(ctx, "transfer", std::move(inputs), std::move(outputs),
         {{"method", transfer::method_name(method)},
          {"policy", transfer::base_policy(method).code()},
          {"best_val_mape", 100.0 * result.history.best_val_loss},
          {"best_epoch", result.history.best_epoch}},
         {{"finetune", ctx.config.finetune.seed}}, start);
  return name;
}

void cmd_eval(const Context& ctx) {
  const auto start = Clock::now();
  const auto ds = load(ctx, "real");
  const auto eval_ws = ds.evaluation();
  if (eval_ws.empty()) throw DataError("eval: the real dataset has no evaluation scenarios");
  std::vector<std::string> names;
  for (const char* fixed : {"donor", "baseline"})
    if (fs::exists(models_dir(ctx) / (std::string(fixed) + ".json"))) names.push_back(fixed);
  std::vector<std::string> transfers;
  if (fs::is_directory(models_dir(ctx)))
    for (const auto& e : fs::directory_iterator(models_dir(ctx))) {
      const std::string f = e.path().filename().string();
      if (f.starts_with("transfer_") && e.path().extension() == ".json") transfers.push_back(e.path().stem().string());
    }
  std::sort(transfers.begin(), transfers.end());
  names.insert(names.end(), transfers.begin(), transfers.end());
  if (names.empty()) throw DataError("eval: no checkpoints in " + models_dir(ctx).string());

  std::vector<evalx::EvalReport> reports;
  json inputs = hash_tree(ctx.config.output_dir / "real" / "partition.json", ctx.config.output_dir);
  json outputs = json::object();
  for (const auto& n : names) {
    const fs::path ckpt = models_dir(ctx) / (n + ".json");
    inputs.update(hash_tree(ckpt, ctx.config.output_dir));
    reports.push_back(evalx::evaluate(rnmodel::load_model(ckpt), eval_ws));
    const fs::path samples = reports_dir(ctx) / ("samples_" + n + ".ndjson"), pdf = reports_dir(ctx) / ("pdf_" + n + ".csv");
    {
      auto out = open_out(samples);
      evalx::write_samples_ndjson(out, reports.back());
      auto pout = open_out(pdf);
      evalx::write_pdf_csv(pout, evalx::error_pdf(reports.back().predictions(), reports.back().targets(), 50));
    }
    outputs.update(hash_tree(samples, ctx.config.output_dir));
    outputs.update(hash_tree(pdf, ctx.config.output_dir));
  }
  const std::size_t base = names.size() > 1 && names[1] == "baseline" ? 1 : 0;
  std::vector<evalx::MetricsRow> rows;
  json metrics = json::object();
  for (std::size_t i = 0; i < names.size(); ++i) {
    const auto& r = reports[i];
    const auto pdf = evalx::error_pdf(r.predictions(), r.targets(), 2);
    rows.push_back({names[i], r.mape, evalx::normalized_mape(r, reports[base]), pdf.mean_error, r.count()});
    metrics[names[i]] = {{"mape", r.mape}, {"normalized_mape", rows.back().normalized}, {"mean_signed_error", pdf.mean_error}};
    log(ctx) << "eval " << names[i] << ": MAPE " << r.mape << "%, normalized " << rows.back().normalized << " (vs " << names[base]
             << "), mean signed error " << 100.0 * pdf.mean_error << "%\n";
  }
  const fs::path csv = reports_dir(ctx) / "metrics.csv";
  {
    auto out = open_out(csv);
    evalx::write_metrics_csv(out, rows);
  }
  outputs.update(hash_tree(csv, ctx.config.output_dir));
  metrics["baseline"] = names[base];
  record(ctx, "eval", std::move(inputs), std::move(outputs), std::move(metrics), json::object(), start);
}

void cmd_sweep(const Context& ctx, const std::optional<std::vector<std::size_t>>& counts) {
  const auto start = Clock::now();
  const auto donor = load_donor(ctx);
  const auto ds = load(ctx, "real");
  evalx::SweepConfig sc;
  sc.counts = counts.value_or(ctx.config.sweep.counts);
  sc.seeds = ctx.config.sweep.seeds;
  sc.policy = ctx.config.transfer.policy;
  sc.scratch_train = ctx.config.train;
  sc.finetune_train = ctx.config.finetune;
  sc.threads = ctx.threads;
  const auto pool = ds.training();
  const auto val = ds.validation();
  const auto eval = ds.evaluation();
  if (val.empty() || eval.empty()) throw DataError("sweep: the real dataset needs validation and evaluation scenarios");
  const auto curve = evalx::efficiency_sweep(donor, pool, val, eval, sc);
  const fs::path csv = reports_dir(ctx) / "sweep.csv";
  {
    auto out = open_out(csv);
    evalx::write_curve_csv(out, curve);
  }
  json metrics = json::array();
  for (const auto& p : curve.points) {
    log(ctx) << "sweep n=" << p.count << ": scratch " << p.scratch_mape << "%, fine-tuned " << p.finetuned_mape << "%\n";
    metrics.push_back({{"count", p.count}, {"scratch_mape", p.scratch_mape}, {"finetuned_mape", p.finetuned_mape}});
  }
  for (const auto& w : curve.warnings) log(ctx) << "sweep warning: " << w << '\n';
  json inputs = hash_tree(models_dir(ctx) / "donor.json", ctx.config.output_dir);
  inputs.update(hash_tree(ctx.config.output_dir / "real" / "partition.json", ctx.config.output_dir));
  record(ctx, "sweep", std::move(inputs), hash_tree(csv, ctx.config.output_dir), {{"curve", metrics}, {"warnings", curve.warnings}},
         {{"sweep", sc.seeds}}, start);
}

void cmd_run(const Context& ctx, bool force) {
  cmd_generate(ctx, force);
  cmd_train(ctx, "donor");
  if (ctx.config.real.counts[0] > 0 && ctx.config.real.counts[1] > 0) {
    cmd_train(ctx, "baseline");
    cmd_transfer(ctx, ctx.config.transfer.method, std::nullopt);
  }
  if (ctx.config.real.counts[2] > 0) cmd_eval(ctx);
  if (!ctx.config.sweep.counts.empty()) cmd_sweep(ctx, std::nullopt);
}

int run_cli(int argc, char** argv) {
  CLI::App app{"netxfer: simulation-to-real transfer learning for windowed network delay models"};
  app.require_subcommand(1);
  std::string config;
  std::optional<std::size_t> threads;
  bool force = false, corrupt = false;
  std::string target = "donor", method;
  std::optional<std::string> policy;
  std::vector<std::size_t> counts;

  auto with_config = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--threads", threads, "Worker threads (overrides NETXFER_THREADS)");
    return sub;
  };
  auto* gen = with_config(app.add_subcommand("generate", "Simulate scenarios and write windowed datasets"));
  gen->add_flag("--force", force, "Regenerate into an existing output directory");
  auto* train = with_config(app.add_subcommand("train", "Train the donor (simulated) or baseline (real) model"));
  train->add_option("--target", target, "donor | baseline")->check(CLI::IsMember({"donor", "baseline"}));
  auto* xfer = with_config(app.add_subcommand("transfer", "Fine-tune the donor on real data"));
  xfer->add_option("--method", method, "manual:<POLICY> | autofreeze | l2sp | gtot");
  xfer->add_option("--policy", policy, "3-letter block policy for manual, ordered Encoding-MPA-Readout");
  auto* eval = with_config(app.add_subcommand("eval", "Score every checkpoint on the real evaluation split"));
  auto* sweep = with_config(app.add_subcommand("sweep", "Data-efficiency sweep: scratch vs fine-tuned"));
  sweep->add_option("--counts", counts, "Real scenario counts, e.g. 5,10,25,50")->delimiter(',');
  auto* run = with_config(app.add_subcommand("run", "generate, train, transfer, eval and sweep in one go"));
  run->add_flag("--force", force, "Regenerate into an existing output directory");
  auto* grad = app.add_subcommand("gradcheck", "Finite-difference check of model gradients");
  grad->add_flag("--corrupt", corrupt, "Perturb one analytic gradient (must fail)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (grad->parsed()) return run_gradcheck(std::cout, corrupt) ? kExitOk : kExitNumeric;
    const Context ctx = make_context(config, threads, std::cerr);
    if (gen->parsed()) cmd_generate(ctx, force);
    else if (train->parsed()) cmd_train(ctx, target);
    else if (xfer->parsed()) cmd_transfer(ctx, method.empty() ? ctx.config.transfer.method : method, policy);
    else if (eval->parsed()) cmd_eval(ctx);
    else if (sweep->parsed()) cmd_sweep(ctx, counts.empty() ? std::nullopt : std::optional(counts));
    else if (run->parsed()) cmd_run(ctx, force);
    return kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace netxfer::cli
