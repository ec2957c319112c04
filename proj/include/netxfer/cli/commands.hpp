#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "netxfer/cli/config.hpp"

namespace netxfer::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNumeric = 4;

struct Context {
  ExperimentConfig config;
  std::string config_hash;  // git blob hash of the config file bytes
  std::size_t threads = 1;
  std::ostream* log = nullptr;
};

// Loads the config and applies NETXFER_OUTPUT_DIR / NETXFER_THREADS.
Context make_context(const std::filesystem::path& config_path, std::optional<std::size_t> threads, std::ostream& log);

// Output layout under config.output_dir:
//   simulated/, real/           scenarios/, windows/, traces/ (optional), partition.json
//   models/<name>.json          checkpoints, with <name>_history.csv
//   reports/                    metrics, per-sample NDJSON, error PDFs, sweep curve
//   manifest.ndjson             one record per command
void cmd_generate(const Context& ctx, bool force);
// target: "donor" (simulated data) or "baseline" (real data, from scratch).
void cmd_train(const Context& ctx, const std::string& target);
// Returns the checkpoint name, e.g. "transfer_manual_FTR".
std::string cmd_transfer(const Context& ctx, const std::string& method, const std::optional<std::string>& policy);
void cmd_eval(const Context& ctx);
void cmd_sweep(const Context& ctx, const std::optional<std::vector<std::size_t>>& counts);
// generate, train donor and baseline, transfer with the configured method, eval,
// and sweep when counts are configured.
void cmd_run(const Context& ctx, bool force);

// Finite-difference check of the full model on a built-in 2-flow, 2-window
// scenario. corrupt perturbs one analytic gradient entry (negative control).
// Returns true on pass.
bool run_gradcheck(std::ostream& out, bool corrupt);

// Entry point of the netxfer executable.
int run_cli(int argc, char** argv);

}  // namespace netxfer::cli
