#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "netxfer/netsim/generator.hpp"
#include "netxfer/rnmodel/train.hpp"
#include "netxfer/transfer/finetune.hpp"

namespace netxfer::cli {

struct DatasetSpec {
  netsim::ScenarioTemplate scenario;
  std::array<std::size_t, 3> counts{0, 0, 0};  // training, validation, evaluation
  std::optional<std::uint64_t> seed;           // defaults to the experiment seed
};

struct TransferSpec {
  std::string method = "manual";  // manual | autofreeze | l2sp | gtot
  transfer::BlockPolicy policy{transfer::Action::Freeze, transfer::Action::FineTune, transfer::Action::Retrain};
  transfer::AutoFreezeConfig autofreeze;
  transfer::L2spConfig l2sp;
  transfer::GtotConfig gtot;
};

struct SweepSpec {
  std::vector<std::size_t> counts;
  std::vector<std::uint64_t> seeds{1, 2, 3};
};

struct ExperimentConfig {
  std::filesystem::path output_dir = "netxfer-out";
  std::uint64_t seed = 1;
  bool write_traces = false;
  DatasetSpec simulated;
  DatasetSpec real;
  rnmodel::ModelConfig model;
  rnmodel::TrainConfig train;
  rnmodel::TrainConfig finetune;  // lr defaults to train.lr / 10
  TransferSpec transfer;
  SweepSpec sweep;
};

// Strict: unknown keys and wrong types raise ConfigError naming the key path.
// Relative paths (output_dir, replay_path) resolve against base_dir.
ExperimentConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

netsim::ScenarioTemplate template_from_json(const nlohmann::json& j, const std::string& where,
                                            const std::filesystem::path& base_dir = {});

// "manual", "manual:FTR", "autofreeze", "l2sp", "gtot". policy (3-letter code)
// applies to manual; hyperparameters come from the config transfer section.
transfer::TransferMethod make_method(const std::string& method, const std::optional<std::string>& policy,
                                     const TransferSpec& spec);

}  // namespace netxfer::cli
