#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "avatar/genmodel.hpp"
#include "avatar/petri.hpp"
#include "avatar/systems.hpp"

namespace avatar {

struct SystemSource {
  std::string name;
  std::optional<SystemSpec> spec;   // built with build_system
  std::optional<nlohmann::json> net;  // PN JSON of a given ground-truth net
  std::size_t max_len = 0;            // playout bound; 0 picks one automatically
};

struct NetSource {
  std::string system;  // name of the system the net was discovered for
  std::string name;
  nlohmann::json net;
};

struct SamplerConfig {
  std::string name;
  std::string mode = "naive";  // naive | mh
  double temperature = 1.0;
  std::size_t k = 10'000;
  bool union_observed = false;
  std::size_t kappa = 500;
  std::size_t patience = 1'000;
  bool strict_pseudocode = false;
  std::size_t max_chains = 200'000;
};

/// Settings for generating desk-scale systems when none are listed.
struct DeskSystems {
  std::size_t count = 5;
  std::size_t min_variants = 50;
  std::size_t max_variants = 300;
  std::size_t max_alphabet = 14;
  std::size_t max_length = 10;
  std::size_t max_attempts = 10'000;
  SystemSpec shape;
};

struct ExperimentConfig {
  std::uint64_t seed = 0;
  double split_ratio = 0.7;
  TokenCount token_cap = 3;
  std::vector<SystemSource> systems;
  DeskSystems desk;
  std::vector<std::string> baselines{"trace", "flower", "dfg"};
  std::vector<NetSource> nets;
  TrainConfig train;
  std::vector<SamplerConfig> samplers;
  bool statistics = true;

  static ExperimentConfig defaults();
  void validate() const;
  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& doc);
};

/// Desk systems drawn from cfg.desk.shape with seeds derived from the
/// experiment seed, keeping the first cfg.desk.count whose playout size lies
/// in [min_variants, max_variants].
std::vector<SystemSource> generate_desk_systems(const ExperimentConfig& cfg);

/// Runs the full protocol on every system and returns the report. Systems are
/// processed on up to `jobs` threads; the report does not depend on jobs.
nlohmann::json run_experiment(const ExperimentConfig& cfg, std::size_t jobs = 1);

}  // namespace avatar
