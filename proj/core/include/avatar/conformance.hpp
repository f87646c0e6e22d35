#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "avatar/log.hpp"
#include "avatar/petri.hpp"

namespace avatar {

/// Token bookkeeping of a replay: missing, remaining, consumed, produced.
struct ReplayCounts {
  std::uint64_t missing = 0;
  std::uint64_t remaining = 0;
  std::uint64_t consumed = 0;
  std::uint64_t produced = 0;

  ReplayCounts& operator+=(const ReplayCounts& o) {
    missing += o.missing;
    remaining += o.remaining;
    consumed += o.consumed;
    produced += o.produced;
    return *this;
  }
  bool perfect() const noexcept { return missing == 0 && remaining == 0; }
};

struct ReplayOptions {
  // Bounds on the silent-transition search used to enable a visible
  // transition or to reach a final marking.
  std::size_t silent_depth = 32;
  std::size_t silent_states = 4096;
};

/// Replays one variant. Labels the net does not know count as one missing and
/// one consumed token each.
ReplayCounts replay_variant(const PetriNet& net, const Variant& variant, const ReplayOptions& options = {});

/// Log-level token replay fitness: counts are summed over the whole log, then
/// f = 1/2 (1 - m/c) + 1/2 (1 - r/p).
double token_replay_fitness(const PetriNet& net, const VariantLog& lstar, const ReplayOptions& options = {});

struct PrecisionOptions {
  // Markings in a silent closure are discarded above this per-place count.
  TokenCount token_cap = 16;
  std::size_t closure_states = 100'000;
};

/// Escaping-edges precision over the prefix automaton of the log:
/// 1 - sum f(s)|E(s)| / sum f(s)|A(s)|, where A(s) are the labels the net
/// enables after s and E(s) those the log never takes after s. Prefixes the
/// net cannot replay are dropped from the first failure on.
double etc_precision(const PetriNet& net, const VariantLog& lstar, const PrecisionOptions& options = {});

/// |V_S ∩ V_PN| / |V_S|. Throws InvalidInput when v_s is empty.
double system_fitness(const VariantSet& v_pn, const VariantSet& v_s);

/// |V_PN ∩ V_S| / |V_PN|; 0 when the net models nothing.
double system_precision(const VariantSet& v_pn, const VariantSet& v_s);

/// Harmonic mean of fitness and precision; 0 when both are 0.
double avatar_generalization(double fitness, double precision);

using FitnessFunction = std::function<double(const PetriNet&, const VariantLog&)>;
using PrecisionFunction = std::function<double(const PetriNet&, const VariantLog&)>;

struct ConformanceScores {
  double fitness = 0.0;
  double precision = 0.0;
  double generalization = 0.0;
  std::string fitness_method = "token_replay";
  std::string precision_method = "etc";
};

/// Conformance of `net` against a log: by default token replay fitness and
/// ETC precision, combined with avatar_generalization.
ConformanceScores conformance_scores(const PetriNet& net, const VariantLog& lstar,
                                     const FitnessFunction& fitness = {}, const PrecisionFunction& precision = {});

/// Generalization of `net` against an estimated system variant set: the set is
/// turned into a synthetic event log (one trace per variant) whose variant log
/// is scored with conformance_scores.
ConformanceScores estimated_generalization(const PetriNet& net, const VariantSet& v_hat_s, std::uint64_t seed,
                                           const FitnessFunction& fitness = {},
                                           const PrecisionFunction& precision = {});

}  // namespace avatar
