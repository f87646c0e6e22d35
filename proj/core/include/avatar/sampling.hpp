#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

#include <nlohmann/json_fwd.hpp>

#include "avatar/log.hpp"
#include "avatar/random.hpp"

namespace avatar {

// Draws one variant from the generative model.
using GeneratorFn = std::function<Variant(Rng&)>;
// D_p: probability in (0,1) that a variant is real rather than generated.
using ScorerFn = std::function<double(const Variant&)>;

struct SampleResult {
  VariantSet v_hat_s;
  VariantSet v_hat_u;  // v_hat_s minus L+
  std::size_t draw_count = 0;
  // MH only.
  std::size_t chains = 0;
  double acceptance_rate = 0.0;
  bool truncated = false;  // stopped at max_chains before patience ran out

  nlohmann::json to_json() const;
};

struct NaiveOptions {
  std::size_t k = 10'000;
  bool union_observed = false;  // also add L+ to v_hat_s
};

/// k independent draws; v_hat_s is the set of distinct draws.
SampleResult naive_sample(const GeneratorFn& gen, const UniqueVariantLog& lplus, const NaiveOptions& options,
                          Rng& rng);

/// min(1, (1/p_current - 1) / (1/p_proposal - 1)). Both arguments must lie in
/// (0,1); throws InvalidInput otherwise.
double mh_acceptance(double p_current, double p_proposal);

struct ChainResult {
  Variant output;
  std::size_t accepted = 0;
  std::size_t draws = 0;
};

/// One independent-proposal chain of kappa steps started at `init`. Returns
/// the last accepted state, or in strict mode the fresh proposal drawn after
/// the final step.
ChainResult run_mh_chain(const GeneratorFn& gen, const ScorerFn& d_p, const Variant& init, std::size_t kappa,
                         bool strict_pseudocode, Rng& rng);

struct MhOptions {
  std::size_t kappa = 500;
  std::size_t patience = 1'000;
  bool strict_pseudocode = false;
  std::size_t max_chains = 200'000;
  std::size_t jobs = 1;
};

/// Runs chains until `patience` consecutive chains add nothing new. Chain c
/// draws from rng.substream(c) and the patience rule is applied in chain
/// index order, so the result does not depend on options.jobs. `d_p` must be
/// safe to call concurrently when jobs > 1.
SampleResult mh_sample(const GeneratorFn& gen, const ScorerFn& d_p, const UniqueVariantLog& lplus,
                       const UniqueVariantLog& lplus_e, const MhOptions& options, const Rng& rng);

}  // namespace avatar
