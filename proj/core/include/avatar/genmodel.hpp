#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "avatar/log.hpp"
#include "avatar/losses.hpp"
#include "avatar/random.hpp"

namespace avatar {

/// Order-m n-gram model over an activity alphabet plus an END symbol.
///
/// Counts are kept for every context length 0..m-1. The next-symbol
/// distribution uses the longest context seen in training and applies additive
/// smoothing over the |A|+1 outcomes:
///
///     P(x | ctx) = (count(ctx, x) + λ) / (count(ctx) + λ(|A| + 1))
///
/// END is never drawn as the first symbol (variants are non-empty) and
/// generation stops once max_len labels have been emitted.
class NGramGenerator {
 public:
  NGramGenerator() = default;

  static NGramGenerator fit_mle(const UniqueVariantLog& train, int order, double smoothing);

  int order() const noexcept { return order_; }
  double smoothing() const noexcept { return smoothing_; }
  std::size_t max_len() const noexcept { return max_len_; }
  const std::vector<Label>& alphabet() const noexcept { return alphabet_; }
  std::size_t end_symbol() const noexcept { return alphabet_.size(); }

  /// Distribution over alphabet ids plus END (last entry) after `history`
  /// (alphabet ids of the labels emitted so far).
  std::vector<double> next_distribution(const std::vector<std::size_t>& history) const;

  /// Probability that sample(1.0) returns exactly v. Zero for variants with
  /// unknown labels or longer than max_len.
  double probability(const Variant& v) const;

  /// Temperature-scaled draw: each step samples from p^(1/τ) renormalized;
  /// τ below 1e-6 is treated as greedy argmax (lowest id on ties).
  Variant sample(double temperature, Rng& rng) const;

  /// Adds `weight` to every transition count along v (including END when v is
  /// shorter than max_len). Labels outside the alphabet are ignored.
  void add_counts(const Variant& v, double weight);

  nlohmann::json to_json() const;
  static NGramGenerator from_json(const nlohmann::json& doc);

  bool operator==(const NGramGenerator&) const = default;

 private:
  using Context = std::vector<std::size_t>;

  std::vector<std::size_t> encode(const Variant& v, bool& known) const;
  Context context_of(const std::vector<std::size_t>& history, std::size_t length) const;
  void add_sequence(const std::vector<std::size_t>& ids, double weight);

  int order_ = 1;
  double smoothing_ = 0.0;
  std::size_t max_len_ = 0;
  std::vector<Label> alphabet_;
  std::map<Label, std::size_t> ids_;
  // tables_[k] maps a context of length k to counts over |A|+1 outcomes.
  std::vector<std::map<Context, std::vector<double>>> tables_;
};

inline NGramGenerator fit_mle(const UniqueVariantLog& train, int order, double smoothing) {
  return NGramGenerator::fit_mle(train, order, smoothing);
}

inline Variant sample_variant(const NGramGenerator& gen, double temperature, Rng& rng) {
  return gen.sample(temperature, rng);
}

/// Feature map φ over variants: counts of every 1-, 2- and 3-gram seen in the
/// reference variants (2- and 3-grams include the ^ and $ boundary markers),
/// one out-of-vocabulary count per n, and length / max_len.
class FeatureMap {
 public:
  FeatureMap() = default;
  explicit FeatureMap(const std::vector<Variant>& reference);

  std::size_t dimension() const noexcept { return vocabulary_.size() + 4; }
  std::vector<double> features(const Variant& v) const;

  nlohmann::json to_json() const;
  static FeatureMap from_json(const nlohmann::json& doc);

 private:
  std::map<std::string, std::size_t> vocabulary_;
  std::size_t max_len_ = 1;
};

inline constexpr double kScoreEpsilon = 1e-6;

/// Linear discriminator over φ. score() is the clamped sigmoid probability
/// (D_p semantics); raw() is the pre-sigmoid value (D_r semantics).
class FeatureScorer {
 public:
  FeatureScorer() = default;
  explicit FeatureScorer(FeatureMap map);

  double raw(const Variant& v) const { return model_.raw(map_.features(v)); }
  double score(const Variant& v) const;
  std::vector<double> features(const Variant& v) const { return map_.features(v); }

  const FeatureMap& feature_map() const noexcept { return map_; }
  const LinearModel& model() const noexcept { return model_; }
  LinearModel& model() noexcept { return model_; }

  nlohmann::json to_json() const;
  static FeatureScorer from_json(const nlohmann::json& doc);

 private:
  FeatureMap map_;
  LinearModel model_;
};

enum class DiscriminatorLoss { standard, relativistic };

struct TrainConfig {
  int order = 3;
  double smoothing = 0.1;
  double temperature = 1.0;
  double train_fraction = 0.9;
  // discriminator optimisation
  std::size_t discriminator_steps = 300;
  std::size_t batch_size = 64;
  double learning_rate = 0.1;
  double l2 = 1e-3;
  // adversarial refinement
  std::size_t rounds = 5;
  std::size_t round_samples = 2000;
  double threshold = 0.5;
  double reinforce_weight = 0.5;
  // model selection
  std::size_t eval_interval = 1;
  std::size_t selection_samples = 10'000;
  std::uint64_t seed = 0;

  void validate() const;
  nlohmann::json to_json() const;
  static TrainConfig from_json(const nlohmann::json& doc);
};

struct DiscriminatorReport {
  double initial_heldout_loss = 0.0;
  double final_heldout_loss = 0.0;
  std::size_t steps = 0;
};

/// Mini-batch gradient descent on the selected loss (logistic cross-entropy for
/// standard, paired relativistic loss otherwise), starting from `d`. A tenth of
/// each class is held out to monitor the loss. Throws TrainingError when the
/// loss becomes non-finite.
FeatureScorer train_discriminator(FeatureScorer d, const std::vector<Variant>& positives,
                                  const std::vector<Variant>& negatives, const TrainConfig& cfg,
                                  DiscriminatorLoss loss, Rng& rng, DiscriminatorReport* report = nullptr);

using RoundObserver = std::function<void(std::size_t round, const NGramGenerator&, const FeatureScorer&)>;

/// For cfg.rounds rounds: draw cfg.round_samples variants, retrain d_p against
/// them, then add score-weighted counts (weight w·score) of every sample whose
/// score strictly exceeds cfg.threshold.
NGramGenerator refine_generator(NGramGenerator gen, FeatureScorer& d_p, const std::vector<Variant>& positives,
                                const TrainConfig& cfg, Rng& rng, const RoundObserver& observer = {});

struct SelectionCandidate {
  double tp_e = 0.0;
  std::size_t sampled_count = 0;
};

/// Index of the best candidate: highest tp_e, then smallest sampled count,
/// then earliest. Throws InvalidInput on an empty list.
std::size_t select_model(const std::vector<SelectionCandidate>& candidates);

struct SnapshotSummary {
  std::size_t round = 0;
  double tp_e = 0.0;
  std::size_t sampled_count = 0;
};

/// Generator with its two discriminators and the data split it was trained on.
struct TrainedModel {
  TrainConfig config;
  NGramGenerator generator;
  FeatureScorer d_p;
  FeatureScorer d_r;
  UniqueVariantLog train;
  UniqueVariantLog holdout;
  std::vector<SnapshotSummary> snapshots;
  std::size_t selected = 0;

  nlohmann::json to_json() const;
  static TrainedModel from_json(const nlohmann::json& doc);
};

/// Full training schedule: holdout split, maximum-likelihood pretraining,
/// refinement with snapshots every eval_interval rounds, selection by tp_e on
/// the holdout, then D_p and D_r trained against the selected generator.
TrainedModel train_model(const UniqueVariantLog& lplus, const TrainConfig& cfg);

}  // namespace avatar
