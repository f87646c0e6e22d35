#pragma once

#include <span>
#include <string_view>
#include <vector>

namespace avatar {

/// Discriminator outputs on one batch: scores for observed samples (x_r) and
/// for generated samples (x_g). Depending on the loss these are probabilities
/// D_p in (0,1) or raw pre-sigmoid scores D_r.
struct ScoredBatch {
  std::vector<double> real_scores;
  std::vector<double> fake_scores;
};

enum class StandardForm { literal, logistic };

enum class LossKind {
  standard_d_literal,   // E[1 - D(x_r)] + E[D(x_g)]
  standard_d_logistic,  // binary cross-entropy, the training default
  standard_g_literal,   // E[1 - D(G(z))]
  relativistic_d,       // -E log sigmoid(D_r(x_r) - D_r(x_g))
  relativistic_g,       // -E log sigmoid(D_r(x_g) - D_r(x_r))
};

std::string_view to_string(LossKind kind);
LossKind loss_kind_from_string(std::string_view name);

double sigmoid(double x) noexcept;
// log(sigmoid(x)) without overflow for large |x|.
double log_sigmoid(double x) noexcept;

// Pairwise (cascade) summation.
double pairwise_sum(std::span<const double> values) noexcept;
double mean(std::span<const double> values);

double standard_d_loss(const ScoredBatch& batch, StandardForm form);
double standard_g_loss(std::span<const double> fake_probabilities);
double relativistic_d_loss(const ScoredBatch& batch);
double relativistic_g_loss(const ScoredBatch& batch);

/// Linear score w·x + b. The discriminators in genmodel wrap one of these
/// behind a feature map.
struct LinearModel {
  std::vector<double> weights;
  double bias = 0.0;

  double raw(std::span<const double> features) const;
};

struct Gradient {
  std::vector<double> weights;
  double bias = 0.0;
};

using FeatureRows = std::vector<std::vector<double>>;

/// Loss of `kind` for a linear discriminator evaluated on feature rows of
/// observed (positives) and generated (negatives) samples. Probabilities are
/// the unclamped sigmoid of the raw score.
double linear_loss(LossKind kind, const LinearModel& model, const FeatureRows& positives,
                   const FeatureRows& negatives);

/// Analytic gradient of linear_loss with respect to the weights and bias.
/// Relativistic losses pair rows index-wise and need equal batch sizes.
Gradient loss_gradient(LossKind kind, const LinearModel& model, const FeatureRows& positives,
                       const FeatureRows& negatives);

}  // namespace avatar
