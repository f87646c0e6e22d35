#include "avatar/losses.hpp"

#include <cmath>
#include <string>

#include "avatar/error.hpp"

namespace avatar {

std::string_view to_string(LossKind kind) {
  switch (kind) {
    case LossKind::standard_d_literal: return "standard_d_literal";
    case LossKind::standard_d_logistic: return "standard_d_logistic";
    case LossKind::standard_g_literal: return "standard_g_literal";
    case LossKind::relativistic_d: return "relativistic_d";
    case LossKind::relativistic_g: return "relativistic_g";
  }
  return "unknown";
}

LossKind loss_kind_from_string(std::string_view name) {
  for (auto k : {LossKind::standard_d_literal, LossKind::standard_d_logistic, LossKind::standard_g_literal,
                 LossKind::relativistic_d, LossKind::relativistic_g}) {
    if (to_string(k) == name) return k;
  }
  throw InvalidInput("unknown loss '" + std::string(name) + "'");
}

double sigmoid(double x) noexcept {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double log_sigmoid(double x) noexcept {
  if (x >= 0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

double pairwise_sum(std::span<const double> values) noexcept {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double mean(std::span<const double> values) {
  if (values.empty()) throw InvalidInput("mean of an empty batch");
  return pairwise_sum(values) / static_cast<double>(values.size());
}

namespace {

void require_probabilities(std::span<const double> p, bool allow_one) {
  for (double x : p) {
    if (!(x > 0.0 && (x < 1.0 || (allow_one && x == 1.0)))) {
      throw InvalidInput("literal loss expects probabilities in (0,1), got " + std::to_string(x));
    }
  }
}

void require_pairs(const ScoredBatch& batch) {
  if (batch.real_scores.empty() || batch.fake_scores.empty()) {
    throw InvalidInput("relativistic loss: empty batch");
  }
  if (batch.real_scores.size() != batch.fake_scores.size()) {
    throw InvalidInput("relativistic loss: real and fake batches differ in length");
  }
}

double relativistic(std::span<const double> first, std::span<const double> second) {
  std::vector<double> terms(first.size());
  for (std::size_t i = 0; i < first.size(); ++i) terms[i] = -log_sigmoid(first[i] - second[i]);
  return mean(terms);
}

}  // namespace

double standard_d_loss(const ScoredBatch& batch, StandardForm form) {
  if (batch.real_scores.empty() || batch.fake_scores.empty()) {
    throw InvalidInput("standard_d_loss: empty batch");
  }
  std::vector<double> real(batch.real_scores.size());
  std::vector<double> fake(batch.fake_scores.size());
  if (form == StandardForm::literal) {
    // Probabilities at the box edges are accepted here: the perfect
    // discriminator (1 on reals, 0 on fakes) has loss 0.
    for (double x : batch.real_scores) {
      if (!(x >= 0.0 && x <= 1.0)) throw InvalidInput("standard_d_loss: probability out of range");
    }
    for (double x : batch.fake_scores) {
      if (!(x >= 0.0 && x <= 1.0)) throw InvalidInput("standard_d_loss: probability out of range");
    }
    for (std::size_t i = 0; i < real.size(); ++i) real[i] = 1.0 - batch.real_scores[i];
    return mean(real) + mean(batch.fake_scores);
  }
  for (std::size_t i = 0; i < real.size(); ++i) real[i] = -log_sigmoid(batch.real_scores[i]);
  for (std::size_t i = 0; i < fake.size(); ++i) fake[i] = -log_sigmoid(-batch.fake_scores[i]);
  return mean(real) + mean(fake);
}

double standard_g_loss(std::span<const double> fake_probabilities) {
  if (fake_probabilities.empty()) throw InvalidInput("standard_g_loss: empty batch");
  require_probabilities(fake_probabilities, true);
  std::vector<double> terms(fake_probabilities.size());
  for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = 1.0 - fake_probabilities[i];
  return mean(terms);
}

double relativistic_d_loss(const ScoredBatch& batch) {
  require_pairs(batch);
  return relativistic(batch.real_scores, batch.fake_scores);
}

double relativistic_g_loss(const ScoredBatch& batch) {
  require_pairs(batch);
  return relativistic(batch.fake_scores, batch.real_scores);
}

double LinearModel::raw(std::span<const double> features) const {
  if (features.size() != weights.size()) {
    throw InvalidInput("linear model: feature dimension " + std::to_string(features.size()) +
                       " does not match weight dimension " + std::to_string(weights.size()));
  }
  double s = bias;
  for (std::size_t i = 0; i < weights.size(); ++i) s += weights[i] * features[i];
  return s;
}

namespace {

std::vector<double> raw_scores(const LinearModel& model, const FeatureRows& rows) {
  std::vector<double> out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) out[i] = model.raw(rows[i]);
  return out;
}

std::vector<double> probabilities(const std::vector<double>& raw) {
  std::vector<double> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) out[i] = sigmoid(raw[i]);
  return out;
}

// grad += scale * row, with the bias treated as a constant-1 feature.
void accumulate(Gradient& grad, const std::vector<double>& row, double scale, double bias_scale) {
  for (std::size_t j = 0; j < row.size(); ++j) grad.weights[j] += scale * row[j];
  grad.bias += bias_scale * scale;
}

void check_batches(LossKind kind, const LinearModel& model, const FeatureRows& positives,
                   const FeatureRows& negatives) {
  const bool needs_pos = kind != LossKind::standard_g_literal;
  if ((needs_pos && positives.empty()) || negatives.empty()) throw InvalidInput("loss: empty batch");
  if ((kind == LossKind::relativistic_d || kind == LossKind::relativistic_g) &&
      positives.size() != negatives.size()) {
    throw InvalidInput("relativistic loss: real and fake batches differ in length");
  }
  for (const auto* rows : {&positives, &negatives}) {
    for (const auto& r : *rows) {
      if (r.size() != model.weights.size()) throw InvalidInput("loss: feature dimension mismatch");
    }
  }
}

}  // namespace

double linear_loss(LossKind kind, const LinearModel& model, const FeatureRows& positives,
                   const FeatureRows& negatives) {
  check_batches(kind, model, positives, negatives);
  const auto neg = raw_scores(model, negatives);
  switch (kind) {
    case LossKind::standard_d_literal:
      return standard_d_loss({probabilities(raw_scores(model, positives)), probabilities(neg)},
                             StandardForm::literal);
    case LossKind::standard_d_logistic:
      return standard_d_loss({raw_scores(model, positives), neg}, StandardForm::logistic);
    case LossKind::standard_g_literal: {
      auto p = probabilities(neg);
      std::vector<double> terms(p.size());
      for (std::size_t i = 0; i < p.size(); ++i) terms[i] = 1.0 - p[i];
      return mean(terms);
    }
    case LossKind::relativistic_d:
      return relativistic_d_loss({raw_scores(model, positives), neg});
    case LossKind::relativistic_g:
      return relativistic_g_loss({raw_scores(model, positives), neg});
  }
  throw InvalidInput("unknown loss kind");
}

Gradient loss_gradient(LossKind kind, const LinearModel& model, const FeatureRows& positives,
                       const FeatureRows& negatives) {
  check_batches(kind, model, positives, negatives);
  Gradient grad{std::vector<double>(model.weights.size(), 0.0), 0.0};
  const auto neg = raw_scores(model, negatives);
  const double inv_neg = 1.0 / static_cast<double>(negatives.size());

  switch (kind) {
    case LossKind::standard_d_literal: {
      const auto pos = raw_scores(model, positives);
      const double inv_pos = 1.0 / static_cast<double>(positives.size());
      for (std::size_t i = 0; i < pos.size(); ++i) {
        const double s = sigmoid(pos[i]);
        accumulate(grad, positives[i], -s * (1.0 - s) * inv_pos, 1.0);
      }
      for (std::size_t i = 0; i < neg.size(); ++i) {
        const double s = sigmoid(neg[i]);
        accumulate(grad, negatives[i], s * (1.0 - s) * inv_neg, 1.0);
      }
      break;
    }
    case LossKind::standard_d_logistic: {
      const auto pos = raw_scores(model, positives);
      const double inv_pos = 1.0 / static_cast<double>(positives.size());
      for (std::size_t i = 0; i < pos.size(); ++i) {
        accumulate(grad, positives[i], -(1.0 - sigmoid(pos[i])) * inv_pos, 1.0);
      }
      for (std::size_t i = 0; i < neg.size(); ++i) {
        accumulate(grad, negatives[i], sigmoid(neg[i]) * inv_neg, 1.0);
      }
      break;
    }
    case LossKind::standard_g_literal: {
      for (std::size_t i = 0; i < neg.size(); ++i) {
        const double s = sigmoid(neg[i]);
        accumulate(grad, negatives[i], -s * (1.0 - s) * inv_neg, 1.0);
      }
      break;
    }
    case LossKind::relativistic_d:
    case LossKind::relativistic_g: {
      // The bias cancels in the score difference.
      const auto pos = raw_scores(model, positives);
      const double sign = kind == LossKind::relativistic_d ? 1.0 : -1.0;
      for (std::size_t i = 0; i < pos.size(); ++i) {
        const double diff = sign * (pos[i] - neg[i]);
        const double coeff = -(1.0 - sigmoid(diff)) * sign * inv_neg;
        accumulate(grad, positives[i], coeff, 0.0);
        accumulate(grad, negatives[i], -coeff, 0.0);
      }
      break;
    }
  }
  return grad;
}

}  // namespace avatar
