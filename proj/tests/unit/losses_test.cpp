#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "avatar/error.hpp"
#include "avatar/losses.hpp"
#include "oracles.hpp"

using namespace avatar;

TEST(Sigmoid, StableAtExtremes) {
  EXPECT_DOUBLE_EQ(sigmoid(0.0), 0.5);
  EXPECT_DOUBLE_EQ(sigmoid(-800.0), 0.0);
  EXPECT_DOUBLE_EQ(sigmoid(800.0), 1.0);
  EXPECT_NEAR(log_sigmoid(-800.0), -800.0, 1e-9);
  EXPECT_NEAR(log_sigmoid(800.0), 0.0, 1e-300);
  EXPECT_NEAR(log_sigmoid(1.0), std::log(sigmoid(1.0)), 1e-15);
}

TEST(PairwiseSum, MatchesNaiveOnSmallInputs) {
  const std::vector<double> v{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
  EXPECT_DOUBLE_EQ(pairwise_sum(v), 66.0);
  EXPECT_DOUBLE_EQ(mean(v), 6.0);
  EXPECT_THROW(mean(std::vector<double>{}), InvalidInput);
}

TEST(StandardLoss, LiteralForm) {
  EXPECT_DOUBLE_EQ(standard_d_loss({{0.8}, {0.3}}, StandardForm::literal), 0.5);
  EXPECT_DOUBLE_EQ(standard_d_loss({{1.0}, {0.0}}, StandardForm::literal), 0.0);
  EXPECT_THROW(standard_d_loss({{1.2}, {0.3}}, StandardForm::literal), InvalidInput);
  EXPECT_THROW(standard_d_loss({{}, {0.3}}, StandardForm::literal), InvalidInput);
  EXPECT_DOUBLE_EQ(standard_g_loss(std::vector<double>{0.25, 0.75}), 0.5);
  EXPECT_THROW(standard_g_loss(std::vector<double>{0.0}), InvalidInput);
}

TEST(StandardLoss, LogisticForm) {
  EXPECT_NEAR(standard_d_loss({{0.0}, {0.0}}, StandardForm::logistic), 2.0 * std::log(2.0), 1e-15);
  EXPECT_LT(standard_d_loss({{5.0}, {-5.0}}, StandardForm::logistic), 0.014);
}

TEST(RelativisticLoss, KnownValues) {
  EXPECT_NEAR(relativistic_d_loss({{1.0}, {0.0}}), 0.31326168751822286, 1e-15);
  EXPECT_NEAR(relativistic_g_loss({{1.0}, {0.0}}), 1.3132616875182228, 1e-15);
  // Shifting every score by a constant changes nothing.
  EXPECT_NEAR(relativistic_d_loss({{3.0, -1.0}, {2.5, 0.0}}), relativistic_d_loss({{13.0, 9.0}, {12.5, 10.0}}),
              1e-14);
  EXPECT_THROW(relativistic_d_loss({{1.0}, {0.0, 1.0}}), InvalidInput);
}

TEST(LossKind, NamesRoundTrip) {
  for (auto k : {LossKind::standard_d_literal, LossKind::standard_d_logistic, LossKind::standard_g_literal,
                 LossKind::relativistic_d, LossKind::relativistic_g}) {
    EXPECT_EQ(loss_kind_from_string(to_string(k)), k);
  }
  EXPECT_THROW(loss_kind_from_string("hinge"), InvalidInput);
}

TEST(LinearLoss, DimensionMismatch) {
  LinearModel m{{1.0, 2.0}, 0.0};
  EXPECT_THROW(linear_loss(LossKind::relativistic_d, m, {{1.0}}, {{1.0}}), InvalidInput);
  EXPECT_THROW(linear_loss(LossKind::relativistic_d, m, {{1.0, 2.0}}, {{1.0, 2.0}, {0.0, 0.0}}), InvalidInput);
}

class GradientCheck : public ::testing::TestWithParam<LossKind> {};

TEST_P(GradientCheck, MatchesCentralDifferences) {
  std::mt19937_64 gen(17);
  std::normal_distribution<double> n01(0.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t dim = 1 + rep % 5;
    const std::size_t rows = 1 + rep % 4;
    LinearModel m;
    for (std::size_t j = 0; j < dim; ++j) m.weights.push_back(0.5 * n01(gen));
    m.bias = 0.5 * n01(gen);
    FeatureRows pos(rows), neg(rows);
    for (auto* set : {&pos, &neg}) {
      for (auto& r : *set) {
        for (std::size_t j = 0; j < dim; ++j) r.push_back(n01(gen));
      }
    }
    const auto analytic = loss_gradient(GetParam(), m, pos, neg);
    const auto numeric = oracle::numeric_gradient(GetParam(), m, pos, neg);
    EXPECT_LT(oracle::relative_error(analytic, numeric), 1e-5) << to_string(GetParam()) << " rep " << rep;
  }
}

INSTANTIATE_TEST_SUITE_P(AllLosses, GradientCheck,
                         ::testing::Values(LossKind::standard_d_literal, LossKind::standard_d_logistic,
                                           LossKind::standard_g_literal, LossKind::relativistic_d,
                                           LossKind::relativistic_g),
                         [](const auto& info) { return std::string(to_string(info.param)); });
