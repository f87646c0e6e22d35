#include <cmath>
#include <numbers>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "avatar/error.hpp"
#include "avatar/metrics.hpp"

using namespace avatar;

namespace {

Variant numbered(const std::string& prefix, int i) { return {prefix, std::to_string(i)}; }

}  // namespace

TEST(SplitSystem, SizesAndMaximalVariant) {
  VariantSet v_s;
  for (int i = 0; i < 9; ++i) v_s.insert(numbered("v", i));
  v_s.insert({"long", "long", "long", "long"});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto t = split_system(v_s, 0.7, seed);
    EXPECT_EQ(t.lplus.size(), 7u);
    EXPECT_EQ(t.v_u.size(), 3u);
    EXPECT_TRUE(t.lplus.contains({"long", "long", "long", "long"})) << seed;
    for (const auto& v : t.v_u) EXPECT_FALSE(t.lplus.contains(v));
  }
  EXPECT_EQ(split_system(v_s, 0.7, 3).lplus.items(), split_system(v_s, 0.7, 3).lplus.items());
}

TEST(SplitSystem, FloorAndClamp) {
  VariantSet v_s;
  for (int i = 0; i < 5; ++i) v_s.insert(numbered("v", i));
  EXPECT_EQ(split_system(v_s, 0.7, 1).lplus.size(), 3u);   // floor(3.5)
  EXPECT_EQ(split_system(v_s, 0.01, 1).lplus.size(), 1u);  // clamped up
  EXPECT_EQ(split_system(v_s, 0.99, 1).lplus.size(), 4u);  // clamped down
  EXPECT_THROW(split_system({{"a"}}, 0.7, 1), InvalidInput);
  EXPECT_THROW(split_system(v_s, 1.0, 1), InvalidInput);
}

TEST(ComputeRates, ReferenceCountIdentities) {
  std::vector<Variant> all;
  for (int i = 0; i < 178; ++i) all.push_back(numbered("s", i));
  const VariantSet v_s(all.begin(), all.end());
  const UniqueVariantLog lplus(std::vector<Variant>(all.begin(), all.begin() + 124));
  const VariantSet v_u(all.begin() + 124, all.end());
  VariantSet v_hat(all.begin(), all.begin() + 97);
  v_hat.insert(all.begin() + 124, all.begin() + 147);
  for (int i = 0; i < 56; ++i) v_hat.insert(numbered("fake", i));
  ASSERT_EQ(v_hat.size(), 176u);

  const auto r = compute_rates(v_hat, v_s, lplus, v_u);
  EXPECT_NEAR(r.tp.value(), 0.6818, 0.005);
  EXPECT_NEAR(r.tp_s.value(), 0.6742, 0.005);
  EXPECT_NEAR(r.tp_o.value(), 0.7823, 0.005);
  EXPECT_NEAR(r.tp_u.value(), 0.4226, 0.005);
  EXPECT_NEAR(r.fp(), 0.3182, 0.005);
  EXPECT_EQ(r.tp.num, r.tp_s.num);
  EXPECT_EQ(r.tp_s.num, r.tp_o.num + r.tp_u.num);
  EXPECT_EQ(r.tp.den, 176u);
  EXPECT_EQ(r.tp_s.den, 178u);
}

TEST(ComputeRates, EmptyAndDisjointEstimates) {
  const VariantSet v_s{{"a"}, {"b"}};
  const UniqueVariantLog lplus({{"a"}});
  const VariantSet v_u{{"b"}};
  const auto empty = compute_rates({}, v_s, lplus, v_u);
  EXPECT_EQ(empty.tp.value(), 0.0);
  EXPECT_EQ(empty.fp(), 1.0);
  const auto disjoint = compute_rates({{"z"}}, v_s, lplus, v_u);
  EXPECT_EQ(disjoint.tp_s.value() + disjoint.tp_o.value() + disjoint.tp_u.value(), 0.0);
  EXPECT_EQ(disjoint.tp_e.den, 0u);
  EXPECT_EQ(disjoint.tp_e.value(), 0.0);
}

TEST(ComputeRates, MembershipOverloadMatchesSetVersion) {
  const VariantSet v_s{{"a"}, {"b"}, {"c"}};
  const UniqueVariantLog lplus({{"a"}, {"b"}});
  const VariantSet v_u{{"c"}};
  const VariantSet v_hat{{"a"}, {"c"}, {"x"}, {"y"}};
  const auto by_set = compute_rates(v_hat, v_s, lplus, v_u, UniqueVariantLog({{"b"}}));
  const auto by_fn = compute_rates(
      v_hat.size(), [&](const Variant& v) { return v_hat.count(v) != 0; }, v_s, lplus, v_u,
      UniqueVariantLog({{"b"}}));
  EXPECT_EQ(by_set.to_json(), by_fn.to_json());
}

TEST(ScoreS, ReferenceValues) {
  EXPECT_NEAR(score_s(0.5, 0.5), 0.7071, 1e-4);
  EXPECT_NEAR(score_s(1.0, 1.0), std::numbers::sqrt2, 1e-12);
  EXPECT_DOUBLE_EQ(score_s(0.0, 0.0), 0.0);
  EXPECT_THROW(score_s(1.1, 0.0), InvalidInput);
}

TEST(MetricsReport, JsonCarriesRatios) {
  const auto r = compute_rates({{"a"}}, {{"a"}, {"b"}}, UniqueVariantLog({{"a"}}), {{"b"}});
  const auto j = r.to_json();
  EXPECT_EQ(j.at("tp").at("num"), 1);
  EXPECT_EQ(j.at("tp_S").at("den"), 2);
  EXPECT_DOUBLE_EQ(j.at("s").get<double>(), r.s());
  EXPECT_DOUBLE_EQ(r.s(), score_s(1.0, 0.0));
}
