#include <array>
#include <cmath>
#include <map>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "avatar/error.hpp"
#include "avatar/sampling.hpp"

using namespace avatar;

namespace {

const std::array<Variant, 3> kToy{Variant{"a"}, Variant{"b"}, Variant{"c"}};

GeneratorFn categorical(std::array<double, 3> q) {
  return [q](Rng& rng) {
    const double u = rng.uniform();
    return u < q[0] ? kToy[0] : u < q[0] + q[1] ? kToy[1] : kToy[2];
  };
}

ScorerFn oracle_scorer(std::array<double, 3> p, std::array<double, 3> q) {
  return [p, q](const Variant& v) {
    for (std::size_t i = 0; i < 3; ++i) {
      if (v == kToy[i]) return p[i] / (p[i] + q[i]);
    }
    return 0.5;
  };
}

}  // namespace

TEST(MhAcceptance, KnownValues) {
  EXPECT_DOUBLE_EQ(mh_acceptance(0.8, 0.9), 1.0);
  EXPECT_NEAR(mh_acceptance(0.9, 0.8), (1.0 / 0.9 - 1.0) / (1.0 / 0.8 - 1.0), 1e-15);
  EXPECT_NEAR(mh_acceptance(0.9, 0.8), 0.4444, 1e-4);
  EXPECT_DOUBLE_EQ(mh_acceptance(0.5, 0.5), 1.0);
  EXPECT_THROW(mh_acceptance(0.0, 0.5), InvalidInput);
  EXPECT_THROW(mh_acceptance(0.5, 1.0), InvalidInput);
}

TEST(NaiveSample, DistinctDrawsWithoutUnion) {
  const UniqueVariantLog lplus({kToy[0], Variant{"z"}});
  Rng rng(2);
  const auto r = naive_sample(categorical({0.5, 0.5, 0.0}), lplus, {100, false}, rng);
  EXPECT_EQ(r.v_hat_s, (VariantSet{kToy[0], kToy[1]}));
  EXPECT_EQ(r.v_hat_u, (VariantSet{kToy[1]}));
  EXPECT_EQ(r.draw_count, 100u);
  Rng rng2(2);
  const auto u = naive_sample(categorical({0.5, 0.5, 0.0}), lplus, {100, true}, rng2);
  EXPECT_TRUE(u.v_hat_s.count(Variant{"z"}));
  EXPECT_EQ(u.v_hat_u, (VariantSet{kToy[1]}));
  EXPECT_THROW(naive_sample(categorical({1, 0, 0}), lplus, {0, false}, rng), InvalidInput);
}

TEST(MhChain, ConstantScorerFollowsGenerator) {
  Rng rng(4);
  const auto r = run_mh_chain(categorical({0.0, 1.0, 0.0}), [](const Variant&) { return 0.5; }, kToy[0], 5, false,
                              rng);
  EXPECT_EQ(r.output, kToy[1]);
  EXPECT_EQ(r.accepted, 5u);
  EXPECT_EQ(r.draws, 5u);
}

TEST(MhChain, StrictModeReturnsTheExtraProposal) {
  Rng rng(4);
  // The scorer rejects b after starting at a, but strict mode still emits the last draw.
  const auto r = run_mh_chain(categorical({0.0, 1.0, 0.0}),
                              [](const Variant& v) { return v == kToy[0] ? 0.999 : 0.001; }, kToy[0], 3, true, rng);
  EXPECT_EQ(r.output, kToy[1]);
  EXPECT_EQ(r.draws, 4u);
  EXPECT_EQ(r.accepted, 0u);
}

TEST(MhChain, RecoversTargetWithOracleDiscriminator) {
  const std::array<double, 3> p{0.6, 0.3, 0.1}, q{0.2, 0.3, 0.5};
  const auto gen = categorical(q);
  const auto d = oracle_scorer(p, q);
  std::array<double, 3> freq{};
  const int chains = 600;
  Rng root(8);
  for (int c = 0; c < chains; ++c) {
    Rng rng = root.substream(static_cast<std::uint64_t>(c));
    const auto out = run_mh_chain(gen, d, kToy[c % 3], 100, false, rng).output;
    for (std::size_t i = 0; i < 3; ++i) freq[i] += out == kToy[i] ? 1.0 / chains : 0.0;
  }
  double tv = 0.0;
  for (std::size_t i = 0; i < 3; ++i) tv += 0.5 * std::abs(freq[i] - p[i]);
  EXPECT_LT(tv, 0.07);
}

TEST(MhSample, StopsOnPatienceAndIsIndependentOfJobs) {
  const std::array<double, 3> p{0.6, 0.3, 0.1}, q{0.2, 0.3, 0.5};
  const UniqueVariantLog lplus({kToy[0]});
  MhOptions opt;
  opt.kappa = 20;
  opt.patience = 50;
  const Rng rng(12);
  const auto one = mh_sample(categorical(q), oracle_scorer(p, q), lplus, lplus, opt, rng);
  opt.jobs = 4;
  const auto four = mh_sample(categorical(q), oracle_scorer(p, q), lplus, lplus, opt, rng);
  EXPECT_EQ(one.v_hat_s, four.v_hat_s);
  EXPECT_EQ(one.chains, four.chains);
  EXPECT_EQ(one.draw_count, four.draw_count);
  EXPECT_EQ(one.to_json(), four.to_json());
  // Chains that end where they started (a) never count as novel.
  EXPECT_EQ(one.v_hat_s, (VariantSet{kToy[1], kToy[2]}));
  EXPECT_FALSE(one.truncated);
  EXPECT_GT(one.acceptance_rate, 0.0);
}

TEST(MhSample, TruncatesAtMaxChains) {
  std::size_t counter = 0;
  GeneratorFn fresh = [&counter](Rng&) { return Variant{"v" + std::to_string(counter++)}; };
  MhOptions opt;
  opt.kappa = 1;
  opt.patience = 10;
  opt.max_chains = 100;
  const auto r = mh_sample(fresh, [](const Variant&) { return 0.5; }, UniqueVariantLog({kToy[0]}),
                           UniqueVariantLog({kToy[0]}), opt, Rng(1));
  EXPECT_TRUE(r.truncated);
  EXPECT_EQ(r.chains, 100u);
  EXPECT_EQ(r.v_hat_s.size(), 100u);
}

TEST(MhSample, RejectsBadOptions) {
  MhOptions opt;
  EXPECT_THROW(mh_sample(categorical({1, 0, 0}), oracle_scorer({1, 1, 1}, {1, 1, 1}), {}, {}, opt, Rng(1)),
               InvalidInput);
  opt.kappa = 0;
  EXPECT_THROW(mh_sample(categorical({1, 0, 0}), oracle_scorer({1, 1, 1}, {1, 1, 1}), {}, UniqueVariantLog({kToy[0]}),
                         opt, Rng(1)),
               InvalidInput);
}
