#include <gtest/gtest.h>

#include "avatar/error.hpp"
#include "avatar/petri.hpp"
#include "avatar/systems.hpp"

using namespace avatar;

TEST(PlayoutLanguage, FlowerCountsAreGeometric) {
  const auto flower = flower_model({"a", "b", "c"});
  PlayoutLanguage lang(flower, 3);
  EXPECT_EQ(lang.count(1), 3u);
  EXPECT_EQ(lang.count(4), 3u + 9u + 27u + 81u);
  EXPECT_TRUE(lang.accepts({"c", "a", "c", "c", "b"}));
  EXPECT_FALSE(lang.accepts({"c", "d"}));
  EXPECT_FALSE(lang.accepts({}));
}

TEST(PlayoutLanguage, OverflowIsReported) {
  const auto flower = flower_model({"a", "b", "c", "d"});
  PlayoutLanguage lang(flower, 3);
  EXPECT_THROW(lang.count(40), InvalidInput);
}

TEST(PlayoutLanguage, AgreesWithPlayoutOnGeneratedSystems) {
  int checked = 0;
  for (std::uint64_t seed = 0; checked < 15 && seed < 200; ++seed) {
    SystemSpec spec;
    spec.seed = seed;
    spec.depth = 3;
    spec.alphabet_budget = 12;
    spec.loop_bound = 1 + seed % 2;
    spec.silent_skip = seed % 3 == 0;
    spec.duplicate_label = seed % 4 == 1;
    PetriNet net = [&]() -> PetriNet {
      try {
        return build_system(spec);
      } catch (const BuildError&) {
        return flower_model({"z"});
      }
    }();
    if (net.place_count() == 1) continue;
    const std::size_t max_len = 7;
    PlayoutResult playout;
    try {
      playout = playout_enumerate(net, {max_len, 3, 2'000'000});
    } catch (const BudgetExceeded&) {
      continue;
    }
    PlayoutLanguage lang(net, 3);
    EXPECT_EQ(lang.count(max_len), playout.variants.size()) << "seed " << seed;
    for (const auto& v : playout.variants) ASSERT_TRUE(lang.accepts(v)) << v.str();
    // A few words one label away from accepted ones.
    for (const auto& v : playout.variants) {
      Variant w = v;
      w.labels.push_back(v[0]);
      if (w.size() <= max_len) EXPECT_EQ(lang.accepts(w), playout.variants.count(w) == 1) << w.str();
    }
    ++checked;
  }
  EXPECT_GE(checked, 10);
}

TEST(PlayoutLanguage, PermissiveNetsAcceptDeadlocks) {
  const PetriNet net({"p", "q"}, {{"t", "a"}, {"u", "b"}}, {{"p", "t"}, {"t", "q"}, {"q", "u"}, {"u", "q"}},
                     {{"p", 1}}, {});
  PlayoutLanguage lang(net, 3);
  // q never deadlocks: u is always enabled.
  EXPECT_EQ(lang.count(4), 0u);
  EXPECT_EQ(playout_enumerate(net, {4, 3, 1000}).variants.size(), 0u);
}
