#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "avatar/error.hpp"
#include "avatar/experiment.hpp"

using namespace avatar;

namespace {

ExperimentConfig small_config() {
  auto cfg = ExperimentConfig::from_json({
      {"seed", 5},
      {"desk_systems", {{"count", 3}, {"min_variants", 10}, {"max_variants", 60}}},
      {"train", {{"rounds", 1}, {"round_samples", 200}, {"selection_samples", 500}, {"discriminator_steps", 40}}},
      {"samplers",
       {{{"name", "naive"}, {"mode", "naive"}, {"k", 500}},
        {{"name", "mh"}, {"mode", "mh"}, {"kappa", 20}, {"patience", 30}, {"max_chains", 2000}}}},
  });
  return cfg;
}

}  // namespace

TEST(ExperimentConfig, DefaultsRoundTrip) {
  const auto cfg = ExperimentConfig::defaults();
  EXPECT_EQ(cfg.samplers.size(), 2u);
  const auto back = ExperimentConfig::from_json(cfg.to_json());
  EXPECT_EQ(back.to_json(), cfg.to_json());
}

TEST(ExperimentConfig, PartialOverridesKeepDefaults) {
  const auto cfg = ExperimentConfig::from_json({{"train", {{"rounds", 2}}}, {"desk_systems", {{"shape", {{"weights", {{"loop", 0.5}}}}}}}});
  const auto d = ExperimentConfig::defaults();
  EXPECT_EQ(cfg.train.rounds, 2u);
  EXPECT_EQ(cfg.train.smoothing, d.train.smoothing);
  EXPECT_EQ(cfg.desk.shape.weight_loop, 0.5);
  EXPECT_EQ(cfg.desk.shape.weight_and, d.desk.shape.weight_and);
  EXPECT_EQ(cfg.desk.shape.depth, d.desk.shape.depth);
}

TEST(ExperimentConfig, RejectsInvalidSettings) {
  EXPECT_THROW(ExperimentConfig::from_json({{"split_ratio", 1.5}}), InvalidInput);
  EXPECT_THROW(ExperimentConfig::from_json({{"baselines", {"petrify"}}}), InvalidInput);
  EXPECT_THROW(ExperimentConfig::from_json({{"samplers", {{{"mode", "gibbs"}}}}}), InvalidInput);
  EXPECT_THROW(ExperimentConfig::from_json({{"samplers", {{{"name", "x"}}, {{"name", "x"}}}}}), InvalidInput);
  EXPECT_THROW(ExperimentConfig::from_json({{"seed", "one"}}), InvalidInput);
}

TEST(DeskSystems, RespectRanges) {
  const auto cfg = small_config();
  const auto systems = generate_desk_systems(cfg);
  ASSERT_EQ(systems.size(), 3u);
  for (const auto& s : systems) {
    ASSERT_TRUE(s.spec);
    const auto net = build_system(*s.spec);
    const auto v = playout_enumerate(net, {system_length_bound(net, *s.spec), 3, 2'000'000}).variants;
    EXPECT_GE(v.size(), 10u);
    EXPECT_LE(v.size(), 60u);
  }
  auto impossible = cfg;
  impossible.desk.min_variants = 1'000'000;
  impossible.desk.max_variants = 2'000'000;
  impossible.desk.max_attempts = 20;
  EXPECT_THROW(generate_desk_systems(impossible), InvalidInput);
}

TEST(RunExperiment, ReportShapeAndDeterminism) {
  const auto cfg = small_config();
  const auto a = run_experiment(cfg, 1);
  const auto b = run_experiment(cfg, 3);
  EXPECT_EQ(a.dump(), b.dump());
  EXPECT_EQ(a.at("kind"), "avatar-experiment");
  ASSERT_EQ(a.at("systems").size(), 3u);
  const auto& sys = a.at("systems")[0];
  EXPECT_EQ(sys.at("samplers").size(), 2u);
  EXPECT_EQ(sys.at("nets").size(), 3u);
  const auto& profile = sys.at("profile");
  EXPECT_EQ(profile.at("lplus").get<std::size_t>() + profile.at("v_u").get<std::size_t>(),
            profile.at("v_s").get<std::size_t>());
  for (const auto& net : sys.at("nets")) {
    if (net.at("name") == "trace") {
      EXPECT_DOUBLE_EQ(net.at("rates").at("tp").at("value").get<double>(), 1.0);
      EXPECT_DOUBLE_EQ(net.at("rates").at("tp_u").at("value").get<double>(), 0.0);
      EXPECT_DOUBLE_EQ(net.at("log_conformance").at("fitness").get<double>(), 1.0);
    }
  }
  // 3 systems x 2 samplers x 3 nets.
  EXPECT_EQ(a.at("statistics").at("tests").size(), 6u);
}

TEST(RunExperiment, ExplicitNetsAndErrorContext) {
  nlohmann::json net = {
      {"places", {"i", "p", "o"}},
      {"transitions", {{{"id", "a"}, {"label", "a"}}, {{"id", "b"}, {"label", "b"}}, {{"id", "c"}, {"label", "c"}},
                       {{"id", "d"}, {"label", "d"}}}},
      {"arcs", {{{"from", "i"}, {"to", "a"}}, {{"from", "i"}, {"to", "b"}}, {{"from", "a"}, {"to", "p"}},
                {{"from", "b"}, {"to", "p"}}, {{"from", "p"}, {"to", "c"}}, {{"from", "p"}, {"to", "d"}},
                {{"from", "c"}, {"to", "o"}}, {{"from", "d"}, {"to", "o"}}}},
      {"initial_marking", {{"i", 1}}},
      {"final_markings", {{{"o", 1}}}}};
  auto cfg = ExperimentConfig::from_json({{"systems", {{{"name", "given"}, {"net", net}}}},
                                          {"samplers", nlohmann::json::array()},
                                          {"baselines", {"flower"}},
                                          {"nets", {{{"system", "given"}, {"name", "truth"}, {"net", net}}}},
                                          {"statistics", false}});
  const auto report = run_experiment(cfg, 1);
  const auto& nets = report.at("systems")[0].at("nets");
  ASSERT_EQ(nets.size(), 2u);
  EXPECT_EQ(nets[1].at("name"), "truth");
  EXPECT_DOUBLE_EQ(nets[1].at("rates").at("tp").at("value").get<double>(), 1.0);
  EXPECT_DOUBLE_EQ(nets[1].at("rates").at("tp_u").at("value").get<double>(), 1.0);
  EXPECT_FALSE(report.contains("statistics"));

  cfg.systems[0].net = nlohmann::json{{"places", {"i"}}};
  try {
    run_experiment(cfg, 1);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("system 'given'"), std::string::npos) << e.what();
    EXPECT_STREQ(e.kind(), "invalid_input");
  }
}
