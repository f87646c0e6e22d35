#include "avatar/experiment.hpp"

#include <atomic>
#include <exception>
#include <map>
#include <thread>

#include "avatar/conformance.hpp"
#include "avatar/error.hpp"
#include "avatar/metrics.hpp"
#include "avatar/random.hpp"
#include "avatar/sampling.hpp"
#include "avatar/stats.hpp"

namespace avatar {

namespace {

constexpr int kSchemaVersion = 1;
constexpr std::size_t kDefaultNetMaxLen = 32;

SamplerConfig naive_default() {
  SamplerConfig s;
  s.name = "naive";
  s.mode = "naive";
  return s;
}

SamplerConfig mh_default() {
  SamplerConfig s;
  s.name = "mh";
  s.mode = "mh";
  return s;
}

nlohmann::json sampler_json(const SamplerConfig& s) {
  return {{"name", s.name},
          {"mode", s.mode},
          {"temperature", s.temperature},
          {"k", s.k},
          {"union_observed", s.union_observed},
          {"kappa", s.kappa},
          {"patience", s.patience},
          {"strict_pseudocode", s.strict_pseudocode},
          {"max_chains", s.max_chains}};
}

template <typename T>
void read(const nlohmann::json& j, const char* key, T& field) {
  if (j.contains(key)) field = j.at(key).get<T>();
}

SamplerConfig sampler_from_json(const nlohmann::json& j) {
  SamplerConfig s;
  read(j, "name", s.name);
  read(j, "mode", s.mode);
  if (s.name.empty()) s.name = s.mode;
  read(j, "temperature", s.temperature);
  read(j, "k", s.k);
  read(j, "union_observed", s.union_observed);
  read(j, "kappa", s.kappa);
  read(j, "patience", s.patience);
  read(j, "strict_pseudocode", s.strict_pseudocode);
  read(j, "max_chains", s.max_chains);
  return s;
}

}  // namespace

ExperimentConfig ExperimentConfig::defaults() {
  ExperimentConfig c;
  c.samplers = {naive_default(), mh_default()};
  c.desk.shape.depth = 4;
  c.desk.shape.weight_sequence = 1.0;
  c.desk.shape.weight_xor = 1.0;
  c.desk.shape.weight_and = 0.0;
  c.desk.shape.weight_loop = 0.2;
  // Unsmoothed counts keep the generator support finite, so MH patience terminates.
  c.train.smoothing = 0.0;
  return c;
}

void ExperimentConfig::validate() const {
  if (!(split_ratio > 0.0 && split_ratio < 1.0)) throw InvalidInput("experiment: split_ratio must lie in (0,1)");
  if (token_cap == 0) throw InvalidInput("experiment: token_cap must be positive");
  if (systems.empty() && desk.count == 0) throw InvalidInput("experiment: no systems");
  if (baselines.empty() && nets.empty() && samplers.empty()) throw InvalidInput("experiment: no models");
  for (const auto& b : baselines) {
    if (b != "trace" && b != "flower" && b != "dfg") throw InvalidInput("experiment: unknown baseline '" + b + "'");
  }
  for (const auto& s : systems) {
    if (s.spec.has_value() == s.net.has_value()) {
      throw InvalidInput("experiment: system '" + s.name + "' needs exactly one of spec and net");
    }
  }
  std::map<std::string, int> names;
  for (const auto& s : samplers) {
    if (s.mode != "naive" && s.mode != "mh") throw InvalidInput("experiment: unknown sampler mode '" + s.mode + "'");
    if (!(s.temperature > 0.0)) throw InvalidInput("experiment: sampler temperature must be positive");
    if (s.k == 0 || s.kappa == 0 || s.patience == 0 || s.max_chains == 0) {
      throw InvalidInput("experiment: sampler '" + s.name + "' has a zero count parameter");
    }
    if (++names[s.name] > 1) throw InvalidInput("experiment: duplicate sampler name '" + s.name + "'");
  }
  desk.shape.validate();
  train.validate();
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json sys = nlohmann::json::array();
  for (const auto& s : systems) {
    nlohmann::json j{{"name", s.name}, {"max_len", s.max_len}};
    if (s.spec) j["spec"] = s.spec->to_json();
    if (s.net) j["net"] = *s.net;
    sys.push_back(std::move(j));
  }
  nlohmann::json net_list = nlohmann::json::array();
  for (const auto& n : nets) net_list.push_back({{"system", n.system}, {"name", n.name}, {"net", n.net}});
  nlohmann::json sampler_list = nlohmann::json::array();
  for (const auto& s : samplers) sampler_list.push_back(sampler_json(s));
  return {{"schema_version", kSchemaVersion},
          {"seed", seed},
          {"split_ratio", split_ratio},
          {"token_cap", token_cap},
          {"systems", std::move(sys)},
          {"desk_systems",
           {{"count", desk.count},
            {"min_variants", desk.min_variants},
            {"max_variants", desk.max_variants},
            {"max_alphabet", desk.max_alphabet},
            {"max_length", desk.max_length},
            {"max_attempts", desk.max_attempts},
            {"shape", desk.shape.to_json()}}},
          {"baselines", baselines},
          {"nets", std::move(net_list)},
          {"train", train.to_json()},
          {"samplers", std::move(sampler_list)},
          {"statistics", statistics}};
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& doc) {
  ExperimentConfig c = defaults();
  try {
    read(doc, "seed", c.seed);
    read(doc, "split_ratio", c.split_ratio);
    read(doc, "token_cap", c.token_cap);
    if (doc.contains("systems")) {
      for (const auto& j : doc.at("systems")) {
        SystemSource s;
        read(j, "name", s.name);
        read(j, "max_len", s.max_len);
        if (j.contains("spec")) s.spec = SystemSpec::from_json(j.at("spec"));
        if (j.contains("net")) s.net = j.at("net");
        c.systems.push_back(std::move(s));
      }
    }
    if (doc.contains("desk_systems")) {
      const auto& d = doc.at("desk_systems");
      read(d, "count", c.desk.count);
      read(d, "min_variants", c.desk.min_variants);
      read(d, "max_variants", c.desk.max_variants);
      read(d, "max_alphabet", c.desk.max_alphabet);
      read(d, "max_length", c.desk.max_length);
      read(d, "max_attempts", c.desk.max_attempts);
      if (d.contains("shape")) {
        nlohmann::json shape = c.desk.shape.to_json();
        shape.merge_patch(d.at("shape"));
        c.desk.shape = SystemSpec::from_json(shape);
      }
    }
    read(doc, "baselines", c.baselines);
    if (doc.contains("nets")) {
      for (const auto& j : doc.at("nets")) {
        c.nets.push_back({j.at("system").get<std::string>(), j.at("name").get<std::string>(), j.at("net")});
      }
    }
    if (doc.contains("train")) {
      // Missing keys keep the experiment defaults rather than TrainConfig's.
      nlohmann::json merged = c.train.to_json();
      merged.merge_patch(doc.at("train"));
      c.train = TrainConfig::from_json(merged);
    }
    if (doc.contains("samplers")) {
      c.samplers.clear();
      for (const auto& j : doc.at("samplers")) c.samplers.push_back(sampler_from_json(j));
    }
    read(doc, "statistics", c.statistics);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("experiment config: ") + e.what());
  }
  c.validate();
  return c;
}

std::vector<SystemSource> generate_desk_systems(const ExperimentConfig& cfg) {
  std::vector<SystemSource> out;
  for (std::size_t attempt = 0; attempt < cfg.desk.max_attempts && out.size() < cfg.desk.count; ++attempt) {
    SystemSpec spec = cfg.desk.shape;
    spec.seed = mix_seed(cfg.seed, 0x5eed0000 + attempt);
    std::optional<PetriNet> built;
    try {
      built.emplace(build_system(spec));
    } catch (const BuildError&) {
      continue;
    }
    const PetriNet& net = *built;
    if (net.alphabet().size() > cfg.desk.max_alphabet) continue;
    PlayoutOptions options;
    options.max_len = system_length_bound(net, spec);
    options.token_cap = cfg.token_cap;
    options.expansion_budget = 2'000'000;
    try {
      const auto playout = playout_enumerate(net, options);
      const auto n = playout.variants.size();
      if (n < cfg.desk.min_variants || n > cfg.desk.max_variants) continue;
      if (max_variant_len(playout.variants) > cfg.desk.max_length) continue;
    } catch (const BudgetExceeded&) {
      continue;
    }
    SystemSource s;
    s.name = "system" + std::to_string(out.size() + 1);
    s.spec = spec;
    out.push_back(std::move(s));
  }
  if (out.size() < cfg.desk.count) {
    throw InvalidInput("experiment: found only " + std::to_string(out.size()) + " of " +
                       std::to_string(cfg.desk.count) + " desk systems within the variant range");
  }
  return out;
}

namespace {

struct ModelScore {
  std::string model;
  double s = 0.0;
  double generalization = 0.0;
};

struct SystemOutcome {
  nlohmann::json report;
  std::vector<ModelScore> scores;
};

template <typename Fn>
auto stage(const std::string& system, const std::string& what, Fn fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw ContextError("system '" + system + "', " + what, e);
  }
}

nlohmann::json scores_json(const ConformanceScores& c) {
  return {{"fitness", c.fitness},
          {"precision", c.precision},
          {"generalization", c.generalization},
          {"fitness_method", c.fitness_method},
          {"precision_method", c.precision_method}};
}

nlohmann::json variants_json(const VariantSet& set) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& v : set) arr.push_back(v.labels);
  return arr;
}

SystemOutcome run_system(const ExperimentConfig& cfg, std::size_t index, const SystemSource& source) {
  const std::string& name = source.name;
  const std::uint64_t sys_seed = mix_seed(cfg.seed, index);
  SystemOutcome out;
  nlohmann::json& rep = out.report;
  rep["name"] = name;
  rep["seed"] = sys_seed;
  if (source.spec) rep["spec"] = source.spec->to_json();

  const PetriNet system = stage(name, "building the system net", [&] {
    return source.spec ? build_system(*source.spec) : petri_from_json(*source.net);
  });
  std::size_t max_len = source.max_len;
  if (max_len == 0) max_len = source.spec ? system_length_bound(system, *source.spec) : kDefaultNetMaxLen;

  const VariantSet v_s = stage(name, "system playout", [&] {
    PlayoutOptions options;
    options.max_len = max_len;
    options.token_cap = cfg.token_cap;
    auto result = playout_enumerate(system, options);
    if (result.variants.size() < 2) throw DegenerateInput("system plays out fewer than two variants");
    return std::move(result.variants);
  });
  const SystemTruth truth = split_system(v_s, cfg.split_ratio, mix_seed(sys_seed, 1));
  const EventLog log = synth_event_log(truth.lplus.to_set(), mix_seed(sys_seed, 2));
  const VariantLog lstar = build_variant_logs(log).lstar;
  const std::size_t mu = max_variant_len(lstar);
  rep["profile"] = {{"alphabet", system.alphabet().size()},
                    {"mu", mu},
                    {"v_s", v_s.size()},
                    {"lplus", truth.lplus.size()},
                    {"v_u", truth.v_u.size()},
                    {"playout_max_len", max_len}};

  // Samplers share one trained model per system.
  std::vector<VariantSet> estimates;
  nlohmann::json sampler_reports = nlohmann::json::array();
  UniqueVariantLog lplus_e;
  if (!cfg.samplers.empty()) {
    TrainConfig tc = cfg.train;
    tc.seed = mix_seed(sys_seed, 3);
    const TrainedModel model = stage(name, "training", [&] { return train_model(truth.lplus, tc); });
    lplus_e = model.holdout;
    nlohmann::json snaps = nlohmann::json::array();
    for (const auto& s : model.snapshots) {
      snaps.push_back({{"round", s.round}, {"tp_e", s.tp_e}, {"sampled_count", s.sampled_count}});
    }
    rep["training"] = {{"seed", tc.seed},
                       {"train", model.train.size()},
                       {"holdout", model.holdout.size()},
                       {"snapshots", std::move(snaps)},
                       {"selected_round", model.snapshots[model.selected].round}};

    for (std::size_t j = 0; j < cfg.samplers.size(); ++j) {
      const SamplerConfig& sc = cfg.samplers[j];
      const GeneratorFn gen = [&model, t = sc.temperature](Rng& r) { return model.generator.sample(t, r); };
      Rng rng(mix_seed(sys_seed, 100 + j));
      SampleResult result = stage(name, "sampler '" + sc.name + "'", [&] {
        if (sc.mode == "naive") return naive_sample(gen, truth.lplus, {sc.k, sc.union_observed}, rng);
        const ScorerFn d_p = [&model](const Variant& v) { return model.d_p.score(v); };
        MhOptions options;
        options.kappa = sc.kappa;
        options.patience = sc.patience;
        options.strict_pseudocode = sc.strict_pseudocode;
        options.max_chains = sc.max_chains;
        return mh_sample(gen, d_p, truth.lplus, model.holdout, options, rng);
      });
      const MetricsReport rates = compute_rates(result.v_hat_s, v_s, truth.lplus, truth.v_u, model.holdout);
      sampler_reports.push_back({{"name", sc.name},
                                 {"mode", sc.mode},
                                 {"seed", rng.seed()},
                                 {"sample", result.to_json()},
                                 {"rates", rates.to_json()}});
      out.scores.push_back({"sampler:" + sc.name, rates.s(), 0.0});
      estimates.push_back(std::move(result.v_hat_s));
    }
  }
  rep["samplers"] = std::move(sampler_reports);

  std::vector<std::pair<std::string, PetriNet>> models;
  for (const auto& b : cfg.baselines) {
    if (b == "trace") models.emplace_back("trace", trace_model(truth.lplus));
    if (b == "flower") models.emplace_back("flower", flower_model(alphabet_of(truth.lplus.items())));
    if (b == "dfg") models.emplace_back("dfg", dfg_discover(lstar));
  }
  for (const auto& n : cfg.nets) {
    if (n.system == name) {
      models.emplace_back(n.name, stage(name, "loading net '" + n.name + "'", [&] { return petri_from_json(n.net); }));
    }
  }

  nlohmann::json net_reports = nlohmann::json::array();
  for (const auto& [model_name, net] : models) {
    const std::string ctx = "model '" + model_name + "'";
    nlohmann::json nr{{"name", model_name}};
    const MetricsReport rates = stage(name, ctx + " playout", [&] {
      PlayoutLanguage language(net, cfg.token_cap);
      const std::uint64_t size = language.count(mu);
      return compute_rates(static_cast<std::size_t>(size), [&](const Variant& v) { return language.accepts(v); },
                           v_s, truth.lplus, truth.v_u, lplus_e);
    });
    nr["rates"] = rates.to_json();
    nr["log_conformance"] = scores_json(stage(name, ctx + " conformance", [&] { return conformance_scores(net, lstar); }));

    nlohmann::json est = nlohmann::json::object();
    double gen_sum = 0.0;
    for (std::size_t j = 0; j < estimates.size(); ++j) {
      ConformanceScores c;
      if (!estimates[j].empty()) {
        c = stage(name, ctx + " estimated generalization", [&] {
          return estimated_generalization(net, estimates[j], mix_seed(sys_seed, 200 + j));
        });
      }
      est[cfg.samplers[j].name] = scores_json(c);
      gen_sum += c.generalization;
    }
    const double mean_gen = estimates.empty() ? 0.0 : gen_sum / static_cast<double>(estimates.size());
    nr["estimated_generalization"] = std::move(est);
    nr["mean_generalization"] = mean_gen;
    net_reports.push_back(std::move(nr));
    out.scores.push_back({"net:" + model_name, rates.s(), mean_gen});
  }
  rep["nets"] = std::move(net_reports);
  rep["system_variants"] = variants_json(v_s);
  return out;
}

nlohmann::json paired_statistics(const ExperimentConfig& cfg, const std::vector<SystemOutcome>& outcomes) {
  // scores[model][system]
  std::map<std::string, std::vector<double>> s_values;
  std::vector<std::string> order;
  for (const auto& o : outcomes) {
    for (const auto& m : o.scores) {
      auto [it, inserted] = s_values.try_emplace(m.model);
      if (inserted) order.push_back(m.model);
      it->second.push_back(m.s);
    }
  }
  nlohmann::json tests = nlohmann::json::array();
  for (const auto& sampler : cfg.samplers) {
    const auto& a = s_values["sampler:" + sampler.name];
    for (const auto& model : order) {
      if (model.rfind("net:", 0) != 0) continue;
      const auto& b = s_values[model];
      if (a.size() != b.size()) continue;  // model missing on some systems
      std::vector<double> diff(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
      const GatedTest g = gated_paired_test(diff);
      nlohmann::json j = g.to_json();
      j["sampler"] = sampler.name;
      j["model"] = model.substr(4);
      j["metric"] = "s";
      j["systems"] = diff.size();
      tests.push_back(std::move(j));
    }
  }
  return tests;
}

}  // namespace

nlohmann::json run_experiment(const ExperimentConfig& cfg, std::size_t jobs) {
  cfg.validate();
  const std::vector<SystemSource> systems = cfg.systems.empty() ? generate_desk_systems(cfg) : cfg.systems;

  std::vector<SystemOutcome> outcomes(systems.size());
  std::vector<std::exception_ptr> errors(systems.size());
  auto work = [&](std::size_t i) {
    try {
      outcomes[i] = run_system(cfg, i, systems[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  jobs = std::max<std::size_t>(1, std::min(jobs, systems.size()));
  if (jobs == 1) {
    for (std::size_t i = 0; i < systems.size(); ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < jobs; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < systems.size(); i = next++) work(i);
      });
    }
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  nlohmann::json report;
  report["schema_version"] = kSchemaVersion;
  report["kind"] = "avatar-experiment";
  report["seed"] = cfg.seed;
  report["config"] = cfg.to_json();
  nlohmann::json sys = nlohmann::json::array();
  for (auto& o : outcomes) sys.push_back(std::move(o.report));
  report["systems"] = std::move(sys);
  if (cfg.statistics) {
    report["statistics"] = {
        {"alpha", 0.05},
        {"note", "one-sided paired tests on s over " + std::to_string(systems.size()) +
                     " systems; critical values depend on the number of systems"},
        {"tests", paired_statistics(cfg, outcomes)}};
  }
  return report;
}

}  // namespace avatar
