#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "avatar/conformance.hpp"
#include "avatar/error.hpp"
#include "avatar/experiment.hpp"
#include "avatar/genmodel.hpp"
#include "avatar/metrics.hpp"
#include "avatar/petri.hpp"
#include "avatar/sampling.hpp"
#include "avatar/systems.hpp"

namespace {

using nlohmann::json;

constexpr const char* kFormats =
    "Formats (schema version 1 unless noted):\n"
    "  event log CSV   header case_id,activity,timestamp (ISO-8601)\n"
    "  variant TSV     one variant per line, labels separated by TAB\n"
    "  PN JSON         {places, transitions[{id,label|null}], arcs[{from,to}],\n"
    "                   initial_marking{place:n}, final_markings[{place:n}]}\n"
    "  model JSON      kind avatar-model, schema_version 1\n"
    "  report JSON     kind avatar-experiment, schema_version 1\n";

struct Output {
  bool pretty = false;
  std::string path;

  void emit(const json& doc) const { write(doc.dump(pretty ? 2 : -1) + "\n"); }

  void write(const std::string& text) const {
    if (path.empty() || path == "-") {
      std::cout << text;
      return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw avatar::InvalidInput("cannot open '" + path + "' for writing");
    out << text;
  }
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw avatar::InvalidInput("cannot open '" + path + "'");
  return in;
}

json read_json_file(const std::string& path) {
  auto in = open_input(path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw avatar::InvalidInput("'" + path + "' is not valid JSON: " + e.what());
  }
}

avatar::PetriNet read_net(const std::string& path, bool permissive) {
  json doc = read_json_file(path);
  if (permissive && doc.is_object()) doc["final_markings"] = json::array();
  return avatar::petri_from_json(doc);
}

// L* from either an event log CSV or a variant TSV (one trace per line).
avatar::VariantLog read_lstar(const std::string& log_path, const std::string& variants_path) {
  if (!log_path.empty()) {
    auto in = open_input(log_path);
    return avatar::build_variant_logs(avatar::read_event_log_csv(in)).lstar;
  }
  auto in = open_input(variants_path);
  auto variants = avatar::read_variants_tsv(in);
  if (variants.empty()) throw avatar::InvalidInput("'" + variants_path + "' holds no variants");
  return variants;
}

avatar::VariantSet read_variant_set(const std::string& path) {
  auto in = open_input(path);
  const auto variants = avatar::read_variants_tsv(in);
  return {variants.begin(), variants.end()};
}

std::string tsv(const avatar::VariantSet& set) {
  std::ostringstream out;
  avatar::write_variants_tsv(out, set);
  return out.str();
}

void add_input_options(CLI::App* cmd, std::string& log, std::string& variants) {
  auto* a = cmd->add_option("--log", log, "Event log CSV");
  auto* b = cmd->add_option("--variants", variants, "Variant TSV, one trace per line");
  a->excludes(b);
  b->excludes(a);
}

void require_input(const std::string& log, const std::string& variants) {
  if (log.empty() && variants.empty()) throw CLI::RequiredError("--log or --variants");
}

std::string fixed(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(4) << v;
  return s.str();
}

std::string metrics_table(const avatar::MetricsReport& r) {
  std::ostringstream s;
  s << "|V^_S|  tp      fp      tp_S    tp_o    tp_u    tp_e    s\n"
    << std::left << std::setw(7) << r.v_hat_s_count << ' ' << fixed(r.tp.value()) << "  " << fixed(r.fp()) << "  "
    << fixed(r.tp_s.value()) << "  " << fixed(r.tp_o.value()) << "  " << fixed(r.tp_u.value()) << "  "
    << fixed(r.tp_e.value()) << "  " << fixed(r.s()) << '\n';
  return s.str();
}

std::string experiment_table(const json& report) {
  std::ostringstream s;
  for (const auto& sys : report.at("systems")) {
    const auto& p = sys.at("profile");
    s << sys.at("name").get<std::string>() << "  |A|=" << p.at("alphabet") << " mu=" << p.at("mu")
      << " |V_S|=" << p.at("v_s") << " |L+|=" << p.at("lplus") << " |V_u|=" << p.at("v_u") << '\n';
    for (const auto& m : sys.at("samplers")) {
      s << "  sampler " << std::left << std::setw(10) << m.at("name").get<std::string>()
        << " tp=" << fixed(m.at("rates").at("tp").at("value").get<double>())
        << " tp_u=" << fixed(m.at("rates").at("tp_u").at("value").get<double>())
        << " s=" << fixed(m.at("rates").at("s").get<double>()) << '\n';
    }
    for (const auto& m : sys.at("nets")) {
      s << "  net     " << std::left << std::setw(10) << m.at("name").get<std::string>()
        << " tp=" << fixed(m.at("rates").at("tp").at("value").get<double>())
        << " tp_u=" << fixed(m.at("rates").at("tp_u").at("value").get<double>())
        << " s=" << fixed(m.at("rates").at("s").get<double>())
        << " gen=" << fixed(m.at("mean_generalization").get<double>()) << '\n';
    }
  }
  if (report.contains("statistics")) {
    for (const auto& t : report.at("statistics").at("tests")) {
      s << "test " << t.at("sampler").get<std::string>() << " > " << t.at("model").get<std::string>() << ": "
        << t.at("test").get<std::string>() << " p=" << fixed(t.at("p_value").get<double>())
        << (t.at("significant").get<bool>() ? " significant" : "") << '\n';
    }
  }
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Estimate how well process models generalize to unobserved system behaviour."};
  app.footer(kFormats);
  app.require_subcommand(1);

  Output out;
  bool error_json = false;
  app.add_flag("--pretty", out.pretty, "Indented JSON, or human-readable tables where available");
  app.add_flag("--error-json", error_json, "Report domain errors as JSON on stderr");

  // playout
  std::string net_path;
  std::size_t max_len = 0;
  avatar::TokenCount token_cap = 3;
  std::uint64_t budget = 10'000'000;
  bool permissive = false;
  auto* playout = app.add_subcommand("playout", "Enumerate the variants a Petri net can play out (variant TSV)");
  playout->add_option("--net", net_path, "PN JSON")->required();
  playout->add_option("--max-len", max_len, "Maximum number of visible labels")->required()->check(CLI::PositiveNumber);
  playout->add_option("--token-cap", token_cap, "Prune markings with more tokens in a place")->check(CLI::PositiveNumber);
  playout->add_option("--budget", budget, "Expansion budget")->check(CLI::PositiveNumber);
  playout->add_flag("--permissive", permissive, "Ignore final markings; deadlocks end variants");
  playout->add_option("--out", out.path, "Output file (default stdout)");

  // discover-dfg
  std::string log_path, variants_path;
  auto* dfg = app.add_subcommand("discover-dfg", "Directly-follows baseline net from a log (PN JSON)");
  add_input_options(dfg, log_path, variants_path);
  dfg->add_option("--out", out.path, "Output file (default stdout)");

  // conformance
  std::string estimate_path;
  std::uint64_t seed = 0;
  auto* conf = app.add_subcommand("conformance", "Token replay fitness, ETC precision and their harmonic mean");
  conf->add_option("--net", net_path, "PN JSON")->required();
  add_input_options(conf, log_path, variants_path);
  conf->add_option("--estimate", estimate_path, "Also score against an estimated system variant set (TSV)");
  conf->add_option("--seed", seed, "Seed for the synthetic log built from --estimate");
  conf->add_option("--out", out.path, "Output file (default stdout)");

  // train
  std::string train_config_path;
  avatar::TrainConfig tc;
  auto* train = app.add_subcommand("train", "Fit the generator and discriminators on the observed variants");
  add_input_options(train, log_path, variants_path);
  train->add_option("--config", train_config_path, "Train config JSON (flags override it)");
  train->add_option("--seed", tc.seed, "Seed");
  train->add_option("--order", tc.order, "n-gram order m")->check(CLI::PositiveNumber);
  train->add_option("--smoothing", tc.smoothing, "Additive smoothing lambda")->check(CLI::NonNegativeNumber);
  train->add_option("--temperature", tc.temperature, "Sampling temperature tau")->check(CLI::PositiveNumber);
  train->add_option("--rounds", tc.rounds, "Refinement rounds")->check(CLI::NonNegativeNumber);
  train->add_option("--round-samples", tc.round_samples, "Samples per refinement round")->check(CLI::PositiveNumber);
  train->add_option("--selection-samples", tc.selection_samples, "Draws used to measure tp_e")->check(CLI::PositiveNumber);
  train->add_option("--train-fraction", tc.train_fraction, "Share of L+ used for training");
  train->add_option("--out", out.path, "Model checkpoint JSON")->required();

  // sample
  std::string model_path, mode = "naive", meta_path;
  avatar::NaiveOptions naive;
  avatar::MhOptions mh;
  mh.jobs = std::max(1u, std::thread::hardware_concurrency());
  double temperature = 0.0;
  auto* sample = app.add_subcommand("sample", "Estimate the system variant set from a trained model");
  sample->add_option("--model", model_path, "Model checkpoint JSON")->required();
  sample->add_option("--mode", mode, "naive or mh")->check(CLI::IsMember({"naive", "mh"}));
  sample->add_option("--k", naive.k, "Naive draws")->check(CLI::PositiveNumber);
  sample->add_flag("--union-observed", naive.union_observed, "Add L+ to the naive estimate");
  sample->add_option("--kappa", mh.kappa, "Markov chain length")->check(CLI::PositiveNumber);
  sample->add_option("--patience", mh.patience, "Consecutive non-novel chains before stopping")->check(CLI::PositiveNumber);
  sample->add_option("--max-chains", mh.max_chains, "Upper bound on chains")->check(CLI::PositiveNumber);
  sample->add_flag("--strict-pseudocode", mh.strict_pseudocode, "Emit the last proposal instead of the chain state");
  sample->add_option("--temperature", temperature, "Override the model's temperature")->check(CLI::PositiveNumber);
  sample->add_option("--seed", seed, "Seed");
  sample->add_option("--jobs", mh.jobs, "Worker threads for MH chains")->check(CLI::PositiveNumber);
  sample->add_option("--out", out.path, "Estimated variant set (TSV)")->required();
  sample->add_option("--meta", meta_path, "Sampling metadata JSON (default stdout)");

  // metrics
  std::string system_path, observed_path, holdout_path;
  auto* metrics = app.add_subcommand("metrics", "tp, fp, tp_S, tp_o, tp_u, tp_e and s of an estimate");
  metrics->add_option("--estimate", estimate_path, "Estimated variant set (TSV)")->required();
  metrics->add_option("--system", system_path, "Ground-truth system variants V_S (TSV)")->required();
  metrics->add_option("--observed", observed_path, "Observed variants L+ (TSV)")->required();
  metrics->add_option("--holdout", holdout_path, "Holdout L+_e (TSV)");
  metrics->add_option("--out", out.path, "Output file (default stdout)");

  // gen-system
  std::string spec_path;
  avatar::SystemSpec spec;
  bool with_profile = false;
  auto* gen = app.add_subcommand("gen-system", "Seeded block-structured ground-truth net (PN JSON)");
  gen->add_option("--spec", spec_path, "System spec JSON (flags override it)");
  auto* gen_seed = gen->add_option("--seed", spec.seed, "Seed");
  auto* gen_depth = gen->add_option("--depth", spec.depth, "Block depth, 0..6");
  auto* gen_budget = gen->add_option("--alphabet-budget", spec.alphabet_budget, "Maximum number of activities");
  auto* gen_loop = gen->add_option("--loop-bound", spec.loop_bound, "Redo iterations per loop, 1..3");
  gen->add_flag("--profile", with_profile, "Print |A|, mu and |V_S| instead of the net");
  gen->add_option("--out", out.path, "Output file (default stdout)");

  // experiment
  std::string config_path;
  std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());
  auto* exp = app.add_subcommand("experiment", "Run the controlled experiment and write the report JSON");
  exp->add_option("--config", config_path, "Experiment config JSON (default: five desk systems)");
  auto* exp_seed = exp->add_option("--seed", seed, "Experiment seed");
  exp->add_option("--jobs", jobs, "Worker threads; results do not depend on it")->check(CLI::PositiveNumber);
  exp->add_option("--out", out.path, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (playout->parsed()) {
      const auto net = read_net(net_path, permissive);
      avatar::PlayoutOptions options;
      options.max_len = max_len;
      options.token_cap = token_cap;
      options.expansion_budget = budget;
      out.write(tsv(avatar::playout_enumerate(net, options).variants));
    } else if (dfg->parsed()) {
      require_input(log_path, variants_path);
      out.emit(avatar::petri_to_json(avatar::dfg_discover(read_lstar(log_path, variants_path))));
    } else if (conf->parsed()) {
      require_input(log_path, variants_path);
      const auto net = read_net(net_path, false);
      const auto scores = avatar::conformance_scores(net, read_lstar(log_path, variants_path));
      json doc{{"fitness", scores.fitness},
               {"precision", scores.precision},
               {"generalization", scores.generalization},
               {"fitness_method", scores.fitness_method},
               {"precision_method", scores.precision_method}};
      if (!estimate_path.empty()) {
        const auto est = avatar::estimated_generalization(net, read_variant_set(estimate_path), seed);
        doc["estimated"] = {{"fitness", est.fitness},
                            {"precision", est.precision},
                            {"generalization", est.generalization},
                            {"seed", seed}};
      }
      out.emit(doc);
    } else if (train->parsed()) {
      require_input(log_path, variants_path);
      avatar::TrainConfig cfg = tc;
      if (!train_config_path.empty()) {
        // Explicit flags win over the file.
        json result = avatar::TrainConfig::from_json(read_json_file(train_config_path)).to_json();
        const json flags = tc.to_json();
        for (const auto* opt : train->get_options()) {
          if (opt->count() == 0) continue;
          std::string key = opt->get_single_name();
          std::replace(key.begin(), key.end(), '-', '_');
          if (flags.contains(key)) result[key] = flags[key];
        }
        cfg = avatar::TrainConfig::from_json(result);
      }
      const auto lstar = read_lstar(log_path, variants_path);
      const avatar::UniqueVariantLog lplus(lstar);
      out.emit(avatar::train_model(lplus, cfg).to_json());
    } else if (sample->parsed()) {
      const auto model = avatar::TrainedModel::from_json(read_json_file(model_path));
      const double tau = temperature > 0.0 ? temperature : model.config.temperature;
      avatar::UniqueVariantLog lplus = model.train;
      for (const auto& v : model.holdout) lplus.insert(v);
      const avatar::GeneratorFn g = [&](avatar::Rng& r) { return model.generator.sample(tau, r); };
      avatar::Rng rng(seed);
      avatar::SampleResult result;
      json options;
      if (mode == "naive") {
        result = avatar::naive_sample(g, lplus, naive, rng);
        options = {{"k", naive.k}, {"union_observed", naive.union_observed}};
      } else {
        const avatar::ScorerFn d_p = [&](const avatar::Variant& v) { return model.d_p.score(v); };
        result = avatar::mh_sample(g, d_p, lplus, model.holdout, mh, rng);
        options = {{"kappa", mh.kappa},
                   {"patience", mh.patience},
                   {"max_chains", mh.max_chains},
                   {"strict_pseudocode", mh.strict_pseudocode}};
      }
      out.write(tsv(result.v_hat_s));
      json meta{{"mode", mode}, {"seed", seed}, {"temperature", tau}, {"options", options}, {"result", result.to_json()}};
      Output meta_out{out.pretty, meta_path};
      meta_out.emit(meta);
    } else if (metrics->parsed()) {
      const auto v_s = read_variant_set(system_path);
      const auto observed = read_variant_set(observed_path);
      avatar::UniqueVariantLog lplus(std::vector<avatar::Variant>(observed.begin(), observed.end()));
      avatar::VariantSet v_u;
      for (const auto& v : v_s) {
        if (!lplus.contains(v)) v_u.insert(v);
      }
      for (const auto& v : lplus) {
        if (!v_s.count(v)) throw avatar::InvalidInput("observed variant " + v.str() + " is not in the system set");
      }
      avatar::UniqueVariantLog holdout;
      if (!holdout_path.empty()) {
        const auto h = read_variant_set(holdout_path);
        holdout = avatar::UniqueVariantLog(std::vector<avatar::Variant>(h.begin(), h.end()));
      }
      const auto report = avatar::compute_rates(read_variant_set(estimate_path), v_s, lplus, v_u, holdout);
      if (out.pretty) {
        out.write(metrics_table(report));
      } else {
        out.emit(report.to_json());
      }
    } else if (gen->parsed()) {
      avatar::SystemSpec s = spec;
      if (!spec_path.empty()) {
        s = avatar::SystemSpec::from_json(read_json_file(spec_path));
        if (gen_seed->count()) s.seed = spec.seed;
        if (gen_depth->count()) s.depth = spec.depth;
        if (gen_budget->count()) s.alphabet_budget = spec.alphabet_budget;
        if (gen_loop->count()) s.loop_bound = spec.loop_bound;
      }
      const auto net = avatar::build_system(s);
      if (with_profile) {
        const auto p = avatar::complexity_profile(net, 3, avatar::system_length_bound(net, s));
        out.emit({{"spec", s.to_json()},
                  {"alphabet", p.alphabet_size},
                  {"mu", p.mu},
                  {"variants", p.variant_count}});
      } else {
        out.emit(avatar::petri_to_json(net));
      }
    } else if (exp->parsed()) {
      avatar::ExperimentConfig cfg = config_path.empty() ? avatar::ExperimentConfig::defaults()
                                                          : avatar::ExperimentConfig::from_json(read_json_file(config_path));
      if (exp_seed->count()) cfg.seed = seed;
      const json report = avatar::run_experiment(cfg, jobs);
      if (out.pretty) {
        out.write(experiment_table(report));
      } else {
        out.emit(report);
      }
    }
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const avatar::Error& e) {
    if (error_json) {
      std::cerr << json{{"error", e.kind()}, {"message", e.what()}}.dump() << '\n';
    } else {
      std::cerr << "error: " << e.what() << '\n';
    }
    return 1;
  }
  return 0;
}
