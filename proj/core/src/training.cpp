#include <cmath>

#include <nlohmann/json.hpp>

#include "avatar/error.hpp"
#include "avatar/genmodel.hpp"

namespace avatar {

void TrainConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw InvalidInput(std::string("train config: ") + what);
  };
  require(order >= 1, "order must be >= 1");
  require(smoothing >= 0.0 && std::isfinite(smoothing), "smoothing must be >= 0");
  require(temperature > 0.0 && std::isfinite(temperature), "temperature must be > 0");
  require(train_fraction > 0.0 && train_fraction < 1.0, "train_fraction must lie in (0,1)");
  require(discriminator_steps >= 1, "discriminator_steps must be >= 1");
  require(batch_size >= 1, "batch_size must be >= 1");
  require(learning_rate > 0.0 && std::isfinite(learning_rate), "learning_rate must be > 0");
  require(l2 >= 0.0, "l2 must be >= 0");
  require(round_samples >= 1, "round_samples must be >= 1");
  require(threshold >= 0.0 && threshold <= 1.0, "threshold must lie in [0,1]");
  require(reinforce_weight >= 0.0, "reinforce_weight must be >= 0");
  require(eval_interval >= 1, "eval_interval must be >= 1");
  require(selection_samples >= 1, "selection_samples must be >= 1");
}

nlohmann::json TrainConfig::to_json() const {
  return {{"order", order},
          {"smoothing", smoothing},
          {"temperature", temperature},
          {"train_fraction", train_fraction},
          {"discriminator_steps", discriminator_steps},
          {"batch_size", batch_size},
          {"learning_rate", learning_rate},
          {"l2", l2},
          {"rounds", rounds},
          {"round_samples", round_samples},
          {"threshold", threshold},
          {"reinforce_weight", reinforce_weight},
          {"eval_interval", eval_interval},
          {"selection_samples", selection_samples},
          {"seed", seed}};
}

TrainConfig TrainConfig::from_json(const nlohmann::json& doc) {
  TrainConfig c;
  auto read = [&](const char* key, auto& field) {
    if (doc.contains(key)) field = doc.at(key).get<std::decay_t<decltype(field)>>();
  };
  try {
    read("order", c.order);
    read("smoothing", c.smoothing);
    read("temperature", c.temperature);
    read("train_fraction", c.train_fraction);
    read("discriminator_steps", c.discriminator_steps);
    read("batch_size", c.batch_size);
    read("learning_rate", c.learning_rate);
    read("l2", c.l2);
    read("rounds", c.rounds);
    read("round_samples", c.round_samples);
    read("threshold", c.threshold);
    read("reinforce_weight", c.reinforce_weight);
    read("eval_interval", c.eval_interval);
    read("selection_samples", c.selection_samples);
    read("seed", c.seed);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("train config: ") + e.what());
  }
  c.validate();
  return c;
}

namespace {

FeatureRows rows_of(const FeatureScorer& d, const std::vector<Variant>& variants) {
  FeatureRows rows;
  rows.reserve(variants.size());
  for (const auto& v : variants) rows.push_back(d.features(v));
  return rows;
}

struct RowSplit {
  FeatureRows train;
  FeatureRows heldout;
};

RowSplit hold_out_tenth(FeatureRows rows, Rng& rng) {
  rng.shuffle(rows);
  RowSplit s;
  const std::size_t held = rows.size() >= 10 ? rows.size() / 10 : 0;
  s.heldout.assign(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(held));
  s.train.assign(rows.begin() + static_cast<std::ptrdiff_t>(held), rows.end());
  if (s.heldout.empty()) s.heldout = s.train;
  return s;
}

// Pairs two row sets index-wise by cycling the shorter one.
std::pair<FeatureRows, FeatureRows> paired(const FeatureRows& a, const FeatureRows& b) {
  const std::size_t n = std::max(a.size(), b.size());
  std::pair<FeatureRows, FeatureRows> out;
  out.first.reserve(n);
  out.second.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.first.push_back(a[i % a.size()]);
    out.second.push_back(b[i % b.size()]);
  }
  return out;
}

}  // namespace

FeatureScorer train_discriminator(FeatureScorer d, const std::vector<Variant>& positives,
                                  const std::vector<Variant>& negatives, const TrainConfig& cfg,
                                  DiscriminatorLoss loss, Rng& rng, DiscriminatorReport* report) {
  if (positives.empty() || negatives.empty()) throw InvalidInput("train_discriminator: empty sample source");
  const LossKind kind = loss == DiscriminatorLoss::standard ? LossKind::standard_d_logistic : LossKind::relativistic_d;

  RowSplit pos = hold_out_tenth(rows_of(d, positives), rng);
  RowSplit neg = hold_out_tenth(rows_of(d, negatives), rng);
  const auto heldout = paired(pos.heldout, neg.heldout);

  auto heldout_loss = [&] { return linear_loss(kind, d.model(), heldout.first, heldout.second); };
  DiscriminatorReport local;
  local.initial_heldout_loss = heldout_loss();

  LinearModel& model = d.model();
  FeatureRows batch_pos(cfg.batch_size), batch_neg(cfg.batch_size);
  for (std::size_t step = 0; step < cfg.discriminator_steps; ++step) {
    for (std::size_t i = 0; i < cfg.batch_size; ++i) {
      batch_pos[i] = pos.train[rng.below(pos.train.size())];
      batch_neg[i] = neg.train[rng.below(neg.train.size())];
    }
    const Gradient g = loss_gradient(kind, model, batch_pos, batch_neg);
    for (std::size_t j = 0; j < model.weights.size(); ++j) {
      model.weights[j] -= cfg.learning_rate * (g.weights[j] + cfg.l2 * model.weights[j]);
    }
    model.bias -= cfg.learning_rate * g.bias;
    if (!std::isfinite(model.bias)) {
      throw TrainingError("discriminator training diverged at step " + std::to_string(step) +
                          " (learning rate " + std::to_string(cfg.learning_rate) + ")");
    }
  }
  local.final_heldout_loss = heldout_loss();
  local.steps = cfg.discriminator_steps;
  if (!std::isfinite(local.final_heldout_loss)) {
    throw TrainingError("discriminator training diverged: held-out loss is " +
                        std::to_string(local.final_heldout_loss) + " (initial " +
                        std::to_string(local.initial_heldout_loss) + ")");
  }
  if (report) *report = local;
  return d;
}

NGramGenerator refine_generator(NGramGenerator gen, FeatureScorer& d_p, const std::vector<Variant>& positives,
                                const TrainConfig& cfg, Rng& rng, const RoundObserver& observer) {
  std::vector<Variant> samples(cfg.round_samples);
  for (std::size_t round = 1; round <= cfg.rounds; ++round) {
    for (auto& s : samples) s = gen.sample(cfg.temperature, rng);
    d_p = train_discriminator(std::move(d_p), positives, samples, cfg, DiscriminatorLoss::standard, rng);
    for (const auto& s : samples) {
      const double score = d_p.score(s);
      if (score > cfg.threshold) gen.add_counts(s, cfg.reinforce_weight * score);
    }
    if (observer) observer(round, gen, d_p);
  }
  return gen;
}

std::size_t select_model(const std::vector<SelectionCandidate>& candidates) {
  if (candidates.empty()) throw InvalidInput("select_model: no candidates");
  std::size_t best = 0;
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const auto& c = candidates[i];
    const auto& b = candidates[best];
    if (c.tp_e > b.tp_e || (c.tp_e == b.tp_e && c.sampled_count < b.sampled_count)) best = i;
  }
  return best;
}

TrainedModel train_model(const UniqueVariantLog& lplus, const TrainConfig& cfg) {
  cfg.validate();
  TrainedModel out;
  out.config = cfg;
  HoldoutSplit split = split_holdout(lplus, cfg.train_fraction, cfg.seed);
  out.train = std::move(split.train);
  out.holdout = std::move(split.holdout);
  const std::vector<Variant>& positives = out.train.items();

  const Rng root(cfg.seed);
  NGramGenerator gen = fit_mle(out.train, cfg.order, cfg.smoothing);
  FeatureScorer d_p{FeatureMap(positives)};

  std::vector<NGramGenerator> snapshot_models;
  auto evaluate = [&](std::size_t round, const NGramGenerator& g) {
    Rng eval = root.substream(1000 + round);
    VariantSet drawn;
    for (std::size_t i = 0; i < cfg.selection_samples; ++i) drawn.insert(g.sample(cfg.temperature, eval));
    std::size_t hits = 0;
    for (const auto& v : out.holdout) hits += drawn.count(v);
    out.snapshots.push_back(
        {round, static_cast<double>(hits) / static_cast<double>(out.holdout.size()), drawn.size()});
    snapshot_models.push_back(g);
  };
  evaluate(0, gen);

  Rng refine_rng = root.substream(1);
  gen = refine_generator(std::move(gen), d_p, positives, cfg, refine_rng,
                         [&](std::size_t round, const NGramGenerator& g, const FeatureScorer&) {
                           if (round % cfg.eval_interval == 0 || round == cfg.rounds) evaluate(round, g);
                         });

  std::vector<SelectionCandidate> candidates;
  for (const auto& s : out.snapshots) candidates.push_back({s.tp_e, s.sampled_count});
  out.selected = select_model(candidates);
  out.generator = snapshot_models[out.selected];

  // Final discriminators see samples of the selected generator, so D_p
  // estimates P / (P + Q) for the distribution that will actually be sampled.
  Rng final_rng = root.substream(2);
  std::vector<Variant> negatives(cfg.round_samples);
  for (auto& s : negatives) s = out.generator.sample(cfg.temperature, final_rng);
  const FeatureMap map(positives);
  out.d_p = train_discriminator(FeatureScorer(map), positives, negatives, cfg, DiscriminatorLoss::standard, final_rng);
  out.d_r =
      train_discriminator(FeatureScorer(map), positives, negatives, cfg, DiscriminatorLoss::relativistic, final_rng);
  return out;
}

namespace {

nlohmann::json variants_json(const UniqueVariantLog& log) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& v : log) arr.push_back(v.labels);
  return arr;
}

UniqueVariantLog variants_from_json(const nlohmann::json& arr) {
  UniqueVariantLog log;
  for (const auto& v : arr) log.insert(Variant(v.get<std::vector<Label>>()));
  return log;
}

}  // namespace

nlohmann::json TrainedModel::to_json() const {
  nlohmann::json snaps = nlohmann::json::array();
  for (const auto& s : snapshots) {
    snaps.push_back({{"round", s.round}, {"tp_e", s.tp_e}, {"sampled_count", s.sampled_count}});
  }
  return {{"schema_version", 1},
          {"kind", "avatar-model"},
          {"config", config.to_json()},
          {"generator", generator.to_json()},
          {"d_p", d_p.to_json()},
          {"d_r", d_r.to_json()},
          {"train", variants_json(train)},
          {"holdout", variants_json(holdout)},
          {"snapshots", std::move(snaps)},
          {"selected", selected}};
}

TrainedModel TrainedModel::from_json(const nlohmann::json& doc) {
  try {
    TrainedModel m;
    m.config = TrainConfig::from_json(doc.at("config"));
    m.generator = NGramGenerator::from_json(doc.at("generator"));
    m.d_p = FeatureScorer::from_json(doc.at("d_p"));
    m.d_r = FeatureScorer::from_json(doc.at("d_r"));
    m.train = variants_from_json(doc.at("train"));
    m.holdout = variants_from_json(doc.at("holdout"));
    for (const auto& s : doc.at("snapshots")) {
      m.snapshots.push_back({s.at("round").get<std::size_t>(), s.at("tp_e").get<double>(),
                             s.at("sampled_count").get<std::size_t>()});
    }
    m.selected = doc.at("selected").get<std::size_t>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("model checkpoint: ") + e.what());
  }
}

}  // namespace avatar
