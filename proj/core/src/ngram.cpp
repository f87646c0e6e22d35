#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "avatar/error.hpp"
#include "avatar/genmodel.hpp"

namespace avatar {

NGramGenerator NGramGenerator::fit_mle(const UniqueVariantLog& train, int order, double smoothing) {
  if (train.empty()) throw InvalidInput("fit_mle: empty training set");
  if (order < 1) throw InvalidInput("fit_mle: order must be >= 1");
  if (!(smoothing >= 0.0) || !std::isfinite(smoothing)) throw InvalidInput("fit_mle: smoothing must be >= 0");

  NGramGenerator g;
  g.order_ = order;
  g.smoothing_ = smoothing;
  const auto labels = alphabet_of(train.items());
  g.alphabet_.assign(labels.begin(), labels.end());
  for (std::size_t i = 0; i < g.alphabet_.size(); ++i) g.ids_[g.alphabet_[i]] = i;
  g.max_len_ = max_variant_len(train.items());
  g.tables_.assign(static_cast<std::size_t>(order), {});
  for (const auto& v : train) {
    bool known = true;
    g.add_sequence(g.encode(v, known), 1.0);
  }
  return g;
}

std::vector<std::size_t> NGramGenerator::encode(const Variant& v, bool& known) const {
  std::vector<std::size_t> ids;
  ids.reserve(v.size());
  known = true;
  for (const auto& label : v) {
    auto it = ids_.find(label);
    if (it == ids_.end()) {
      known = false;
      return {};
    }
    ids.push_back(it->second);
  }
  return ids;
}

NGramGenerator::Context NGramGenerator::context_of(const std::vector<std::size_t>& history,
                                                    std::size_t length) const {
  const std::size_t start_symbol = alphabet_.size() + 1;
  Context ctx(length, start_symbol);
  const std::size_t take = std::min(length, history.size());
  std::copy(history.end() - static_cast<std::ptrdiff_t>(take), history.end(),
            ctx.end() - static_cast<std::ptrdiff_t>(take));
  return ctx;
}

void NGramGenerator::add_sequence(const std::vector<std::size_t>& ids, double weight) {
  const std::size_t outcomes = alphabet_.size() + 1;
  std::vector<std::size_t> history;
  const std::size_t steps = std::min(ids.size(), max_len_);
  for (std::size_t i = 0; i <= steps; ++i) {
    std::size_t symbol;
    if (i < steps) {
      symbol = ids[i];
    } else if (steps < max_len_) {
      symbol = end_symbol();
    } else {
      break;  // generation stops at max_len without drawing END
    }
    for (std::size_t k = 0; k < tables_.size(); ++k) {
      auto& row = tables_[k][context_of(history, k)];
      if (row.empty()) row.assign(outcomes, 0.0);
      row[symbol] += weight;
    }
    if (i < steps) history.push_back(symbol);
  }
}

void NGramGenerator::add_counts(const Variant& v, double weight) {
  if (!(weight >= 0.0) || !std::isfinite(weight)) throw InvalidInput("add_counts: weight must be finite and >= 0");
  bool known = true;
  auto ids = encode(v, known);
  if (!known || ids.empty()) return;
  add_sequence(ids, weight);
}

std::vector<double> NGramGenerator::next_distribution(const std::vector<std::size_t>& history) const {
  const std::size_t outcomes = alphabet_.size() + 1;
  std::vector<double> dist(outcomes, 0.0);
  const std::vector<double>* row = nullptr;
  double total = 0.0;
  for (std::size_t k = tables_.size(); k-- > 0;) {
    auto it = tables_[k].find(context_of(history, k));
    if (it == tables_[k].end()) continue;
    double t = 0.0;
    for (double c : it->second) t += c;
    if (t > 0.0) {
      row = &it->second;
      total = t;
      break;
    }
  }
  const double denom = total + smoothing_ * static_cast<double>(outcomes);
  if (row == nullptr || denom <= 0.0) {
    std::fill(dist.begin(), dist.end(), 1.0 / static_cast<double>(outcomes));
  } else {
    for (std::size_t x = 0; x < outcomes; ++x) dist[x] = ((*row)[x] + smoothing_) / denom;
  }
  if (history.empty()) {
    dist[end_symbol()] = 0.0;
    double s = 0.0;
    for (double p : dist) s += p;
    if (s <= 0.0) {
      std::fill(dist.begin(), dist.end() - 1, 1.0 / static_cast<double>(alphabet_.size()));
    } else {
      for (double& p : dist) p /= s;
    }
  }
  return dist;
}

double NGramGenerator::probability(const Variant& v) const {
  if (v.empty() || v.size() > max_len_) return 0.0;
  bool known = true;
  auto ids = encode(v, known);
  if (!known) return 0.0;
  double p = 1.0;
  std::vector<std::size_t> history;
  for (auto id : ids) {
    p *= next_distribution(history)[id];
    history.push_back(id);
  }
  if (history.size() < max_len_) p *= next_distribution(history)[end_symbol()];
  return p;
}

Variant NGramGenerator::sample(double temperature, Rng& rng) const {
  if (alphabet_.empty()) throw PreconditionError("sample: generator is not fitted");
  if (!(temperature > 0.0)) throw InvalidInput("sample: temperature must be positive");
  const bool greedy = temperature < 1e-6;
  std::vector<std::size_t> history;
  while (history.size() < max_len_) {
    std::vector<double> dist = next_distribution(history);
    std::size_t choice = 0;
    if (greedy) {
      choice = static_cast<std::size_t>(std::max_element(dist.begin(), dist.end()) - dist.begin());
    } else {
      if (temperature != 1.0) {
        double max_log = -std::numeric_limits<double>::infinity();
        for (double p : dist) {
          if (p > 0.0) max_log = std::max(max_log, std::log(p) / temperature);
        }
        double sum = 0.0;
        for (double& p : dist) {
          p = p > 0.0 ? std::exp(std::log(p) / temperature - max_log) : 0.0;
          sum += p;
        }
        for (double& p : dist) p /= sum;
      }
      const double u = rng.uniform();
      double acc = 0.0;
      choice = dist.size() - 1;
      // Skip trailing zero-probability outcomes when rounding leaves u above the total.
      while (choice > 0 && dist[choice] == 0.0) --choice;
      for (std::size_t x = 0; x < dist.size(); ++x) {
        acc += dist[x];
        if (u < acc && dist[x] > 0.0) {
          choice = x;
          break;
        }
      }
    }
    if (choice == end_symbol()) break;
    history.push_back(choice);
  }
  Variant v;
  v.labels.reserve(history.size());
  for (auto id : history) v.labels.push_back(alphabet_[id]);
  return v;
}

nlohmann::json NGramGenerator::to_json() const {
  nlohmann::json tables = nlohmann::json::array();
  for (const auto& table : tables_) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& [ctx, counts] : table) rows.push_back({{"context", ctx}, {"counts", counts}});
    tables.push_back(std::move(rows));
  }
  return {{"order", order_},       {"smoothing", smoothing_}, {"max_len", max_len_},
          {"alphabet", alphabet_}, {"tables", std::move(tables)}};
}

NGramGenerator NGramGenerator::from_json(const nlohmann::json& doc) {
  try {
    NGramGenerator g;
    g.order_ = doc.at("order").get<int>();
    g.smoothing_ = doc.at("smoothing").get<double>();
    g.max_len_ = doc.at("max_len").get<std::size_t>();
    g.alphabet_ = doc.at("alphabet").get<std::vector<Label>>();
    for (std::size_t i = 0; i < g.alphabet_.size(); ++i) g.ids_[g.alphabet_[i]] = i;
    if (g.order_ < 1 || g.alphabet_.empty() || g.max_len_ == 0) throw InvalidInput("invalid generator checkpoint");
    const auto& tables = doc.at("tables");
    if (tables.size() != static_cast<std::size_t>(g.order_)) throw InvalidInput("generator checkpoint: table count");
    g.tables_.assign(tables.size(), {});
    for (std::size_t k = 0; k < tables.size(); ++k) {
      for (const auto& row : tables[k]) {
        auto ctx = row.at("context").get<Context>();
        auto counts = row.at("counts").get<std::vector<double>>();
        if (ctx.size() != k || counts.size() != g.alphabet_.size() + 1) {
          throw InvalidInput("generator checkpoint: malformed table row");
        }
        g.tables_[k].emplace(std::move(ctx), std::move(counts));
      }
    }
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("generator checkpoint: ") + e.what());
  }
}

}  // namespace avatar
