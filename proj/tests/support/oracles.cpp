#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>

namespace avatar::oracle {
namespace {

using NamedMarking = std::map<std::string, long>;

struct RawTransition {
  std::optional<Label> label;
  std::map<std::string, long> in;
  std::map<std::string, long> out;
};

NamedMarking normalized(NamedMarking m) {
  std::erase_if(m, [](const auto& kv) { return kv.second == 0; });
  return m;
}

bool exceeds(const NamedMarking& m, long cap) {
  return std::any_of(m.begin(), m.end(), [cap](const auto& kv) { return kv.second > cap; });
}

std::vector<RawTransition> raw_transitions(const PetriNet& net) {
  std::map<std::string, std::size_t> index;
  std::vector<RawTransition> out;
  for (const auto& t : net.transitions()) {
    index[t.id] = out.size();
    out.push_back({t.label, {}, {}});
  }
  std::set<std::string> places(net.places().begin(), net.places().end());
  for (const auto& a : net.arcs()) {
    if (places.count(a.from)) {
      out[index.at(a.to)].in[a.from] = 1;
    } else {
      out[index.at(a.from)].out[a.to] = 1;
    }
  }
  return out;
}

bool can_fire(const RawTransition& t, const NamedMarking& m) {
  for (const auto& [p, w] : t.in) {
    auto it = m.find(p);
    if (it == m.end() || it->second < w) return false;
  }
  return true;
}

NamedMarking fire_raw(const RawTransition& t, NamedMarking m) {
  for (const auto& [p, w] : t.in) m[p] -= w;
  for (const auto& [p, w] : t.out) m[p] += w;
  return normalized(std::move(m));
}

}  // namespace

VariantSet brute_force_playout(const PetriNet& net, std::size_t max_len, TokenCount token_cap) {
  const auto transitions = raw_transitions(net);
  const long cap = static_cast<long>(token_cap);
  auto named = [&](const Marking& m) {
    NamedMarking out;
    for (std::size_t p = 0; p < m.size(); ++p) out[net.places()[p]] = m[p];
    return normalized(std::move(out));
  };
  std::set<NamedMarking> finals;
  for (const auto& f : net.final_markings()) finals.insert(named(f));
  const bool permissive = finals.empty();

  auto closure = [&](std::set<NamedMarking> seeds) {
    std::vector<NamedMarking> work(seeds.begin(), seeds.end());
    while (!work.empty()) {
      NamedMarking m = work.back();
      work.pop_back();
      for (const auto& t : transitions) {
        if (t.label || !can_fire(t, m)) continue;
        NamedMarking next = fire_raw(t, m);
        if (!exceeds(next, cap) && seeds.insert(next).second) work.push_back(next);
      }
    }
    return seeds;
  };
  auto terminal = [&](const NamedMarking& m) {
    if (!permissive) return finals.count(m) != 0;
    return std::none_of(transitions.begin(), transitions.end(), [&](const auto& t) { return can_fire(t, m); });
  };

  VariantSet result;
  const NamedMarking m0 = named(net.initial_marking());
  if (exceeds(m0, cap)) return result;
  std::map<std::vector<Label>, std::set<NamedMarking>> level{{{}, closure({m0})}};
  for (std::size_t len = 0; len <= max_len && !level.empty(); ++len) {
    std::map<std::vector<Label>, std::set<NamedMarking>> next_level;
    for (const auto& [word, markings] : level) {
      if (!word.empty() && std::any_of(markings.begin(), markings.end(), terminal)) result.insert(Variant(word));
      if (len == max_len) continue;
      for (const auto& m : markings) {
        for (const auto& t : transitions) {
          if (!t.label || !can_fire(t, m)) continue;
          NamedMarking next = fire_raw(t, m);
          if (exceeds(next, cap)) continue;
          auto w = word;
          w.push_back(*t.label);
          next_level[w].insert(next);
        }
      }
    }
    for (auto& [word, markings] : next_level) markings = closure(std::move(markings));
    level = std::move(next_level);
  }
  return result;
}

Gradient numeric_gradient(LossKind kind, const LinearModel& model, const FeatureRows& positives,
                          const FeatureRows& negatives, double h) {
  Gradient g;
  g.weights.resize(model.weights.size());
  LinearModel probe = model;
  for (std::size_t i = 0; i < model.weights.size(); ++i) {
    probe.weights[i] = model.weights[i] + h;
    const double up = linear_loss(kind, probe, positives, negatives);
    probe.weights[i] = model.weights[i] - h;
    const double down = linear_loss(kind, probe, positives, negatives);
    probe.weights[i] = model.weights[i];
    g.weights[i] = (up - down) / (2.0 * h);
  }
  probe.bias = model.bias + h;
  const double up = linear_loss(kind, probe, positives, negatives);
  probe.bias = model.bias - h;
  const double down = linear_loss(kind, probe, positives, negatives);
  g.bias = (up - down) / (2.0 * h);
  return g;
}

double relative_error(const Gradient& analytic, const Gradient& numeric) {
  double diff = (analytic.bias - numeric.bias) * (analytic.bias - numeric.bias);
  double norm = numeric.bias * numeric.bias;
  for (std::size_t i = 0; i < numeric.weights.size(); ++i) {
    const double d = analytic.weights[i] - numeric.weights[i];
    diff += d * d;
    norm += numeric.weights[i] * numeric.weights[i];
  }
  return std::sqrt(diff) / std::max(std::sqrt(norm), 1e-12);
}

}  // namespace avatar::oracle
