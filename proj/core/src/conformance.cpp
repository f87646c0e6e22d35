#include "avatar/conformance.hpp"

#include <algorithm>
#include <deque>
#include <iostream>
#include <limits>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "avatar/error.hpp"

namespace avatar {
namespace {

struct Replayer {
  const PetriNet& net;
  const ReplayOptions& options;
  Marking marking;
  ReplayCounts counts;

  void fire_counted(std::size_t t) {
    for (auto p : net.preset(t)) {
      if (marking[p] == 0) {
        ++counts.missing;
        ++marking[p];
      }
    }
    marking = fire(net, marking, t);
    counts.consumed += net.preset(t).size();
    counts.produced += net.postset(t).size();
  }

  // Breadth-first search over silent firings for the shortest sequence that
  // reaches a marking satisfying `goal`. Returns nullopt when none is found
  // within the configured bounds.
  template <typename Goal>
  std::optional<std::vector<std::size_t>> silent_path(const Marking& from, Goal goal) const {
    struct Node {
      Marking marking;
      std::size_t parent;
      std::size_t via;
      std::size_t depth;
    };
    std::vector<Node> nodes{{from, 0, 0, 0}};
    std::unordered_set<Marking, MarkingHash> seen{from};
    for (std::size_t head = 0; head < nodes.size(); ++head) {
      if (goal(nodes[head].marking)) {
        std::vector<std::size_t> path;
        for (std::size_t n = head; n != 0; n = nodes[n].parent) path.push_back(nodes[n].via);
        std::reverse(path.begin(), path.end());
        return path;
      }
      if (nodes[head].depth >= options.silent_depth) continue;
      for (std::size_t t = 0; t < net.transition_count(); ++t) {
        if (!net.transition(t).silent() || !is_enabled(net, nodes[head].marking, t)) continue;
        Marking next = fire(net, nodes[head].marking, t);
        if (!seen.insert(next).second) continue;
        if (nodes.size() >= options.silent_states) return std::nullopt;
        nodes.push_back({std::move(next), head, t, nodes[head].depth + 1});
      }
    }
    return std::nullopt;
  }

  bool label_reachable(const Marking& m, const Label& label) const {
    const auto& candidates = net.transitions_with_label(label);
    for (auto t : candidates) {
      if (is_enabled(net, m, t)) return true;
    }
    return silent_path(m, [&](const Marking& x) {
             return std::any_of(candidates.begin(), candidates.end(),
                                [&](std::size_t t) { return is_enabled(net, x, t); });
           }).has_value();
  }

  void step(const Label& label, const Label* next_label) {
    const auto& candidates = net.transitions_with_label(label);
    if (candidates.empty()) {
      ++counts.missing;
      ++counts.consumed;
      return;
    }
    std::vector<std::size_t> ready;
    for (auto t : candidates) {
      if (is_enabled(net, marking, t)) ready.push_back(t);
    }
    if (!ready.empty()) {
      std::size_t choice = ready.front();
      // With duplicate labels, prefer the transition after which the next
      // label can still fire.
      if (ready.size() > 1 && next_label) {
        for (auto t : ready) {
          if (label_reachable(fire(net, marking, t), *next_label)) {
            choice = t;
            break;
          }
        }
      }
      fire_counted(choice);
      return;
    }
    auto path = silent_path(marking, [&](const Marking& x) {
      return std::any_of(candidates.begin(), candidates.end(),
                         [&](std::size_t t) { return is_enabled(net, x, t); });
    });
    if (path) {
      for (auto s : *path) fire_counted(s);
      for (auto t : candidates) {
        if (is_enabled(net, marking, t)) {
          fire_counted(t);
          return;
        }
      }
    }
    // Force the candidate with the fewest missing tokens.
    std::size_t best = candidates.front();
    std::size_t best_missing = std::numeric_limits<std::size_t>::max();
    for (auto t : candidates) {
      std::size_t missing = 0;
      for (auto p : net.preset(t)) missing += marking[p] == 0;
      if (missing < best_missing) {
        best_missing = missing;
        best = t;
      }
    }
    fire_counted(best);
  }

  void finish() {
    const auto& finals = net.final_markings();
    if (finals.empty()) {
      counts.consumed += marking.total();
      return;
    }
    if (!net.is_final(marking)) {
      auto path = silent_path(marking, [&](const Marking& x) { return net.is_final(x); });
      if (path) {
        for (auto s : *path) fire_counted(s);
      }
    }
    const Marking* best = &finals.front();
    std::uint64_t best_cost = std::numeric_limits<std::uint64_t>::max();
    for (const auto& f : finals) {
      std::uint64_t cost = 0;
      for (std::size_t p = 0; p < f.size(); ++p) {
        cost += f[p] > marking[p] ? f[p] - marking[p] : marking[p] - f[p];
      }
      if (cost < best_cost) {
        best_cost = cost;
        best = &f;
      }
    }
    for (std::size_t p = 0; p < best->size(); ++p) {
      const std::uint64_t want = (*best)[p];
      const std::uint64_t have = marking[p];
      counts.consumed += want;
      if (want > have) counts.missing += want - have;
      if (have > want) counts.remaining += have - want;
    }
  }
};

double ratio(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

using MarkingSet = std::set<Marking>;

MarkingSet silent_closure(const PetriNet& net, MarkingSet seeds, const PrecisionOptions& options) {
  std::deque<Marking> queue(seeds.begin(), seeds.end());
  while (!queue.empty()) {
    Marking m = std::move(queue.front());
    queue.pop_front();
    for (std::size_t t = 0; t < net.transition_count(); ++t) {
      if (!net.transition(t).silent() || !is_enabled(net, m, t)) continue;
      Marking next = fire(net, m, t);
      if (next.max_count() > options.token_cap) continue;
      if (seeds.size() >= options.closure_states) return seeds;
      if (seeds.insert(next).second) queue.push_back(std::move(next));
    }
  }
  return seeds;
}

}  // namespace

ReplayCounts replay_variant(const PetriNet& net, const Variant& variant, const ReplayOptions& options) {
  Replayer r{net, options, net.initial_marking(), {}};
  r.counts.produced = net.initial_marking().total();
  for (std::size_t i = 0; i < variant.size(); ++i) {
    r.step(variant[i], i + 1 < variant.size() ? &variant[i + 1] : nullptr);
  }
  r.finish();
  return r.counts;
}

double token_replay_fitness(const PetriNet& net, const VariantLog& lstar, const ReplayOptions& options) {
  // Replay each distinct variant once and weight by multiplicity.
  std::map<Variant, std::uint64_t> multiplicity;
  for (const auto& v : lstar) ++multiplicity[v];
  ReplayCounts total;
  for (const auto& [v, n] : multiplicity) {
    ReplayCounts c = replay_variant(net, v, options);
    total += ReplayCounts{c.missing * n, c.remaining * n, c.consumed * n, c.produced * n};
  }
  const double fit = 0.5 * (1.0 - ratio(total.missing, total.consumed)) +
                     0.5 * (1.0 - ratio(total.remaining, total.produced));
  return std::clamp(fit, 0.0, 1.0);
}

double etc_precision(const PetriNet& net, const VariantLog& lstar, const PrecisionOptions& options) {
  struct PrefixState {
    std::uint64_t frequency = 0;
    std::set<Label> observed;
  };
  // Keyed by prefix; std::map orders a prefix before all of its extensions.
  std::map<Variant, PrefixState> states;
  for (const auto& v : lstar) {
    Variant prefix;
    for (std::size_t i = 0; i <= v.size(); ++i) {
      auto& s = states[prefix];
      ++s.frequency;
      if (i < v.size()) {
        s.observed.insert(v[i]);
        prefix.labels.push_back(v[i]);
      }
    }
  }

  std::map<Variant, MarkingSet> reached;
  std::uint64_t escaping = 0;
  std::uint64_t allowed = 0;
  for (const auto& [prefix, state] : states) {
    MarkingSet markings;
    if (prefix.empty()) {
      markings = silent_closure(net, {net.initial_marking()}, options);
    } else {
      Variant parent(std::vector<Label>(prefix.labels.begin(), prefix.labels.end() - 1));
      auto it = reached.find(parent);
      if (it == reached.end()) continue;  // parent not replayable
      MarkingSet stepped;
      const auto& candidates = net.transitions_with_label(prefix.labels.back());
      for (const auto& m : it->second) {
        for (auto t : candidates) {
          if (!is_enabled(net, m, t)) continue;
          Marking next = fire(net, m, t);
          if (next.max_count() <= options.token_cap) stepped.insert(std::move(next));
        }
      }
      if (stepped.empty()) continue;
      markings = silent_closure(net, std::move(stepped), options);
    }

    std::set<Label> enabled_labels;
    for (const auto& m : markings) {
      for (auto t : enabled(net, m)) {
        if (const auto& label = net.transition(t).label) enabled_labels.insert(*label);
      }
    }
    std::uint64_t escapes = 0;
    for (const auto& label : enabled_labels) escapes += state.observed.count(label) == 0;
    escaping += state.frequency * escapes;
    allowed += state.frequency * enabled_labels.size();
    reached.emplace(prefix, std::move(markings));
  }
  if (allowed == 0) return 1.0;
  return 1.0 - static_cast<double>(escaping) / static_cast<double>(allowed);
}

namespace {

std::size_t intersection_size(const VariantSet& a, const VariantSet& b) {
  std::size_t n = 0;
  const VariantSet& small = a.size() <= b.size() ? a : b;
  const VariantSet& large = a.size() <= b.size() ? b : a;
  for (const auto& v : small) n += large.count(v);
  return n;
}

}  // namespace

double system_fitness(const VariantSet& v_pn, const VariantSet& v_s) {
  if (v_s.empty()) throw InvalidInput("system_fitness: empty system variant set");
  return static_cast<double>(intersection_size(v_pn, v_s)) / static_cast<double>(v_s.size());
}

double system_precision(const VariantSet& v_pn, const VariantSet& v_s) {
  if (v_pn.empty()) {
    std::clog << "warning: system_precision of an empty model variant set is defined as 0\n";
    return 0.0;
  }
  return static_cast<double>(intersection_size(v_pn, v_s)) / static_cast<double>(v_pn.size());
}

double avatar_generalization(double fitness, double precision) {
  if (!(fitness >= 0.0 && fitness <= 1.0) || !(precision >= 0.0 && precision <= 1.0)) {
    throw InvalidInput("avatar_generalization: scores must lie in [0, 1]");
  }
  const double sum = fitness + precision;
  if (sum == 0.0) return 0.0;
  return 2.0 * fitness * precision / sum;
}

ConformanceScores conformance_scores(const PetriNet& net, const VariantLog& lstar, const FitnessFunction& fitness,
                                     const PrecisionFunction& precision) {
  ConformanceScores out;
  if (fitness) {
    out.fitness = fitness(net, lstar);
    out.fitness_method = "custom";
  } else {
    out.fitness = token_replay_fitness(net, lstar);
  }
  if (precision) {
    out.precision = precision(net, lstar);
    out.precision_method = "custom";
  } else {
    out.precision = etc_precision(net, lstar);
  }
  out.generalization = avatar_generalization(out.fitness, out.precision);
  return out;
}

ConformanceScores estimated_generalization(const PetriNet& net, const VariantSet& v_hat_s, std::uint64_t seed,
                                           const FitnessFunction& fitness, const PrecisionFunction& precision) {
  if (v_hat_s.empty()) {
    ConformanceScores empty;
    return empty;
  }
  const EventLog synthetic = synth_event_log(v_hat_s, seed);
  return conformance_scores(net, build_variant_logs(synthetic).lstar, fitness, precision);
}

}  // namespace avatar
