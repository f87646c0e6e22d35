#include <algorithm>
#include <deque>
#include <limits>
#include <unordered_set>

#include "avatar/error.hpp"
#include "avatar/petri.hpp"

namespace avatar {
namespace {

constexpr std::size_t kUnknown = std::numeric_limits<std::size_t>::max();

}  // namespace

PlayoutLanguage::PlayoutLanguage(const PetriNet& net, TokenCount token_cap, std::uint64_t state_budget)
    : net_(net), token_cap_(token_cap), state_budget_(state_budget) {
  if (token_cap == 0) throw InvalidInput("playout language: token_cap must be positive");
  for (const auto& label : net.alphabet()) {
    label_ids_.emplace(label, labels_.size());
    labels_.push_back(label);
  }
  std::vector<Marking> seeds;
  if (net.initial_marking().max_count() <= token_cap) seeds.push_back(net.initial_marking());
  intern(closure(std::move(seeds)));
}

PlayoutLanguage::MarkingSet PlayoutLanguage::closure(std::vector<Marking> seeds) const {
  std::unordered_set<Marking, MarkingHash> seen(seeds.begin(), seeds.end());
  std::deque<Marking> queue(seeds.begin(), seeds.end());
  while (!queue.empty()) {
    Marking m = std::move(queue.front());
    queue.pop_front();
    for (auto t : enabled(net_, m)) {
      if (!net_.transition(t).silent()) continue;
      Marking next = fire(net_, m, t);
      if (next.max_count() > token_cap_) continue;
      if (seen.insert(next).second) queue.push_back(std::move(next));
    }
  }
  MarkingSet out(seen.begin(), seen.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t PlayoutLanguage::intern(MarkingSet markings) {
  auto it = state_ids_.find(markings);
  if (it != state_ids_.end()) return it->second;
  if (++expansions_ > state_budget_) throw BudgetExceeded(expansions_ - 1, 0);
  const bool permissive = net_.final_markings().empty();
  bool accepting = false;
  for (const auto& m : markings) {
    if (permissive ? enabled(net_, m).empty() : net_.is_final(m)) {
      accepting = true;
      break;
    }
  }
  const std::size_t id = states_.size();
  state_ids_.emplace(markings, id);
  states_.push_back(std::move(markings));
  accepting_.push_back(accepting);
  successors_.emplace_back(labels_.size(), kUnknown);
  return id;
}

std::size_t PlayoutLanguage::step(std::size_t state, std::size_t label) {
  if (successors_[state][label] != kUnknown) return successors_[state][label];
  std::vector<Marking> seeds;
  for (const auto& m : states_[state]) {
    for (auto t : net_.transitions_with_label(labels_[label])) {
      if (!is_enabled(net_, m, t)) continue;
      Marking next = fire(net_, m, t);
      if (next.max_count() <= token_cap_) seeds.push_back(std::move(next));
    }
  }
  const std::size_t next = intern(closure(std::move(seeds)));
  successors_[state][label] = next;
  return next;
}

bool PlayoutLanguage::accepts(const Variant& v) {
  if (v.empty()) return false;
  std::size_t state = 0;
  for (const auto& label : v) {
    auto it = label_ids_.find(label);
    if (it == label_ids_.end()) return false;
    state = step(state, it->second);
    if (states_[state].empty()) return false;
  }
  return accepting_[state];
}

std::uint64_t PlayoutLanguage::count(std::size_t max_len) {
  // Paths in the determinized automaton correspond one-to-one to words.
  std::map<std::size_t, std::uint64_t> frontier{{0, 1}};
  std::uint64_t total = 0;
  for (std::size_t depth = 1; depth <= max_len && !frontier.empty(); ++depth) {
    std::map<std::size_t, std::uint64_t> next;
    for (const auto& [state, paths] : frontier) {
      for (std::size_t label = 0; label < labels_.size(); ++label) {
        const std::size_t succ = step(state, label);
        if (states_[succ].empty()) continue;
        auto& slot = next[succ];
        if (slot > std::numeric_limits<std::uint64_t>::max() - paths) {
          throw InvalidInput("playout language: variant count overflows 64 bits");
        }
        slot += paths;
      }
    }
    for (const auto& [state, paths] : next) {
      if (!accepting_[state]) continue;
      if (total > std::numeric_limits<std::uint64_t>::max() - paths) {
        throw InvalidInput("playout language: variant count overflows 64 bits");
      }
      total += paths;
    }
    frontier = std::move(next);
  }
  return total;
}

}  // namespace avatar
