#include "avatar/petri.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>
#include <unordered_set>

#include "avatar/error.hpp"

namespace avatar {

std::uint64_t Marking::total() const noexcept {
  std::uint64_t sum = 0;
  for (auto c : tokens_) sum += c;
  return sum;
}

TokenCount Marking::max_count() const noexcept {
  TokenCount best = 0;
  for (auto c : tokens_) best = std::max(best, c);
  return best;
}

std::size_t MarkingHash::operator()(const Marking& m) const noexcept {
  std::size_t h = 0x84222325cbf29ce4ULL;
  for (auto c : m.tokens()) h = (h ^ c) * 0x100000001b3ULL;
  return h;
}

PetriNet::PetriNet(std::vector<std::string> places, std::vector<Transition> transitions,
                   std::vector<Arc> arcs, PlaceTokens initial_marking,
                   std::vector<PlaceTokens> final_markings)
    : places_(std::move(places)), transitions_(std::move(transitions)), arcs_(std::move(arcs)) {
  if (transitions_.empty()) throw InvalidInput("Petri net needs at least one transition");
  for (std::size_t i = 0; i < places_.size(); ++i) {
    if (places_[i].empty()) throw InvalidInput("Petri net: empty place id");
    if (!place_ids_.emplace(places_[i], i).second) {
      throw InvalidInput("Petri net: duplicate place id '" + places_[i] + "'");
    }
  }
  for (std::size_t i = 0; i < transitions_.size(); ++i) {
    const auto& t = transitions_[i];
    if (t.id.empty()) throw InvalidInput("Petri net: empty transition id");
    if (place_ids_.count(t.id)) {
      throw InvalidInput("Petri net: id '" + t.id + "' used for both a place and a transition");
    }
    if (!transition_ids_.emplace(t.id, i).second) {
      throw InvalidInput("Petri net: duplicate transition id '" + t.id + "'");
    }
    if (t.label && t.label->empty()) {
      throw InvalidInput("Petri net: transition '" + t.id + "' has an empty label (use null for silent)");
    }
    if (t.label) by_label_[*t.label].push_back(i);
  }

  preset_.assign(transitions_.size(), {});
  postset_.assign(transitions_.size(), {});
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& a : arcs_) {
    if (!seen.emplace(a.from, a.to).second) {
      throw InvalidInput("Petri net: duplicate arc " + a.from + " -> " + a.to);
    }
    auto fp = place_ids_.find(a.from);
    auto ft = transition_ids_.find(a.from);
    auto tp = place_ids_.find(a.to);
    auto tt = transition_ids_.find(a.to);
    if (fp != place_ids_.end() && tt != transition_ids_.end()) {
      preset_[tt->second].push_back(fp->second);
    } else if (ft != transition_ids_.end() && tp != place_ids_.end()) {
      postset_[ft->second].push_back(tp->second);
    } else if ((fp == place_ids_.end() && ft == transition_ids_.end()) ||
               (tp == place_ids_.end() && tt == transition_ids_.end())) {
      throw InvalidInput("Petri net: arc " + a.from + " -> " + a.to + " references an unknown node");
    } else {
      throw InvalidInput("Petri net: arc " + a.from + " -> " + a.to +
                         " must connect a place and a transition");
    }
  }
  for (auto& v : preset_) std::sort(v.begin(), v.end());
  for (auto& v : postset_) std::sort(v.begin(), v.end());

  initial_ = marking_from(initial_marking);
  if (initial_.total() == 0) throw InvalidInput("Petri net: initial marking holds no tokens");
  for (const auto& f : final_markings) {
    Marking m = marking_from(f);
    if (std::find(finals_.begin(), finals_.end(), m) == finals_.end()) finals_.push_back(std::move(m));
  }
}

std::optional<std::size_t> PetriNet::place_index(const std::string& id) const {
  auto it = place_ids_.find(id);
  if (it == place_ids_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> PetriNet::transition_index(const std::string& id) const {
  auto it = transition_ids_.find(id);
  if (it == transition_ids_.end()) return std::nullopt;
  return it->second;
}

bool PetriNet::is_final(const Marking& m) const {
  return std::find(finals_.begin(), finals_.end(), m) != finals_.end();
}

const std::vector<std::size_t>& PetriNet::transitions_with_label(const Label& label) const {
  static const std::vector<std::size_t> kNone;
  auto it = by_label_.find(label);
  return it == by_label_.end() ? kNone : it->second;
}

std::set<Label> PetriNet::alphabet() const {
  std::set<Label> out;
  for (const auto& [label, _] : by_label_) out.insert(label);
  return out;
}

Marking PetriNet::marking_from(const PlaceTokens& tokens) const {
  Marking m(places_.size());
  for (const auto& [place, count] : tokens) {
    auto idx = place_index(place);
    if (!idx) throw InvalidInput("marking references unknown place '" + place + "'");
    m[*idx] = count;
  }
  return m;
}

PlaceTokens PetriNet::to_place_tokens(const Marking& m) const {
  PlaceTokens out;
  for (std::size_t p = 0; p < m.size(); ++p) {
    if (m[p] != 0) out[places_[p]] = m[p];
  }
  return out;
}

bool is_enabled(const PetriNet& net, const Marking& m, std::size_t t) {
  for (auto p : net.preset(t)) {
    if (m[p] == 0) return false;
  }
  return true;
}

std::vector<std::size_t> enabled(const PetriNet& net, const Marking& m) {
  std::vector<std::size_t> out;
  for (std::size_t t = 0; t < net.transition_count(); ++t) {
    if (is_enabled(net, m, t)) out.push_back(t);
  }
  return out;
}

Marking fire(const PetriNet& net, const Marking& m, std::size_t t) {
  if (t >= net.transition_count()) throw PreconditionError("fire: unknown transition index");
  if (!is_enabled(net, m, t)) {
    throw PreconditionError("fire: transition '" + net.transition(t).id + "' is not enabled");
  }
  Marking next = m;
  for (auto p : net.preset(t)) --next[p];
  for (auto p : net.postset(t)) {
    if (next[p] == kUnboundedTokens) throw PreconditionError("fire: token count overflow");
    ++next[p];
  }
  return next;
}

namespace {

// Emitted prefixes are stored as nodes of a trie; a search state is a
// (trie node, marking) pair.
class PrefixTrie {
 public:
  PrefixTrie() { nodes_.push_back({0, 0, 0}); }

  std::uint32_t child(std::uint32_t node, std::uint32_t label) {
    const std::uint64_t key = (static_cast<std::uint64_t>(node) << 32) | label;
    auto [it, inserted] = children_.try_emplace(key, static_cast<std::uint32_t>(nodes_.size()));
    if (inserted) nodes_.push_back({node, label, nodes_[node].depth + 1});
    return it->second;
  }

  std::size_t depth(std::uint32_t node) const { return nodes_[node].depth; }

  std::vector<std::uint32_t> labels(std::uint32_t node) const {
    std::vector<std::uint32_t> out(nodes_[node].depth);
    for (std::size_t i = out.size(); i > 0; --i) {
      out[i - 1] = nodes_[node].label;
      node = nodes_[node].parent;
    }
    return out;
  }

 private:
  struct Node {
    std::uint32_t parent;
    std::uint32_t label;
    std::size_t depth;
  };
  std::vector<Node> nodes_;
  std::unordered_map<std::uint64_t, std::uint32_t> children_;
};

struct SearchState {
  std::uint32_t node;
  Marking marking;
  bool operator==(const SearchState&) const = default;
};

struct SearchStateHash {
  std::size_t operator()(const SearchState& s) const noexcept {
    return MarkingHash{}(s.marking) * 31 + s.node;
  }
};

}  // namespace

PlayoutResult playout_enumerate(const PetriNet& net, const PlayoutOptions& options) {
  if (options.max_len == 0) throw InvalidInput("playout: max_len must be positive");
  if (options.token_cap == 0) throw InvalidInput("playout: token_cap must be positive");

  std::vector<Label> label_names;
  std::map<Label, std::uint32_t> label_ids;
  std::vector<std::int64_t> transition_label(net.transition_count(), -1);
  for (std::size_t t = 0; t < net.transition_count(); ++t) {
    const auto& label = net.transition(t).label;
    if (!label) continue;
    auto [it, inserted] = label_ids.try_emplace(*label, static_cast<std::uint32_t>(label_names.size()));
    if (inserted) label_names.push_back(*label);
    transition_label[t] = it->second;
  }

  PlayoutResult result;
  result.permissive = net.final_markings().empty();

  if (net.initial_marking().max_count() > options.token_cap) return result;

  PrefixTrie trie;
  std::unordered_set<SearchState, SearchStateHash> visited;
  std::vector<SearchState> stack;
  SearchState root{0, net.initial_marking()};
  visited.insert(root);
  stack.push_back(std::move(root));

  while (!stack.empty()) {
    SearchState state = std::move(stack.back());
    stack.pop_back();
    if (++result.expansions > options.expansion_budget) {
      throw BudgetExceeded(result.expansions - 1, result.variants.size());
    }

    const auto fireable = enabled(net, state.marking);
    const std::size_t depth = trie.depth(state.node);
    const bool terminal = result.permissive ? fireable.empty() : net.is_final(state.marking);
    if (terminal && depth > 0) {
      Variant v;
      for (auto id : trie.labels(state.node)) v.labels.push_back(label_names[id]);
      result.variants.insert(std::move(v));
    }

    // Reverse order so that lower transition indices are explored first.
    for (auto it = fireable.rbegin(); it != fireable.rend(); ++it) {
      const std::size_t t = *it;
      const bool visible = transition_label[t] >= 0;
      if (visible && depth >= options.max_len) continue;
      Marking next = fire(net, state.marking, t);
      if (next.max_count() > options.token_cap) continue;
      const std::uint32_t node =
          visible ? trie.child(state.node, static_cast<std::uint32_t>(transition_label[t])) : state.node;
      SearchState succ{node, std::move(next)};
      if (visited.insert(succ).second) stack.push_back(std::move(succ));
    }
  }
  return result;
}

bool has_reachable_final_marking(const PetriNet& net, const PlayoutOptions& options) {
  if (net.final_markings().empty()) return false;
  std::unordered_set<Marking, MarkingHash> seen{net.initial_marking()};
  std::deque<Marking> queue{net.initial_marking()};
  std::uint64_t expansions = 0;
  while (!queue.empty()) {
    Marking m = std::move(queue.front());
    queue.pop_front();
    if (net.is_final(m)) return true;
    if (++expansions > options.expansion_budget) return false;
    for (auto t : enabled(net, m)) {
      Marking next = fire(net, m, t);
      if (next.max_count() > options.token_cap) continue;
      if (seen.insert(next).second) queue.push_back(std::move(next));
    }
  }
  return false;
}

}  // namespace avatar
