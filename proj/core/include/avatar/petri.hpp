#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "avatar/log.hpp"

namespace avatar {

using TokenCount = std::uint32_t;
using PlaceTokens = std::map<std::string, TokenCount>;

inline constexpr TokenCount kUnboundedTokens = std::numeric_limits<TokenCount>::max();

struct Transition {
  std::string id;
  std::optional<Label> label;  // nullopt = silent (tau)

  bool silent() const noexcept { return !label.has_value(); }
};

struct Arc {
  std::string from;
  std::string to;
};

/// Token counts indexed by place position in the owning net.
class Marking {
 public:
  Marking() = default;
  explicit Marking(std::size_t places) : tokens_(places, 0) {}
  explicit Marking(std::vector<TokenCount> tokens) : tokens_(std::move(tokens)) {}

  std::size_t size() const noexcept { return tokens_.size(); }
  TokenCount operator[](std::size_t p) const { return tokens_[p]; }
  TokenCount& operator[](std::size_t p) { return tokens_[p]; }
  const std::vector<TokenCount>& tokens() const noexcept { return tokens_; }
  std::uint64_t total() const noexcept;
  TokenCount max_count() const noexcept;

  auto operator<=>(const Marking&) const = default;
  bool operator==(const Marking&) const = default;

 private:
  std::vector<TokenCount> tokens_;
};

struct MarkingHash {
  std::size_t operator()(const Marking& m) const noexcept;
};

/// Labeled place/transition net with unit arc weights. Immutable once built;
/// the constructor validates structure and throws InvalidInput on violations.
class PetriNet {
 public:
  PetriNet(std::vector<std::string> places, std::vector<Transition> transitions, std::vector<Arc> arcs,
           PlaceTokens initial_marking, std::vector<PlaceTokens> final_markings);

  std::size_t place_count() const noexcept { return places_.size(); }
  std::size_t transition_count() const noexcept { return transitions_.size(); }

  const std::vector<std::string>& places() const noexcept { return places_; }
  const std::vector<Transition>& transitions() const noexcept { return transitions_; }
  const std::vector<Arc>& arcs() const noexcept { return arcs_; }
  const Transition& transition(std::size_t t) const { return transitions_[t]; }

  std::optional<std::size_t> place_index(const std::string& id) const;
  std::optional<std::size_t> transition_index(const std::string& id) const;

  // Input / output place indices of transition t (sorted, unique).
  const std::vector<std::size_t>& preset(std::size_t t) const { return preset_[t]; }
  const std::vector<std::size_t>& postset(std::size_t t) const { return postset_[t]; }

  const Marking& initial_marking() const noexcept { return initial_; }
  const std::vector<Marking>& final_markings() const noexcept { return finals_; }
  bool is_final(const Marking& m) const;

  // Transition indices carrying `label`, ascending.
  const std::vector<std::size_t>& transitions_with_label(const Label& label) const;

  // Visible labels, sorted.
  std::set<Label> alphabet() const;

  Marking marking_from(const PlaceTokens& tokens) const;
  PlaceTokens to_place_tokens(const Marking& m) const;

 private:
  std::vector<std::string> places_;
  std::vector<Transition> transitions_;
  std::vector<Arc> arcs_;
  std::map<std::string, std::size_t> place_ids_;
  std::map<std::string, std::size_t> transition_ids_;
  std::vector<std::vector<std::size_t>> preset_;
  std::vector<std::vector<std::size_t>> postset_;
  std::map<Label, std::vector<std::size_t>> by_label_;
  Marking initial_;
  std::vector<Marking> finals_;
};

bool is_enabled(const PetriNet& net, const Marking& m, std::size_t t);

// Transitions whose every input place holds at least one token, ascending.
std::vector<std::size_t> enabled(const PetriNet& net, const Marking& m);

// Throws PreconditionError when t is not enabled in m.
Marking fire(const PetriNet& net, const Marking& m, std::size_t t);

struct PlayoutOptions {
  std::size_t max_len = 0;                 // visible-label bound, must be >= 1
  TokenCount token_cap = 3;                // prune states where a place exceeds this
  std::uint64_t expansion_budget = 10'000'000;
};

struct PlayoutResult {
  VariantSet variants;
  std::uint64_t expansions = 0;
  // True when the net has no final markings and deadlocks terminate variants.
  bool permissive = false;
};

/// Exhaustive depth-first search over (emitted prefix, marking) states.
/// Throws BudgetExceeded when more than expansion_budget states are expanded.
PlayoutResult playout_enumerate(const PetriNet& net, const PlayoutOptions& options);

// Diagnostic probe: does any bounded run reach a final marking?
bool has_reachable_final_marking(const PetriNet& net, const PlayoutOptions& options);

/// Determinized playout language: each state is the silent closure of the
/// markings reachable after a label sequence. Membership and variant counts
/// agree with playout_enumerate under the same token cap, but the variants
/// are never materialized, so flower-like nets with huge playouts stay cheap.
class PlayoutLanguage {
 public:
  PlayoutLanguage(const PetriNet& net, TokenCount token_cap, std::uint64_t state_budget = 1'000'000);

  /// True when playout_enumerate with max_len >= |v| would emit v.
  bool accepts(const Variant& v);

  /// Number of distinct variants of length 1..max_len. Throws InvalidInput on
  /// overflow of 64 bits.
  std::uint64_t count(std::size_t max_len);

 private:
  using MarkingSet = std::vector<Marking>;

  std::size_t intern(MarkingSet markings);
  std::size_t step(std::size_t state, std::size_t label);
  MarkingSet closure(std::vector<Marking> seeds) const;

  const PetriNet& net_;
  TokenCount token_cap_;
  std::uint64_t state_budget_;
  std::vector<Label> labels_;
  std::map<Label, std::size_t> label_ids_;
  std::vector<MarkingSet> states_;
  std::map<MarkingSet, std::size_t> state_ids_;
  std::vector<bool> accepting_;
  // successors_[state][label]: successor state, or SIZE_MAX when not yet
  // computed. The empty marking set is an ordinary (dead) state.
  std::vector<std::vector<std::size_t>> successors_;
  std::uint64_t expansions_ = 0;
};

// --- baseline constructors -------------------------------------------------

/// Prefix-tree net whose playout is exactly `lplus`. Shared prefixes share
/// transitions, so every label is deterministic at every marking.
PetriNet trace_model(const UniqueVariantLog& lplus);

/// Single place with one self-loop per label: plays out every sequence.
PetriNet flower_model(const std::set<Label>& alphabet);

/// Directly-follows net: one place per activity (the state "after a"), one
/// visible transition per start activity and per directly-follows pair, and a
/// silent completion transition per end activity.
PetriNet dfg_discover(const VariantLog& lstar);

// --- PN JSON interchange -----------------------------------------------------

nlohmann::json petri_to_json(const PetriNet& net);
PetriNet petri_from_json(const nlohmann::json& doc);

}  // namespace avatar
