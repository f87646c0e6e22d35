#pragma once

#include <cstddef>
#include <cstdint>

#include <nlohmann/json_fwd.hpp>

#include "avatar/petri.hpp"

namespace avatar {

/// Parameters of the seeded block-structured system builder.
struct SystemSpec {
  std::uint64_t seed = 0;
  int depth = 3;  // 0..6; 0 is a single activity
  double weight_sequence = 1.0;
  double weight_xor = 1.0;
  double weight_and = 0.5;
  double weight_loop = 0.25;
  std::size_t alphabet_budget = 26;
  TokenCount loop_bound = 1;  // redo iterations per loop, 1..3
  std::size_t min_fanout = 2;
  std::size_t max_fanout = 3;
  // Chance that a non-root block above depth 0 is a single activity anyway.
  double leaf_probability = 0.3;
  bool silent_skip = false;      // make the first activity of a sequence skippable
  bool duplicate_label = false;  // relabel the last activity with the first's label

  void validate() const;
  nlohmann::json to_json() const;
  static SystemSpec from_json(const nlohmann::json& doc);
};

/// Sound block-structured net with place "start" (initial) and "end" (final).
/// XOR branches share entry and exit places, AND blocks use silent split and
/// join transitions, and loops have a silent exit and a silent redo. Each loop
/// draws its redos from a budget place holding loop_bound tokens; silent drain
/// transitions empty the budget once "end" is marked, so the final marking is
/// {end: 1}. Throws BuildError when more than alphabet_budget activities are
/// needed.
PetriNet build_system(const SystemSpec& spec);

/// A max_len at which playout of a built system is never truncated.
std::size_t system_length_bound(const PetriNet& net, const SystemSpec& spec);

struct ComplexityProfile {
  std::size_t alphabet_size = 0;
  std::size_t mu = 0;  // longest variant
  std::size_t variant_count = 0;
};

ComplexityProfile complexity_profile(const PetriNet& net, TokenCount token_cap, std::size_t max_len);

}  // namespace avatar
