#pragma once

#include <cstddef>
#include <vector>

#include "avatar/log.hpp"
#include "avatar/losses.hpp"
#include "avatar/petri.hpp"

namespace avatar::oracle {

// Playout by explicit subset tracking over place-name markings. Reads only the
// raw place, transition and arc lists of the net, so it shares no code with
// the library's search.
VariantSet brute_force_playout(const PetriNet& net, std::size_t max_len, TokenCount token_cap);

// Central differences of linear_loss with respect to every weight and the bias.
Gradient numeric_gradient(LossKind kind, const LinearModel& model, const FeatureRows& positives,
                          const FeatureRows& negatives, double h = 1e-6);

// ||a - n|| / ||n|| over weights and bias together.
double relative_error(const Gradient& analytic, const Gradient& numeric);

}  // namespace avatar::oracle
