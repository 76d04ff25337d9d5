#pragma once

#include <vector>

#include "conjnet/geometry.hpp"
#include "conjnet/model_config.hpp"

namespace conjnet {

// Leak-free Noisy-OR over the weights of the active parents: 1 - prod(1-p).
// Empty input means no active cause, so 0.
double noisy_or(const std::vector<double>& active_weights);

// Relative conjugation propensity for an ordered (donor, recipient) pair.
// Base: 1 when the boxes are within `range`, else 0. Edge: fraction of the
// recipient's perimeter within `range` of the donor.
double contact_raw_weight(const OrientedBox& donor, const OrientedBox& recipient,
                          ContactFn fn, double range);

struct NormalizedWeights {
    std::vector<double> weights;
    bool clamped = false;  // some weight hit the (0,1] ceiling
};

// weight_i = budget * raw_i / sum(raw), clamped into (0,1]. Scale invariant
// in the raw weights. Throws NoCandidateEdges when every raw weight is zero.
NormalizedWeights normalize_conjugation(const std::vector<double>& raw_weights,
                                        double budget);

}  // namespace conjnet
