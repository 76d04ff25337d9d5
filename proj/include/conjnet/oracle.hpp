#pragma once

#include <utility>
#include <vector>

#include "conjnet/graph.hpp"

namespace conjnet {

using Assignment = std::vector<std::pair<VarIndex, bool>>;

// Brute-force reference: P(target | evidence) on a Noisy-OR network, by
// summing the factor product over every assignment of the latent variables.
// Deliberately written as the dumbest possible loop so it can arbitrate
// disagreements between the real backends; keep it free of their code.
//
// Variables clamped by evidence contribute their CPD factor only when at
// least one parent is latent; factors fully determined by the evidence are
// exogenous constants (initial conditions have no generative story in these
// networks) and cancel in the conditional anyway.
//
// Throws TooLarge when more than max_latent variables are latent.
double enumerate_joint(const BayesNet& net, const Assignment& evidence,
                       const Assignment& target, int max_latent = 22);

}  // namespace conjnet
