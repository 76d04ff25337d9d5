#include "conjnet/oracle.hpp"

#include <cstdint>
#include <string>

#include "conjnet/errors.hpp"

namespace conjnet {

double enumerate_joint(const BayesNet& net, const Assignment& evidence,
                       const Assignment& target, int max_latent) {
    const size_t n = static_cast<size_t>(net.var_count());
    std::vector<int8_t> value(n, -1);  // -1 latent
    for (auto [v, b] : evidence) value[static_cast<size_t>(v)] = b ? 1 : 0;

    std::vector<VarIndex> latents;
    for (size_t v = 0; v < n; ++v)
        if (net.present[v] && value[v] == -1) latents.push_back(static_cast<VarIndex>(v));
    if (static_cast<int>(latents.size()) > max_latent)
        throw Error(Error::Kind::TooLarge,
                    std::to_string(latents.size()) + " latent vars exceed the limit");

    // which factors participate: latent vars always; evidence vars only when
    // some parent is latent
    std::vector<VarIndex> factor_vars;
    for (size_t v = 0; v < n; ++v) {
        if (!net.present[v]) continue;
        if (value[v] == -1) {
            factor_vars.push_back(static_cast<VarIndex>(v));
            continue;
        }
        for (const ParentEdge& e : net.parents[v]) {
            if (value[static_cast<size_t>(e.src)] == -1) {
                factor_vars.push_back(static_cast<VarIndex>(v));
                break;
            }
        }
    }

    double numerator = 0.0, denominator = 0.0;
    const uint64_t combos = uint64_t{1} << latents.size();
    for (uint64_t mask = 0; mask < combos; ++mask) {
        for (size_t i = 0; i < latents.size(); ++i)
            value[static_cast<size_t>(latents[i])] = (mask >> i) & 1 ? 1 : 0;
        double w = 1.0;
        for (VarIndex v : factor_vars) {
            double survive = 1.0;
            for (const ParentEdge& e : net.parents[static_cast<size_t>(v)])
                if (value[static_cast<size_t>(e.src)] == 1) survive *= (1.0 - e.weight);
            const double p1 = 1.0 - survive;
            w *= value[static_cast<size_t>(v)] == 1 ? p1 : 1.0 - p1;
            if (w == 0.0) break;
        }
        if (w == 0.0) continue;
        denominator += w;
        bool matches = true;
        for (auto [v, b] : target) {
            if (value[static_cast<size_t>(v)] != (b ? 1 : 0)) {
                matches = false;
                break;
            }
        }
        if (matches) numerator += w;
    }
    for (VarIndex v : latents) value[static_cast<size_t>(v)] = -1;
    if (denominator == 0.0) return 0.0;  // evidence itself impossible
    return numerator / denominator;
}

}  // namespace conjnet
