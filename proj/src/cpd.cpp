#include "conjnet/cpd.hpp"

#include <algorithm>

#include "conjnet/errors.hpp"

namespace conjnet {

double noisy_or(const std::vector<double>& active_weights) {
    double survive = 1.0;
    for (double p : active_weights) survive *= (1.0 - p);
    return 1.0 - survive;
}

double contact_raw_weight(const OrientedBox& donor, const OrientedBox& recipient,
                          ContactFn fn, double range) {
    if (fn == ContactFn::Base)
        return box_separation(donor, recipient) <= range ? 1.0 : 0.0;
    return perimeter_fraction_within(recipient, donor, range);
}

NormalizedWeights normalize_conjugation(const std::vector<double>& raw_weights,
                                        double budget) {
    double sum = 0.0;
    for (double r : raw_weights) sum += r;
    if (sum <= 0.0)
        throw Error(Error::Kind::NoCandidateEdges,
                    "no conjugation edge has positive raw weight");
    NormalizedWeights out;
    out.weights.reserve(raw_weights.size());
    for (double r : raw_weights) {
        double w = budget * (r / sum);
        if (w > 1.0) {
            w = 1.0;
            out.clamped = true;
        }
        out.weights.push_back(w);
    }
    return out;
}

}  // namespace conjnet
