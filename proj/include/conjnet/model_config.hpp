#pragma once

#include <optional>
#include <string>
#include <vector>

#include "conjnet/delay_model.hpp"

namespace conjnet {

enum class ContactFn { Base, Edge };

const char* to_string(ContactFn fn);

// One model variant. The name follows the Contact_Expression_Maturation
// convention, e.g. "Base_R(30,150)_M(15,75)".
struct ModelConfig {
    std::string name;
    ContactFn contact_fn = ContactFn::Base;
    DelayModel expression_delay;
    DelayModel maturation_delay;
    double contact_range = 0.5;  // micrometers
    // Target sum for normalized conjugation weights; when unset, the number
    // of observed conjugation events in the trial (min 1).
    std::optional<double> normalization_budget;
    bool maturity_bias_correction = true;
    // Diagnostic knob: multiplies raw contact values before normalization.
    // Normalization is scale invariant, so any value must leave results
    // unchanged; exposed for sensitivity checks.
    double raw_weight_scale = 1.0;

    static ModelConfig make(ContactFn fn, double expr_lo, double expr_hi, double mat_lo,
                            double mat_hi, double contact_range = 0.5,
                            bool bias_correction = true);
};

// The eight-model default grid: {Base,Edge} x {R(30,150),R(30,120)} x
// {M(15,75),M(30,90)}.
std::vector<ModelConfig> default_model_grid(double contact_range = 0.5,
                                            bool bias_correction = true);

// Model-grid config file (JSON): array of entries with fields contact_fn,
// expr_range, mat_range, and optional contact_range_um, budget,
// bias_correction, raw_weight_scale.
std::vector<ModelConfig> load_model_grid(const std::string& path);

}  // namespace conjnet
