#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "conjnet/data_ingest.hpp"
#include "conjnet/model_config.hpp"

namespace conjnet {

// Synthetic trial generator. Deliberately simple mechanics: its only job is
// to produce tracking data whose generating mechanism is known, so model
// recovery can be tested. Identical configs produce bit-identical output.
enum class Placement {
    Mixed,      // shuffled over a grid
    DonorEdge,  // donors along the open (washout) wall, recipients inside
};

struct SynthConfig {
    uint64_t seed = 1;
    double arena_w = 30.0;  // micrometers
    double arena_h = 30.0;
    int initial_donors = 2;
    int initial_recipients = 6;
    Placement placement = Placement::Mixed;
    double division_interval_min = 35.0;
    ContactFn true_contact_fn = ContactFn::Edge;
    DelayModel true_expr_delay = DelayModel::uniform(30.0, 150.0, 'R');
    DelayModel true_mat_delay = DelayModel::uniform(30.0, 90.0, 'M');
    double conj_rate = 0.3;  // per-contact per-frame probability scale
    double contact_range = 0.5;
    int frames = 60;
    double frame_interval_min = 5.0;
    double cell_half_wid = 0.45;
    double birth_length = 2.2;  // full length at birth
    // cells jostle in the trap: per-frame positional drift and the angle
    // spread daughters take at division
    double frame_jitter_um = 0.08;
    double division_angle_jitter = 0.35;
    // drift toward the open (y=0) wall; cells crossing it wash out
    double flow_um_per_frame = 0.0;
};

struct GroundTruthEvent {
    int frame = 0;
    std::string donor_id;      // donor's row id at the event frame
    std::string recipient_id;  // recipient's row id at the event frame
    double expr_delay_min = 0.0;
    double mat_delay_min = 0.0;
};

struct GroundTruth {
    std::vector<GroundTruthEvent> events;
    bool truncated = false;  // arena overflowed; later frames dropped
};

struct SynthResult {
    TrialDataset dataset;  // validated track data (no repair applied)
    GroundTruth truth;
    std::string track_csv;  // exactly what was parsed
};

SynthResult generate_trial(const SynthConfig& config, const std::string& trial_id);

// ground_truth.events format: frame,donor_id,recipient_id,expr_delay_min,mat_delay_min
void write_ground_truth(const GroundTruth& truth, std::ostream& out);

}  // namespace conjnet
