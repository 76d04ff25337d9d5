#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "conjnet/geometry.hpp"

namespace conjnet {

enum class CellType : uint8_t { Donor, Recipient, Transconjugant };

char type_code(CellType t);
CellType type_from_code(char c);

// One cell in one frame. Identity is per observation: the same physical cell
// appears as a new row every frame, linked through parent.
struct Cell {
    std::string id;
    int frame = 0;
    int32_t parent = -1;  // index into TrialDataset::cells, -1 for roots
    std::vector<int32_t> children;
    CellType label = CellType::Recipient;
    bool rfp = false;
    OrientedBox box;
    int32_t lineage = -1;       // forest component id (root order)
    bool plasmid_lost = false;  // lineage link into this cell is severed
};

struct ContactPair {
    int32_t a = 0;  // a < b, cells co-resident in one frame
    int32_t b = 0;
    double distance = 0.0;
};

struct LossEvent {
    int32_t cell = 0;  // the daughter whose lineage is assumed to have lost the plasmid
    int frame = 0;
};

// Canonical representation of one microfluidic-trap experiment.
struct TrialDataset {
    std::string trial_id;
    double frame_interval_min = 5.0;
    std::vector<Cell> cells;                      // sorted by (frame, id)
    std::vector<std::vector<int32_t>> frames;     // cell indices per frame
    std::vector<std::vector<ContactPair>> contact_candidates;  // per frame
    double contact_candidate_radius = 0.0;
    std::vector<LossEvent> loss_events;
    std::vector<std::string> warnings;

    int frame_count() const { return static_cast<int>(frames.size()); }
    double time_of_frame(int f) const { return f * frame_interval_min; }
    const Cell& cell(int32_t i) const { return cells[static_cast<size_t>(i)]; }
    // Path of cell indices from the lineage root down to `c`, inclusive.
    std::vector<int32_t> path_to_root(int32_t c) const;
    int32_t root_of(int32_t c) const;
};

enum class TrackFormat { Csv, Tsv };

// Track file: one header row, then one row per cell per frame with columns
// frame,cell_id,parent_id,type,rfp_flag,x,y,half_len,half_wid,angle.
TrialDataset parse_tracks(std::istream& source, TrackFormat format = TrackFormat::Csv,
                          const std::string& trial_id = "trial",
                          double frame_interval_min = 5.0);
TrialDataset parse_tracks_file(const std::string& path, const std::string& trial_id,
                               double frame_interval_min = 5.0);
void serialize_tracks(const TrialDataset& dataset, std::ostream& out,
                      TrackFormat format = TrackFormat::Csv);

// Trial manifest: JSON with trial_id, frame_interval_min, track_file.
TrialDataset load_trial_manifest(const std::string& manifest_path);

// Descendants of Transconjugant cells become Transconjugant, descendants of
// Donor cells become Donor; disagreements with the input labels are logged.
TrialDataset propagate_labels(TrialDataset dataset);

// When one daughter lineage reaches the RFP threshold so early that the
// implied conjugation predates the division while the sibling lineage never
// lights up in time, the sibling is assumed to have lost the plasmid and is
// disconnected from the parent lineage. expr_lo/expr_hi bound the expression
// delay across every configured model (the maximal window), so the repair is
// model independent. Idempotent.
TrialDataset repair_plasmid_loss(TrialDataset dataset, double expr_lo = 30.0,
                                 double expr_hi = 150.0);

// All unordered same-frame pairs with bounding-box separation <= max_radius,
// a superset of every model's contact set.
TrialDataset detect_contact_candidates(TrialDataset dataset, double max_radius);

// True when the cell belongs to a lineage that carries the plasmid from the
// first frame: labelled Donor, or rooted at a frame-0 cell already above the
// RFP threshold (such cells are mature by assumption).
bool donor_like(const TrialDataset& dataset, int32_t cell);

// Cells whose RFP flag turns on (no parent, or parent below threshold).
std::vector<int32_t> first_threshold_cells(const TrialDataset& dataset);

}  // namespace conjnet
