#include "conjnet/data_ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "conjnet/errors.hpp"
#include "conjnet/numeric.hpp"

namespace conjnet {

char type_code(CellType t) {
    switch (t) {
        case CellType::Donor: return 'D';
        case CellType::Recipient: return 'R';
        case CellType::Transconjugant: return 'T';
    }
    return '?';
}

CellType type_from_code(char c) {
    switch (c) {
        case 'D': return CellType::Donor;
        case 'R': return CellType::Recipient;
        case 'T': return CellType::Transconjugant;
    }
    throw Error(Error::Kind::MalformedRow, std::string("unknown cell type: ") + c);
}

// Plasmid-lost cells are disconnected from their parent lineage, so they act
// as roots of their own subtree.
std::vector<int32_t> TrialDataset::path_to_root(int32_t c) const {
    std::vector<int32_t> path;
    for (int32_t cur = c;;) {
        path.push_back(cur);
        if (cells[cur].parent == -1 || cells[cur].plasmid_lost) break;
        cur = cells[cur].parent;
    }
    std::reverse(path.begin(), path.end());
    return path;
}

int32_t TrialDataset::root_of(int32_t c) const {
    int32_t cur = c;
    while (cells[cur].parent != -1 && !cells[cur].plasmid_lost) cur = cells[cur].parent;
    return cur;
}

namespace {

const char* kHeader[10] = {"frame",    "cell_id",  "parent_id", "type",     "rfp_flag",
                           "x",        "y",        "half_len",  "half_wid", "angle"};

std::vector<std::string> split_row(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, delim)) out.push_back(field);
    if (!line.empty() && line.back() == delim) out.emplace_back();
    return out;
}

std::string strip(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& s, int line_no) {
    char* end = nullptr;
    const std::string t = strip(s);
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size() || !std::isfinite(v))
        throw Error(Error::Kind::MalformedRow,
                    "line " + std::to_string(line_no) + ": bad number '" + s + "'");
    return v;
}

long parse_long(const std::string& s, int line_no) {
    char* end = nullptr;
    const std::string t = strip(s);
    const long v = std::strtol(t.c_str(), &end, 10);
    if (t.empty() || end != t.c_str() + t.size())
        throw Error(Error::Kind::MalformedRow,
                    "line " + std::to_string(line_no) + ": bad integer '" + s + "'");
    return v;
}

struct RawRow {
    int frame;
    std::string id;
    std::string parent_id;
    CellType label;
    bool rfp;
    OrientedBox box;
};

}  // namespace

TrialDataset parse_tracks(std::istream& source, TrackFormat format,
                          const std::string& trial_id, double frame_interval_min) {
    const char delim = format == TrackFormat::Csv ? ',' : '\t';

    std::string line;
    if (!std::getline(source, line))
        throw Error(Error::Kind::MalformedRow, "empty track file (missing header)");
    {
        const auto head = split_row(line, delim);
        if (head.size() != 10)
            throw Error(Error::Kind::MalformedRow, "header must have 10 columns");
        for (int i = 0; i < 10; ++i) {
            if (strip(head[i]) != kHeader[i])
                throw Error(Error::Kind::MalformedRow,
                            "header column " + std::to_string(i) + " must be '" +
                                kHeader[i] + "', got '" + strip(head[i]) + "'");
        }
    }

    std::vector<RawRow> rows;
    int line_no = 1;
    while (std::getline(source, line)) {
        ++line_no;
        if (strip(line).empty()) continue;
        const auto fields = split_row(line, delim);
        if (fields.size() != 10)
            throw Error(Error::Kind::MalformedRow, "line " + std::to_string(line_no) +
                                                       ": expected 10 fields, got " +
                                                       std::to_string(fields.size()));
        RawRow row;
        const long frame = parse_long(fields[0], line_no);
        if (frame < 0)
            throw Error(Error::Kind::MalformedRow,
                        "line " + std::to_string(line_no) + ": negative frame");
        row.frame = static_cast<int>(frame);
        row.id = strip(fields[1]);
        if (row.id.empty())
            throw Error(Error::Kind::MalformedRow,
                        "line " + std::to_string(line_no) + ": empty cell_id");
        row.parent_id = strip(fields[2]);
        const std::string type = strip(fields[3]);
        if (type.size() != 1)
            throw Error(Error::Kind::MalformedRow,
                        "line " + std::to_string(line_no) + ": bad type '" + type + "'");
        row.label = type_from_code(type[0]);
        const long rfp = parse_long(fields[4], line_no);
        if (rfp != 0 && rfp != 1)
            throw Error(Error::Kind::MalformedRow,
                        "line " + std::to_string(line_no) + ": rfp_flag must be 0 or 1");
        row.rfp = rfp == 1;
        row.box.center = {parse_double(fields[5], line_no), parse_double(fields[6], line_no)};
        row.box.half_len = parse_double(fields[7], line_no);
        row.box.half_wid = parse_double(fields[8], line_no);
        row.box.angle = parse_double(fields[9], line_no);
        if (row.box.half_len <= 0.0 || row.box.half_wid <= 0.0)
            throw Error(Error::Kind::NonPositiveExtent,
                        "line " + std::to_string(line_no) + ": non-positive half extent");
        rows.push_back(std::move(row));
    }

    std::stable_sort(rows.begin(), rows.end(), [](const RawRow& a, const RawRow& b) {
        return std::tie(a.frame, a.id) < std::tie(b.frame, b.id);
    });

    TrialDataset ds;
    ds.trial_id = trial_id;
    ds.frame_interval_min = frame_interval_min;

    std::unordered_map<std::string, int32_t> index_by_id;
    index_by_id.reserve(rows.size());
    for (const RawRow& row : rows) {
        if (index_by_id.count(row.id))
            throw Error(Error::Kind::DuplicateCellId, "duplicate cell_id '" + row.id + "'");
        Cell cell;
        cell.id = row.id;
        cell.frame = row.frame;
        cell.label = row.label;
        cell.rfp = row.rfp;
        cell.box = row.box;
        index_by_id.emplace(row.id, static_cast<int32_t>(ds.cells.size()));
        ds.cells.push_back(std::move(cell));
    }

    int max_frame = -1;
    for (const Cell& c : ds.cells) max_frame = std::max(max_frame, c.frame);
    ds.frames.assign(static_cast<size_t>(max_frame + 1), {});
    for (size_t i = 0; i < ds.cells.size(); ++i)
        ds.frames[ds.cells[i].frame].push_back(static_cast<int32_t>(i));

    int mid_trial_roots = 0;
    for (size_t i = 0; i < rows.size(); ++i) {
        const RawRow& row = rows[i];
        Cell& cell = ds.cells[i];
        if (row.parent_id.empty()) {
            if (row.frame > 0) ++mid_trial_roots;
            continue;
        }
        auto it = index_by_id.find(row.parent_id);
        if (it == index_by_id.end())
            throw Error(Error::Kind::MissingParent,
                        "cell '" + row.id + "': parent '" + row.parent_id + "' not found");
        const Cell& parent = ds.cells[it->second];
        if (parent.frame != row.frame - 1)
            throw Error(Error::Kind::MissingParent,
                        "cell '" + row.id + "': parent '" + row.parent_id +
                            "' is not in the previous frame");
        cell.parent = it->second;
        ds.cells[it->second].children.push_back(static_cast<int32_t>(i));
    }
    if (mid_trial_roots > 0)
        ds.warnings.push_back(std::to_string(mid_trial_roots) +
                              " cell(s) appear mid-trial without a parent");

    int overfull = 0, dropouts = 0;
    int32_t next_lineage = 0;
    for (size_t i = 0; i < ds.cells.size(); ++i) {
        Cell& cell = ds.cells[i];
        if (cell.children.size() > 2) ++overfull;
        if (cell.children.empty() && cell.frame < max_frame) ++dropouts;
        cell.lineage = cell.parent == -1 ? next_lineage++ : ds.cells[cell.parent].lineage;
    }
    if (overfull > 0)
        ds.warnings.push_back(std::to_string(overfull) + " cell(s) have more than 2 children");
    if (dropouts > 0)
        ds.warnings.push_back(std::to_string(dropouts) +
                              " lineage(s) end before the last frame (tracking dropouts)");

    ds.contact_candidates.assign(ds.frames.size(), {});
    return ds;
}

TrialDataset parse_tracks_file(const std::string& path, const std::string& trial_id,
                               double frame_interval_min) {
    std::ifstream in(path);
    if (!in) throw Error(Error::Kind::DataError, "cannot open track file: " + path);
    TrackFormat fmt =
        path.size() > 4 && path.substr(path.size() - 4) == ".tsv" ? TrackFormat::Tsv
                                                                  : TrackFormat::Csv;
    return parse_tracks(in, fmt, trial_id, frame_interval_min);
}

void serialize_tracks(const TrialDataset& dataset, std::ostream& out, TrackFormat format) {
    const char d = format == TrackFormat::Csv ? ',' : '\t';
    for (int i = 0; i < 10; ++i) out << (i ? std::string(1, d) : "") << kHeader[i];
    out << "\n";
    for (const Cell& c : dataset.cells) {
        out << c.frame << d << c.id << d
            << (c.parent == -1 ? "" : dataset.cells[c.parent].id) << d << type_code(c.label)
            << d << (c.rfp ? 1 : 0) << d << fmt_double(c.box.center.x) << d
            << fmt_double(c.box.center.y) << d << fmt_double(c.box.half_len) << d
            << fmt_double(c.box.half_wid) << d << fmt_double(c.box.angle) << "\n";
    }
}

TrialDataset load_trial_manifest(const std::string& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw Error(Error::Kind::ConfigError, "cannot open manifest: " + manifest_path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Error::Kind::ConfigError, "bad trial manifest: " + std::string(e.what()));
    }
    const std::string trial_id = doc.at("trial_id").get<std::string>();
    const double interval = doc.value("frame_interval_min", 5.0);
    if (interval <= 0)
        throw Error(Error::Kind::ConfigError, "frame_interval_min must be positive");
    std::string track = doc.at("track_file").get<std::string>();
    // relative to the manifest's directory
    if (!track.empty() && track[0] != '/') {
        const auto slash = manifest_path.find_last_of('/');
        if (slash != std::string::npos) track = manifest_path.substr(0, slash + 1) + track;
    }
    return parse_tracks_file(track, trial_id, interval);
}

TrialDataset propagate_labels(TrialDataset dataset) {
    int relabelled = 0, rfp_reversals = 0;
    // frames ascending; cells are stored frame-major so index order suffices
    for (size_t i = 0; i < dataset.cells.size(); ++i) {
        Cell& cell = dataset.cells[i];
        if (cell.parent == -1) continue;
        const Cell& parent = dataset.cells[cell.parent];
        if (parent.label == CellType::Transconjugant &&
            cell.label != CellType::Transconjugant) {
            cell.label = CellType::Transconjugant;
            ++relabelled;
        } else if (parent.label == CellType::Donor && cell.label != CellType::Donor) {
            cell.label = CellType::Donor;
            ++relabelled;
        }
        if (parent.rfp && !cell.rfp) ++rfp_reversals;
    }
    if (relabelled > 0)
        dataset.warnings.push_back(std::to_string(relabelled) +
                                   " cell(s) relabelled by lineage propagation");
    if (rfp_reversals > 0)
        dataset.warnings.push_back(std::to_string(rfp_reversals) +
                                   " cell(s) drop below the RFP threshold after an ancestor "
                                   "crossed it (kept as observed)");
    return dataset;
}

std::vector<int32_t> first_threshold_cells(const TrialDataset& dataset) {
    std::vector<int32_t> out;
    for (size_t i = 0; i < dataset.cells.size(); ++i) {
        const Cell& c = dataset.cells[i];
        if (!c.rfp) continue;
        if (c.parent != -1 && dataset.cells[c.parent].rfp) continue;
        out.push_back(static_cast<int32_t>(i));
    }
    return out;
}

namespace {

// Earliest RFP-threshold time in the subtree rooted at `start`, or nullopt.
std::optional<double> earliest_threshold_in_subtree(const TrialDataset& ds, int32_t start) {
    std::vector<int32_t> stack{start};
    std::optional<double> best;
    while (!stack.empty()) {
        const int32_t i = stack.back();
        stack.pop_back();
        const Cell& c = ds.cells[i];
        if (c.rfp && (c.parent == -1 || !ds.cells[c.parent].rfp)) {
            const double t = ds.time_of_frame(c.frame);
            if (!best || t < *best) best = t;
        }
        for (int32_t ch : c.children) stack.push_back(ch);
    }
    return best;
}

}  // namespace

TrialDataset repair_plasmid_loss(TrialDataset dataset, double expr_lo, double expr_hi) {
    int events = 0;
    for (size_t p = 0; p < dataset.cells.size(); ++p) {
        const Cell& parent = dataset.cells[p];
        if (parent.children.size() < 2) continue;
        const double division_time = dataset.time_of_frame(parent.frame + 1);
        for (size_t ai = 0; ai < parent.children.size(); ++ai) {
            const auto t_a = earliest_threshold_in_subtree(dataset, parent.children[ai]);
            if (!t_a) continue;
            // latest conjugation time consistent with A's threshold
            const double latest_conj = *t_a - expr_lo;
            if (latest_conj >= division_time) continue;  // could still postdate division
            const double deadline = latest_conj + expr_hi;
            for (size_t bi = 0; bi < parent.children.size(); ++bi) {
                if (bi == ai) continue;
                const int32_t b = parent.children[bi];
                if (dataset.cells[b].plasmid_lost) continue;
                const auto t_b = earliest_threshold_in_subtree(dataset, b);
                if (t_b && *t_b <= deadline) continue;  // sibling lit up in time
                dataset.cells[b].plasmid_lost = true;
                dataset.loss_events.push_back({b, dataset.cells[b].frame});
                ++events;
            }
        }
    }
    if (events > 0) {
        std::sort(dataset.loss_events.begin(), dataset.loss_events.end(),
                  [](const LossEvent& x, const LossEvent& y) {
                      return std::tie(x.frame, x.cell) < std::tie(y.frame, y.cell);
                  });
        dataset.warnings.push_back(std::to_string(events) +
                                   " daughter lineage(s) assumed to have lost the plasmid");
    }
    return dataset;
}

TrialDataset detect_contact_candidates(TrialDataset dataset, double max_radius) {
    dataset.contact_candidates.assign(dataset.frames.size(), {});
    dataset.contact_candidate_radius = max_radius;
    for (size_t f = 0; f < dataset.frames.size(); ++f) {
        const auto& frame = dataset.frames[f];
        auto& out = dataset.contact_candidates[f];
        for (size_t i = 0; i < frame.size(); ++i) {
            const Cell& a = dataset.cells[frame[i]];
            for (size_t j = i + 1; j < frame.size(); ++j) {
                const Cell& b = dataset.cells[frame[j]];
                const double lower_bound = (a.box.center - b.box.center).norm() -
                                           a.box.circumradius() - b.box.circumradius();
                if (lower_bound > max_radius) continue;
                const double dist = box_separation(a.box, b.box);
                if (dist <= max_radius) out.push_back({frame[i], frame[j], dist});
            }
        }
    }
    return dataset;
}

bool donor_like(const TrialDataset& dataset, int32_t cell) {
    if (dataset.cells[cell].label == CellType::Donor) return true;
    const Cell& root = dataset.cells[dataset.root_of(cell)];
    return root.frame == 0 && root.rfp;
}

}  // namespace conjnet
