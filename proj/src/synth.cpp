#include "conjnet/synth.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <sstream>

#include "conjnet/cpd.hpp"
#include "conjnet/numeric.hpp"

namespace conjnet {

namespace {

// mt19937_64 with hand-rolled uniforms: std::uniform_real_distribution is
// not guaranteed to produce the same stream everywhere.
struct Rng {
    std::mt19937_64 eng;

    explicit Rng(uint64_t seed) : eng(seed) {}

    double uniform() { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }
    bool bernoulli(double p) { return uniform() < p; }

    // inverse-cdf sampling by bisection; works for any monotone cdf
    double sample_delay(const DelayModel& d) {
        if (d.upper <= d.lower) return d.lower;
        const double u = uniform();
        double lo = d.lower, hi = d.upper;
        for (int i = 0; i < 60; ++i) {
            const double mid = 0.5 * (lo + hi);
            if (d.cdf(mid) < u)
                lo = mid;
            else
                hi = mid;
        }
        return 0.5 * (lo + hi);
    }
};

struct SimCell {
    Vec2 pos;
    double angle = 0.0;
    double length = 2.0;  // full length
    double div_length = 4.0;
    bool initial_donor = false;
    bool has_plasmid = false;
    double conj_time = 0.0;
    double expr_delay = 0.0;
    double mat_delay = 0.0;
    std::string prev_row;  // row id in the previous frame ("" at birth)
};

OrientedBox box_of(const SimCell& c, double half_wid) {
    return {c.pos, 0.5 * c.length, half_wid, c.angle};
}

}  // namespace

SynthResult generate_trial(const SynthConfig& config, const std::string& trial_id) {
    Rng rng(config.seed);
    SynthResult result;

    std::vector<SimCell> cells;
    {
        const int n = config.initial_donors + config.initial_recipients;
        auto seed_cell = [&](double x, double y, bool donor) {
            SimCell c;
            c.pos = {x + rng.uniform(-0.4, 0.4), y + rng.uniform(-0.4, 0.4)};
            c.angle = rng.uniform(0.0, 3.141592653589793);
            c.length = config.birth_length * rng.uniform(1.0, 1.8);
            c.div_length = 2.0 * config.birth_length * rng.uniform(0.9, 1.1);
            c.initial_donor = donor;
            c.has_plasmid = donor;
            cells.push_back(c);
        };
        if (config.placement == Placement::DonorEdge) {
            // donors in a strip along the open (y=0) wall, recipients in the
            // band just above, so the interface is populated from frame 0
            for (int i = 0; i < config.initial_donors; ++i)
                seed_cell((i + 0.5) / std::max(config.initial_donors, 1) * config.arena_w,
                          1.2, true);
            const int nr = config.initial_recipients;
            const double band_lo = 2.4;
            const double band_hi = std::max(band_lo + 2.0, 0.4 * config.arena_h);
            const int cols = std::max(1, static_cast<int>(std::ceil(std::sqrt(nr * 2.0))));
            const int rows = (nr + cols - 1) / cols;
            for (int i = 0; i < nr; ++i) {
                const double gx = (i % cols + 0.5) / cols * config.arena_w;
                const double gy = band_lo + (i / cols + 0.5) / rows * (band_hi - band_lo);
                seed_cell(gx, gy, false);
            }
        } else {
            std::vector<int> slots(static_cast<size_t>(std::max(n, 1)));
            const int cols = std::max(
                1, static_cast<int>(std::ceil(std::sqrt(
                       n * config.arena_w / std::max(config.arena_h, 1e-9)))));
            const int rows = (n + cols - 1) / cols;
            for (int i = 0; i < n; ++i) slots[static_cast<size_t>(i)] = i;
            // deterministic shuffle so donors end up scattered
            for (int i = n - 1; i > 0; --i)
                std::swap(slots[static_cast<size_t>(i)],
                          slots[static_cast<size_t>(rng.uniform() * (i + 1))]);
            for (int i = 0; i < n; ++i) {
                const int slot = slots[static_cast<size_t>(i)];
                const double gx = (slot % cols + 0.5) / cols * config.arena_w;
                const double gy = (slot / cols + 0.5) / rows * config.arena_h;
                seed_cell(gx, gy, i < config.initial_donors);
            }
        }
    }

    std::ostringstream csv;
    csv << "frame,cell_id,parent_id,type,rfp_flag,x,y,half_len,half_wid,angle\n";
    long row_counter = 0;
    const double growth = std::pow(2.0, config.frame_interval_min / config.division_interval_min);
    const double arena_area = config.arena_w * config.arena_h;

    for (int frame = 0; frame < config.frames; ++frame) {
        const double t = frame * config.frame_interval_min;

        double used_area = 0.0;
        for (const SimCell& c : cells) used_area += c.length * 2.0 * config.cell_half_wid;
        if (used_area > 0.8 * arena_area) {
            result.truth.truncated = true;
            break;
        }

        // emit this frame
        std::vector<std::string> row_ids(cells.size());
        for (size_t i = 0; i < cells.size(); ++i) {
            SimCell& c = cells[i];
            row_ids[i] = "c" + std::to_string(row_counter++);
            char type = 'R';
            int rfp = 0;
            if (c.initial_donor) {
                type = 'D';
                rfp = 1;
            } else if (c.has_plasmid && t >= c.conj_time + c.expr_delay) {
                type = 'T';
                rfp = 1;
            }
            csv << frame << ',' << row_ids[i] << ',' << c.prev_row << ',' << type << ','
                << rfp << ',' << fmt_double(c.pos.x) << ',' << fmt_double(c.pos.y) << ','
                << fmt_double(0.5 * c.length) << ',' << fmt_double(config.cell_half_wid)
                << ',' << fmt_double(c.angle) << "\n";
            c.prev_row = row_ids[i];
        }

        // conjugation attempts, canonical order
        for (size_t d = 0; d < cells.size(); ++d) {
            const SimCell& donor = cells[d];
            const bool mature = donor.initial_donor ||
                                (donor.has_plasmid && t >= donor.conj_time + donor.mat_delay);
            if (!mature) continue;
            for (size_t r = 0; r < cells.size(); ++r) {
                if (r == d || cells[r].has_plasmid) continue;
                const double value = contact_raw_weight(
                    box_of(donor, config.cell_half_wid), box_of(cells[r], config.cell_half_wid),
                    config.true_contact_fn, config.contact_range);
                if (value <= 0.0) continue;
                if (!rng.bernoulli(std::min(config.conj_rate * value, 1.0))) continue;
                SimCell& recip = cells[r];
                recip.has_plasmid = true;
                recip.conj_time = t;
                recip.expr_delay = rng.sample_delay(config.true_expr_delay);
                recip.mat_delay = rng.sample_delay(config.true_mat_delay);
                result.truth.events.push_back(
                    {frame, row_ids[d], row_ids[r], recip.expr_delay, recip.mat_delay});
            }
        }

        if (frame + 1 == config.frames) break;

        // grow, drift and divide
        std::vector<SimCell> next;
        next.reserve(cells.size() * 2);
        for (SimCell& c : cells) {
            c.length *= growth;
            c.pos.x += rng.uniform(-config.frame_jitter_um, config.frame_jitter_um);
            c.pos.y += rng.uniform(-config.frame_jitter_um, config.frame_jitter_um) -
                       config.flow_um_per_frame;
            c.angle += rng.uniform(-0.03, 0.03);
            if (c.length < c.div_length) {
                next.push_back(c);
                continue;
            }
            const Vec2 axis{std::cos(c.angle), std::sin(c.angle)};
            for (int child = 0; child < 2; ++child) {
                SimCell ch = c;
                ch.length = 0.5 * c.length;
                ch.pos = c.pos + axis * ((child == 0 ? -0.25 : 0.25) * c.length);
                ch.angle = c.angle + rng.uniform(-config.division_angle_jitter,
                                                 config.division_angle_jitter);
                ch.div_length = 2.0 * config.birth_length * rng.uniform(0.9, 1.1);
                next.push_back(ch);
            }
        }
        cells = std::move(next);

        // overlap relaxation: push overlapping pairs apart along the center line
        for (int iter = 0; iter < 25; ++iter) {
            bool moved = false;
            for (size_t i = 0; i < cells.size(); ++i) {
                for (size_t j = i + 1; j < cells.size(); ++j) {
                    const Vec2 delta = cells[j].pos - cells[i].pos;
                    const double dist = delta.norm();
                    const double reach = 0.5 * (cells[i].length + cells[j].length);
                    if (dist > reach) continue;
                    if (!boxes_overlap(box_of(cells[i], config.cell_half_wid),
                                       box_of(cells[j], config.cell_half_wid)))
                        continue;
                    Vec2 dir = dist > 1e-9 ? delta * (1.0 / dist)
                                           : Vec2{std::cos(cells[i].angle + 1.57),
                                                  std::sin(cells[i].angle + 1.57)};
                    const double step = 0.12;
                    cells[i].pos = cells[i].pos - dir * step;
                    cells[j].pos = cells[j].pos + dir * step;
                    moved = true;
                }
            }
            if (!moved) break;
        }

        // washout: cells pushed past the walls leave the trap
        std::vector<SimCell> kept;
        kept.reserve(cells.size());
        for (const SimCell& c : cells) {
            if (c.pos.x < 0.0 || c.pos.x > config.arena_w || c.pos.y < 0.0 ||
                c.pos.y > config.arena_h)
                continue;
            kept.push_back(c);
        }
        cells = std::move(kept);
        if (cells.empty()) break;
    }

    result.track_csv = csv.str();
    std::istringstream in(result.track_csv);
    result.dataset = parse_tracks(in, TrackFormat::Csv, trial_id, config.frame_interval_min);
    if (result.truth.truncated)
        result.dataset.warnings.push_back("arena overflow: trial truncated");
    return result;
}

void write_ground_truth(const GroundTruth& truth, std::ostream& out) {
    out << "frame,donor_id,recipient_id,expr_delay_min,mat_delay_min\n";
    for (const GroundTruthEvent& e : truth.events) {
        out << e.frame << ',' << e.donor_id << ',' << e.recipient_id << ','
            << fmt_double(e.expr_delay_min) << ',' << fmt_double(e.mat_delay_min) << "\n";
    }
}

}  // namespace conjnet
