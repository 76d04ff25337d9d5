#include "conjnet/geometry.hpp"

#include <algorithm>

namespace conjnet {

std::array<Vec2, 4> OrientedBox::corners() const {
    const double c = std::cos(angle), s = std::sin(angle);
    const Vec2 ax{c * half_len, s * half_len};
    const Vec2 ay{-s * half_wid, c * half_wid};
    return {center + ax + ay, center + ax - ay, center - ax - ay, center - ax + ay};
}

double point_box_distance(Vec2 p, const OrientedBox& box) {
    const double c = std::cos(box.angle), s = std::sin(box.angle);
    const Vec2 d = p - box.center;
    // into box frame
    const double lx = c * d.x + s * d.y;
    const double ly = -s * d.x + c * d.y;
    const double ex = std::max(std::abs(lx) - box.half_len, 0.0);
    const double ey = std::max(std::abs(ly) - box.half_wid, 0.0);
    return std::hypot(ex, ey);
}

static double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

static double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 ab = b - a;
    const double len2 = ab.dot(ab);
    if (len2 == 0.0) return (p - a).norm();
    const double t = clamp01((p - a).dot(ab) / len2);
    return (p - (a + ab * t)).norm();
}

static bool segments_intersect(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
    auto cross = [](Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; };
    const double d1 = cross(q2 - q1, p1 - q1);
    const double d2 = cross(q2 - q1, p2 - q1);
    const double d3 = cross(p2 - p1, q1 - p1);
    const double d4 = cross(p2 - p1, q2 - p1);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
        ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
        return true;
    return false;  // collinear touching handled by the distance fallback
}

double segment_distance(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1) {
    if (segments_intersect(a0, a1, b0, b1)) return 0.0;
    double d = point_segment_distance(a0, b0, b1);
    d = std::min(d, point_segment_distance(a1, b0, b1));
    d = std::min(d, point_segment_distance(b0, a0, a1));
    d = std::min(d, point_segment_distance(b1, a0, a1));
    return d;
}

// Separating axis test on the four face normals.
bool boxes_overlap(const OrientedBox& a, const OrientedBox& b) {
    const std::array<const OrientedBox*, 2> boxes{&a, &b};
    for (const OrientedBox* box : boxes) {
        const double c = std::cos(box->angle), s = std::sin(box->angle);
        const std::array<Vec2, 2> axes{Vec2{c, s}, Vec2{-s, c}};
        for (Vec2 axis : axes) {
            auto project = [&](const OrientedBox& bb, double& lo, double& hi) {
                lo = 1e300;
                hi = -1e300;
                for (Vec2 corner : bb.corners()) {
                    const double v = corner.dot(axis);
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
            };
            double alo, ahi, blo, bhi;
            project(a, alo, ahi);
            project(b, blo, bhi);
            if (ahi < blo || bhi < alo) return false;
        }
    }
    return true;
}

double box_separation(const OrientedBox& a, const OrientedBox& b) {
    if (boxes_overlap(a, b)) return 0.0;
    const auto ca = a.corners(), cb = b.corners();
    double best = 1e300;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            best = std::min(best, segment_distance(ca[i], ca[(i + 1) % 4], cb[j],
                                                   cb[(j + 1) % 4]));
        }
    }
    return best;
}

namespace {

// Signed clearance of a perimeter point to the donor's range region.
struct SegmentClearance {
    Vec2 a, b;
    const OrientedBox* donor;
    double range;

    double operator()(double t) const {
        return point_box_distance(a + (b - a) * t, *donor) - range;
    }
};

// f is convex; locate its minimiser on [lo, hi].
double ternary_min(const SegmentClearance& f, double lo, double hi) {
    for (int it = 0; it < 48; ++it) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        if (f(m1) <= f(m2))
            hi = m2;
        else
            lo = m1;
    }
    return 0.5 * (lo + hi);
}

// Root of f between a point with f<=0 and a point with f>0.
double bisect(const SegmentClearance& f, double tin, double tout) {
    for (int it = 0; it < 48; ++it) {
        const double mid = 0.5 * (tin + tout);
        if (f(mid) <= 0.0)
            tin = mid;
        else
            tout = mid;
    }
    return 0.5 * (tin + tout);
}

}  // namespace

double perimeter_fraction_within(const OrientedBox& recipient, const OrientedBox& donor,
                                 double range) {
    const auto corners = recipient.corners();
    const double total = recipient.perimeter();
    if (total <= 0.0) return 0.0;

    double inside_len = 0.0;
    for (int i = 0; i < 4; ++i) {
        const Vec2 a = corners[i];
        const Vec2 b = corners[(i + 1) % 4];
        const double seg_len = (b - a).norm();
        if (seg_len == 0.0) continue;
        const SegmentClearance f{a, b, &donor, range};
        const double fa = f(0.0), fb = f(1.0);
        if (fa <= 0.0 && fb <= 0.0) {
            inside_len += seg_len;  // convexity: the whole segment is inside
            continue;
        }
        double tmin, fmin;
        if (fa <= 0.0) {
            tmin = 0.0;
            fmin = fa;
        } else if (fb <= 0.0) {
            tmin = 1.0;
            fmin = fb;
        } else {
            tmin = ternary_min(f, 0.0, 1.0);
            fmin = f(tmin);
            if (fmin > 0.0) continue;
        }
        const double t0 = (fa <= 0.0) ? 0.0 : bisect(f, tmin, 0.0);
        const double t1 = (fb <= 0.0) ? 1.0 : bisect(f, tmin, 1.0);
        inside_len += (t1 - t0) * seg_len;
    }
    return std::clamp(inside_len / total, 0.0, 1.0);
}

}  // namespace conjnet
