#pragma once

#include <array>
#include <cmath>

namespace conjnet {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double norm() const { return std::hypot(x, y); }
};

// Oriented rectangle: center, half extents along local axes, rotation angle
// in radians. Cells are rod shaped, so half_len >= half_wid by convention
// (not enforced).
struct OrientedBox {
    Vec2 center;
    double half_len = 0.0;
    double half_wid = 0.0;
    double angle = 0.0;

    std::array<Vec2, 4> corners() const;
    double perimeter() const { return 4.0 * (half_len + half_wid); }
    // Radius of the circumscribed circle, for cheap distance lower bounds.
    double circumradius() const { return std::hypot(half_len, half_wid); }
};

// Distance from a point to the solid box (0 if inside).
double point_box_distance(Vec2 p, const OrientedBox& box);

// Minimum distance between two segments.
double segment_distance(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1);

bool boxes_overlap(const OrientedBox& a, const OrientedBox& b);

// Minimum distance between two solid oriented boxes; 0 when they overlap.
double box_separation(const OrientedBox& a, const OrientedBox& b);

// Fraction of `recipient`'s perimeter lying within `range` of the solid
// `donor` box, in [0, 1]. The inside set on each perimeter segment is a
// single interval (distance to a convex set is convex along a line), so the
// boundary points are located by ternary + binary search.
double perimeter_fraction_within(const OrientedBox& recipient, const OrientedBox& donor,
                                 double range);

}  // namespace conjnet
