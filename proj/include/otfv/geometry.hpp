#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace otfv {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

// Shoelace area; positive for counter-clockwise polygons.
double polygon_area(std::span<const Vec2> poly);
Vec2 polygon_vertex_mean(std::span<const Vec2> poly);
double polygon_diameter(std::span<const Vec2> poly);
bool point_in_polygon(Vec2 p, std::span<const Vec2> poly);
// 0 if p lies inside, otherwise distance to the boundary.
double distance_to_polygon(Vec2 p, std::span<const Vec2> poly);

// Circumcenter of a (non-degenerate) triangle.
Vec2 circumcenter(Vec2 a, Vec2 b, Vec2 c);

} // namespace otfv
