#include "otfv/geometry.hpp"

#include <algorithm>
#include <limits>

namespace otfv {

double polygon_area(std::span<const Vec2> poly) {
    double a = 0.0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 p = poly[i];
        const Vec2 q = poly[(i + 1) % n];
        a += cross(p, q);
    }
    return 0.5 * a;
}

Vec2 polygon_vertex_mean(std::span<const Vec2> poly) {
    Vec2 c{0.0, 0.0};
    for (const Vec2& p : poly) c = c + p;
    return (1.0 / static_cast<double>(poly.size())) * c;
}

double polygon_diameter(std::span<const Vec2> poly) {
    double d = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i)
        for (std::size_t j = i + 1; j < poly.size(); ++j)
            d = std::max(d, norm(poly[i] - poly[j]));
    return d;
}

bool point_in_polygon(Vec2 p, std::span<const Vec2> poly) {
    // Winding by ray crossing; boundary points count as inside.
    bool inside = false;
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2 a = poly[j];
        const Vec2 b = poly[i];
        const Vec2 e = b - a;
        const double c = cross(e, p - a);
        if (std::abs(c) < 1e-14 && dot(p - a, p - b) <= 1e-14) return true;
        if ((b.y > p.y) != (a.y > p.y)) {
            const double xint = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if (p.x < xint) inside = !inside;
        }
    }
    return inside;
}

static double distance_to_segment(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 e = b - a;
    const double len2 = dot(e, e);
    double t = len2 > 0.0 ? dot(p - a, e) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return norm(p - (a + t * e));
}

double distance_to_polygon(Vec2 p, std::span<const Vec2> poly) {
    if (point_in_polygon(p, poly)) return 0.0;
    double d = std::numeric_limits<double>::infinity();
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i)
        d = std::min(d, distance_to_segment(p, poly[i], poly[(i + 1) % n]));
    return d;
}

Vec2 circumcenter(Vec2 a, Vec2 b, Vec2 c) {
    const Vec2 ab = b - a;
    const Vec2 ac = c - a;
    const double d = 2.0 * cross(ab, ac);
    const double ab2 = dot(ab, ab);
    const double ac2 = dot(ac, ac);
    return {a.x + (ac.y * ab2 - ab.y * ac2) / d,
            a.y + (ab.x * ac2 - ac.x * ab2) / d};
}

} // namespace otfv
