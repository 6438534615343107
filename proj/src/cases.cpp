#include <cmath>

#include "otfv/analysis.hpp"
#include "otfv/errors.hpp"

namespace otfv {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

AnalyticCase translation_case() {
    // Compactly supported cosine bump translated from (0.3,0.3) to (0.7,0.7);
    // the potential is affine, the velocity field constant. Normalized to a
    // probability density (the raw bump carries mass 9 pi / 100), which is
    // the convention under which W2 = 2 sqrt(2)/5.
    AnalyticCase cs;
    cs.name = "translation";
    const double inv_mass = 100.0 / (9.0 * kPi);
    cs.rho = [inv_mass](double t, double x, double y) {
        const double cx = 0.3 + 0.4 * t;
        const double cy = 0.3 + 0.4 * t;
        const double r2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
        if (r2 > 0.09) return 0.0;
        return (1.0 + std::cos(100.0 * kPi / 9.0 * r2)) * inv_mass;
    };
    cs.phi = [](double t, double x, double y) { return 0.4 * x + 0.4 * y - 0.16 * t; };
    cs.w2_exact = 2.0 * std::sqrt(2.0) / 5.0;
    cs.notes = "smooth, velocity constant in space";
    return cs;
}

AnalyticCase compression_case(double c) {
    if (c <= 0.0 || c > 1.0) throw Error("compression_case: c in (0, 1] required");
    AnalyticCase cs;
    cs.name = "compression";
    cs.rho = [c](double t, double x, double) {
        const double w = t * (c - 1.0) + 1.0; // support width at time t
        const double u = x - 0.5;
        if (std::abs(u) > 0.5 * w) return 0.0;
        return (1.0 + std::cos(2.0 * kPi / w * u)) / w;
    };
    cs.phi = [c](double t, double x, double) {
        const double u = x - 0.5;
        return 0.5 * (c - 1.0) / (t * (c - 1.0) + 1.0) * u * u;
    };
    cs.w2_exact = std::abs(c - 1.0) * std::sqrt((kPi * kPi - 6.0) / (12.0 * kPi * kPi));
    cs.notes = "1d compression by factor c";
    return cs;
}

AnalyticCase sinusoidal_case() {
    AnalyticCase cs;
    cs.name = "sinusoidal";
    cs.rho = [](double t, double x, double y) {
        const double r = std::hypot(x - 0.5, y - 0.5);
        const double v = std::cos(2.0 * kPi * r);
        // Only t = 0 and t = 1 are meaningful; no exact interpolation known.
        return (1.0 - 2.0 * t) * v + 1.5;
    };
    cs.qualitative = true;
    cs.notes = "boundary data only; exposes oscillations of the non-enriched scheme";
    return cs;
}

AnalyticCase cross_case() {
    AnalyticCase cs;
    cs.name = "cross";
    const double arm = 0.3, half = 0.075;
    auto in_cross = [arm, half](double x, double y) {
        return (std::abs(x) <= arm && std::abs(y) <= half) ||
               (std::abs(y) <= arm && std::abs(x) <= half);
    };
    cs.rho = [in_cross](double t, double x, double y) {
        double u = x - 0.5;
        double v = y - 0.5;
        if (t > 0.5) { // rotate by 45 degrees for the final density
            const double c = std::cos(kPi / 4.0), s = std::sin(kPi / 4.0);
            const double ru = c * u + s * v;
            v = -s * u + c * v;
            u = ru;
        }
        return in_cross(u, v) ? 1.0 : 0.0;
    };
    cs.qualitative = true;
    cs.notes = "cross indicator vs its 45-degree rotation";
    return cs;
}

std::vector<AnalyticCase> builtin_cases() {
    return {translation_case(), compression_case(0.3), sinusoidal_case(), cross_case()};
}

AnalyticCase find_case(const std::string& name, double c) {
    if (name == "translation") return translation_case();
    if (name == "compression") return compression_case(c);
    if (name == "sinusoidal") return sinusoidal_case();
    if (name == "cross") return cross_case();
    throw Error("unknown case: " + name);
}

} // namespace otfv
