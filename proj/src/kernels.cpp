#include "otfv/kernels.hpp"

#include <limits>

namespace otfv::kernels {

// ---- scalar reference implementations -------------------------------------

namespace scalar {

void face_gradient(const double* a, const int32_t* ck, const int32_t* cl, const double* inv_d,
                   double* g, std::size_t n) {
    for (std::size_t f = 0; f < n; ++f) g[f] = (a[cl[f]] - a[ck[f]]) * inv_d[f];
}

void recon_linear(const double* a, const int32_t* ck, const int32_t* cl, const double* wk,
                  const double* wl, double* r, std::size_t n) {
    for (std::size_t f = 0; f < n; ++f) r[f] = wk[f] * a[ck[f]] + wl[f] * a[cl[f]];
}

void recon_harmonic(const double* a, const int32_t* ck, const int32_t* cl, const double* d,
                    const double* dk, const double* dl, double* r, std::size_t n) {
    for (std::size_t f = 0; f < n; ++f) {
        const double ak = a[ck[f]];
        const double al = a[cl[f]];
        const double num = d[f] * ak * al;
        r[f] = num == 0.0 ? 0.0 : num / (dk[f] * al + dl[f] * ak);
    }
}

void mul(const double* a, const double* b, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

double weighted_dot(const double* a, const double* b, const double* w, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i] * w[i];
    return s;
}

double max_step_ratio(const double* x, const double* dx, std::size_t n) {
    double r = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i)
        if (dx[i] < 0.0) {
            const double c = x[i] / (-dx[i]);
            if (c < r) r = c;
        }
    return r;
}

} // namespace scalar

// ---- AVX2 variants (kernels_avx2.cpp; null when not built) -----------------

namespace avx2 {
bool available();
void face_gradient(const double*, const int32_t*, const int32_t*, const double*, double*, std::size_t);
void recon_linear(const double*, const int32_t*, const int32_t*, const double*, const double*, double*,
                  std::size_t);
void recon_harmonic(const double*, const int32_t*, const int32_t*, const double*, const double*,
                    const double*, double*, std::size_t);
void mul(const double*, const double*, double*, std::size_t);
void axpy(double, const double*, double*, std::size_t);
double dot(const double*, const double*, std::size_t);
double weighted_dot(const double*, const double*, const double*, std::size_t);
double max_step_ratio(const double*, const double*, std::size_t);
} // namespace avx2

// ---- dispatch --------------------------------------------------------------

namespace {

struct Table {
    decltype(&scalar::face_gradient) face_gradient;
    decltype(&scalar::recon_linear) recon_linear;
    decltype(&scalar::recon_harmonic) recon_harmonic;
    decltype(&scalar::mul) mul;
    decltype(&scalar::axpy) axpy;
    decltype(&scalar::dot) dot;
    decltype(&scalar::weighted_dot) weighted_dot;
    decltype(&scalar::max_step_ratio) max_step_ratio;
};

constexpr Table scalar_table{scalar::face_gradient, scalar::recon_linear, scalar::recon_harmonic,
                             scalar::mul,           scalar::axpy,         scalar::dot,
                             scalar::weighted_dot,  scalar::max_step_ratio};

const Table avx2_table{avx2::face_gradient, avx2::recon_linear, avx2::recon_harmonic,
                       avx2::mul,           avx2::axpy,         avx2::dot,
                       avx2::weighted_dot,  avx2::max_step_ratio};

Mode g_requested = Mode::Auto;
const Table* g_table = nullptr;
Mode g_active = Mode::Scalar;

void resolve() {
    const bool want_avx2 =
        (g_requested == Mode::Avx2) || (g_requested == Mode::Auto && avx2::available());
    if (want_avx2 && avx2::available()) {
        g_table = &avx2_table;
        g_active = Mode::Avx2;
    } else {
        g_table = &scalar_table;
        g_active = Mode::Scalar;
    }
}

const Table& table() {
    if (!g_table) resolve();
    return *g_table;
}

} // namespace

void set_mode(Mode mode) {
    g_requested = mode;
    resolve();
}

Mode active_mode() {
    table();
    return g_active;
}

const char* active_mode_name() { return active_mode() == Mode::Avx2 ? "avx2" : "scalar"; }

bool avx2_supported() { return avx2::available(); }

void face_gradient(const double* a, const int32_t* ck, const int32_t* cl, const double* inv_d,
                   double* g, std::size_t n) {
    table().face_gradient(a, ck, cl, inv_d, g, n);
}
void recon_linear(const double* a, const int32_t* ck, const int32_t* cl, const double* wk,
                  const double* wl, double* r, std::size_t n) {
    table().recon_linear(a, ck, cl, wk, wl, r, n);
}
void recon_harmonic(const double* a, const int32_t* ck, const int32_t* cl, const double* d,
                    const double* dk, const double* dl, double* r, std::size_t n) {
    table().recon_harmonic(a, ck, cl, d, dk, dl, r, n);
}
void mul(const double* a, const double* b, double* out, std::size_t n) { table().mul(a, b, out, n); }
void axpy(double alpha, const double* x, double* y, std::size_t n) { table().axpy(alpha, x, y, n); }
double dot(const double* a, const double* b, std::size_t n) { return table().dot(a, b, n); }
double weighted_dot(const double* a, const double* b, const double* w, std::size_t n) {
    return table().weighted_dot(a, b, w, n);
}
double max_step_ratio(const double* x, const double* dx, std::size_t n) {
    return table().max_step_ratio(x, dx, n);
}

} // namespace otfv::kernels
