#pragma once

#include <cstddef>
#include <cstdint>

// Data-parallel inner loops of the discrete operators. Every kernel has a
// scalar reference implementation and, on x86-64 with AVX2, a vectorized
// variant selected at runtime. Elementwise kernels are bit-identical across
// variants (no FMA contraction); reductions differ only by summation order.
namespace otfv::kernels {

enum class Mode { Auto, Scalar, Avx2 };

// Auto resolves via CPU detection. Selecting Avx2 on a CPU without it is
// ignored (falls back to scalar).
void set_mode(Mode mode);
Mode active_mode();
const char* active_mode_name();
bool avx2_supported();

// g[f] = (a[cl[f]] - a[ck[f]]) * inv_d[f]
void face_gradient(const double* a, const int32_t* ck, const int32_t* cl, const double* inv_d,
                   double* g, std::size_t n);

// r[f] = wk[f]*a[ck[f]] + wl[f]*a[cl[f]]
void recon_linear(const double* a, const int32_t* ck, const int32_t* cl, const double* wk,
                  const double* wl, double* r, std::size_t n);

// r[f] = d[f]*aK*aL / (dk[f]*aL + dl[f]*aK), 0 where aK*aL == 0
void recon_harmonic(const double* a, const int32_t* ck, const int32_t* cl, const double* d,
                    const double* dk, const double* dl, double* r, std::size_t n);

// out[i] = a[i]*b[i]
void mul(const double* a, const double* b, double* out, std::size_t n);

// y[i] += alpha*x[i]
void axpy(double alpha, const double* x, double* y, std::size_t n);

// sum a[i]*b[i]
double dot(const double* a, const double* b, std::size_t n);

// sum a[i]*b[i]*w[i]
double weighted_dot(const double* a, const double* b, const double* w, std::size_t n);

// min over i with dx[i] < 0 of x[i]/(-dx[i]); +inf when no component decreases
double max_step_ratio(const double* x, const double* dx, std::size_t n);

} // namespace otfv::kernels
