// AVX2 kernel variants. This translation unit is compiled with -mavx2 on
// x86-64; the dispatcher only routes here after a runtime CPU check.
// Multiply/add sequences are kept explicit (no FMA) so elementwise results
// are bit-identical to the scalar reference.

#include "otfv/kernels.hpp"

#include <limits>

#if defined(__AVX2__)
#include <immintrin.h>
#endif

namespace otfv::kernels::avx2 {

#if defined(__AVX2__)

bool available() { return __builtin_cpu_supports("avx2") != 0; }

namespace {

inline __m128i load_idx(const int32_t* p) {
    return _mm_loadu_si128(reinterpret_cast<const __m128i*>(p));
}

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s2 = _mm_add_pd(lo, hi);
    const __m128d s1 = _mm_add_sd(s2, _mm_unpackhi_pd(s2, s2));
    return _mm_cvtsd_f64(s1);
}

inline double hmin(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s2 = _mm_min_pd(lo, hi);
    const __m128d s1 = _mm_min_sd(s2, _mm_unpackhi_pd(s2, s2));
    return _mm_cvtsd_f64(s1);
}

} // namespace

void face_gradient(const double* a, const int32_t* ck, const int32_t* cl, const double* inv_d,
                   double* g, std::size_t n) {
    std::size_t f = 0;
    for (; f + 4 <= n; f += 4) {
        const __m256d ak = _mm256_i32gather_pd(a, load_idx(ck + f), 8);
        const __m256d al = _mm256_i32gather_pd(a, load_idx(cl + f), 8);
        const __m256d w = _mm256_loadu_pd(inv_d + f);
        _mm256_storeu_pd(g + f, _mm256_mul_pd(_mm256_sub_pd(al, ak), w));
    }
    for (; f < n; ++f) g[f] = (a[cl[f]] - a[ck[f]]) * inv_d[f];
}

void recon_linear(const double* a, const int32_t* ck, const int32_t* cl, const double* wk,
                  const double* wl, double* r, std::size_t n) {
    std::size_t f = 0;
    for (; f + 4 <= n; f += 4) {
        const __m256d ak = _mm256_i32gather_pd(a, load_idx(ck + f), 8);
        const __m256d al = _mm256_i32gather_pd(a, load_idx(cl + f), 8);
        const __m256d vk = _mm256_mul_pd(_mm256_loadu_pd(wk + f), ak);
        const __m256d vl = _mm256_mul_pd(_mm256_loadu_pd(wl + f), al);
        _mm256_storeu_pd(r + f, _mm256_add_pd(vk, vl));
    }
    for (; f < n; ++f) r[f] = wk[f] * a[ck[f]] + wl[f] * a[cl[f]];
}

void recon_harmonic(const double* a, const int32_t* ck, const int32_t* cl, const double* d,
                    const double* dk, const double* dl, double* r, std::size_t n) {
    const __m256d zero = _mm256_setzero_pd();
    std::size_t f = 0;
    for (; f + 4 <= n; f += 4) {
        const __m256d ak = _mm256_i32gather_pd(a, load_idx(ck + f), 8);
        const __m256d al = _mm256_i32gather_pd(a, load_idx(cl + f), 8);
        const __m256d num = _mm256_mul_pd(_mm256_loadu_pd(d + f), _mm256_mul_pd(ak, al));
        const __m256d den = _mm256_add_pd(_mm256_mul_pd(_mm256_loadu_pd(dk + f), al),
                                          _mm256_mul_pd(_mm256_loadu_pd(dl + f), ak));
        const __m256d q = _mm256_div_pd(num, den);
        const __m256d is_zero = _mm256_cmp_pd(num, zero, _CMP_EQ_OQ);
        _mm256_storeu_pd(r + f, _mm256_blendv_pd(q, zero, is_zero));
    }
    for (; f < n; ++f) {
        const double akx = a[ck[f]];
        const double alx = a[cl[f]];
        const double num = d[f] * akx * alx;
        r[f] = num == 0.0 ? 0.0 : num / (dk[f] * alx + dl[f] * akx);
    }
}

void mul(const double* a, const double* b, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) out[i] = a[i] * b[i];
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d t = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
        _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), t));
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    double s = hsum(acc);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

double weighted_dot(const double* a, const double* b, const double* w, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d ab = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_add_pd(acc, _mm256_mul_pd(ab, _mm256_loadu_pd(w + i)));
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += a[i] * b[i] * w[i];
    return s;
}

double max_step_ratio(const double* x, const double* dx, std::size_t n) {
    const __m256d zero = _mm256_setzero_pd();
    const __m256d inf = _mm256_set1_pd(std::numeric_limits<double>::infinity());
    __m256d best = inf;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_loadu_pd(dx + i);
        const __m256d neg = _mm256_cmp_pd(d, zero, _CMP_LT_OQ);
        const __m256d ratio = _mm256_div_pd(_mm256_loadu_pd(x + i), _mm256_sub_pd(zero, d));
        best = _mm256_min_pd(best, _mm256_blendv_pd(inf, ratio, neg));
    }
    double r = hmin(best);
    for (; i < n; ++i)
        if (dx[i] < 0.0) {
            const double c = x[i] / (-dx[i]);
            if (c < r) r = c;
        }
    return r;
}

#else // !__AVX2__: stub so non-x86 builds link; never selected at runtime.

bool available() { return false; }

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

#endif

} // namespace otfv::kernels::avx2
