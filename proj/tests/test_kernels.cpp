#include <doctest.h>

#include <random>
#include <vector>

#include "otfv/kernels.hpp"

using namespace otfv;

namespace {

struct KernelInputs {
    std::vector<double> a, w1, w2, w3;
    std::vector<int32_t> ck, cl;
};

KernelInputs random_inputs(std::size_t ncell, std::size_t nface, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> val(0.1, 2.0);
    std::uniform_int_distribution<int32_t> idx(0, static_cast<int32_t>(ncell) - 1);
    KernelInputs in;
    for (std::size_t i = 0; i < ncell; ++i) in.a.push_back(val(rng));
    for (std::size_t f = 0; f < nface; ++f) {
        in.ck.push_back(idx(rng));
        in.cl.push_back(idx(rng));
        in.w1.push_back(val(rng));
        in.w2.push_back(val(rng));
        in.w3.push_back(val(rng));
    }
    return in;
}

struct ModeGuard {
    ~ModeGuard() { kernels::set_mode(kernels::Mode::Auto); }
};

} // namespace

TEST_CASE("kernels: scalar and dispatched variants agree") {
    ModeGuard guard;
    if (!kernels::avx2_supported()) {
        MESSAGE("AVX2 not available; dispatch equivalence is trivial here");
        return;
    }
    // Sizes straddle the vector width to exercise the tails.
    for (std::size_t nface : {1u, 4u, 7u, 64u, 1001u}) {
        const KernelInputs in = random_inputs(37, nface, 42 + nface);
        std::vector<double> r_scalar(nface), r_simd(nface);

        kernels::set_mode(kernels::Mode::Scalar);
        kernels::face_gradient(in.a.data(), in.ck.data(), in.cl.data(), in.w1.data(),
                               r_scalar.data(), nface);
        kernels::set_mode(kernels::Mode::Avx2);
        kernels::face_gradient(in.a.data(), in.ck.data(), in.cl.data(), in.w1.data(), r_simd.data(),
                               nface);
        for (std::size_t f = 0; f < nface; ++f) CHECK(r_scalar[f] == r_simd[f]);

        kernels::set_mode(kernels::Mode::Scalar);
        kernels::recon_linear(in.a.data(), in.ck.data(), in.cl.data(), in.w1.data(), in.w2.data(),
                              r_scalar.data(), nface);
        kernels::set_mode(kernels::Mode::Avx2);
        kernels::recon_linear(in.a.data(), in.ck.data(), in.cl.data(), in.w1.data(), in.w2.data(),
                              r_simd.data(), nface);
        for (std::size_t f = 0; f < nface; ++f) CHECK(r_scalar[f] == r_simd[f]);

        kernels::set_mode(kernels::Mode::Scalar);
        kernels::recon_harmonic(in.a.data(), in.ck.data(), in.cl.data(), in.w1.data(), in.w2.data(),
                                in.w3.data(), r_scalar.data(), nface);
        kernels::set_mode(kernels::Mode::Avx2);
        kernels::recon_harmonic(in.a.data(), in.ck.data(), in.cl.data(), in.w1.data(), in.w2.data(),
                                in.w3.data(), r_simd.data(), nface);
        for (std::size_t f = 0; f < nface; ++f) CHECK(r_scalar[f] == r_simd[f]);

        kernels::set_mode(kernels::Mode::Scalar);
        const double dot_s = kernels::dot(in.w1.data(), in.w2.data(), nface);
        const double wdot_s = kernels::weighted_dot(in.w1.data(), in.w2.data(), in.w3.data(), nface);
        kernels::set_mode(kernels::Mode::Avx2);
        const double dot_v = kernels::dot(in.w1.data(), in.w2.data(), nface);
        const double wdot_v = kernels::weighted_dot(in.w1.data(), in.w2.data(), in.w3.data(), nface);
        CHECK(dot_s == doctest::Approx(dot_v).epsilon(1e-13));
        CHECK(wdot_s == doctest::Approx(wdot_v).epsilon(1e-13));
    }
}

TEST_CASE("kernels: harmonic zero handling") {
    std::vector<double> a{0.0, 2.0, 0.0};
    std::vector<int32_t> ck{0, 0}, cl{1, 2};
    std::vector<double> d{1.0, 1.0}, dk{0.5, 0.5}, dl{0.5, 0.5}, r(2);
    kernels::set_mode(kernels::Mode::Scalar);
    kernels::recon_harmonic(a.data(), ck.data(), cl.data(), d.data(), dk.data(), dl.data(), r.data(),
                            2);
    CHECK(r[0] == 0.0); // one side zero
    CHECK(r[1] == 0.0); // both sides zero (0/0 guarded)
    if (kernels::avx2_supported()) {
        kernels::set_mode(kernels::Mode::Avx2);
        std::vector<double> a4{0.0, 2.0, 0.0, 1.0, 3.0};
        std::vector<int32_t> ck4{0, 0, 3, 4}, cl4{1, 2, 4, 3};
        std::vector<double> d4(4, 1.0), dk4(4, 0.5), dl4(4, 0.5), r4(4);
        kernels::recon_harmonic(a4.data(), ck4.data(), cl4.data(), d4.data(), dk4.data(), dl4.data(),
                                r4.data(), 4);
        CHECK(r4[0] == 0.0);
        CHECK(r4[1] == 0.0);
        CHECK(r4[2] == doctest::Approx(2.0 * 1.0 * 3.0 / (0.5 * 3.0 + 0.5 * 1.0)));
    }
    kernels::set_mode(kernels::Mode::Auto);
}

TEST_CASE("kernels: max_step_ratio") {
    kernels::set_mode(kernels::Mode::Scalar);
    std::vector<double> x{1.0, 1.0}, dx{-2.0, 0.0};
    CHECK(kernels::max_step_ratio(x.data(), dx.data(), 2) == doctest::Approx(0.5));
    std::vector<double> up{1.0, 0.4};
    CHECK(kernels::max_step_ratio(x.data(), up.data(), 2) ==
          std::numeric_limits<double>::infinity());
    if (kernels::avx2_supported()) {
        kernels::set_mode(kernels::Mode::Avx2);
        std::vector<double> x8{1, 2, 3, 4, 5, 6, 7, 0.1};
        std::vector<double> d8{1, 1, -1, 1, 1, 1, 1, -0.05};
        CHECK(kernels::max_step_ratio(x8.data(), d8.data(), 8) == doctest::Approx(2.0));
    }
    kernels::set_mode(kernels::Mode::Auto);
}
