#include <gtest/gtest.h>

#include <boost/math/tools/roots.hpp>

#include <cmath>

#include "fixtures.hpp"
#include "meroasian/errors.hpp"
#include "meroasian/roots.hpp"

using namespace meroasian;

namespace {

// Number of zeros minus poles of psi - q inside the rectangle, by the
// argument principle along a finely sampled boundary.
double winding(const LaplaceExponent& psi, cplx q, double x0, double x1, double y0, double y1, int samples) {
    const cplx corners[5] = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}, {x0, y0}};
    double total = 0.0;
    cplx prev = psi.psi(corners[0]) - q;
    for (int side = 0; side < 4; ++side) {
        for (int k = 1; k <= samples; ++k) {
            const cplx z = corners[side] + (corners[side + 1] - corners[side]) * (double(k) / samples);
            const cplx v = psi.psi(z) - q;
            total += std::arg(v / prev);
            prev = v;
        }
    }
    return total / (2.0 * kPi);
}

}  // namespace

class RealRoots : public ::testing::TestWithParam<std::tuple<int, double>> {};

TEST_P(RealRoots, InterlacedWithSmallResiduals) {
    const auto [set, q] = GetParam();
    const ThetaExponent psi(fixtures::risk_neutral(set));
    const auto roots = solve_real(psi, q, 60);
    ASSERT_EQ(roots.size(), 60);
    EXPECT_TRUE(verify_interlacing(roots, psi).ok());
    for (int n = 1; n <= roots.size(); ++n) {
        const auto i = std::size_t(n - 1);
        const cplx z = roots.zeta[i];
        const cplx zh = roots.zeta_hat[i];
        const double rz = std::abs(psi.psi(z) - q);
        const double rzh = std::abs(psi.psi(-zh) - q);
        EXPECT_LE(rz, root_tolerance(q, z, psi.dpsi(z))) << n;
        EXPECT_LE(rzh, root_tolerance(q, -zh, psi.dpsi(-zh))) << n;
        // the solver measures the real part only; the two differ by rounding
        EXPECT_NEAR(roots.residuals[i], std::max(rz, rzh), 1e-2 * root_tolerance(q, z, psi.dpsi(z)));
        // the literal 1e-12 bound holds while |zeta psi'(zeta)| stays moderate
        if (n <= 5) EXPECT_LE(roots.residuals[i], 1e-12 * std::max(1.0, q)) << n;
    }
}

INSTANTIATE_TEST_SUITE_P(Sets, RealRoots,
                         ::testing::Combine(::testing::Values(1, 2), ::testing::Values(0.25, 1.0, 5.0)));

TEST(RealRootsOracle, FirstRootsMatchBoostBisection) {
    const ThetaExponent psi(fixtures::risk_neutral(1));
    const double q = 1.0;
    const auto roots = solve_real(psi, q, 4);
    boost::math::tools::eps_tolerance<double> tol(50);
    auto f = [&](double z) { return psi.psi(z).real() - q; };
    for (int n = 1; n <= 4; ++n) {
        const double lo = n == 1 ? 1e-9 : psi.pole(n - 1) * (1.0 + 1e-12);
        const double hi = psi.pole(n) * (1.0 - 1e-12);
        const auto b = boost::math::tools::bisect(f, lo, hi, tol);
        EXPECT_NEAR(roots.zeta[std::size_t(n - 1)].real(), 0.5 * (b.first + b.second), 1e-12 * psi.pole(n)) << n;
    }
}

TEST(RealRoots, SetIExample) {
    const ThetaExponent psi(fixtures::risk_neutral(1));
    const auto roots = solve_real(psi, 1.0, 3);
    EXPECT_GT(roots.zeta[0].real(), 0.0);
    EXPECT_LT(roots.zeta[0].real(), 3.5);
    EXPECT_GT(roots.zeta[1].real(), 3.5);
    EXPECT_LT(roots.zeta[1].real(), 9.5);
}

TEST(RealRoots, FirstRootAboveOneWhenQExceedsRate) {
    const double r = 0.03;
    for (int set : {1, 2}) {
        const ThetaExponent psi(fixtures::risk_neutral(set, r));
        EXPECT_GT(solve_real(psi, 0.25 + r, 2).zeta[0].real(), 1.0) << set;
    }
}

TEST(RealRoots, NonPositiveQRejected) {
    const ThetaExponent psi(fixtures::risk_neutral(1));
    EXPECT_THROW(solve_real(psi, 0.0, 3), DomainError);
}

TEST(ComplexRoots, ResidualsAndArgumentPrincipleCounts) {
    const ThetaExponent psi(fixtures::risk_neutral(1));
    const cplx q(0.25, 10.0);
    const int M = 20;
    const auto roots = solve_complex(psi, q, M);
    ASSERT_EQ(roots.size(), M);
    // 1e-10 holds for the leading roots; further out the residual of the
    // nearest double to the root is about eps |zeta psi'(zeta)|, above 1e-10
    for (int n = 0; n < M; ++n) {
        const cplx z = roots.zeta[std::size_t(n)];
        const double res = std::abs(psi.psi(z) - q);
        EXPECT_LE(res, root_tolerance(q, z, psi.dpsi(z))) << n + 1;
        if (n < 10) EXPECT_LE(roots.residuals[std::size_t(n)], 1e-10) << n + 1;
    }
    // Rectangles between consecutive poles (shifted right so each contains
    // one pole): the argument principle counts the zeros there and the
    // solver must place exactly that many roots in each.
    const double Y = 60.0;
    double left = 0.01;
    int total = 0;
    for (int n = 1; n <= 6; ++n) {
        const double right = psi.pole(n) + 0.01;
        const double zeros = winding(psi, q, left, right, -Y, Y, 40000) + 1.0;
        int found = 0;
        for (const auto& z : roots.zeta)
            if (z.real() > left && z.real() < right && std::abs(z.imag()) < Y) ++found;
        EXPECT_NEAR(zeros, double(found), 1e-6) << "rectangle " << n;
        total += found;
        left = right;
    }
    EXPECT_EQ(total, 6);
}

TEST(ComplexRoots, SmallImaginaryPartStaysInterlaced) {
    const ThetaExponent psi(fixtures::risk_neutral(2));
    const auto roots = solve_complex(psi, cplx(1.0, 0.5), 15);
    for (int n = 1; n <= 15; ++n) {
        const double re = roots.zeta[std::size_t(n - 1)].real();
        EXPECT_GT(re, n == 1 ? 0.0 : psi.pole(n - 1)) << n;
        EXPECT_LT(re, psi.pole(n)) << n;
    }
    EXPECT_LE(roots.max_residual(), 1e-10);
}

TEST(ComplexRoots, ContinuationBackToRealAxisRecoversRealRoots) {
    const ThetaExponent psi(fixtures::risk_neutral(1));
    const auto there = solve_complex(psi, cplx(1.0, 3.0), 10);
    const auto back = continue_roots(psi, there, cplx(1.0, 0.0));
    const auto direct = solve_real(psi, 1.0, 10);
    for (std::size_t i = 0; i < 10; ++i) {
        EXPECT_LT(std::abs(back.zeta[i] - direct.zeta[i]), 1e-10 * std::abs(direct.zeta[i])) << i;
        EXPECT_LT(std::abs(back.zeta_hat[i] - direct.zeta_hat[i]), 1e-10 * std::abs(direct.zeta_hat[i])) << i;
    }
}

TEST(ComplexRoots, ConjugateSymmetry) {
    const ThetaExponent psi(fixtures::risk_neutral(1));
    const auto up = solve_complex(psi, cplx(0.5, 4.0), 8);
    const auto down = solve_complex(psi, cplx(0.5, -4.0), 8);
    for (std::size_t i = 0; i < 8; ++i) EXPECT_LT(std::abs(up.zeta[i] - std::conj(down.zeta[i])), 1e-10);
}

TEST(HyperExpRoots, ExactlyNPlusOnePerSide) {
    const int N = 12;
    const HyperExpExponent psi(hyperexp_from_theta(fixtures::risk_neutral(1), 0.03, N));
    const auto roots = solve_real(psi, 1.0, N + 1);
    EXPECT_TRUE(verify_interlacing(roots, psi).ok());
    EXPECT_GT(roots.zeta.back().real(), psi.pole(N));
    EXPECT_THROW(solve_real(psi, 1.0, N + 2), BracketError);
    // psi~ - q is a rational function with 2N + 2 zeros: a large-box winding
    // count sees no others.
    const double R = 4.0 * roots.zeta.back().real() + 4.0 * roots.zeta_hat.back().real();
    EXPECT_NEAR(winding(psi, 1.0, -R, R, -R, R, 200000) + 2.0 * N, 2.0 * (N + 1), 1e-6);
}

TEST(RootCache, MemoisesBySetAndQ) {
    RootCache cache;
    const ThetaExponent psi(fixtures::risk_neutral(1));
    const auto a = cache.get_real(psi, 1.0, 5);
    const auto b = cache.get_real(psi, 1.0, 5);
    EXPECT_EQ(cache.size(), 1u);
    EXPECT_EQ(a.zeta, b.zeta);
    cache.get_complex(psi, cplx(1.0, 1.0), 5);
    EXPECT_EQ(cache.size(), 2u);
}
