#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>

#include "fixtures.hpp"
#include "meroasian/errors.hpp"
#include "meroasian/pricing.hpp"
#include "meroasian/quad.hpp"

using namespace meroasian;

namespace {

// int_a^b g e^{-i w u} du for g = c0 + c1 u + c2 u^2, from antiderivatives.
cplx quadratic_reference(double a, double b, double w, cplx c0, cplx c1, cplx c2) {
    if (w == 0.0) {
        auto F = [&](double u) { return c0 * u + c1 * u * u / 2.0 + c2 * u * u * u / 3.0; };
        return F(b) - F(a);
    }
    const cplx iw(0.0, w);
    // int u^n e^{-iwu} by repeated integration by parts
    auto F = [&](double u) {
        const cplx e = std::exp(-iw * u);
        const cplx m0 = -e / iw;
        const cplx m1 = -u * e / iw - e / (iw * iw);
        const cplx m2 = -u * u * e / iw - 2.0 * u * e / (iw * iw) - 2.0 * e / (iw * iw * iw);
        return c0 * m0 + c1 * m1 + c2 * m2;
    };
    return F(b) - F(a);
}

// E[(X - k)^+] for X ~ Gamma(shape a, scale th).
double gamma_call(double a, double th, double k) {
    using boost::math::gamma_q;
    return a * th * gamma_q(a + 1.0, k / th) - k * gamma_q(a, k / th);
}

cplx gamma_law_mellin(double a, double th, cplx s) {
    return std::exp(log_gamma(a + s - 1.0) - log_gamma(cplx(a, 0.0)) + (s - 1.0) * std::log(th));
}

InversionConfig synthetic_laplace() {
    InversionConfig cfg;
    cfg.u_max = 4000.0;
    cfg.n_laplace = 400'000;
    return cfg;
}

}  // namespace

TEST(Filon, ExactOnQuadratics) {
    const cplx c0(0.3, -1.0), c1(2.0, 0.5), c2(-1.5, 0.25);
    for (double w : {0.0, 1.0, 50.0, 1e3}) {
        for (int n : {4, 10, 64}) {
            const auto grid = FilonGrid::sample(-0.5, 2.0, n, [&](double u) { return c0 + c1 * u + c2 * u * u; });
            const cplx ref = quadratic_reference(-0.5, 2.0, w, c0, c1, c2);
            EXPECT_LT(std::abs(filon_integral(grid, w) - ref), 1e-13 * std::max(1.0, std::abs(ref))) << w << " " << n;
        }
    }
}

TEST(Filon, ConstantAndSimpsonLimit) {
    const double T = 3.0;
    const auto ones = FilonGrid::sample(0.0, T, 8, [](double) { return cplx(1.0, 0.0); });
    EXPECT_NEAR(std::abs(filon_integral(ones, 0.0) - T), 0.0, 1e-15);
    const double w = 7.0;
    const cplx expected = (std::exp(cplx(0.0, -w * T)) - 1.0) / cplx(0.0, -w);
    EXPECT_LT(std::abs(filon_integral(ones, w) - expected), 1e-14);
    // omega = 0 is Simpson's rule: exact for cubics as well
    const auto cubic = FilonGrid::sample(0.0, 1.0, 4, [](double u) { return cplx(u * u * u, 0.0); });
    EXPECT_NEAR(filon_integral(cubic, 0.0).real(), 0.25, 1e-15);
}

TEST(Filon, MatchesAdaptiveQuadratureOnLorentzian) {
    const double w = 20.0;
    auto g = [](double u) { return 1.0 / (1.0 + u * u); };
    using boost::math::quadrature::gauss_kronrod;
    double err = 0.0;
    const double re = gauss_kronrod<double, 61>::integrate([&](double u) { return g(u) * std::cos(w * u); }, 0.0, 100.0,
                                                          20, 1e-14, &err);
    const double im = gauss_kronrod<double, 61>::integrate([&](double u) { return -g(u) * std::sin(w * u); }, 0.0,
                                                          100.0, 20, 1e-14, &err);
    const auto grid = FilonGrid::sample(0.0, 100.0, 20000, [&](double u) { return cplx(g(u), 0.0); });
    const cplx ours = filon_integral(grid, w);
    EXPECT_NEAR(ours.real(), re, 1e-8);
    EXPECT_NEAR(ours.imag(), im, 1e-8);
}

TEST(Filon, GridValidation) {
    FilonGrid bad;
    bad.a = 0.0;
    bad.b = 1.0;
    bad.samples.assign(4, cplx(1.0, 0.0));  // 3 intervals
    EXPECT_THROW(filon_integral(bad, 1.0), DomainError);
    bad.samples.assign(5, cplx(1.0, 0.0));
    bad.b = -1.0;
    EXPECT_THROW(filon_integral(bad, 1.0), DomainError);
}

TEST(MellinDensity, ExponentialLawRoundTrip) {
    InversionConfig cfg;
    cfg.c = 1.0;
    cfg.v_max = 60.0;
    cfg.n_density = 6000;
    const auto x = linspace(0.05, 12.0, 240);
    const auto curve = inverse_mellin_density([](cplx s) { return std::exp(log_gamma(s)); }, 50.0, x, cfg, true);
    double mass = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        EXPECT_NEAR(curve.p[i], std::exp(-x[i]), 1e-5) << x[i];
        EXPECT_LE(std::abs(curve.imag_residual[i]), 1e-8);
        if (i > 0) mass += 0.5 * (curve.p[i] + curve.p[i - 1]) * (x[i] - x[i - 1]);
    }
    EXPECT_NEAR(mass + (1.0 - std::exp(-0.05)), 1.0, 2e-3);
}

TEST(MellinDensity, FoldedMatchesUnfolded) {
    InversionConfig cfg;
    cfg.c = 0.8;
    const std::vector<double> x{0.2, 1.0, 3.0};
    auto m = [](cplx s) { return gamma_law_mellin(2.5, 0.7, s); };
    const auto full = inverse_mellin_density(m, 50.0, x, cfg, true);
    cfg.fold = true;
    const auto folded = inverse_mellin_density(m, 50.0, x, cfg, true);
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(full.p[i], folded.p[i], 1e-12);
    EXPECT_THROW(inverse_mellin_density(m, 50.0, x, cfg, false), DomainError);
}

TEST(MellinDensity, ContourOutsideStripRejected) {
    InversionConfig cfg;
    cfg.c = 2.0;
    EXPECT_THROW(inverse_mellin_density([](cplx s) { return s; }, 1.5, {1.0}, cfg, true), ContourError);
}

TEST(MellinH, GammaLawCallValues) {
    const double a = 3.0, th = 0.5;
    InversionConfig cfg;
    cfg.d1 = -0.5;
    cfg.n_mellin = 3200;
    auto mellin = [&](cplx s) { return gamma_law_mellin(a, th, s); };
    const auto integrand = h_integrand(mellin, *cfg.d1, cfg);
    cfg.n_mellin = 800;
    const auto coarse = h_integrand(mellin, *cfg.d1, cfg);
    for (double k : {0.1, 0.7, 1.5, 3.0}) {
        const cplx h = inverse_mellin_h(integrand, k);
        const double err = std::abs(h.real() - gamma_call(a, th, k));
        EXPECT_LT(err, 1e-7) << k;
        EXPECT_NEAR(h.imag(), 0.0, 1e-10) << k;
        // parabolic interpolation: fourth order in the step
        EXPECT_GT(std::abs(inverse_mellin_h(coarse, k).real() - gamma_call(a, th, k)), 100.0 * err) << k;
    }
    EXPECT_THROW(inverse_mellin_h(integrand, 0.0), DomainError);
}

TEST(MellinH, AbscissaChoice) {
    InversionConfig cfg;
    EXPECT_DOUBLE_EQ(mellin_abscissa(cfg, 2.0), -0.5);
    cfg.d1 = 0.25;
    EXPECT_DOUBLE_EQ(mellin_abscissa(cfg, 2.0), 0.25);
    cfg.d1 = 1.5;
    EXPECT_THROW(mellin_abscissa(cfg, 2.0), ContourError);
    cfg.d1 = -1.0;
    EXPECT_THROW(mellin_abscissa(cfg, 2.0), ContourError);
    cfg.d1 = -2.5;
    EXPECT_THROW(mellin_abscissa(cfg, 2.0), ContourError);
}

TEST(MellinH, ExponentialFunctionalBoundsAndLimits) {
    const double r = 0.03;
    for (int set : {1, 2}) {
        const ThetaExponent psi(fixtures::risk_neutral(set, r));
        for (double q : {0.3, 2.0}) {
            const auto m = MellinEval::corrected(psi, solve_real(psi, q, 21), 20);
            InversionConfig cfg;
            // d1 > 0 for q = 2, so k^{-d1} magnifies the quadrature error as k -> 0
            cfg.n_mellin = 3200;
            const double d1 = mellin_abscissa(cfg, m.zeta1().real());
            const auto integrand = h_integrand([&](cplx s) { return m(s); }, d1, cfg);
            double previous = 1.0 / (q - r);
            for (double k : {1e-6, 0.05, 0.3, 1.0, 2.0, 5.0}) {
                const double h = inverse_mellin_h(integrand, k).real();
                EXPECT_GT(h, 0.0) << set << " " << q << " " << k;
                EXPECT_LE(h, previous + 1e-9) << set << " " << q << " " << k;
                previous = h;
            }
            EXPECT_NEAR(inverse_mellin_h(integrand, 1e-6).real(), 1.0 / (q - r), 1e-4) << set << " " << q;
        }
    }
}

TEST(LaplaceNodes, TwoUniformSegments) {
    InversionConfig cfg;
    cfg.u_max = 200.0;
    cfg.n_laplace = 400;
    const auto nodes = laplace_nodes(cfg);
    ASSERT_EQ(nodes.fine_intervals, 40);
    ASSERT_EQ(nodes.u.size(), std::size_t(400 + 20 + 1));
    EXPECT_DOUBLE_EQ(nodes.u[1], 0.25);
    EXPECT_DOUBLE_EQ(nodes.u[40], 10.0);
    EXPECT_DOUBLE_EQ(nodes.u[41], 10.5);
    EXPECT_DOUBLE_EQ(nodes.u.back(), 200.0);
    cfg.u_fine = 0.0;
    const auto plain = laplace_nodes(cfg);
    EXPECT_EQ(plain.fine_intervals, 0);
    EXPECT_EQ(plain.u.size(), std::size_t(401));
    cfg.n_laplace = 401;
    EXPECT_THROW(laplace_nodes(cfg), DomainError);
}

class LaplaceRoundTrip : public ::testing::TestWithParam<double> {};

TEST_P(LaplaceRoundTrip, ElementaryPairs) {
    const double t = GetParam();
    const auto cfg = synthetic_laplace();
    // h = q int e^{-qt} f dt. The pairs are continuous at t = 0: a jump
    // there leaves F ~ 1/u and a truncation error of order 1/(pi u_max t).
    const auto rise = inverse_laplace_f([](cplx q) { return 1.0 / (q + 1.0); }, t, cfg);
    EXPECT_NEAR(rise.value, -std::expm1(-t), 1e-6) << t;
    const auto lin = inverse_laplace_f([](cplx q) { return 1.0 / q; }, t, cfg);
    EXPECT_NEAR(lin.value, t, 1e-5) << t;
    const auto growth = inverse_laplace_f([](cplx q) { return 0.1 / (q - 0.1); }, t, cfg);
    EXPECT_NEAR(growth.value, std::expm1(0.1 * t), 1e-5) << t;
    // with a jump the error is visible at this u_max
    const auto step = inverse_laplace_f([](cplx) { return cplx(1.0, 0.0); }, t, cfg);
    EXPECT_GT(std::abs(step.value - 1.0), 1e-2 / (kPi * cfg.u_max * t)) << t;
}

TEST_P(LaplaceRoundTrip, ShiftedKernelAgreesOnSmoothPair) {
    const double t = GetParam();
    InversionConfig cfg;
    cfg.n_laplace = 1600;
    // f = 1 - e^{-t} - t e^{-t}: F = h / q ~ u^{-3}, truncation at u_max = 200
    // costs about 1 / (2 pi u_max^2)
    auto h = [](cplx q) { return 1.0 / ((q + 1.0) * (q + 1.0)); };
    const double expected = 1.0 - std::exp(-t) - t * std::exp(-t);
    EXPECT_NEAR(inverse_laplace_f(h, t, cfg).value, expected, 1e-5) << t;
    EXPECT_NEAR(inverse_laplace_f(h, t, cfg, 0.7).value, expected, 1e-5) << t;
}

INSTANTIATE_TEST_SUITE_P(Maturities, LaplaceRoundTrip, ::testing::Values(0.1, 0.5, 1.0, 2.0));

TEST(LaplaceInversion, SamplesMustMatchNodes) {
    InversionConfig cfg;
    std::vector<cplx> h(10, cplx(1.0, 0.0));
    EXPECT_THROW(inverse_laplace_f(h, 1.0, cfg), DomainError);
    EXPECT_THROW(inverse_laplace_f([](cplx) { return cplx(1.0, 0.0); }, 0.0, cfg), DomainError);
}
