#include <gtest/gtest.h>
#include <gsl/gsl_sf_gamma.h>

#include <cmath>

#include "meroasian/errors.hpp"
#include "meroasian/special.hpp"

using namespace meroasian;

namespace {

cplx gsl_lngamma(cplx z) {
    gsl_sf_result lnr, arg;
    gsl_sf_lngamma_complex_e(z.real(), z.imag(), &lnr, &arg);
    return {lnr.val, arg.val};
}

// Imaginary parts of logs agree only modulo 2 pi.
double angle_gap(double a, double b) { return std::abs(std::remainder(a - b, 2.0 * kPi)); }

}  // namespace

TEST(LogGamma, MatchesGslAcrossThePlane) {
    for (double re : {0.3, 1.0, 2.5, 7.0, 15.0, 40.0, 200.0, 3000.0}) {
        for (double im : {-500.0, -30.0, -2.0, 0.0, 0.7, 12.0, 90.0, 1000.0}) {
            const cplx z(re, im);
            const cplx ours = log_gamma(z);
            const cplx ref = gsl_lngamma(z);
            const double scale = std::max(1.0, std::abs(ref));
            EXPECT_NEAR(ours.real(), ref.real(), 1e-13 * scale) << z;
            EXPECT_LT(angle_gap(ours.imag(), ref.imag()), 1e-12 * scale) << z;
        }
    }
}

TEST(LogGamma, LeftHalfPlaneExponentiatesCorrectly) {
    for (cplx z : {cplx(-0.5, 0.0), cplx(-3.7, 0.2), cplx(-10.5, -4.0)}) {
        const cplx ref = gsl_lngamma(z);
        const cplx ours = log_gamma(z);
        EXPECT_NEAR(ours.real(), ref.real(), 1e-12 * std::max(1.0, std::abs(ref.real())));
        EXPECT_LT(angle_gap(ours.imag(), ref.imag()), 1e-11);
    }
}

TEST(LogGamma, PolesThrow) {
    EXPECT_THROW(log_gamma(cplx(0.0, 0.0)), PoleError);
    EXPECT_THROW(log_gamma(cplx(-3.0, 0.0)), PoleError);
}

TEST(LogGammaRatio, MatchesDifferenceOfGslLogs) {
    const cplx pairs[][2] = {
        {{3.5, 0.0}, {2.9, 0.0}},       {{100.2, 40.0}, {99.7, 40.0}}, {{5000.0, 3.0}, {5000.5, -2.0}},
        {{1.2, -80.0}, {2.4, -80.0}},   {{40.0, 0.0}, {10.0, 0.0}},    {{0.8, 0.1}, {1e4, 1e3}},
    };
    for (const auto& p : pairs) {
        const cplx ours = log_gamma_ratio(p[0], p[1]);
        const cplx ref = gsl_lngamma(p[0]) - gsl_lngamma(p[1]);
        const double scale = std::max({1.0, std::abs(gsl_lngamma(p[0])), std::abs(gsl_lngamma(p[1]))});
        EXPECT_NEAR(ours.real(), ref.real(), 2e-13 * scale) << p[0] << " " << p[1];
        EXPECT_LT(angle_gap(ours.imag(), ref.imag()), 2e-13 * scale) << p[0] << " " << p[1];
    }
}

TEST(LogGammaRatio, CloseArgumentsKeepRelativeAccuracy) {
    // log Gamma(a + h) - log Gamma(a) ~ h digamma(a) for small h
    const double a = 1e6;
    const double h = (a + 1e-3) - a;  // the step a + h actually carries
    const double expected = h * (std::log(a) - 0.5 / a) + 0.5 * h * h / a;
    EXPECT_NEAR(log_gamma_ratio(cplx(a + h, 0.0), cplx(a, 0.0)).real(), expected, 1e-14);
}

TEST(GammaShiftRatio, MatchesGslLogs) {
    const cplx pairs[][2] = {
        {{50.3, 0.0}, {47.1, 0.0}}, {{1200.0, 30.0}, {905.5, -2.0}}, {{20.0, 0.0}, {80.0, 0.0}}, {{3.0, 0.0}, {5.0, 0.0}}};
    for (const auto& p : pairs) {
        const GammaShiftRatio ratio(p[0], p[1]);
        for (cplx w : {cplx(0.4, 0.0), cplx(-2.0, 3.0), cplx(0.0, 10.0), cplx(-0.3, -60.0)}) {
            const cplx ga = gsl_lngamma(p[0] + w), gb = gsl_lngamma(p[1] + w);
            const cplx ref = ga - gsl_lngamma(p[0]) - gb + gsl_lngamma(p[1]);
            const cplx ours = ratio(w);
            const double scale = std::max(1.0, std::abs(ga) + std::abs(gb));
            EXPECT_NEAR(ours.real(), ref.real(), 1e-14 * scale) << p[0] << " " << p[1] << " " << w;
            EXPECT_LT(angle_gap(ours.imag(), ref.imag()), 1e-14 * scale) << p[0] << " " << p[1] << " " << w;
        }
        EXPECT_EQ(ratio(0.0), cplx(0.0, 0.0));
    }
}

TEST(GammaShiftRatio, TaylorSeriesInsideQuarterRadius) {
    const cplx pairs[][2] = {{{40.0, 0.0}, {52.5, 0.0}}, {{900.0, 25.0}, {1300.0, -4.0}}, {{41.0, 9.0}, {45.0, 9.5}}};
    for (const auto& p : pairs) {
        const GammaShiftRatio ratio(p[0], p[1]);
        const double reach = 0.25 * std::min(std::abs(p[0]), std::abs(p[1]));
        for (double sign : {1.0, -1.0}) {
            GammaShiftRatio::Taylor c{};
            ratio.add_taylor(c, sign);
            EXPECT_EQ(c[0], cplx(0.0, 0.0));
            for (cplx w : {cplx(0.3, 0.0), reach * cplx(0.6, 0.8), cplx(-reach, 0.0), cplx(0.0, -reach)}) {
                cplx poly = 0.0;
                for (int k = GammaShiftRatio::kTaylorOrder; k >= 1; --k) poly = (poly + c[std::size_t(k)]) * w;
                const cplx direct = ratio(sign * w);
                EXPECT_LT(std::abs(poly - direct), 1e-13 * std::max(1.0, std::abs(direct)))
                    << p[0] << " " << p[1] << " " << w << " " << sign;
            }
        }
    }
}

TEST(Elementary, Expm1AndLog1pSmallArguments) {
    const cplx z(1e-10, -3e-11);
    const cplx e = expm1(z);
    EXPECT_NEAR(e.real(), z.real() + 0.5 * (z * z).real(), 1e-25);
    EXPECT_NEAR(e.imag(), z.imag() + 0.5 * (z * z).imag(), 1e-25);
    const cplx l = log1p(z);
    EXPECT_NEAR(l.real(), z.real() - 0.5 * (z * z).real(), 1e-25);
    EXPECT_NEAR(l.imag(), z.imag() - 0.5 * (z * z).imag(), 1e-25);
    const cplx big(2.0, 1.0);
    EXPECT_NEAR(std::abs(expm1(big) - (std::exp(big) - 1.0)), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(log1p(big) - std::log(1.0 + big)), 0.0, 1e-15);
}

TEST(Elementary, CothAndCotAgainstDefinitions) {
    for (cplx x : {cplx(0.3, 0.2), cplx(-2.0, 1.0), cplx(1.0, -3.0), cplx(5.0, 0.5)}) {
        const cplx ref = std::cosh(x) / std::sinh(x);
        EXPECT_LT(std::abs(coth(x) - ref), 1e-14 * std::abs(ref)) << x;
        const cplx refc = std::cos(x) / std::sin(x);
        EXPECT_LT(std::abs(cot(x) - refc), 1e-14 * std::abs(refc)) << x;
    }
    // no overflow far from the origin
    EXPECT_NEAR(std::abs(coth(cplx(800.0, 1.0)) - 1.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(coth(cplx(-800.0, 1.0)) + 1.0), 0.0, 1e-15);
    EXPECT_THROW(coth(cplx(0.0, 0.0)), PoleError);
}

TEST(XCothX, ValueDerivativeAndSmallArgument) {
    for (cplx u : {cplx(2.0, 0.0), cplx(-3.0, 0.5), cplx(40.0, -7.0), cplx(-50.0, 1.0)}) {
        const cplx r = std::sqrt(u);
        const cplx ref = r * std::cosh(r) / std::sinh(r);
        const auto h = xcothx(u);
        EXPECT_LT(std::abs(h.value - ref), 1e-13 * std::abs(ref)) << u;
        const double step = 1e-5;
        const cplx fd = (xcothx(u + step).value - xcothx(u - step).value) / (2.0 * step);
        EXPECT_LT(std::abs(h.deriv - fd), 1e-7 * std::max(1.0, std::abs(fd))) << u;
    }
    // H(u) = 1 + u/3 - u^2/45 + ...
    const cplx u(1e-6, 2e-7);
    const auto h = xcothx(u);
    EXPECT_LT(std::abs(h.value - (1.0 + u / 3.0 - u * u / 45.0)), 1e-17);
    EXPECT_LT(std::abs(h.deriv - (1.0 / 3.0 - 2.0 * u / 45.0)), 1e-12);
}

TEST(XCothX, NearPoleMatchesGenericEvaluation) {
    const int k = 2;
    const double pole = -(k * kPi) * (k * kPi);
    const cplx offset(1e-3, 2e-4);
    const auto near = xcothx_near_pole(pole + offset, offset, k);
    const auto far = xcothx(pole + offset);
    EXPECT_LT(std::abs(near.value - far.value), 1e-9 * std::abs(far.value));
    // residue at u0 = -(k pi)^2 is 2 u0
    EXPECT_LT(std::abs(near.value * offset - 2.0 * pole), 1e-2 * std::abs(pole));
}
