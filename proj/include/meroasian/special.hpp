#pragma once

#include <array>
#include <complex>

namespace meroasian {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;

// e^z - 1 without cancellation for small |z|.
cplx expm1(cplx z);

// log(1 + w) without cancellation for small |w|; principal branch.
cplx log1p(cplx w);

// Hyperbolic cotangent, stable for small |x| and large |Re x|.
// Throws PoleError at x = i*k*pi.
cplx coth(cplx x);

// Cotangent via coth; stable for large |Im y|.
cplx cot(cplx y);

// A logarithm of Gamma(z). Coincides with the analytic log-gamma on the
// right half-plane and wherever the upward recurrence is used; callers only
// exponentiate sums of these values, so the branch elsewhere is immaterial.
// Throws PoleError at non-positive integers.
cplx log_gamma(cplx z);

// log Gamma(a) - log Gamma(b), accurate when both arguments are large and
// close relative to their size (the usual case inside gamma products).
cplx log_gamma_ratio(cplx a, cplx b);

// log[Gamma(a + w) Gamma(b) / (Gamma(a) Gamma(b + w))] for fixed a, b. The
// w-independent parts are computed once, and the result stays accurate when
// the two log-gamma differences are large and nearly cancel.
class GammaShiftRatio {
public:
    static constexpr int kTaylorOrder = 24;
    using Taylor = std::array<cplx, kTaylorOrder + 1>;  // index k: coefficient of w^k

    GammaShiftRatio(cplx a, cplx b);
    cplx operator()(cplx w) const;

    cplx a() const { return a_; }
    cplx b() const { return b_; }
    // Adds the Taylor coefficients in w, with w replaced by sign * w, to out.
    // The truncated series is good to rounding for |w| <= min(|a|, |b|) / 4
    // once |a|, |b| >= 40.
    void add_taylor(Taylor& out, double sign) const;

private:
    cplx a_, b_, inv_a_, inv_b_;
    cplx log_ab_;   // log a - log b
    cplx series0_;  // Stirling series S(a) - S(b)
    bool stirling_ = false;
};

// H(u) = sqrt(u) * coth(sqrt(u)) and dH/du. H is even in sqrt(u), hence a
// single-valued meromorphic function of u with poles at u = -(k pi)^2, k >= 1.
struct XCothX {
    cplx value;
    cplx deriv;
};

XCothX xcothx(cplx u);

// Same function evaluated near the pole u = -(k pi)^2. `offset` must equal
// u + (k pi)^2 computed without cancellation by the caller.
XCothX xcothx_near_pole(cplx u, cplx offset, int k);

}  // namespace meroasian
