#include "meroasian/special.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "meroasian/errors.hpp"

namespace meroasian {

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178032973640562;

// B_{2k} / (2k (2k-1)), k = 1..7
constexpr std::array<double, 7> kStirling = {
    1.0 / 12.0,     -1.0 / 360.0,       1.0 / 1260.0, -1.0 / 1680.0,
    1.0 / 1188.0,   -691.0 / 360360.0,  1.0 / 156.0,
};

// 2^{2n} B_{2n} / (2n)!: Taylor coefficients of x coth x in u = x^2.
constexpr std::array<double, 11> kXCothSeries = {
    1.0,
    1.0 / 3.0,
    -1.0 / 45.0,
    2.0 / 945.0,
    -1.0 / 4725.0,
    2.0 / 93555.0,
    -1382.0 / 638512875.0,
    4.0 / 18243225.0,
    -3617.0 / 162820783125.0,
    87734.0 / 38979295480125.0,
    -349222.0 / 1531329465290625.0,
};

bool stirling_ok(cplx z) {
    return std::norm(z) >= 225.0 && (z.real() > 0.0 || std::abs(z.imag()) > -z.real());
}

// log and reciprocal through |z|^2: no hypot and no library complex division.
// Fine for the moderate magnitudes seen here (|z| well inside 1e150).
cplx fast_log(cplx z) { return {0.5 * std::log(std::norm(z)), std::atan2(z.imag(), z.real())}; }

cplx fast_inv(cplx z) { return std::conj(z) / std::norm(z); }

cplx stirling_series(cplx z) {
    const double n2 = std::norm(z);
    const int terms = n2 >= 1e6 ? 2 : (n2 >= 1e4 ? 3 : 7);
    const cplx w = fast_inv(z);
    const cplx w2 = w * w;
    cplx acc = kStirling[terms - 1];
    for (int k = terms - 2; k >= 0; --k) acc = acc * w2 + kStirling[k];
    return acc * w;
}

bool same_side(cplx x, cplx y) { return (x.real() > 0.0 && y.real() > 0.0) || (x.imag() * y.imag() > 0.0); }

cplx stirling_log_gamma(cplx z) {
    return (z - 0.5) * fast_log(z) - z + kHalfLog2Pi + stirling_series(z);
}

}  // namespace

cplx expm1(cplx z) {
    const double x = z.real();
    const double y = z.imag();
    const double s = std::sin(0.5 * y);
    return {std::expm1(x) * std::cos(y) - 2.0 * s * s, std::exp(x) * std::sin(y)};
}

cplx log1p(cplx w) {
    const double x = w.real();
    const double y = w.imag();
    return {0.5 * std::log1p(x * (2.0 + x) + y * y), std::atan2(y, 1.0 + x)};
}

cplx coth(cplx x) {
    if (x.real() < 0.0) return -coth(-x);
    const cplx em1 = expm1(-2.0 * x);
    if (em1 == 0.0) throw PoleError("coth evaluated at a pole");
    return (2.0 + em1) / (-em1);
}

cplx cot(cplx y) { return cplx(0.0, 1.0) * coth(cplx(-y.imag(), y.real())); }

cplx log_gamma(cplx z) {
    if (z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real()))
        throw PoleError("log_gamma at non-positive integer " + std::to_string(z.real()));
    if (z.real() < -15.0 && std::abs(z.imag()) < 20.0) {
        // reflection keeps the work bounded for far-left arguments
        return std::log(kPi) - std::log(std::sin(kPi * z)) - log_gamma(1.0 - z);
    }
    // log Gamma(z) = log Gamma(z + m) - sum_j log(z + j): one log of the
    // product for the modulus, the arguments summed term by term so the
    // branch stays that of the sum of principal logs
    double arg = 0.0;
    cplx prod = 1.0;
    while (!stirling_ok(z)) {
        arg += std::atan2(z.imag(), z.real());
        prod *= z;
        z += 1.0;
    }
    return stirling_log_gamma(z) - cplx(0.5 * std::log(std::norm(prod)), arg);
}

cplx log_gamma_ratio(cplx a, cplx b) {
    if (!(same_side(a, b) && stirling_ok(a) && stirling_ok(b))) return log_gamma(a) - log_gamma(b);
    const cplx d = a - b;
    const cplx log_b = fast_log(b);
    const cplx log_ratio = std::norm(d) <= 0.25 * std::norm(b) ? log1p(d * fast_inv(b)) : fast_log(a) - log_b;
    return (a - 0.5) * log_ratio + d * (log_b - 1.0) + stirling_series(a) - stirling_series(b);
}

GammaShiftRatio::GammaShiftRatio(cplx a, cplx b) : a_(a), b_(b) {
    stirling_ = stirling_ok(a) && stirling_ok(b);
    if (!stirling_) return;
    inv_a_ = fast_inv(a);
    inv_b_ = fast_inv(b);
    const bool close = same_side(a, b) && std::norm(a - b) <= 0.25 * std::norm(b);
    log_ab_ = close ? log1p((a - b) * inv_b_) : fast_log(a) - fast_log(b);
    series0_ = stirling_series(a) - stirling_series(b);
}

cplx GammaShiftRatio::operator()(cplx w) const {
    const cplx aw = a_ + w, bw = b_ + w;
    // log(a + w) = log a + log1p(w / a) needs a and a + w on one side of the cut
    if (!(stirling_ && stirling_ok(aw) && stirling_ok(bw) && same_side(a_, aw) && same_side(b_, bw)))
        return log_gamma_ratio(aw, a_) - log_gamma_ratio(bw, b_);
    return (aw - 0.5) * log1p(w * inv_a_) - (bw - 0.5) * log1p(w * inv_b_) + w * log_ab_ + stirling_series(aw) -
           stirling_series(bw) - series0_;
}

namespace {

// Taylor coefficients of log Gamma(a + w) - log Gamma(a) - w log a, from the
// Stirling form (a + w - 1/2) log(1 + w/a) - w + S(a + w) - S(a).
GammaShiftRatio::Taylor shift_taylor(cplx a) {
    constexpr int K = GammaShiftRatio::kTaylorOrder;
    const cplx inv = 1.0 / a;
    std::array<cplx, 2 * kStirling.size() + K + 1> p{};
    p[0] = 1.0;
    for (std::size_t i = 1; i < p.size(); ++i) p[i] = p[i - 1] * inv;
    GammaShiftRatio::Taylor d{};
    for (int k = 1; k <= K; ++k) {
        const double sgn = k % 2 == 0 ? 1.0 : -1.0;
        cplx c = k == 1 ? -0.5 * p[1] : sgn * (a * p[std::size_t(k)] / double(k * (k - 1)) + p[std::size_t(k)] / (2.0 * k));
        // S(a + w) = sum_j s_j (a + w)^{-(2j-1)}, binomial series in w / a
        for (std::size_t j = 1; j <= kStirling.size(); ++j) {
            double binom = 1.0;  // C(2j - 2 + k, k)
            for (int i = 1; i <= k; ++i) binom = binom * double(2 * int(j) - 2 + i) / double(i);
            c += kStirling[j - 1] * sgn * binom * p[2 * j - 1 + std::size_t(k)];
        }
        d[std::size_t(k)] = c;
    }
    return d;
}

}  // namespace

void GammaShiftRatio::add_taylor(Taylor& out, double sign) const {
    const auto da = shift_taylor(a_);
    const auto db = shift_taylor(b_);
    const cplx log_ab = stirling_ ? log_ab_ : std::log(a_) - std::log(b_);
    double f = sign;
    for (int k = 1; k <= kTaylorOrder; ++k, f *= sign)
        out[std::size_t(k)] += f * (da[std::size_t(k)] - db[std::size_t(k)] + (k == 1 ? log_ab : 0.0));
}

XCothX xcothx(cplx u) {
    if (std::abs(u) < 0.25) {
        cplx h = kXCothSeries.back();
        cplx dh = kXCothSeries.back() * double(kXCothSeries.size() - 1);
        for (int n = int(kXCothSeries.size()) - 2; n >= 0; --n) {
            h = h * u + kXCothSeries[n];
            if (n >= 1) dh = dh * u + kXCothSeries[n] * double(n);
        }
        return {h, dh};
    }
    const cplx x = std::sqrt(u);
    const cplx c = coth(x);
    return {x * c, (c - x * (c * c - 1.0)) / (2.0 * x)};
}

XCothX xcothx_near_pole(cplx u, cplx offset, int k) {
    // With y = sqrt(-u): x coth x = y cot y, and y - k pi = -offset / (y + k pi).
    const cplx y = std::sqrt(-u);
    const cplx shift = -offset / (y + double(k) * kPi);
    if (shift == 0.0) throw PoleError("x coth x evaluated at a pole");
    const cplx c = cot(shift);
    return {y * c, (c - y * (1.0 + c * c)) * (-0.5 / y)};
}

}  // namespace meroasian
