#include "meroasian/model.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "meroasian/errors.hpp"

namespace meroasian {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct SideTerm {
    cplx value;  // T(t) = (t/beta)^{j-1} H(pi^2 t / beta)
    cplx deriv;  // dT/dt
};

// One coth block of the theta exponent as a function of t = alpha - z (right
// side) or t = alpha + z (left side). Poles sit at t = -beta k^2.
SideTerm side_term(int j, double alpha, double beta, cplx t) {
    (void)alpha;
    const double pi2 = kPi * kPi;
    const cplx u = pi2 * t / beta;
    XCothX h{};
    if (t.real() < -0.25 * beta) {
        const int k = std::max(1, int(std::lround(std::sqrt(-t.real() / beta))));
        const double bk2 = beta * double(k) * double(k);
        const cplx offset_t = t + bk2;
        if (std::abs(offset_t) <= 4.0 * kEps * bk2)
            throw PoleError("Laplace exponent evaluated at a pole");
        h = xcothx_near_pole(u, pi2 * offset_t / beta, k);
    } else {
        h = xcothx(u);
    }
    SideTerm out{};
    if (j == 1) {
        out.value = h.value;
        out.deriv = h.deriv * (pi2 / beta);
    } else {
        out.value = (t / beta) * h.value;
        out.deriv = (h.value + u * h.deriv) / beta;
    }
    return out;
}

void validate(const ThetaParams& p) {
    if (p.j != 1 && p.j != 2) throw ModelError("theta parameter j must be 1 or 2");
    if (!(p.sigma >= 0.0)) throw ModelError("sigma must be non-negative");
    if (!(p.c1 >= 0.0 && p.c2 >= 0.0)) throw ModelError("c1, c2 must be non-negative");
    if (!(p.alpha1 >= 0.0 && p.alpha2 >= 0.0)) throw ModelError("alpha1, alpha2 must be non-negative");
    if (!(p.beta1 > 0.0 && p.beta2 > 0.0)) throw ModelError("beta1, beta2 must be positive");
}

// psi without the gamma constant: sigma^2 z^2/2 + mu z + (-1)^j [...]
cplx theta_psi_raw(const ThetaParams& p, double mu, cplx z) {
    const double sign = p.j == 1 ? -1.0 : 1.0;
    cplx jumps = 0.0;
    if (p.c1 != 0.0) jumps += p.c1 * side_term(p.j, p.alpha1, p.beta1, p.alpha1 - z).value;
    if (p.c2 != 0.0) jumps += p.c2 * side_term(p.j, p.alpha2, p.beta2, p.alpha2 + z).value;
    return 0.5 * p.sigma * p.sigma * z * z + mu * z + sign * jumps;
}

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

ThetaModel::ThetaModel(const ThetaParams& params, double mu)
    : params_(params), mu_(mu), gamma_(0.0) {
    validate(params_);
    if (!std::isfinite(mu)) throw ModelError("mu must be finite");
    gamma_ = calibrate_gamma(params_);
}

ThetaModel ThetaModel::risk_neutral(const ThetaParams& params, double r) {
    ThetaModel base(params, 0.0);
    return base.with_mu(calibrate_mu(base, r));
}

double calibrate_gamma(const ThetaParams& params) {
    validate(params);
    return -theta_psi_raw(params, 0.0, 0.0).real();
}

double calibrate_mu(const ThetaModel& model, double r) {
    if (!(model.pole(1) > 1.0))
        throw PoleError("risk-neutral drift needs rho_1 > 1 so that psi(1) is finite");
    const double psi1_without_drift = theta_psi(model.with_mu(0.0), 1.0).real();
    return r - psi1_without_drift;
}

MeromorphicTerm theta_coeffs(const ThetaModel& model, int n) {
    const auto& p = model.params();
    const double n2j = p.j == 1 ? double(n) * n : double(n) * n * n * n;
    const double rho = model.pole(n);
    const double rho_hat = model.pole_hat(n);
    return {2.0 * p.c1 * p.beta1 * n2j / rho, rho, 2.0 * p.c2 * p.beta2 * n2j / rho_hat, rho_hat};
}

cplx theta_psi(const ThetaModel& model, cplx z) {
    return theta_psi_raw(model.params(), model.mu(), z) + model.gamma();
}

cplx theta_dpsi(const ThetaModel& model, cplx z) {
    const auto& p = model.params();
    const double sign = p.j == 1 ? -1.0 : 1.0;
    cplx jumps = 0.0;
    if (p.c1 != 0.0) jumps -= p.c1 * side_term(p.j, p.alpha1, p.beta1, p.alpha1 - z).deriv;
    if (p.c2 != 0.0) jumps += p.c2 * side_term(p.j, p.alpha2, p.beta2, p.alpha2 + z).deriv;
    return p.sigma * p.sigma * z + model.mu() + sign * jumps;
}

std::vector<MeromorphicTerm> MeromorphicCoeffs::prefix(int n) const {
    std::vector<MeromorphicTerm> out;
    out.reserve(std::size_t(std::max(n, 0)));
    for (int k = 1; k <= n; ++k) out.push_back(rule(k));
    return out;
}

MeromorphicCoeffs theta_series_coeffs(const ThetaModel& model) {
    MeromorphicCoeffs coeffs;
    coeffs.rule = [model](int n) { return theta_coeffs(model, n); };
    coeffs.sigma = model.params().sigma;
    coeffs.mu = theta_dpsi(model, 0.0).real();
    return coeffs;
}

double levy_density(const MeromorphicCoeffs& coeffs, double x, int N) {
    if (x == 0.0) throw DomainError("Levy density is not defined at x = 0");
    if (N < 1) throw DomainError("truncation order must be positive");
    double sum = 0.0;
    for (int n = 1; n <= N; ++n) {
        const auto t = coeffs.term(n);
        sum += x > 0.0 ? t.a * t.rho * std::exp(-t.rho * x)
                       : t.a_hat * t.rho_hat * std::exp(t.rho_hat * x);
    }
    return sum;
}

double variance_tail(const MeromorphicCoeffs& coeffs, int N) {
    constexpr long kCap = 10'000'000;
    constexpr double kTol = 1e-12;
    auto f = [&](long n) {
        const auto t = coeffs.term(int(n));
        return t.a / (t.rho * t.rho) + t.a_hat / (t.rho_hat * t.rho_hat);
    };
    // Power-law model f(n) ~ C n^{-p} fitted at L/2 and L; the remainder is
    // replaced by the integral of the model from L + 1/2.
    auto top_up = [&](long L) {
        const double fl = f(L);
        const double fh = f(L / 2);
        if (fl <= 0.0 || fh <= 0.0) return 0.0;
        const double p = std::log(fh / fl) / std::log(double(L) / double(L / 2));
        if (!(p > 1.05)) return std::numeric_limits<double>::infinity();
        return fl * std::pow(double(L), p) * std::pow(double(L) + 0.5, 1.0 - p) / (p - 1.0);
    };

    double partial = 0.0;
    long n = N;
    long L = std::max<long>(2L * N, 64);
    double previous = std::numeric_limits<double>::quiet_NaN();
    while (L <= kCap) {
        for (++n; n <= L; ++n) partial += f(n);
        n = L;
        const double estimate = partial + top_up(L);
        if (std::isfinite(estimate) && std::abs(estimate - previous) <= kTol) return estimate;
        previous = estimate;
        L *= 2;
    }
    throw ConvergenceError("variance tail did not settle within 1e7 terms");
}

HyperExpModel hyperexp_from_theta(const ThetaModel& model, double r, int N) {
    if (N < 1) throw DomainError("hyper-exponential order must be positive");
    if (!(model.pole(1) > 1.0))
        throw PoleError("risk-neutral drift needs rho_1 > 1 so that psi(1) is finite");
    const auto coeffs = theta_series_coeffs(model);
    HyperExpModel out;
    out.terms = coeffs.prefix(N);
    const double sigma2 = coeffs.sigma * coeffs.sigma + 2.0 * variance_tail(coeffs, N);
    if (!(sigma2 > 0.0)) throw ModelError("hyper-exponential approximation has no Gaussian part");
    out.sigma_tilde = std::sqrt(sigma2);
    out.mu_tilde = 0.0;
    out.mu_tilde = r - hyperexp_psi(out, 1.0).real();
    return out;
}

namespace {

// 1/d via conj(d)/|d|^2; PoleError when |d| <= 4 eps scale. Both exponents
// run inside the root and Mellin loops, so this avoids hypot and the
// library complex division.
cplx reciprocal(cplx d, double scale) {
    const double n = std::norm(d);
    const double tol = 4.0 * kEps * scale;
    if (n <= tol * tol) throw PoleError("hyper-exponential exponent evaluated at a pole");
    return std::conj(d) / n;
}

}  // namespace

cplx hyperexp_psi(const HyperExpModel& model, cplx z) {
    cplx acc = 0.0;
    for (const auto& t : model.terms) {
        acc += (t.a / t.rho) * reciprocal(t.rho - z, t.rho);
        acc += (t.a_hat / t.rho_hat) * reciprocal(t.rho_hat + z, t.rho_hat);
    }
    const double s2 = model.sigma_tilde * model.sigma_tilde;
    return 0.5 * s2 * z * z + model.mu_tilde * z + z * z * acc;
}

cplx hyperexp_dpsi(const HyperExpModel& model, cplx z) {
    cplx acc = 0.0;
    for (const auto& t : model.terms) {
        const cplx ir = reciprocal(t.rho - z, t.rho);
        const cplx il = reciprocal(t.rho_hat + z, t.rho_hat);
        acc += (t.a / t.rho) * (z * (2.0 * t.rho - z)) * (ir * ir);
        acc += (t.a_hat / t.rho_hat) * (z * (2.0 * t.rho_hat + z)) * (il * il);
    }
    return model.sigma_tilde * model.sigma_tilde * z + model.mu_tilde + acc;
}

std::string ThetaExponent::fingerprint() const {
    const auto& p = model_.params();
    std::string s = "theta:" + std::to_string(p.j);
    for (double v : {p.sigma, p.c1, p.c2, p.alpha1, p.alpha2, p.beta1, p.beta2, model_.mu()})
        s += ":" + format_double(v);
    return s;
}

double HyperExpExponent::pole(int n) const {
    return n <= model_.order() ? model_.terms[std::size_t(n - 1)].rho
                               : std::numeric_limits<double>::infinity();
}

double HyperExpExponent::pole_hat(int n) const {
    return n <= model_.order() ? model_.terms[std::size_t(n - 1)].rho_hat
                               : std::numeric_limits<double>::infinity();
}

std::string HyperExpExponent::fingerprint() const {
    std::string s = "hyperexp:" + std::to_string(model_.order()) + ":" +
                    format_double(model_.sigma_tilde) + ":" + format_double(model_.mu_tilde);
    // terms are determined by the order for a given theta source, but hash
    // them anyway so hand-built models never collide
    double h = 0.0;
    for (const auto& t : model_.terms) h = h * 1.000000119 + t.a + 3.0 * t.rho + 5.0 * t.a_hat + 7.0 * t.rho_hat;
    return s + ":" + format_double(h);
}

}  // namespace meroasian
