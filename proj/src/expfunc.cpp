#include "meroasian/expfunc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "meroasian/errors.hpp"

namespace meroasian {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void check_pair(const InterlacedPair& pair, int N) {
    if (N < 0 || N > pair.size()) throw DomainError("pair has fewer terms than requested");
}

}  // namespace

void InterlacedPair::validate() const {
    double prev = 0.0;
    for (int n = 0; n < size(); ++n) {
        if (!(alpha[n] > prev && beta[n] > alpha[n]))
            throw DomainError("pair is not interlaced at index " + std::to_string(n + 1));
        prev = beta[n];
    }
}

cplx log_beta_product_mellin(const InterlacedPair& pair, cplx s, int N) {
    check_pair(pair, N);
    cplx acc = 0.0;
    for (int n = 0; n < N; ++n) {
        const double a = pair.alpha[n];
        const double b = pair.beta[n];
        acc += log_gamma_ratio(a + s - 1.0, b + s - 1.0) - log_gamma_ratio(a, b) +
               (s - 1.0) * std::log(b / a);
    }
    return acc;
}

cplx beta_product_mellin(const InterlacedPair& pair, cplx s, int N) {
    return std::exp(log_beta_product_mellin(pair, s, N));
}

cplx phi(const InterlacedPair& pair, cplx s, int N) {
    check_pair(pair, N);
    cplx acc = 1.0;
    for (int n = 0; n < N; ++n) {
        const cplx den = 1.0 + (s - 1.0) / pair.beta[n];
        if (den == 0.0) throw PoleError("phi evaluated at s = 1 - beta_n");
        acc *= (1.0 + (s - 1.0) / pair.alpha[n]) / den;
    }
    return acc;
}

double log_mellin_tail_bound(const InterlacedPair& pair, int N, double v) {
    check_pair(pair, N + 1);
    const double z = pair.alpha[std::size_t(N)];
    const double a = v - 1.0;
    if (!(v > 1.0 - z)) throw DomainError("tail bound needs v > 1 - alpha_{N+1}");
    if (a == 0.0) return 0.0;
    return std::abs(std::lgamma(a + z) - std::lgamma(z) - a * std::log(z));
}

const char* to_string(MellinKind kind) {
    switch (kind) {
        case MellinKind::Truncated: return "truncated";
        case MellinKind::Corrected: return "corrected";
        case MellinKind::HyperExp: return "hyperexp";
    }
    return "unknown";
}

Correction correction_params(cplx m1, cplx m2) {
    const cplx var = m2 - m1 * m1;
    const bool real_case = m1.imag() == 0.0 && m2.imag() == 0.0;
    if (real_case) {
        if (!(m1.real() > 0.0) || !(var.real() > 0.0))
            throw DegenerateError("tail moments have no positive variance");
    } else if (!(std::abs(var) > 16.0 * kEps * std::abs(m1 * m1))) {
        throw DegenerateError("tail variance vanishes to rounding");
    }
    return {m1 * (m1 + m2) / var, 1.0 + (m1 + m2) / var};
}

MellinEval MellinEval::truncated(const LaplaceExponent& psi, const RootSet& roots, int N) {
    if (N < 1) throw DomainError("truncation order must be positive");
    if (roots.size() < N) throw DomainError("root set shorter than the truncation order");
    MellinEval m;
    m.kind_ = MellinKind::Truncated;
    m.q_ = roots.q;
    m.N_ = N;
    m.zeta1_ = roots.zeta[0];
    cplx log_b = std::log(1.0 + psi.pole_hat(N)) - std::log(roots.q);
    for (int n = 1; n <= N; ++n) {
        const cplx z = roots.zeta[std::size_t(n - 1)];
        const cplx zh = roots.zeta_hat[std::size_t(n - 1)];
        const double rho = psi.pole(n);
        const double rho_hat = psi.pole_hat(n);
        m.left_num_.push_back(n == 1 ? 0.0 : psi.pole_hat(n - 1));
        m.left_den_.push_back(zh);
        m.right_num_.push_back(z + 1.0);
        m.right_den_.push_back(rho + 1.0);
        log_b += std::log(z) + std::log(zh) - std::log(rho) - std::log(rho_hat);
    }
    m.log_b_ = log_b;
    m.prepare();
    return m;
}

TailMoments tail_moments(const LaplaceExponent& psi, const MellinEval& mn) {
    if (mn.kind() != MellinKind::Truncated) throw DomainError("tail moments need the truncated transform");
    const cplx q = mn.q();
    auto plain = [&](int k) {
        cplx denom = mn(double(k) + 1.0);
        double fact = 1.0;
        for (int j = 1; j <= k; ++j) {
            const cplx d = q - psi.psi(double(j));
            if (!(std::abs(d) > 1e-10 * std::max(1.0, std::abs(q))))
                throw SingularError("psi(j) = q");
            denom *= d;
            fact *= j;
        }
        return fact / denom;
    };
    // ratio with Gamma(k+1+x)/Gamma(1+x) in place of k!, averaged over x = +-h
    auto limit = [&](int k) {
        constexpr double h = 1e-6;
        cplx acc = 0.0;
        for (double x : {h, -h}) {
            cplx log_g = log_gamma_ratio(double(k) + 1.0 + x, 1.0 + x) - mn.log_value(double(k) + 1.0 + x);
            for (int j = 1; j <= k; ++j) log_g -= std::log(q - psi.psi(double(j) + x));
            acc += std::exp(log_g);
        }
        return 0.5 * acc;
    };
    auto moment = [&](int k) {
        try {
            return plain(k);
        } catch (const SingularError&) {
        } catch (const PoleError&) {
        }
        try {
            return limit(k);
        } catch (const NumericalError& e) {
            throw SingularError(std::string("moment limit failed: ") + e.what());
        }
    };
    return {moment(1), moment(2)};
}

MellinEval MellinEval::corrected(const LaplaceExponent& psi, const RootSet& roots, int N) {
    if (roots.size() < N + 1) throw DomainError("corrected transform needs N+1 roots");
    if (!(roots.zeta[std::size_t(N)].real() > 1.0))
        throw DomainError("corrected transform needs zeta_{N+1} > 1");
    MellinEval m = truncated(psi, roots, N);
    const auto mom = tail_moments(psi, m);
    m.moments_ = mom;
    try {
        m.corr_ = correction_params(mom.m1, mom.m2);
        m.kind_ = MellinKind::Corrected;
    } catch (const DegenerateError&) {
        m.fell_back_ = true;
    }
    return m;
}

MellinEval MellinEval::hyperexp(const HyperExpModel& model, const RootSet& roots) {
    const int N = model.order();
    if (!(model.sigma_tilde > 0.0)) throw ModelError("hyper-exponential transform needs sigma~ > 0");
    if (roots.size() != N + 1) throw DomainError("hyper-exponential transform needs N+1 roots per side");
    MellinEval m;
    m.kind_ = MellinKind::HyperExp;
    m.q_ = roots.q;
    m.N_ = N;
    m.zeta1_ = roots.zeta[0];
    for (int j = 1; j <= N + 1; ++j) {
        m.left_num_.push_back(j == 1 ? 0.0 : model.terms[std::size_t(j - 2)].rho_hat);
        m.left_den_.push_back(roots.zeta_hat[std::size_t(j - 1)]);
    }
    for (int j = 1; j <= N; ++j) {
        m.right_num_.push_back(1.0 + roots.zeta[std::size_t(j - 1)]);
        m.right_den_.push_back(1.0 + model.terms[std::size_t(j - 1)].rho);
    }
    m.extra_ = 1.0 + roots.zeta[std::size_t(N)];
    m.log_gauss_ = std::log(0.5 * model.sigma_tilde * model.sigma_tilde);
    m.prepare();
    return m;
}

cplx MellinEval::raw_log(cplx s) const {
    cplx acc = 0.0;
    for (std::size_t n = 0; n < left_num_.size(); ++n)
        acc += log_gamma_ratio(left_num_[n] + s, left_den_[n] + s);
    for (std::size_t n = 0; n < right_num_.size(); ++n)
        acc += log_gamma_ratio(right_num_[n] - s, right_den_[n] - s);
    return acc;
}

void MellinEval::prepare() {
    log_a_ = -raw_log(1.0);
    factors_.clear();
    for (std::size_t n = 0; n < left_num_.size(); ++n)
        factors_.push_back({GammaShiftRatio(left_num_[n] + 1.0, left_den_[n] + 1.0), 1.0});
    for (std::size_t n = 0; n < right_num_.size(); ++n)
        factors_.push_back({GammaShiftRatio(right_num_[n] - 1.0, right_den_[n] - 1.0), -1.0});
    auto radius = [](const Factor& f) { return std::min(std::abs(f.ratio.a()), std::abs(f.ratio.b())); };
    std::stable_sort(factors_.begin(), factors_.end(),
                     [&](const Factor& x, const Factor& y) { return radius(x) < radius(y); });

    tier_radius_.clear();
    tier_offset_.clear();
    tier_poly_.clear();
    const double largest = factors_.empty() ? 0.0 : radius(factors_.back());
    for (double R = 40.0; R <= largest; R *= 2.0) {
        std::size_t i = 0;
        while (i < factors_.size() && radius(factors_[i]) < R) ++i;
        tier_radius_.push_back(R);
        tier_offset_.push_back(i);
    }
    tier_poly_.assign(tier_radius_.size(), GammaShiftRatio::Taylor{});
    for (std::size_t t = tier_radius_.size(); t-- > 0;) {
        const std::size_t end = t + 1 < tier_radius_.size() ? tier_offset_[t + 1] : factors_.size();
        if (t + 1 < tier_radius_.size()) tier_poly_[t] = tier_poly_[t + 1];
        for (std::size_t i = tier_offset_[t]; i < end; ++i) factors_[i].ratio.add_taylor(tier_poly_[t], factors_[i].sign);
    }
}

// Each factor is divided by its value at s = 1. The unnormalized factors run
// to 1e3 for large n and cancel in the sum, which would cost ~1e-11 in M.
cplx MellinEval::product_log(cplx s) const {
    const cplx w = s - 1.0;
    const double reach = 4.0 * std::abs(w);
    std::size_t t = 0;
    while (t < tier_radius_.size() && tier_radius_[t] < reach) ++t;
    const std::size_t direct = t < tier_radius_.size() ? tier_offset_[t] : factors_.size();
    cplx acc = 0.0;
    for (std::size_t i = 0; i < direct; ++i) acc += factors_[i].ratio(factors_[i].sign * w);
    if (t < tier_radius_.size()) {
        const auto& c = tier_poly_[t];
        cplx poly = 0.0;
        for (int k = GammaShiftRatio::kTaylorOrder; k >= 1; --k) poly = (poly + c[std::size_t(k)]) * w;
        acc += poly;
    }
    if (log_b_) acc += w * *log_b_;
    if (extra_) acc += log_gamma_ratio(*extra_ - s, *extra_ - 1.0) - w * log_gauss_;
    return acc;
}

cplx MellinEval::log_value(cplx s) const {
    cplx v = product_log(s);
    if (kind_ == MellinKind::Corrected)
        v += log_gamma_ratio(corr_->a + s - 1.0, corr_->a) + log_gamma_ratio(corr_->b + 1.0 - s, corr_->b);
    return v;
}

}  // namespace meroasian
