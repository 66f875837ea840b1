#pragma once

#include <optional>
#include <vector>

#include "meroasian/model.hpp"
#include "meroasian/roots.hpp"

namespace meroasian {

// Interlaced sequences 0 < alpha_1 < beta_1 < alpha_2 < beta_2 < ...
struct InterlacedPair {
    std::vector<double> alpha;
    std::vector<double> beta;

    int size() const { return int(std::min(alpha.size(), beta.size())); }
    // Throws DomainError when the materialized prefix is not interlaced.
    void validate() const;
};

// prod_{n<=N} Gamma(beta_n) Gamma(alpha_n+s-1) / (Gamma(alpha_n) Gamma(beta_n+s-1)) (beta_n/alpha_n)^{s-1}
cplx beta_product_mellin(const InterlacedPair& pair, cplx s, int N);
cplx log_beta_product_mellin(const InterlacedPair& pair, cplx s, int N);

// prod_{n<=N} (1 + (s-1)/alpha_n) / (1 + (s-1)/beta_n), so that
// M(s+1) = phi(s) M(s) for the truncated product.
cplx phi(const InterlacedPair& pair, cplx s, int N);

// |f_{v-1}(alpha_{N+1})| with f_a(z) = log(Gamma(a+z) / (Gamma(z) z^a)); bounds
// the log of the omitted tail of the product on Re s = v. Needs N+1 terms.
double log_mellin_tail_bound(const InterlacedPair& pair, int N, double v);

enum class MellinKind { Truncated, Corrected, HyperExp };

const char* to_string(MellinKind kind);

struct TailMoments {
    cplx m1;
    cplx m2;
};

// Parameters of the beta variable of the second kind matching (m1, m2).
struct Correction {
    cplx a;
    cplx b;
};

// a = m1 (m1 + m2) / (m2 - m1^2), b = 1 + (m1 + m2) / (m2 - m1^2).
// DegenerateError when the variance m2 - m1^2 is not positive (real case) or
// vanishes to rounding (complex case).
Correction correction_params(cplx m1, cplx m2);

// Mellin transform s -> E[I_q^{s-1}] for one q. Immutable once built.
class MellinEval {
public:
    // Product truncated at N over the roots and poles of psi.
    static MellinEval truncated(const LaplaceExponent& psi, const RootSet& roots, int N);

    // Truncated product times the beta-second-kind correction. Needs N+1 roots
    // with Re zeta_{N+1} > 1. Falls back to the truncated kind (and sets
    // fell_back()) when the tail moments are degenerate.
    static MellinEval corrected(const LaplaceExponent& psi, const RootSet& roots, int N);

    // Exact transform for a hyper-exponential model with all N+1 roots per side.
    static MellinEval hyperexp(const HyperExpModel& model, const RootSet& roots);

    cplx log_value(cplx s) const;
    cplx operator()(cplx s) const { return std::exp(log_value(s)); }

    MellinKind kind() const { return kind_; }
    cplx q() const { return q_; }
    int N() const { return N_; }
    cplx log_aN() const { return log_a_; }
    std::optional<cplx> log_bN() const { return log_b_; }
    std::optional<Correction> correction() const { return corr_; }
    std::optional<TailMoments> moments() const { return moments_; }
    bool fell_back() const { return fell_back_; }
    // Smallest positive root; M is analytic for 0 < Re s < 1 + zeta_1 (real q).
    cplx zeta1() const { return zeta1_; }

private:
    MellinEval() = default;
    cplx product_log(cplx s) const;
    // sum of the gamma ratios without normalization; gives log_a_
    cplx raw_log(cplx s) const;
    // builds the factors normalized at s = 1 and sets log_a_
    void prepare();

    MellinKind kind_ = MellinKind::Truncated;
    cplx q_;
    int N_ = 0;
    // gamma-ratio arguments: sum_n R(left_num_n + s, left_den_n + s) + R(right_num_n - s, right_den_n - s)
    std::vector<cplx> left_num_, left_den_, right_num_, right_den_;
    // The same factors divided by their s = 1 values, as functions of
    // sign * (s - 1), sorted by min(|a|, |b|). Factors from tier_offset_[t]
    // on have min(|a|, |b|) >= tier_radius_[t], and their summed Taylor
    // series tier_poly_[t] replaces them when |s - 1| <= tier_radius_[t] / 4.
    struct Factor {
        GammaShiftRatio ratio;
        double sign;
    };
    std::vector<Factor> factors_;
    std::vector<double> tier_radius_;
    std::vector<std::size_t> tier_offset_;
    std::vector<GammaShiftRatio::Taylor> tier_poly_;
    // hyperexp only: Gamma(extra - s) / Gamma(extra - 1)
    std::optional<cplx> extra_;
    double log_gauss_ = 0.0;  // hyperexp: log(sigma~^2 / 2)
    cplx log_a_;
    std::optional<cplx> log_b_;
    std::optional<Correction> corr_;
    std::optional<TailMoments> moments_;
    bool fell_back_ = false;
    cplx zeta1_;
};

// m_k = k! / (M_N(k+1) prod_{j<=k} (q - psi(j))), k = 1, 2, with a symmetric
// limit when psi(j) = q or psi has a pole at j.
TailMoments tail_moments(const LaplaceExponent& psi, const MellinEval& truncated);

}  // namespace meroasian
