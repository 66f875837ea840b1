#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "meroasian/special.hpp"

namespace meroasian {

// Shape parameters of a theta process. Drift and compensator live on
// ThetaModel because they are derived by calibration.
struct ThetaParams {
    int j = 1;
    double sigma = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    double beta1 = 1.0;
    double beta2 = 1.0;
};

// One term of the Levy density: a * rho * exp(-rho x) on the right and
// a_hat * rho_hat * exp(rho_hat x) on the left.
struct MeromorphicTerm {
    double a;
    double rho;
    double a_hat;
    double rho_hat;
};

// Theta process with Laplace exponent
//   sigma^2 z^2 / 2 + mu z + gamma + (-1)^j [c1 T(alpha1 - z) + c2 T(alpha2 + z)]
// where gamma is always calibrated so that psi(0) = 0.
class ThetaModel {
public:
    ThetaModel(const ThetaParams& params, double mu);

    // Drift chosen so that psi(1) = r.
    static ThetaModel risk_neutral(const ThetaParams& params, double r);

    const ThetaParams& params() const { return params_; }
    double mu() const { return mu_; }
    double gamma() const { return gamma_; }

    ThetaModel with_mu(double mu) const { return ThetaModel(params_, mu); }

    double pole(int n) const { return params_.alpha1 + params_.beta1 * double(n) * double(n); }
    double pole_hat(int n) const { return params_.alpha2 + params_.beta2 * double(n) * double(n); }

private:
    ThetaParams params_;
    double mu_;
    double gamma_;
};

MeromorphicTerm theta_coeffs(const ThetaModel& model, int n);
cplx theta_psi(const ThetaModel& model, cplx z);
cplx theta_dpsi(const ThetaModel& model, cplx z);

double calibrate_gamma(const ThetaParams& params);
// Drift solving psi(1) = r. Throws PoleError when rho_1 <= 1.
double calibrate_mu(const ThetaModel& model, double r);

// Rule-based coefficient sequence of a meromorphic process. `mu` is the
// drift of the compensated series representation
//   sigma^2 z^2/2 + mu z + z^2 sum a_n/(rho_n(rho_n - z)) + z^2 sum a^_n/(rho^_n(rho^_n + z)),
// which equals psi'(0).
struct MeromorphicCoeffs {
    std::function<MeromorphicTerm(int)> rule;
    double sigma = 0.0;
    double mu = 0.0;

    MeromorphicTerm term(int n) const { return rule(n); }
    std::vector<MeromorphicTerm> prefix(int n) const;
};

MeromorphicCoeffs theta_series_coeffs(const ThetaModel& model);

// Truncated Levy density; throws DomainError at x = 0.
double levy_density(const MeromorphicCoeffs& coeffs, double x, int N);

// sum_{n > N} (a_n / rho_n^2 + a^_n / rho^_n^2) with an integral top-up of the
// remainder; throws ConvergenceError when the estimate does not settle to
// 1e-12 before 1e7 terms.
double variance_tail(const MeromorphicCoeffs& coeffs, int N);

// Levy process with hyper-exponential jumps: the N-term truncation of a
// meromorphic process with Gaussian coefficient and drift re-fitted.
struct HyperExpModel {
    std::vector<MeromorphicTerm> terms;
    double sigma_tilde = 0.0;
    double mu_tilde = 0.0;

    int order() const { return int(terms.size()); }
};

// Truncates at N, matches psi''(0) through sigma_tilde and sets mu_tilde so
// that psi~(1) = r.
HyperExpModel hyperexp_from_theta(const ThetaModel& model, double r, int N);
cplx hyperexp_psi(const HyperExpModel& model, cplx z);
cplx hyperexp_dpsi(const HyperExpModel& model, cplx z);

enum class ModelKind { Theta, HyperExp };

// Common view used by the root solvers and Mellin evaluators.
class LaplaceExponent {
public:
    virtual ~LaplaceExponent() = default;

    virtual cplx psi(cplx z) const = 0;
    virtual cplx dpsi(cplx z) const = 0;
    // rho_n and rho^_n for n >= 1.
    virtual double pole(int n) const = 0;
    virtual double pole_hat(int n) const = 0;
    // Number of poles per side; nullopt when infinite.
    virtual std::optional<int> pole_count() const = 0;
    virtual ModelKind kind() const = 0;
    // Identifies the exponent for memoisation.
    virtual std::string fingerprint() const = 0;
};

class ThetaExponent final : public LaplaceExponent {
public:
    explicit ThetaExponent(ThetaModel model) : model_(std::move(model)) {}

    cplx psi(cplx z) const override { return theta_psi(model_, z); }
    cplx dpsi(cplx z) const override { return theta_dpsi(model_, z); }
    double pole(int n) const override { return model_.pole(n); }
    double pole_hat(int n) const override { return model_.pole_hat(n); }
    std::optional<int> pole_count() const override { return std::nullopt; }
    ModelKind kind() const override { return ModelKind::Theta; }
    std::string fingerprint() const override;

    const ThetaModel& model() const { return model_; }

private:
    ThetaModel model_;
};

class HyperExpExponent final : public LaplaceExponent {
public:
    explicit HyperExpExponent(HyperExpModel model) : model_(std::move(model)) {}

    cplx psi(cplx z) const override { return hyperexp_psi(model_, z); }
    cplx dpsi(cplx z) const override { return hyperexp_dpsi(model_, z); }
    double pole(int n) const override;
    double pole_hat(int n) const override;
    std::optional<int> pole_count() const override { return model_.order(); }
    ModelKind kind() const override { return ModelKind::HyperExp; }
    std::string fingerprint() const override;

    const HyperExpModel& model() const { return model_; }

private:
    HyperExpModel model_;
};

}  // namespace meroasian
