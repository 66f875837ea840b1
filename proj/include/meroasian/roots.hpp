#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

#include "meroasian/model.hpp"

namespace meroasian {

// Solutions of psi(z) = q. zeta[n-1] is the n-th root on the positive side;
// the n-th negative root is -zeta_hat[n-1].
struct RootSet {
    cplx q;
    std::vector<cplx> zeta;
    std::vector<cplx> zeta_hat;
    // residuals[n-1] = max(|psi(zeta_n) - q|, |psi(-zeta_hat_n) - q|)
    std::vector<double> residuals;
    ModelKind model_kind = ModelKind::Theta;

    int size() const { return int(zeta.size()); }
    double max_residual() const;
};

// Residual accepted for a root z of psi(z) = q: 1e-12 max(1, |q|), widened by
// the rounding floor 8 eps |z psi'(z)| that no double evaluation can beat.
double root_tolerance(cplx q, cplx z, cplx dpsi);

// Real roots by bracketing between consecutive poles, bisection to a 1e-6
// bracket and safeguarded Newton.
RootSet solve_real(const LaplaceExponent& psi, double q, int M);

// Continues `from` along the segment from.q -> q in `steps` equal steps with
// an Euler predictor and damped Newton corrector. Retries with doubled steps
// up to 1024 before throwing ContinuationError.
RootSet continue_roots(const LaplaceExponent& psi, const RootSet& from, cplx q, int steps = 32);

// solve_real(Re q) continued along Re q + i tau Im q, tau in [0, 1].
RootSet solve_complex(const LaplaceExponent& psi, cplx q, int M, int steps = 32);

struct InterlacingReport {
    bool zeta_ok = true;
    int zeta_violation = 0;  // 1-based index of the first violation, 0 if none
    bool zeta_hat_ok = true;
    int zeta_hat_violation = 0;

    bool ok() const { return zeta_ok && zeta_hat_ok; }
};

InterlacingReport verify_interlacing(const RootSet& roots, const LaplaceExponent& psi);

// Memo of root sets keyed by (fingerprint, q, M).
class RootCache {
public:
    RootSet get_real(const LaplaceExponent& psi, double q, int M);
    RootSet get_complex(const LaplaceExponent& psi, cplx q, int M);
    std::size_t size() const;

private:
    using Key = std::tuple<std::string, double, double, int>;
    mutable std::mutex mutex_;
    std::map<Key, RootSet> entries_;
};

}  // namespace meroasian
