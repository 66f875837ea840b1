#include "meroasian/roots.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "meroasian/errors.hpp"

namespace meroasian {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxSteps = 1024;

struct RealRoot {
    double z;
    double residual;
};

// Root of f in (lo, hi) where f(lo+) < 0 < f(hi-). `lo_known` means f(lo) is
// finite and negative (the bracket starts at 0 rather than at a pole).
RealRoot bracketed_root(const std::function<double(double)>& f,
                        const std::function<double(double)>& df, double lo, double hi,
                        bool lo_known, double q) {
    if (!lo_known) {
        const double lo_in = lo + 64.0 * kEps * std::max(lo, 1.0);
        if (!(f(lo_in) < 0.0)) throw BracketError("no sign change next to the left pole");
        lo = lo_in;
    }
    if (std::isinf(hi)) {
        double probe = std::max(2.0 * lo, lo + 1.0);
        int doublings = 0;
        while (!(f(probe) > 0.0)) {
            if (++doublings > 60) throw BracketError("no root beyond the last pole");
            lo = probe;
            probe *= 2.0;
        }
        hi = probe;
    } else {
        const double hi_in = hi - 64.0 * kEps * hi;
        if (!(f(hi_in) > 0.0)) throw BracketError("no sign change next to the right pole");
        hi = hi_in;
    }

    while (hi - lo > 1e-6) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (f(mid) < 0.0 ? lo : hi) = mid;
    }

    double z = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
        const double fz = f(z);
        if (fz == 0.0) return {z, 0.0};
        (fz < 0.0 ? lo : hi) = z;
        const double d = df(z);
        double next = z - fz / d;
        if (!std::isfinite(next) || next <= lo || next >= hi) next = 0.5 * (lo + hi);
        const bool done = std::abs(next - z) <= 2.0 * kEps * std::abs(z) || hi - lo <= 2.0 * kEps * hi;
        z = next;
        if (done) {
            const double res = std::abs(f(z));
            const double tol = root_tolerance(q, z, df(z));
            if (!(res <= tol))
                throw ConvergenceError("real root residual " + std::to_string(res) + " above tolerance");
            return {z, res};
        }
    }
    throw ConvergenceError("real root iteration cap exceeded");
}

double side_pole(const LaplaceExponent& psi, int n, bool positive) {
    if (n == 0) return 0.0;
    if (const auto count = psi.pole_count(); count && n > *count)
        return std::numeric_limits<double>::infinity();
    return positive ? psi.pole(n) : psi.pole_hat(n);
}

void check_count(const LaplaceExponent& psi, int M) {
    if (M < 1) throw DomainError("root count must be positive");
    if (const auto count = psi.pole_count(); count && M > *count + 1)
        throw BracketError("requested " + std::to_string(M) + " roots but only " +
                           std::to_string(*count + 1) + " exist on each side");
}

// One predictor-corrector step from (z, qa) to qb, subdividing locally when
// the corrector wanders too far from the prediction.
bool track(const LaplaceExponent& psi, cplx& z, cplx qa, cplx qb, int depth) {
    try {
        const cplx dz = (qb - qa) / psi.dpsi(z);
        const cplx zp = z + dz;
        cplx w = zp;
        cplx fw = psi.psi(w) - qb;
        bool converged = false;
        for (int iter = 0; iter < 30 && !converged; ++iter) {
            const cplx step = fw / psi.dpsi(w);
            if (!std::isfinite(std::abs(step))) break;
            double lambda = 1.0;
            bool moved = false;
            for (int halving = 0; halving < 12; ++halving) {
                const cplx trial = w - lambda * step;
                cplx ft;
                try {
                    ft = psi.psi(trial) - qb;
                } catch (const PoleError&) {
                    lambda *= 0.5;
                    continue;
                }
                if (std::abs(ft) < std::abs(fw) || std::abs(lambda * step) <= 4.0 * kEps * std::abs(w)) {
                    w = trial;
                    fw = ft;
                    moved = true;
                    break;
                }
                lambda *= 0.5;
            }
            if (!moved) break;
            converged = std::abs(lambda * step) <= 1e-13 * (1.0 + std::abs(w)) ||
                        std::abs(fw) <= 1e-13 * std::max(1.0, std::abs(qb));
        }
        if (converged && std::abs(w - zp) <= 0.3 * std::abs(dz) + 1e-9 * (1.0 + std::abs(z))) {
            z = w;
            return true;
        }
    } catch (const PoleError&) {
    }
    if (depth >= 12) return false;
    const cplx qm = 0.5 * (qa + qb);
    cplx trial = z;
    if (!track(psi, trial, qa, qm, depth + 1)) return false;
    if (!track(psi, trial, qm, qb, depth + 1)) return false;
    z = trial;
    return true;
}

cplx polish(const LaplaceExponent& psi, cplx z, cplx q) {
    for (int iter = 0; iter < 8; ++iter) {
        const cplx step = (psi.psi(z) - q) / psi.dpsi(z);
        const cplx next = z - step;
        const bool done = std::abs(step) <= 4.0 * kEps * std::abs(z);
        if (!std::isfinite(std::abs(next))) break;
        z = next;
        if (done) break;
    }
    return z;
}

bool collide(const std::vector<cplx>& all) {
    for (std::size_t i = 0; i < all.size(); ++i)
        for (std::size_t k = i + 1; k < all.size(); ++k)
            if (std::abs(all[i] - all[k]) <= 1e-8 * (1.0 + std::abs(all[i]))) return true;
    return false;
}

bool try_continue(const LaplaceExponent& psi, const RootSet& from, cplx q, int steps, RootSet& out) {
    out = from;
    out.q = q;
    const int M = from.size();
    std::vector<cplx> all;
    all.reserve(2 * std::size_t(M));
    for (int side = 0; side < 2; ++side) {
        for (int n = 0; n < M; ++n) {
            // negative side tracked in z, i.e. at -zeta_hat
            cplx z = side == 0 ? from.zeta[n] : -from.zeta_hat[n];
            for (int k = 0; k < steps; ++k) {
                const cplx qa = from.q + (q - from.q) * (double(k) / steps);
                const cplx qb = k + 1 == steps ? q : from.q + (q - from.q) * (double(k + 1) / steps);
                if (!track(psi, z, qa, qb, 0)) return false;
            }
            z = polish(psi, z, q);
            all.push_back(z);
            if (side == 0) out.zeta[n] = z;
            else out.zeta_hat[n] = -z;
        }
    }
    if (collide(all)) return false;
    for (int n = 0; n < M; ++n) {
        const double r1 = std::abs(psi.psi(out.zeta[n]) - q);
        const double r2 = std::abs(psi.psi(-out.zeta_hat[n]) - q);
        out.residuals[n] = std::max(r1, r2);
        const double t1 = root_tolerance(q, out.zeta[n], psi.dpsi(out.zeta[n]));
        const double t2 = root_tolerance(q, -out.zeta_hat[n], psi.dpsi(-out.zeta_hat[n]));
        if (!(r1 <= t1 && r2 <= t2)) return false;
    }
    return true;
}

}  // namespace

double RootSet::max_residual() const {
    double m = 0.0;
    for (double r : residuals) m = std::max(m, r);
    return m;
}

double root_tolerance(cplx q, cplx z, cplx dpsi) {
    return 1e-12 * std::max(1.0, std::abs(q)) + 8.0 * kEps * std::abs(z * dpsi);
}

RootSet solve_real(const LaplaceExponent& psi, double q, int M) {
    if (!(q > 0.0)) throw DomainError("real root solver needs q > 0");
    check_count(psi, M);
    RootSet out;
    out.q = q;
    out.model_kind = psi.kind();
    out.zeta.resize(std::size_t(M));
    out.zeta_hat.resize(std::size_t(M));
    out.residuals.resize(std::size_t(M));

    auto fp = [&](double z) { return psi.psi(z).real() - q; };
    auto dfp = [&](double z) { return psi.dpsi(z).real(); };
    auto fn = [&](double y) { return psi.psi(-y).real() - q; };
    auto dfn = [&](double y) { return -psi.dpsi(-y).real(); };

    for (int n = 1; n <= M; ++n) {
        const auto r = bracketed_root(fp, dfp, side_pole(psi, n - 1, true), side_pole(psi, n, true), n == 1, q);
        const auto l = bracketed_root(fn, dfn, side_pole(psi, n - 1, false), side_pole(psi, n, false), n == 1, q);
        out.zeta[std::size_t(n - 1)] = r.z;
        out.zeta_hat[std::size_t(n - 1)] = l.z;
        out.residuals[std::size_t(n - 1)] = std::max(r.residual, l.residual);
    }
    return out;
}

RootSet continue_roots(const LaplaceExponent& psi, const RootSet& from, cplx q, int steps) {
    if (from.q == q) return from;
    if (steps < 1) throw DomainError("continuation needs at least one step");
    RootSet out;
    for (int s = steps; s <= std::max(steps, kMaxSteps); s *= 2) {
        if (try_continue(psi, from, q, s, out)) return out;
    }
    throw ContinuationError("root continuation failed with " + std::to_string(std::max(steps, kMaxSteps)) +
                            " steps");
}

RootSet solve_complex(const LaplaceExponent& psi, cplx q, int M, int steps) {
    if (!(q.real() > 0.0)) throw DomainError("complex root solver needs Re q > 0");
    return continue_roots(psi, solve_real(psi, q.real(), M), q, steps);
}

InterlacingReport verify_interlacing(const RootSet& roots, const LaplaceExponent& psi) {
    InterlacingReport rep;
    auto check = [&](const std::vector<cplx>& chain, bool positive, bool& ok, int& at) {
        for (std::size_t i = 0; i < chain.size(); ++i) {
            const int n = int(i) + 1;
            const double lo = side_pole(psi, n - 1, positive);
            const double hi = side_pole(psi, n, positive);
            const cplx z = chain[i];
            if (z.imag() != 0.0 || !(z.real() > lo && z.real() < hi)) {
                ok = false;
                at = n;
                return;
            }
        }
    };
    check(roots.zeta, true, rep.zeta_ok, rep.zeta_violation);
    check(roots.zeta_hat, false, rep.zeta_hat_ok, rep.zeta_hat_violation);
    return rep;
}

RootSet RootCache::get_real(const LaplaceExponent& psi, double q, int M) {
    return get_complex(psi, q, M);
}

RootSet RootCache::get_complex(const LaplaceExponent& psi, cplx q, int M) {
    Key key{psi.fingerprint(), q.real(), q.imag(), M};
    {
        std::lock_guard lock(mutex_);
        if (auto it = entries_.find(key); it != entries_.end()) return it->second;
    }
    RootSet rs = q.imag() == 0.0 ? solve_real(psi, q.real(), M) : solve_complex(psi, q, M);
    std::lock_guard lock(mutex_);
    entries_[key] = rs;
    return rs;
}

std::size_t RootCache::size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
}

}  // namespace meroasian
