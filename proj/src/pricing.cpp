#include "meroasian/pricing.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <random>

#include "meroasian/errors.hpp"
#include "meroasian/parallel.hpp"
#include "meroasian/roots.hpp"

namespace meroasian {

namespace {

using Clock = std::chrono::steady_clock;

constexpr int kChunk = 8;          // u-nodes per continuation chunk
constexpr int kNodeSteps = 4;      // continuation steps between neighbouring nodes
constexpr long kPathsPerBlock = 4096;
// End-of-domain |integrand| relative to its peak. Both integrands are
// oscillatory there, so the omitted tail is far smaller than this ratio.
constexpr double kTailWarning = 1e-6;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// The put value k - t + O(t^2) jumps at t = 0, so its transform decays like
// k/q - 1/q^2 and the truncated cosine inversion would converge like 1/u_max.
// Subtract q times the transform of k e^{-t} + (k - 1) t e^{-t}, which has the
// same two leading terms, and add its value back afterwards.
cplx put_reference(double k, cplx q) {
    const cplx a = 1.0 / (q + 1.0);
    return q * (k * a + (k - 1.0) * a * a);
}

double put_reference_value(double k, double t) { return (k + (k - 1.0) * t) * std::exp(-t); }

using EvalFactory = std::function<MellinEval(const LaplaceExponent&, const RootSet&)>;

// h(k, d2 + i u_j) on the Laplace nodes, then the Laplace inversion. Nodes
// are processed in fixed chunks: the first root set of a chunk is continued
// from the real roots at q = d2, later ones from their neighbour, so results
// do not depend on the worker count.
double mellin_laplace_pipeline(const LaplaceExponent& psi, int root_count, const EvalFactory& make_eval,
                               const PricingRequest& req, Diagnostics& diag) {
    const auto& cfg = req.quad;
    if (!(cfg.d2 > req.r)) throw ContourError("Laplace abscissa d2 must exceed r");
    const auto base = solve_real(psi, cfg.d2, root_count);
    const double d1 = mellin_abscissa(cfg, base.zeta[0].real());

    const double k = req.K / req.S0;
    const auto grid_u = laplace_nodes(cfg).u;
    const int nodes = int(grid_u.size());
    std::vector<cplx> h(static_cast<std::size_t>(nodes));
    std::vector<double> residual(static_cast<std::size_t>(nodes)), tail(static_cast<std::size_t>(nodes));
    std::vector<int> fallback(std::size_t(nodes), 0);
    const int chunks = (nodes + kChunk - 1) / kChunk;

    parallel_for(std::size_t(chunks), [&](std::size_t c) {
        RootSet roots;
        const int first = int(c) * kChunk;
        const int last = std::min(nodes, first + kChunk);
        for (int j = first; j < last; ++j) {
            const cplx q(cfg.d2, grid_u[std::size_t(j)]);
            if (j == first)
                roots = j == 0 ? base : continue_roots(psi, base, q);
            else
                roots = continue_roots(psi, roots, q, kNodeSteps);
            const auto eval = make_eval(psi, roots);
            const auto grid = h_integrand([&](cplx s) { return eval(s); }, d1, cfg);
            double peak = 0.0;
            for (const auto& g : grid.grid.samples) peak = std::max(peak, std::abs(g));
            tail[std::size_t(j)] =
                std::max(std::abs(grid.grid.samples.front()), std::abs(grid.grid.samples.back())) / peak;
            // put side: E[(k - I_q)^+] = h - E[I_q] + k, minus the reference
            h[std::size_t(j)] = inverse_mellin_h(grid, k) - eval(2.0) + k - put_reference(k, q);
            residual[std::size_t(j)] = roots.max_residual();
            fallback[std::size_t(j)] = eval.fell_back() ? 1 : 0;
        }
    });

    for (int j = 0; j < nodes; ++j) {
        diag.max_root_residual = std::max(diag.max_root_residual, residual[std::size_t(j)]);
        diag.mellin_tail_ratio = std::max(diag.mellin_tail_ratio, tail[std::size_t(j)]);
        diag.correction_fallbacks += fallback[std::size_t(j)];
    }
    // the put bends near t = k, where A_t first reaches the strike
    const auto put = inverse_laplace_f(h, req.T, cfg, k);
    diag.laplace_tail_ratio = put.tail_ratio;
    if (diag.mellin_tail_ratio > kTailWarning)
        diag.warnings.push_back("Mellin integrand not negligible at |v| = v_max");
    if (diag.laplace_tail_ratio > kTailWarning)
        diag.warnings.push_back("Laplace integrand not negligible at u = u_max");
    if (diag.correction_fallbacks > 0)
        diag.warnings.push_back("degenerate tail moments: truncated transform used at some nodes");
    // call = forward - k + put; forward = E int_0^T e^{X_u} du
    const double forward = req.r == 0.0 ? req.T : std::expm1(req.r * req.T) / req.r;
    return forward - k + put.value + put_reference_value(k, req.T);
}

PricingResult semi_analytic(const ThetaModel& model, const PricingRequest& req, Method method) {
    req.validate();
    const auto t0 = Clock::now();
    PricingResult out;
    out.method = method;
    out.N = req.N;
    const auto rn = ThetaModel::risk_neutral(model.params(), req.r);
    if (req.K == 0.0) {
        out.price = zero_strike_price(req.S0, req.T, req.r);
    } else if (method == Method::Algo1) {
        const ThetaExponent psi(rn);
        const int N = req.N;
        const double f = mellin_laplace_pipeline(
            psi, N + 1, [N](const LaplaceExponent& p, const RootSet& r) { return MellinEval::corrected(p, r, N); },
            req, out.diagnostics);
        out.price = std::exp(-req.r * req.T) * req.S0 * f;
    } else {
        const auto hyp = hyperexp_from_theta(rn, req.r, req.N);
        const HyperExpExponent psi(hyp);
        const double f = mellin_laplace_pipeline(
            psi, req.N + 1,
            [&hyp](const LaplaceExponent&, const RootSet& r) { return MellinEval::hyperexp(hyp, r); }, req,
            out.diagnostics);
        out.price = std::exp(-req.r * req.T) * req.S0 * f;
    }
    out.runtime_seconds = seconds_since(t0);
    return out;
}

// sum_n a_n e^{-rho_n L} <= target
double tail_extent(const MeromorphicCoeffs& coeffs, bool right, double dt, double target) {
    auto mass = [&](double L) {
        double acc = 0.0;
        for (int n = 1; n < 100000; ++n) {
            const auto t = coeffs.term(n);
            const double term = right ? t.a * std::exp(-t.rho * L) : t.a_hat * std::exp(-t.rho_hat * L);
            acc += term;
            if (term < 1e-30 * std::max(acc, 1e-300)) break;
        }
        return dt * acc;
    };
    double L = 0.25;
    while (mass(L) > target) L *= 1.25;
    return L;
}

}  // namespace

const char* to_string(Method method) {
    switch (method) {
        case Method::Algo1: return "mellin";
        case Method::Algo2: return "hyperexp";
        case Method::MonteCarlo: return "mc";
    }
    return "unknown";
}

const char* to_string(Profile profile) {
    switch (profile) {
        case Profile::Fast: return "fast";
        case Profile::Table: return "table";
        case Profile::Exact: return "exact";
    }
    return "unknown";
}

Profile parse_profile(const std::string& name) {
    if (name == "fast") return Profile::Fast;
    if (name == "table") return Profile::Table;
    if (name == "exact") return Profile::Exact;
    throw DomainError("unknown profile '" + name + "'");
}

InversionConfig profile_quad(Profile profile) {
    InversionConfig cfg;
    switch (profile) {
        case Profile::Fast:
            cfg.n_mellin = 600;
            cfg.n_laplace = 800;
            break;
        case Profile::Table:
            cfg.n_mellin = 800;
            cfg.n_laplace = 1600;
            break;
        case Profile::Exact:
            cfg.n_mellin = 1600;
            cfg.n_laplace = 1600;
            break;
    }
    return cfg;
}

std::optional<int> profile_N(Profile profile) {
    if (profile == Profile::Exact) return 160;
    return std::nullopt;
}

void PricingRequest::validate() const {
    if (!(S0 > 0.0)) throw DomainError("S0 must be positive");
    if (!(K >= 0.0)) throw DomainError("K must be non-negative");
    if (!(T > 0.0)) throw DomainError("T must be positive");
    if (!(r >= 0.0)) throw DomainError("r must be non-negative");
    if (N < 1) throw DomainError("N must be positive");
    if (method == Method::MonteCarlo && (mc.paths < 1 || mc.steps < 1))
        throw DomainError("Monte Carlo needs paths >= 1 and steps >= 1");
}

double zero_strike_price(double S0, double T, double r) {
    if (r == 0.0) return S0 * T;
    return S0 * -std::expm1(-r * T) / r;
}

PricingResult price_algo1(const ThetaModel& model, const PricingRequest& req) {
    return semi_analytic(model, req, Method::Algo1);
}

PricingResult price_algo2(const ThetaModel& model, const PricingRequest& req) {
    return semi_analytic(model, req, Method::Algo2);
}

IncrementTable::IncrementTable(const ThetaModel& model, double dt, const Config& cfg) {
    if (!(dt > 0.0)) throw DomainError("increment length must be positive");
    if (cfg.points < 16) throw DomainError("increment table needs at least 16 points");
    if (cfg.fine_factor < 1) throw DomainError("fine_factor must be at least 1");
    auto phi = [&](double z) { return std::exp(dt * theta_psi(model, cplx(0.0, z))); };

    // first z where |phi| falls below floor, by doubling then bisection
    auto cutoff = [&](double floor) {
        double hi = 1.0;
        while (std::abs(phi(hi)) >= floor) {
            hi *= 2.0;
            if (hi > 1e9) throw SamplerError("characteristic function does not decay");
        }
        double lo = hi / 2.0;
        for (int i = 0; i < 40; ++i) {
            const double mid = 0.5 * (lo + hi);
            (std::abs(phi(mid)) >= floor ? lo : hi) = mid;
        }
        return hi;
    };
    int intervals = std::max(4, int(std::ceil(cutoff(cfg.phi_floor) / cfg.dz)));
    intervals += intervals % 2;
    z_max_ = intervals * cfg.dz;
    int fine = cfg.fine_factor > 1 ? std::min(intervals, int(std::ceil(cutoff(cfg.fine_floor) / cfg.dz))) : 0;
    fine += fine % 2;
    const double z_fine = fine * cfg.dz;
    const auto sample = [&](double a, double b, int n) {
        return n > 0 ? FilonGrid::sample(a, b, n, [&](double z) { return phi(z); }) : FilonGrid{};
    };
    const auto head = sample(0.0, z_fine, fine * cfg.fine_factor);
    const auto grid = sample(z_fine, z_max_, intervals - fine);

    const auto coeffs = theta_series_coeffs(model);
    const double drift = dt * theta_dpsi(model, 0.0).real();
    const double h = 1e-4;
    const double var = dt * (theta_psi(model, h) - 2.0 * theta_psi(model, 0.0) + theta_psi(model, -h)).real() / (h * h);
    const double sd = std::sqrt(std::max(var, 0.0));
    const double right = std::max(12.0 * sd, tail_extent(coeffs, true, dt, 1e-12));
    const double left = std::max(12.0 * sd, tail_extent(coeffs, false, dt, 1e-12));
    x0_ = drift - left;
    dx_ = (left + right) / (cfg.points - 1);

    std::vector<double> raw(std::size_t(cfg.points));
    parallel_for(raw.size(), [&](std::size_t i) {
        const double x = x0_ + dx_ * double(i);
        cplx acc;
        if (fine > 0) acc += filon_integral(head, x);
        if (fine < intervals) acc += filon_integral(grid, x);
        raw[i] = acc.real() / kPi;
    });
    min_raw_ = *std::min_element(raw.begin(), raw.end());
    pdf_.resize(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i] < 0.0) {
            clamped_mass_ -= raw[i] * dx_;
            pdf_[i] = 0.0;
        } else {
            pdf_[i] = raw[i];
        }
    }
    if (clamped_mass_ > 1e-5)
        throw SamplerError("negative density lobes carry mass " + std::to_string(clamped_mass_));
    cdf_.assign(pdf_.size(), 0.0);
    for (std::size_t i = 1; i < pdf_.size(); ++i) cdf_[i] = cdf_[i - 1] + 0.5 * (pdf_[i - 1] + pdf_[i]) * dx_;
    raw_mass_ = cdf_.back();
    if (!(std::abs(raw_mass_ - 1.0) <= 1e-4))
        throw SamplerError("increment density integrates to " + std::to_string(raw_mass_));
    for (auto& p : pdf_) p /= raw_mass_;
    for (auto& c : cdf_) c /= raw_mass_;
    cdf_.back() = 1.0;

    const std::size_t G = pdf_.size();
    guide_.resize(G);
    std::size_t i = 0;
    for (std::size_t g = 0; g < G; ++g) {
        const double u = double(g) / double(G);
        while (i + 2 < cdf_.size() && cdf_[i + 1] <= u) ++i;
        guide_[g] = std::uint32_t(i);
    }
}

double IncrementTable::mean() const {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < pdf_.size(); ++i) {
        const double xa = x0_ + dx_ * double(i);
        // exact mean of the piecewise-linear cdf bin
        acc += (cdf_[i + 1] - cdf_[i]) * (xa + 0.5 * dx_);
    }
    return acc;
}

double IncrementTable::sample(double u) const {
    std::size_t i = guide_[std::min(guide_.size() - 1, std::size_t(u * double(guide_.size())))];
    while (i + 2 < cdf_.size() && cdf_[i + 1] <= u) ++i;
    const double width = cdf_[i + 1] - cdf_[i];
    const double frac = width > 0.0 ? (u - cdf_[i]) / width : 0.5;
    return x0_ + dx_ * (double(i) + frac);
}

PricingResult price_mc(const ThetaModel& model, const PricingRequest& req) {
    req.validate();
    const auto t0 = Clock::now();
    const auto rn = ThetaModel::risk_neutral(model.params(), req.r);
    const int steps = req.mc.steps;
    const double dt = req.T / steps;
    const IncrementTable table(rn, dt);

    const long blocks = (req.mc.paths + kPathsPerBlock - 1) / kPathsPerBlock;
    std::vector<double> sum(static_cast<std::size_t>(blocks)), sum2(static_cast<std::size_t>(blocks));
    const double weight = req.S0 * dt;
    parallel_for(std::size_t(blocks), [&](std::size_t b) {
        const std::uint64_t seed = req.mc.seed;
        std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(b), std::uint32_t(b >> 32)};
        std::mt19937_64 rng(seq);
        const long first = long(b) * kPathsPerBlock;
        const long last = std::min(req.mc.paths, first + kPathsPerBlock);
        double s = 0.0, s2 = 0.0;
        for (long p = first; p < last; ++p) {
            double z = 0.0;
            double acc = 0.0;
            for (int n = 0; n < steps; ++n) {
                const double u = double(rng() >> 11) * 0x1.0p-53;
                z += table.sample(u);
                acc += std::exp(z);
            }
            const double payoff = std::max(weight * acc - req.K, 0.0);
            s += payoff;
            s2 += payoff * payoff;
        }
        sum[b] = s;
        sum2[b] = s2;
    });
    double s = 0.0, s2 = 0.0;
    for (long b = 0; b < blocks; ++b) {
        s += sum[std::size_t(b)];
        s2 += sum2[std::size_t(b)];
    }
    const double n = double(req.mc.paths);
    const double mean = s / n;
    const double var = n > 1.0 ? std::max(0.0, (s2 - n * mean * mean) / (n - 1.0)) : 0.0;
    const double disc = std::exp(-req.r * req.T);

    PricingResult out;
    out.method = Method::MonteCarlo;
    out.N = req.N;
    out.price = disc * mean;
    out.std_error = disc * std::sqrt(var / n);
    out.diagnostics.clamped_mass = table.clamped_mass();
    if (table.clamped_mass() > 0.0)
        out.diagnostics.warnings.push_back("increment density clamped at negative lobes");
    out.runtime_seconds = seconds_since(t0);
    return out;
}

PricingResult price(const ThetaModel& model, const PricingRequest& req) {
    switch (req.method) {
        case Method::Algo1: return price_algo1(model, req);
        case Method::Algo2: return price_algo2(model, req);
        case Method::MonteCarlo: return price_mc(model, req);
    }
    throw DomainError("unknown pricing method");
}

std::vector<double> linspace(double lo, double hi, int count) {
    if (count < 2) return {lo};
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) out[std::size_t(i)] = lo + (hi - lo) * double(i) / double(count - 1);
    return out;
}

DensityExperiment density_experiment(const ThetaModel& model, double q, int N_test, int N_benchmark,
                                     const std::vector<double>& x, bool correction,
                                     const InversionConfig& cfg) {
    const ThetaExponent psi(model);
    const int M = std::max(N_test, N_benchmark) + 1;
    const auto roots = solve_real(psi, q, M);
    const auto bench = MellinEval::truncated(psi, roots, N_benchmark);
    const auto test = correction ? MellinEval::corrected(psi, roots, N_test) : MellinEval::truncated(psi, roots, N_test);
    InversionConfig c = cfg;
    if (!c.c) c.c = std::min(1.0, 0.5 * (1.0 + roots.zeta[0].real()));
    const auto pb = inverse_mellin_density(bench, x, c);
    const auto pt = N_test == N_benchmark && !correction ? pb : inverse_mellin_density(test, x, c);

    DensityExperiment out;
    out.x = x;
    out.p_test = pt.p;
    out.p_benchmark = pb.p;
    out.abs_error.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        out.abs_error[i] = std::abs(pt.p[i] - pb.p[i]);
        out.max_abs_error = std::max(out.max_abs_error, out.abs_error[i]);
    }
    return out;
}

}  // namespace meroasian
