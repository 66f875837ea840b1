#include "meroasian/quad.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "meroasian/errors.hpp"
#include "meroasian/parallel.hpp"

namespace meroasian {

namespace {

struct Moments {
    double m0;  // int_{-1}^{1} cos(theta t) dt
    double m1;  // int_{-1}^{1} t sin(theta t) dt
    double m2;  // int_{-1}^{1} t^2 cos(theta t) dt
};

Moments filon_moments(double theta) {
    if (std::abs(theta) < 1.0) {
        const double t2 = theta * theta;
        double m0 = 0.0, m1 = 0.0, m2 = 0.0;
        double c = 1.0;  // theta^{2k} / (2k)!
        double s = theta;  // theta^{2k+1} / (2k+1)!
        double sign = 1.0;
        for (int k = 0; k < 12; ++k) {
            m0 += sign * c * 2.0 / (2 * k + 1);
            m2 += sign * c * 2.0 / (2 * k + 3);
            m1 += sign * s * 2.0 / (2 * k + 3);
            c *= t2 / ((2 * k + 1) * (2 * k + 2));
            s *= t2 / ((2 * k + 2) * (2 * k + 3));
            sign = -sign;
        }
        return {m0, m1, m2};
    }
    const double sn = std::sin(theta);
    const double cs = std::cos(theta);
    const double t2 = theta * theta;
    return {2.0 * sn / theta, 2.0 * (sn / t2 - cs / theta),
            2.0 * ((t2 - 2.0) * sn / (t2 * theta) + 2.0 * cs / t2)};
}

}  // namespace

void FilonGrid::validate() const {
    const int n = intervals();
    if (n < 4 || n % 2 != 0) throw DomainError("Filon grid needs an even number (>= 4) of intervals");
    if (!(b > a)) throw DomainError("Filon grid needs b > a");
}

FilonGrid FilonGrid::sample(double a, double b, int intervals, const std::function<cplx(double)>& g) {
    FilonGrid grid;
    grid.a = a;
    grid.b = b;
    grid.samples.resize(std::size_t(std::max(intervals, 0)) + 1);
    grid.validate();
    parallel_for(grid.samples.size(), [&](std::size_t k) { grid.samples[k] = g(grid.node(int(k))); });
    return grid;
}

cplx filon_integral(const FilonGrid& grid, double omega) {
    grid.validate();
    const int n = grid.intervals();
    const double h = grid.step();
    const auto mom = filon_moments(omega * h);
    const cplx mu0 = mom.m0;
    const cplx mu1(0.0, -mom.m1);
    const cplx mu2 = mom.m2;
    cplx acc = 0.0;
    for (int p = 0; p < n / 2; ++p) {
        const cplx g0 = grid.samples[std::size_t(2 * p)];
        const cplx g1 = grid.samples[std::size_t(2 * p + 1)];
        const cplx g2 = grid.samples[std::size_t(2 * p + 2)];
        const double x1 = grid.node(2 * p + 1);
        const cplx panel = g1 * mu0 + 0.5 * (g2 - g0) * mu1 + 0.5 * (g2 - 2.0 * g1 + g0) * mu2;
        acc += std::polar(1.0, -omega * x1) * panel;
    }
    return h * acc;
}

DensityCurve inverse_mellin_density(const std::function<cplx(cplx)>& mellin, double strip_upper,
                                    const std::vector<double>& x, const InversionConfig& cfg,
                                    bool conj_symmetric) {
    const double c = cfg.c ? *cfg.c : std::min(1.0, 0.5 * strip_upper);
    if (!(c > 0.0 && c < strip_upper))
        throw ContourError("density contour c=" + std::to_string(c) + " outside the analytic strip");
    if (cfg.fold && !conj_symmetric) throw DomainError("folding needs a conjugate-symmetric transform");
    for (double xi : x)
        if (!(xi > 0.0)) throw DomainError("density grid must be positive");

    const int n = cfg.fold ? cfg.n_density / 2 : cfg.n_density;
    const double lo = cfg.fold ? 0.0 : -cfg.v_max;
    const auto grid = FilonGrid::sample(lo, cfg.v_max, n, [&](double v) { return mellin(cplx(c, v)); });

    DensityCurve out;
    out.c = c;
    out.x = x;
    out.p.resize(x.size());
    out.imag_residual.resize(x.size());
    double peak = 0.0;
    for (const auto& g : grid.samples) peak = std::max(peak, std::abs(g));
    out.tail_ratio = std::max(std::abs(grid.samples.front()), std::abs(grid.samples.back())) / peak;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double scale = std::pow(x[i], -c) / (2.0 * kPi);
        const cplx integral = filon_integral(grid, std::log(x[i]));
        if (cfg.fold) {
            out.p[i] = 2.0 * scale * integral.real();
            out.imag_residual[i] = 0.0;
        } else {
            out.p[i] = scale * integral.real();
            out.imag_residual[i] = scale * integral.imag();
        }
    }
    return out;
}

DensityCurve inverse_mellin_density(const MellinEval& mellin, const std::vector<double>& x,
                                    const InversionConfig& cfg) {
    if (mellin.q().imag() != 0.0) throw DomainError("density inversion needs real q");
    return inverse_mellin_density([&](cplx s) { return mellin(s); }, 1.0 + mellin.zeta1().real(), x, cfg,
                                  true);
}

double mellin_abscissa(const InversionConfig& cfg, double zeta1) {
    const double d1 = cfg.d1 ? *cfg.d1 : 0.5 * (zeta1 - 3.0);
    if (!(d1 > -2.0 && d1 < zeta1 - 1.0))
        throw ContourError("Mellin abscissa d1=" + std::to_string(d1) + " outside (-2, zeta_1 - 1)");
    if (std::abs(d1) < 1e-3 || std::abs(d1 + 1.0) < 1e-3)
        throw ContourError("Mellin abscissa d1 too close to a removable singularity at 0 or -1");
    return d1;
}

HIntegrand h_integrand(const std::function<cplx(cplx)>& mellin, double d1, const InversionConfig& cfg) {
    HIntegrand out;
    out.d1 = d1;
    const cplx m1 = mellin(1.0);
    const cplx m2 = mellin(2.0);
    out.beta = 2.0 * (m1 - m2);
    out.alpha = m1 - out.beta;
    const double log2 = std::log(2.0);
    out.grid = FilonGrid::sample(-cfg.v_max, cfg.v_max, cfg.n_mellin, [&](double v) {
        const cplx s(d1, v);
        const cplx ref = std::exp(log_gamma(s + 2.0)) * (out.alpha + out.beta * std::exp(-(s + 1.0) * log2));
        return (mellin(s + 2.0) - ref) / (s * (s + 1.0));
    });
    return out;
}

cplx inverse_mellin_h(const HIntegrand& integrand, double k) {
    if (!(k > 0.0)) throw DomainError("strike ratio must be positive");
    return std::pow(k, -integrand.d1) / (2.0 * kPi) * filon_integral(integrand.grid, std::log(k)) +
           integrand.alpha * std::exp(-k) + 0.5 * integrand.beta * std::exp(-2.0 * k);
}

cplx inverse_mellin_h(const MellinEval& mellin, double k, const InversionConfig& cfg,
                      std::optional<double> strip_upper) {
    const double upper = strip_upper ? *strip_upper : 1.0 + mellin.zeta1().real();
    const double d1 = mellin_abscissa(cfg, upper - 1.0);
    const auto grid = h_integrand([&](cplx s) { return mellin(s); }, d1, cfg);
    return inverse_mellin_h(grid, k);
}

LaplaceNodes laplace_nodes(const InversionConfig& cfg) {
    const int n = cfg.n_laplace;
    if (n < 4 || n % 2 != 0) throw DomainError("n_laplace must be even and >= 4");
    if (!(cfg.u_max > 0.0)) throw DomainError("u_max must be positive");
    const double h = cfg.u_max / n;
    int m = std::max(0, int(std::floor(cfg.u_fine / h + 1e-9)));
    m = std::min(m - m % 2, n - 4);
    LaplaceNodes out;
    out.fine_intervals = 2 * m;
    out.u.reserve(std::size_t(n + m + 1));
    for (int j = 0; j < 2 * m; ++j) out.u.push_back(0.5 * h * j);
    for (int j = m; j <= n; ++j) out.u.push_back(j == n ? cfg.u_max : h * j);
    return out;
}

LaplaceResult inverse_laplace_f(const std::vector<cplx>& h_samples, double t, const InversionConfig& cfg,
                                double sigma) {
    if (!(t > 0.0)) throw DomainError("maturity must be positive");
    const auto nodes = laplace_nodes(cfg);
    if (h_samples.size() != nodes.u.size()) throw DomainError("h samples do not match the Laplace nodes");
    std::vector<cplx> g(h_samples.size());
    double peak = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
        const cplx F = h_samples[j] / cplx(cfg.d2, nodes.u[j]);
        peak = std::max(peak, std::abs(F));
        g[j] = F * std::polar(1.0, sigma * nodes.u[j]);
    }
    const std::size_t split = std::size_t(nodes.fine_intervals);
    cplx integral = 0.0;
    if (split > 0) {
        FilonGrid fine{0.0, nodes.u[split], {g.begin(), g.begin() + std::ptrdiff_t(split) + 1}};
        integral += filon_integral(fine, sigma - t);
    }
    FilonGrid coarse{nodes.u[split], cfg.u_max, {g.begin() + std::ptrdiff_t(split), g.end()}};
    integral += filon_integral(coarse, sigma - t);

    LaplaceResult out;
    out.value = std::exp(cfg.d2 * t) / kPi * integral.real();
    out.tail_ratio = peak > 0.0 ? std::abs(g.back()) / peak : 0.0;
    return out;
}

LaplaceResult inverse_laplace_f(const std::function<cplx(cplx)>& h_of_q, double t, const InversionConfig& cfg,
                                double sigma) {
    const auto nodes = laplace_nodes(cfg);
    std::vector<cplx> samples(nodes.u.size());
    parallel_for(samples.size(), [&](std::size_t j) { samples[j] = h_of_q(cplx(cfg.d2, nodes.u[j])); });
    return inverse_laplace_f(samples, t, cfg, sigma);
}

}  // namespace meroasian
