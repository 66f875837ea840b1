#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "meroasian/expfunc.hpp"

namespace meroasian {

// Samples of the smooth factor g at a + k (b - a) / n, k = 0..n, with n the
// number of intervals (even, >= 4).
struct FilonGrid {
    double a = 0.0;
    double b = 1.0;
    std::vector<cplx> samples;

    int intervals() const { return int(samples.size()) - 1; }
    double step() const { return (b - a) / intervals(); }
    double node(int k) const { return a + k * step(); }
    void validate() const;

    // Samples g on the grid; evaluations run in parallel.
    static FilonGrid sample(double a, double b, int intervals, const std::function<cplx(double)>& g);
};

// int_a^b g(u) exp(-i omega u) du with g replaced by its piecewise parabolic
// interpolant and the oscillatory moments integrated exactly.
cplx filon_integral(const FilonGrid& grid, double omega);

struct InversionConfig {
    std::optional<double> c;  // density contour; default min(1, (1 + zeta_1) / 2)
    std::optional<double> d1;  // h(k, q) contour; default see mellin_abscissa
    double d2 = 0.25;
    double v_max = 100.0;
    double u_max = 200.0;
    int n_mellin = 400;
    int n_laplace = 400;
    // [0, u_fine] is sampled at half the Laplace step; the put transform has
    // structure on the scale of d2 there. 0 disables the refinement.
    double u_fine = 10.0;
    int n_density = 2000;
    bool fold = false;  // density only, real q
};

struct DensityCurve {
    std::vector<double> x;
    std::vector<double> p;
    std::vector<double> imag_residual;
    double c = 0.0;
    // |integrand| at the ends of the v-domain relative to the largest |M|.
    double tail_ratio = 0.0;
};

// p(x) = x^{-c} / (2 pi) int_{-v_max}^{v_max} M(c + i v) exp(-i v log x) dv.
// `strip_upper` is the right edge of the analytic strip; ContourError when
// c is outside (0, strip_upper).
DensityCurve inverse_mellin_density(const std::function<cplx(cplx)>& mellin, double strip_upper,
                                    const std::vector<double>& x, const InversionConfig& cfg,
                                    bool conj_symmetric);

DensityCurve inverse_mellin_density(const MellinEval& mellin, const std::vector<double>& x,
                                    const InversionConfig& cfg);

// Integrand of the inverse Mellin transform for h(k, q), sampled on
// [-v_max, v_max]. The poles at s = 0 and s = -1 sit close to the contour, so
// the transform R(s) = Gamma(s + 2)(alpha + beta 2^{-s-1}) of a two-term
// exponential mixture with the same values at s = 0, -1 is subtracted first:
//   g(v) = (M(s + 2) - R(s)) / (s (s + 1)),  s = d1 + i v,
// and its call value alpha e^{-k} + beta e^{-2k} / 2 is added back.
// g is analytic on -2 < Re s < zeta_1 - 1, so d1 may lie anywhere in that
// strip, including left of 0.
struct HIntegrand {
    FilonGrid grid;
    cplx alpha;
    cplx beta;
    double d1 = 0.0;
};

// cfg.d1 if set, otherwise the centre (zeta_1 - 3) / 2 of the strip for the
// smallest zeta_1 on the contour (the one at q = d2). ContourError when the
// result is outside (-2, zeta_1 - 1) or within 1e-3 of 0 or -1, where g is
// evaluated as 0/0.
double mellin_abscissa(const InversionConfig& cfg, double zeta1);

HIntegrand h_integrand(const std::function<cplx(cplx)>& mellin, double d1, const InversionConfig& cfg);

// h(k, q) from a pre-sampled integrand.
cplx inverse_mellin_h(const HIntegrand& integrand, double k);

// h(k, q) = E[(I_q - k)^+]. `strip_upper` bounds Re(s + 2); it defaults to
// 1 + Re zeta_1.
cplx inverse_mellin_h(const MellinEval& mellin, double k, const InversionConfig& cfg,
                      std::optional<double> strip_upper = std::nullopt);

struct LaplaceResult {
    double value = 0.0;
    double tail_ratio = 0.0;  // |integrand| at u_max relative to the largest sample
};

// Laplace nodes: [0, u_fine] with step u_max / (2 n_laplace), then
// [u_fine, u_max] with step u_max / n_laplace; u_fine is rounded down to an
// even number of coarse steps.
struct LaplaceNodes {
    std::vector<double> u;
    int fine_intervals = 0;  // u[0..fine_intervals] is the fine segment
};

LaplaceNodes laplace_nodes(const InversionConfig& cfg);

// f(k, t) = e^{d2 t} / pi Re int_0^{u_max} F(d2 + i u) e^{i u t} du with
// F = h / q and h sampled at u_j = j u_max / n_laplace. For real f this equals
// the cosine form 2 e^{d2 t} / pi int Re F cos(u t) du. A transform that
// carries a factor e^{-sigma q} (f bends sharply near t = sigma) is
// integrated as F e^{i sigma u} against e^{i u (t - sigma)}, which keeps that
// oscillation out of the interpolated factor; `sigma` = 0 is the plain form.
// h_samples are taken at laplace_nodes(cfg).u.
LaplaceResult inverse_laplace_f(const std::vector<cplx>& h_samples, double t, const InversionConfig& cfg,
                                double sigma = 0.0);
LaplaceResult inverse_laplace_f(const std::function<cplx(cplx)>& h_of_q, double t, const InversionConfig& cfg,
                                double sigma = 0.0);

}  // namespace meroasian
