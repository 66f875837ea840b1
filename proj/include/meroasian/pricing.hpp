#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "meroasian/model.hpp"
#include "meroasian/quad.hpp"

namespace meroasian {

enum class Method { Algo1, Algo2, MonteCarlo };

const char* to_string(Method method);

// Grid presets. The paper's 400 nodes per integral do not converge the
// semi-analytic prices (see README); `table` reproduces the tables to ~1e-5
// and `exact` adds N = 160 and finer grids.
enum class Profile { Fast, Table, Exact };

const char* to_string(Profile profile);
// DomainError for unknown names.
Profile parse_profile(const std::string& name);

InversionConfig profile_quad(Profile profile);
// Truncation implied by the profile, if any (exact: 160).
std::optional<int> profile_N(Profile profile);

struct McConfig {
    long paths = 1'000'000;
    int steps = 400;
    std::uint64_t seed = 20120901;
};

struct PricingRequest {
    double S0 = 100.0;
    double K = 105.0;
    double T = 1.0;
    double r = 0.03;
    Method method = Method::Algo1;
    int N = 80;
    InversionConfig quad = profile_quad(Profile::Table);
    McConfig mc;

    void validate() const;
};

struct Diagnostics {
    double max_root_residual = 0.0;
    double mellin_tail_ratio = 0.0;
    double laplace_tail_ratio = 0.0;
    int correction_fallbacks = 0;
    double clamped_mass = 0.0;
    std::vector<std::string> warnings;
};

struct PricingResult {
    double price = 0.0;
    std::optional<double> std_error;
    Method method = Method::Algo1;
    int N = 0;
    double runtime_seconds = 0.0;
    Diagnostics diagnostics;
};

// Discounted price of the average-rate call, sum of S0 e^{X_u} over [0, T]
// without the 1/T factor, at K = 0.
double zero_strike_price(double S0, double T, double r);

// Mellin/Laplace pipeline with the corrected truncated transform of the theta
// model. The drift is recalibrated so that psi(1) = req.r.
PricingResult price_algo1(const ThetaModel& model, const PricingRequest& req);

// Same pipeline with the hyper-exponential approximation of order N.
PricingResult price_algo2(const ThetaModel& model, const PricingRequest& req);

// Random walk with increments distributed as X_{T/steps}.
PricingResult price_mc(const ThetaModel& model, const PricingRequest& req);

PricingResult price(const ThetaModel& model, const PricingRequest& req);

// Tabulated density of X_dt on a uniform grid with an inverse-cdf sampler.
class IncrementTable {
public:
    struct Config {
        int points = 1 << 17;
        double dz = 0.5;  // Fourier step
        double phi_floor = 1e-16;
        // Where |phi| >= fine_floor the step is dz / fine_factor; the
        // parabolic interpolant of phi is least accurate there.
        double fine_floor = 1e-3;
        int fine_factor = 3;
    };

    IncrementTable(const ThetaModel& model, double dt, const Config& cfg);
    IncrementTable(const ThetaModel& model, double dt) : IncrementTable(model, dt, Config{}) {}

    double x0() const { return x0_; }
    double dx() const { return dx_; }
    const std::vector<double>& pdf() const { return pdf_; }
    const std::vector<double>& cdf() const { return cdf_; }
    // Mass before normalization and total clamped negative mass.
    double raw_mass() const { return raw_mass_; }
    double clamped_mass() const { return clamped_mass_; }
    double min_raw_density() const { return min_raw_; }
    double z_max() const { return z_max_; }

    double mean() const;
    // u in [0, 1)
    double sample(double u) const;

private:
    double x0_ = 0.0;
    double dx_ = 0.0;
    std::vector<double> pdf_;
    std::vector<double> cdf_;
    std::vector<std::uint32_t> guide_;
    double raw_mass_ = 0.0;
    double clamped_mass_ = 0.0;
    double min_raw_ = 0.0;
    double z_max_ = 0.0;
};

struct DensityExperiment {
    std::vector<double> x;
    std::vector<double> p_test;
    std::vector<double> p_benchmark;
    std::vector<double> abs_error;
    double max_abs_error = 0.0;
};

// Density of I_q with N_test (optionally corrected) against the truncated
// transform with N_benchmark, both inverted on the same contour and v-grid.
DensityExperiment density_experiment(const ThetaModel& model, double q, int N_test, int N_benchmark,
                                     const std::vector<double>& x, bool correction,
                                     const InversionConfig& cfg);

// Uniform grid of `count` points on [lo, hi].
std::vector<double> linspace(double lo, double hi, int count);

}  // namespace meroasian
