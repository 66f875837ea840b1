#include "meroasian/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "meroasian/config.hpp"
#include "meroasian/errors.hpp"

namespace meroasian::cli {

namespace {

using json = nlohmann::ordered_json;

// Usage problem found after CLI11 parsing; always names the flag.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

double rounded(double x) { return std::stod(format_number(x)); }

json number_or_null(double x) { return std::isfinite(x) ? json(rounded(x)) : json(); }

json complex_json(cplx z) { return json{{"re", number_or_null(z.real())}, {"im", number_or_null(z.imag())}}; }

ModelConfig load_config(const std::string& path) {
    try {
        return load_model_config(path);
    } catch (const ConfigError& e) {
        throw UsageError(std::string("--config: ") + e.what());
    }
}

std::vector<int> parse_N_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        int n = 0;
        try {
            n = std::stoi(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size() || n < 1)
            throw UsageError("--N: expected a comma-separated list of positive integers, got '" + text + "'");
        out.push_back(n);
    }
    if (out.empty()) throw UsageError("--N: empty list");
    return out;
}

Method parse_algo(const std::string& name) {
    if (name == "mellin") return Method::Algo1;
    if (name == "hyperexp") return Method::Algo2;
    return Method::MonteCarlo;  // CLI11 restricts the choices
}

struct PriceFlags {
    std::string config;
    double S0 = 100.0;
    double K = 105.0;
    double T = 1.0;
    std::optional<double> r;
    std::string profile = "table";
};

void add_price_flags(CLI::App* cmd, PriceFlags& f) {
    cmd->add_option("--config", f.config, "model config (JSON)")->required();
    cmd->add_option("--S0", f.S0, "initial price")->check(CLI::PositiveNumber);
    cmd->add_option("--K", f.K, "strike")->check(CLI::NonNegativeNumber);
    cmd->add_option("--T", f.T, "maturity in years")->check(CLI::PositiveNumber);
    cmd->add_option("--r", f.r, "interest rate (default: the config's risk-neutral r)")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--profile", f.profile, "grid preset")->check(CLI::IsMember({"fast", "table", "exact"}));
}

PricingRequest base_request(const PriceFlags& f, const ModelConfig& model) {
    PricingRequest req;
    req.S0 = f.S0;
    req.K = f.K;
    req.T = f.T;
    if (f.r) {
        req.r = *f.r;
    } else if (model.mu_mode == MuMode::RiskNeutral) {
        req.r = model.r;
    } else {
        throw UsageError("--r: required when the config fixes mu");
    }
    const auto profile = parse_profile(f.profile);
    req.quad = profile_quad(profile);
    if (auto n = profile_N(profile)) req.N = *n;
    return req;
}

}  // namespace

std::string format_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

std::string price_json(const PricingResult& result) {
    json diag;
    diag["max_root_residual"] = number_or_null(result.diagnostics.max_root_residual);
    diag["mellin_tail_ratio"] = number_or_null(result.diagnostics.mellin_tail_ratio);
    diag["laplace_tail_ratio"] = number_or_null(result.diagnostics.laplace_tail_ratio);
    diag["correction_fallbacks"] = result.diagnostics.correction_fallbacks;
    diag["clamped_mass"] = number_or_null(result.diagnostics.clamped_mass);
    diag["warnings"] = result.diagnostics.warnings;
    json doc;
    doc["price"] = number_or_null(result.price);
    doc["stderr"] = result.std_error ? number_or_null(*result.std_error) : json();
    doc["method"] = to_string(result.method);
    doc["N"] = result.N;
    doc["runtime_seconds"] = number_or_null(result.runtime_seconds);
    doc["diagnostics"] = diag;
    return doc.dump(2) + "\n";
}

std::string density_csv(const DensityCurve& curve) {
    std::string out = "x,p,imag_residual\n";
    for (std::size_t i = 0; i < curve.x.size(); ++i)
        out += format_number(curve.x[i]) + "," + format_number(curve.p[i]) + "," +
               format_number(curve.imag_residual[i]) + "\n";
    return out;
}

std::string roots_csv(const RootSet& roots) {
    std::string out = "n,zeta_re,zeta_im,zeta_hat_re,zeta_hat_im,residual\n";
    for (int n = 0; n < roots.size(); ++n) {
        const auto i = std::size_t(n);
        out += std::to_string(n + 1) + "," + format_number(roots.zeta[i].real()) + "," +
               format_number(roots.zeta[i].imag()) + "," + format_number(roots.zeta_hat[i].real()) + "," +
               format_number(roots.zeta_hat[i].imag()) + "," + format_number(roots.residuals[i]) + "\n";
    }
    return out;
}

std::string mellin_json(cplx value, const MellinEval& eval) {
    json doc;
    doc["re"] = number_or_null(value.real());
    doc["im"] = number_or_null(value.imag());
    doc["aN_log"] = complex_json(eval.log_aN());
    doc["bN_log"] = eval.log_bN() ? complex_json(*eval.log_bN()) : json();
    if (const auto c = eval.correction())
        doc["corr"] = json{{"a", complex_json(c->a)}, {"b", complex_json(c->b)}};
    else
        doc["corr"] = json();
    return doc.dump(2) + "\n";
}

std::string compare_csv(const std::vector<CompareRow>& rows, bool omit_timing) {
    std::string out = omit_timing ? "N,algo1_price,algo2_price\n" : "N,algo1_price,algo1_time,algo2_price,algo2_time\n";
    for (const auto& row : rows) {
        out += std::to_string(row.N) + "," + format_number(row.algo1_price);
        if (!omit_timing) out += "," + format_number(row.algo1_time);
        out += "," + format_number(row.algo2_price);
        if (!omit_timing) out += "," + format_number(row.algo2_time);
        out += "\n";
    }
    return out;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Arithmetic Asian options under theta processes"};
    app.require_subcommand(1);
    app.fallthrough();  // lets --output follow the subcommand
    std::string output;
    app.add_option("--output,-o", output, "write to this file instead of stdout");

    PriceFlags pf;
    std::string algo = "mellin";
    std::optional<int> price_N;
    McConfig mc;
    auto* price_cmd = app.add_subcommand("price", "price the average-rate call");
    add_price_flags(price_cmd, pf);
    price_cmd->add_option("--algo", algo, "pricing method")->check(CLI::IsMember({"mellin", "hyperexp", "mc"}));
    price_cmd->add_option("--N", price_N, "truncation / hyper-exponential order")->check(CLI::PositiveNumber);
    price_cmd->add_option("--paths", mc.paths, "Monte Carlo paths")->check(CLI::PositiveNumber);
    price_cmd->add_option("--steps", mc.steps, "Monte Carlo time steps")->check(CLI::PositiveNumber);
    price_cmd->add_option("--seed", mc.seed, "Monte Carlo seed");

    PriceFlags cf;
    std::string compare_N = "10,20,40,80";
    bool omit_timing = false;
    auto* compare_cmd = app.add_subcommand("compare", "algorithm 1 vs algorithm 2 over several N");
    add_price_flags(compare_cmd, cf);
    compare_cmd->add_option("--N", compare_N, "comma-separated truncation levels");
    compare_cmd->add_flag("--omit-timing", omit_timing, "drop the time columns");

    std::string dconfig;
    double dq = 1.0;
    int dN = 20;
    std::string correction = "off";
    double x_min = 0.05, x_max = 6.0;
    int x_steps = 200;
    std::optional<double> contour_c;
    auto* density_cmd = app.add_subcommand("density", "density of I_q by inverse Mellin transform");
    density_cmd->add_option("--config", dconfig, "model config (JSON)")->required();
    density_cmd->add_option("--q", dq, "exponential rate")->check(CLI::PositiveNumber);
    density_cmd->add_option("--N", dN, "truncation")->check(CLI::PositiveNumber);
    density_cmd->add_option("--correction", correction, "beta correction")->check(CLI::IsMember({"on", "off"}));
    density_cmd->add_option("--x-min", x_min, "first grid point")->check(CLI::PositiveNumber);
    density_cmd->add_option("--x-max", x_max, "last grid point")->check(CLI::PositiveNumber);
    density_cmd->add_option("--x-steps", x_steps, "grid points")->check(CLI::Range(2, 1000000));
    density_cmd->add_option("--contour-c", contour_c, "Mellin contour Re s");

    std::string rconfig, rmodel = "theta";
    double rq_re = 1.0, rq_im = 0.0;
    int rcount = 10, rN = 80;
    auto* roots_cmd = app.add_subcommand("roots", "roots of psi(z) = q");
    roots_cmd->add_option("--config", rconfig, "model config (JSON)")->required();
    roots_cmd->add_option("--q-re", rq_re, "Re q")->check(CLI::PositiveNumber);
    roots_cmd->add_option("--q-im", rq_im, "Im q");
    roots_cmd->add_option("--count", rcount, "roots per side")->check(CLI::PositiveNumber);
    roots_cmd->add_option("--model", rmodel, "exponent")->check(CLI::IsMember({"theta", "hyperexp"}));
    roots_cmd->add_option("--N", rN, "hyper-exponential order")->check(CLI::PositiveNumber);

    std::string mconfig, mkind = "corrected";
    double mq_re = 1.0, mq_im = 0.0, ms_re = 1.5, ms_im = 0.0;
    int mN = 20;
    auto* mellin_cmd = app.add_subcommand("mellin", "Mellin transform of I_q at one point");
    mellin_cmd->add_option("--config", mconfig, "model config (JSON)")->required();
    mellin_cmd->add_option("--q-re", mq_re, "Re q")->check(CLI::PositiveNumber);
    mellin_cmd->add_option("--q-im", mq_im, "Im q");
    mellin_cmd->add_option("--s-re", ms_re, "Re s");
    mellin_cmd->add_option("--s-im", ms_im, "Im s");
    mellin_cmd->add_option("--N", mN, "truncation / order")->check(CLI::PositiveNumber);
    mellin_cmd->add_option("--kind", mkind, "transform")
        ->check(CLI::IsMember({"truncated", "corrected", "hyperexp"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    }

    std::string text;
    try {
        if (price_cmd->parsed()) {
            const auto model = load_config(pf.config);
            auto req = base_request(pf, model);
            req.method = parse_algo(algo);
            if (price_N) req.N = *price_N;
            req.mc = mc;
            text = price_json(price(model.model(), req));
        } else if (compare_cmd->parsed()) {
            const auto Ns = parse_N_list(compare_N);
            const auto model = load_config(cf.config);
            auto req = base_request(cf, model);
            const auto theta = model.model();
            std::vector<CompareRow> rows;
            for (int n : Ns) {
                CompareRow row;
                row.N = n;
                req.N = n;
                req.method = Method::Algo1;
                auto a = price(theta, req);
                req.method = Method::Algo2;
                auto b = price(theta, req);
                row.algo1_price = a.price;
                row.algo1_time = a.runtime_seconds;
                row.algo2_price = b.price;
                row.algo2_time = b.runtime_seconds;
                rows.push_back(row);
            }
            text = compare_csv(rows, omit_timing);
        } else if (density_cmd->parsed()) {
            if (!(x_max > x_min)) throw UsageError("--x-max: must exceed --x-min");
            const auto model = load_config(dconfig);
            const ThetaExponent psi(model.model());
            const auto roots = solve_real(psi, dq, dN + 1);
            const auto eval =
                correction == "on" ? MellinEval::corrected(psi, roots, dN) : MellinEval::truncated(psi, roots, dN);
            InversionConfig cfg;
            cfg.c = contour_c;
            text = density_csv(inverse_mellin_density(eval, linspace(x_min, x_max, x_steps), cfg));
        } else if (roots_cmd->parsed()) {
            const auto model = load_config(rconfig);
            const cplx q(rq_re, rq_im);
            RootSet roots;
            if (rmodel == "theta") {
                const ThetaExponent psi(model.model());
                roots = rq_im == 0.0 ? solve_real(psi, rq_re, rcount) : solve_complex(psi, q, rcount);
            } else {
                const auto theta = model.model();
                const HyperExpExponent psi(hyperexp_from_theta(theta, theta_psi(theta, 1.0).real(), rN));
                if (rcount > rN + 1) throw UsageError("--count: at most N+1 roots exist per side");
                roots = rq_im == 0.0 ? solve_real(psi, rq_re, rcount) : solve_complex(psi, q, rcount);
            }
            text = roots_csv(roots);
        } else if (mellin_cmd->parsed()) {
            const auto model = load_config(mconfig);
            const auto theta = model.model();
            const cplx q(mq_re, mq_im);
            const cplx s(ms_re, ms_im);
            auto eval_at = [&](const MellinEval& e) { return mellin_json(e(s), e); };
            if (mkind == "hyperexp") {
                const auto hyp = hyperexp_from_theta(theta, theta_psi(theta, 1.0).real(), mN);
                const HyperExpExponent psi(hyp);
                const auto roots = mq_im == 0.0 ? solve_real(psi, mq_re, mN + 1) : solve_complex(psi, q, mN + 1);
                text = eval_at(MellinEval::hyperexp(hyp, roots));
            } else {
                const ThetaExponent psi(theta);
                const auto roots = mq_im == 0.0 ? solve_real(psi, mq_re, mN + 1) : solve_complex(psi, q, mN + 1);
                text = eval_at(mkind == "corrected" ? MellinEval::corrected(psi, roots, mN)
                                                    : MellinEval::truncated(psi, roots, mN));
            }
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << "\n";
        return 1;
    }

    if (output.empty()) {
        out << text;
    } else {
        std::ofstream file(output);
        if (!file) {
            err << "usage error: --output: cannot write " << output << "\n";
            return 2;
        }
        file << text;
    }
    return 0;
}

}  // namespace meroasian::cli
