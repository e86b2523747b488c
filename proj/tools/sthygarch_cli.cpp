#include "sthygarch/errors.hpp"
#include "sthygarch/evaluation.hpp"
#include "sthygarch/io.hpp"
#include "sthygarch/score_test.hpp"
#include "sthygarch/simulator.hpp"
#include "sthygarch/stability.hpp"
#include "sthygarch/study.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

using namespace sthygarch;

namespace {

constexpr int kExitError = 1;
constexpr int kExitUnstable = 2;

struct GlobalOptions {
    std::uint64_t seed = 1;
    std::size_t k_max = kDefaultTruncation;
    std::string spec = "lagged-return";
    std::size_t lag = 1;
    double percentile = 0.95;
    double fixed_w = 0.5;
    std::string out;
    std::string format = "text";
    std::size_t threads = 0;

    bool csv() const { return format == "csv"; }

    TransitionSpec transition() const {
        TransitionSpec s;
        s.kind = parse_transition_kind(spec);
        s.lag = lag;
        s.percentile = percentile;
        s.fixed_w = fixed_w;
        s.validate();
        return s;
    }
};

struct InputOptions {
    std::string path;
    std::string column;
    bool prices = false;

    std::vector<double> load() const {
        LoadOptions opts;
        opts.column = column;
        opts.prices = prices;
        return load_returns(path, opts);
    }
};

void add_input_options(CLI::App* cmd, InputOptions& in) {
    cmd->add_option("input,--input", in.path, "CSV file with a header row")->required()->check(CLI::ExistingFile);
    cmd->add_option("--column", in.column, "column name or zero-based index (default: y, return, or first)");
    cmd->add_flag("--prices", in.prices, "column holds prices; convert to percent log returns");
}

void add_theta_options(CLI::App* cmd, ThetaFull& theta) {
    cmd->add_option("--a0", theta.a0, "GARCH intercept")->capture_default_str();
    cmd->add_option("--a1", theta.a1, "GARCH variance feedback")->capture_default_str();
    cmd->add_option("--a2", theta.a2, "GARCH squared-return loading")->capture_default_str();
    cmd->add_option("--b0", theta.b0, "FIGARCH intercept")->capture_default_str();
    cmd->add_option("--b1", theta.b1, "FIGARCH beta")->capture_default_str();
    cmd->add_option("--b2", theta.b2, "FIGARCH phi")->capture_default_str();
    cmd->add_option("--d", theta.d, "memory parameter")->capture_default_str();
    cmd->add_option("--gamma", theta.gamma, "transition smoothness")->capture_default_str();
}

ThetaFull default_theta() { return ThetaFull{0.35, 0.30, 0.40, 0.10, 0.20, 0.0, 0.60, 1.50}; }

// Writes to --out when given, stdout otherwise.
class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_) throw ConfigurationError("cannot open output file '" + path + "'");
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }
    void finish() {
        stream().flush();
        if (!stream()) throw ConfigurationError("failed writing output");
    }

private:
    std::unique_ptr<std::ofstream> file_;
};

std::string fixed(double v, int digits = 4) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << v;
    return os.str();
}

void write_fit(std::ostream& os, const FitResult& f, bool csv) {
    const auto v = f.theta_hat.to_array();
    if (csv) {
        os << "key,value\n";
        os << "fit_kind," << to_string(f.fit_kind) << '\n';
        os << "spec," << to_string(f.spec.kind) << '\n';
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (f.fit_kind == FitKind::FixedWeightHygarch && i == kGamma) continue;
            os << kParamNames[i] << ',' << format_number(v[i]) << '\n';
        }
        if (f.fit_kind == FitKind::FixedWeightHygarch) os << "w," << format_number(f.spec.fixed_w) << '\n';
        os << "mean_w," << format_number(f.mean_weight) << '\n';
        os << "loglik," << format_number(f.loglik) << '\n';
        os << "loglik_per_obs," << format_number(f.loglik_per_obs) << '\n';
        os << "grad_norm," << format_number(f.grad_norm) << '\n';
        os << "n_obs," << f.n_obs << '\n';
        os << "n_iter," << f.n_iter << '\n';
        os << "starts_used," << f.starts_used << '\n';
        os << "converged," << (f.converged ? 1 : 0) << '\n';
        return;
    }
    os << "fit: " << to_string(f.fit_kind) << " (transition " << to_string(f.spec.kind) << ")\n";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (f.fit_kind == FitKind::FixedWeightHygarch && i == kGamma) continue;
        const bool held = (i == kGamma && f.fit_kind == FitKind::NullHalfWeight) || (i == kB2 && f.fixed_b2);
        os << "  " << std::left << std::setw(7) << kParamNames[i] << std::right << std::setw(12) << fixed(v[i], 6)
           << (held ? "  (fixed)" : "") << '\n';
    }
    if (f.fit_kind == FitKind::FixedWeightHygarch) os << "  w      " << std::setw(12) << fixed(f.spec.fixed_w, 6) << '\n';
    os << "mean w_t       " << fixed(f.mean_weight, 6) << '\n';
    os << "log-likelihood " << fixed(f.loglik, 4) << "  (" << fixed(f.loglik_per_obs, 6) << " per obs, T = "
       << f.n_obs << ")\n";
    os << "gradient norm  " << std::scientific << std::setprecision(3) << f.grad_norm << std::defaultfloat << '\n';
    os << "iterations     " << f.n_iter << " over " << f.starts_used << " starts, "
       << (f.converged ? "converged" : "NOT converged") << '\n';
    for (const auto& note : f.notes) os << "note: " << note << '\n';
}

int run_simulate(const GlobalOptions& g, const ThetaFull& theta, std::size_t n, std::size_t burn_in) {
    SimConfig cfg;
    cfg.theta = theta;
    cfg.spec = g.transition();
    cfg.n = n;
    cfg.burn_in = burn_in;
    cfg.seed = g.seed;
    cfg.k_max = g.k_max;
    const SimulatedPath path = simulate_path(cfg);
    Output out(g.out);
    auto& os = out.stream();
    os << "t,y,h,w\n";
    for (std::size_t t = 0; t < path.y.size(); ++t) {
        os << t + 1 << ',' << format_number(path.y[t]) << ',' << format_number(path.h[t]) << ','
           << format_number(path.w[t]) << '\n';
    }
    out.finish();
    return 0;
}

struct FitCliOptions {
    std::string kind = "full-st";
    std::size_t multistart = 5;
    std::size_t max_iter = 500;
    std::optional<double> fixed_b2;
    std::optional<double> fixed_w;

    FitOptions options(const GlobalOptions& g) const {
        FitOptions o;
        o.k_max = g.k_max;
        o.multistart = multistart;
        o.max_iter = max_iter;
        o.fixed_b2 = fixed_b2;
        o.fixed_weight = fixed_w;
        return o;
    }
};

void add_fit_options(CLI::App* cmd, FitCliOptions& f, bool with_kind) {
    if (with_kind) {
        cmd->add_option("--kind", f.kind, "full-st, null-half-weight or hygarch")
            ->check(CLI::IsMember({"full-st", "null-half-weight", "hygarch"}))
            ->capture_default_str();
        cmd->add_option("--hold-w", f.fixed_w, "hygarch: hold the weight at this value");
    }
    cmd->add_option("--multistart", f.multistart, "number of starting points")->capture_default_str();
    cmd->add_option("--max-iter", f.max_iter, "optimizer iterations per start")->capture_default_str();
    cmd->add_option("--fix-b2", f.fixed_b2, "hold b2 at this value during estimation");
}

int run_fit(const GlobalOptions& g, const InputOptions& in, const FitCliOptions& f) {
    const auto y = in.load();
    const FitKind kind = parse_fit_kind(f.kind);
    TransitionSpec spec = g.transition();
    if (kind == FitKind::FixedWeightHygarch) spec = TransitionSpec::fixed_weight(g.fixed_w);
    const FitResult r = fit(y, spec, kind, f.options(g));
    Output out(g.out);
    write_fit(out.stream(), r, g.csv());
    out.finish();
    return 0;
}

int run_score_test(const GlobalOptions& g, const InputOptions& in, const FitCliOptions& f,
                   const std::vector<double>& levels) {
    for (double a : levels) {
        if (!(a > 0.0 && a < 1.0)) throw ConfigurationError("significance levels must lie in (0, 1)");
    }
    const auto y = in.load();
    const TransitionSpec spec = g.transition();
    if (spec.is_fixed()) throw ConfigurationError("the score test needs a logistic transition spec, not fixed-w");
    const FitResult null_fit = fit(y, spec, FitKind::NullHalfWeight, f.options(g));
    ScoreTestOptions opts;
    opts.k_max = g.k_max;
    opts.b2_fixed = f.fixed_b2.has_value();
    const ScoreTestResult r = score_statistic(null_fit, y, opts);

    Output out(g.out);
    auto& os = out.stream();
    if (g.csv()) {
        os << "key,value\n";
        os << "spec," << to_string(spec.kind) << '\n';
        os << "psi_s," << format_number(r.psi_s) << '\n';
        os << "p_value," << (r.p_value ? format_number(*r.p_value) : "NA") << '\n';
        os << "degenerate," << (r.degenerate ? 1 : 0) << '\n';
        os << "S," << format_number(r.S) << '\n';
        os << "kappa," << format_number(r.kappa) << '\n';
        os << "Q," << format_number(r.Q) << '\n';
        os << "schur," << format_number(r.schur) << '\n';
        os << "condition_number," << format_number(r.condition_number) << '\n';
        os << "null_loglik," << format_number(null_fit.loglik) << '\n';
        os << "null_converged," << (null_fit.converged ? 1 : 0) << '\n';
        for (double a : levels) {
            os << "reject_at_" << format_number(a) << ','
               << (r.p_value ? (*r.p_value < a ? "1" : "0") : "NA") << '\n';
        }
    } else {
        os << "score test of gamma = 0 (transition " << to_string(spec.kind) << ", T = " << y.size() << ")\n";
        if (r.degenerate) {
            os << "degenerate: " << r.diagnostic << '\n';
        } else {
            os << "psi_s   " << fixed(r.psi_s, 4) << '\n';
            os << "p-value " << fixed(*r.p_value, 4) << '\n';
            for (double a : levels) {
                os << "level " << a << ": critical " << fixed(chi2_1_critical(a), 4) << ", "
                   << (*r.p_value < a ? "reject" : "do not reject") << " H0\n";
            }
        }
        os << "null fit log-likelihood " << fixed(null_fit.loglik, 4)
           << (null_fit.converged ? "" : " (optimizer did not converge)") << '\n';
    }
    out.finish();
    return 0;
}

int run_stability(const GlobalOptions& g, const ThetaFull& theta, std::size_t tail_k) {
    const StabilityReport r = check_stability(theta, tail_k);
    Output out(g.out);
    auto& os = out.stream();
    if (g.csv()) {
        os << "key,value\n";
        os << "rho," << format_number(r.rho) << '\n';
        os << "stable," << (r.stable ? 1 : 0) << '\n';
        os << "tail_sum," << format_number(r.tail_sum) << '\n';
        os << "tail_sum_truncated," << format_number(r.tail_sum_truncated) << '\n';
        os << "truncation_bound," << format_number(r.truncation_bound) << '\n';
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) os << "C" << i + 1 << j + 1 << ',' << format_number(r.C(i, j)) << '\n';
        }
        if (r.bound) {
            const char* names[] = {"bound_h", "bound_h1", "bound_h2", "bound_h_lag"};
            for (int i = 0; i < 4; ++i) os << names[i] << ',' << format_number((*r.bound)(i)) << '\n';
        }
    } else {
        os << "spectral radius rho(C) = " << fixed(r.rho, 6) << " -> " << (r.stable ? "stable" : "not shown stable")
           << '\n';
        os << "C =\n";
        for (int i = 0; i < 4; ++i) {
            os << "  ";
            for (int j = 0; j < 4; ++j) os << std::setw(11) << fixed(r.C(i, j), 6);
            os << '\n';
        }
        os << "tail sum (1 - d) - b2 = " << fixed(r.tail_sum, 8) << ", truncated " << fixed(r.tail_sum_truncated, 8)
           << " (bound " << std::scientific << std::setprecision(2) << r.truncation_bound << std::defaultfloat
           << ")\n";
        if (r.bound) {
            os << "second-moment bound: E h <= " << fixed((*r.bound)(0), 6) << ", E h1 <= "
               << fixed((*r.bound)(1), 6) << ", E h2 <= " << fixed((*r.bound)(2), 6) << '\n';
        }
    }
    out.finish();
    return r.stable ? 0 : kExitUnstable;
}

int run_backtest(const GlobalOptions& g, const InputOptions& in, const FitCliOptions& f, std::size_t split,
                 const std::string& forecast_path) {
    const auto y = in.load();
    std::vector<ModelSpec> models{
        {"ST-HYGARCH(1)", TransitionSpec::lagged_return(g.lag), FitKind::FullST},
        {"ST-HYGARCH(2)", TransitionSpec::lagged_variance(g.lag), FitKind::FullST},
        {"ST-HYGARCH(3)", TransitionSpec::asymmetric_average(g.percentile), FitKind::FullST},
        {"HYGARCH", TransitionSpec::fixed_weight(g.fixed_w), FitKind::FixedWeightHygarch},
    };
    const auto reports = backtest(y, split, models, f.options(g));

    Output out(g.out);
    auto& os = out.stream();
    if (g.csv()) {
        os << "model,ok,n_in,n_out,rmse_in,rmse_out,llv_in,llv_out,w,converged\n";
        for (const auto& r : reports) {
            os << r.label << ',' << (r.ok ? 1 : 0) << ',' << r.n_in << ',' << r.n_out << ',';
            if (r.ok) {
                const double w = r.fit->fit_kind == FitKind::FixedWeightHygarch ? r.fit->spec.fixed_w
                                                                                 : r.fit->mean_weight;
                os << format_number(r.rmse_in) << ',' << format_number(r.rmse_out) << ',' << format_number(r.llv_in)
                   << ',' << format_number(r.llv_out) << ',' << format_number(w) << ','
                   << (r.fit->converged ? 1 : 0) << '\n';
            } else {
                os << "NA,NA,NA,NA,NA,NA\n";
            }
        }
    } else {
        os << "in-sample " << split << ", out-of-sample " << y.size() - split << '\n';
        os << std::left << std::setw(16) << "model" << std::right << std::setw(10) << "RMSE in" << std::setw(12)
           << "LLV in" << std::setw(10) << "RMSE out" << std::setw(12) << "LLV out" << std::setw(9) << "w" << '\n';
        for (const auto& r : reports) {
            os << std::left << std::setw(16) << r.label << std::right;
            if (!r.ok) {
                os << "  failed: " << r.error << '\n';
                continue;
            }
            const double w = r.fit->fit_kind == FitKind::FixedWeightHygarch ? r.fit->spec.fixed_w : r.fit->mean_weight;
            os << std::setw(10) << fixed(r.rmse_in, 3) << std::setw(12) << fixed(r.llv_in, 1) << std::setw(10)
               << fixed(r.rmse_out, 3) << std::setw(12) << fixed(r.llv_out, 1) << std::setw(9) << fixed(w, 3)
               << (r.fit->converged ? "" : "  (not converged)") << '\n';
        }
    }
    out.finish();

    if (!forecast_path.empty()) {
        std::ofstream fs(forecast_path, std::ios::binary);
        if (!fs) throw ConfigurationError("cannot open forecast file '" + forecast_path + "'");
        fs << "t,sample,y2";
        for (const auto& r : reports) fs << ",h_" << r.label << ",abs_err_" << r.label;
        fs << '\n';
        for (std::size_t t = 0; t < y.size(); ++t) {
            const double y2 = y[t] * y[t];
            fs << t + 1 << ',' << (t < split ? "in" : "out") << ',' << format_number(y2);
            for (const auto& r : reports) {
                if (r.ok) {
                    fs << ',' << format_number(r.forecasts[t]) << ',' << format_number(std::abs(r.forecasts[t] - y2));
                } else {
                    fs << ",NA,NA";
                }
            }
            fs << '\n';
        }
        if (!fs) throw ConfigurationError("failed writing forecast file");
    }
    return 0;
}

int run_stats(const GlobalOptions& g, const InputOptions& in, bool excess) {
    const auto y = in.load();
    const DescriptiveStats s = descriptive_stats(y, excess);
    auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string("NA"); };
    Output out(g.out);
    auto& os = out.stream();
    if (g.csv()) {
        os << "n,mean,std,min,max,skewness,kurtosis,kurtosis_kind\n";
        os << y.size() << ',' << format_number(s.mean) << ',' << format_number(s.std_dev) << ','
           << format_number(s.min) << ',' << format_number(s.max) << ',' << opt(s.skewness) << ','
           << opt(s.kurtosis) << ',' << (excess ? "excess" : "raw") << '\n';
    } else {
        auto opt_fixed = [](const std::optional<double>& v) { return v ? fixed(*v, 3) : std::string("undefined"); };
        os << std::left << std::setw(10) << "n" << y.size() << '\n'
           << std::setw(10) << "mean" << fixed(s.mean, 3) << '\n'
           << std::setw(10) << "std" << fixed(s.std_dev, 3) << '\n'
           << std::setw(10) << "min" << fixed(s.min, 3) << '\n'
           << std::setw(10) << "max" << fixed(s.max, 3) << '\n'
           << std::setw(10) << "skewness" << opt_fixed(s.skewness) << '\n'
           << std::setw(10) << "kurtosis" << opt_fixed(s.kurtosis) << (excess ? " (excess)" : " (raw)") << '\n';
    }
    out.finish();
    return 0;
}

struct StudyCliOptions {
    std::size_t replications = 200;
    std::vector<std::size_t> n_values{500, 1000, 2000};
    std::vector<double> gamma_grid{0.0, 0.4, 2.0, 7.0};
    std::vector<double> levels{0.05, 0.10};
    std::size_t burn_in = 1000;
    std::size_t multistart = 5;
    bool estimate_b2 = false;
};

ExperimentConfig study_config(const GlobalOptions& g, const StudyCliOptions& s, const ThetaFull& theta,
                              StudyTable table) {
    ExperimentConfig c;
    c.table = table;
    c.n_values = s.n_values;
    c.replications = s.replications;
    c.theta = theta;
    c.gamma_grid = s.gamma_grid;
    c.levels = s.levels;
    c.master_seed = g.seed;
    c.k_max = g.k_max;
    c.burn_in = s.burn_in;
    c.spec = g.transition();
    c.fix_b2 = !s.estimate_b2;
    c.multistart = s.multistart;
    c.threads = g.threads;
    return c;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ST-HYGARCH volatility modelling: simulation, estimation, score test, stability, backtests"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions g;
    app.add_option("--seed", g.seed, "master random seed")->capture_default_str();
    app.add_option("--kmax", g.k_max, "fractional-differencing truncation")->capture_default_str();
    app.add_option("--spec", g.spec, "transition variable")
        ->check(CLI::IsMember({"lagged-return", "lagged-variance", "asym-avg", "fixed-w"}))
        ->capture_default_str();
    app.add_option("--lag", g.lag, "lag of the transition variable")->capture_default_str();
    app.add_option("--percentile", g.percentile, "asym-avg squared-return percentile")->capture_default_str();
    app.add_option("--w", g.fixed_w, "weight for the fixed-w spec / HYGARCH starting weight")->capture_default_str();
    app.add_option("--out", g.out, "output file (default: stdout)");
    app.add_option("--format", g.format, "text or csv")->check(CLI::IsMember({"text", "csv"}))->capture_default_str();
    app.add_option("--threads", g.threads, "worker threads for studies (0 = all cores)")->capture_default_str();

    ThetaFull theta = default_theta();

    auto* sim = app.add_subcommand("simulate", "simulate a path and write t,y,h,w as CSV");
    std::size_t sim_n = 1000;
    std::size_t sim_burn = 1000;
    add_theta_options(sim, theta);
    sim->add_option("--n", sim_n, "kept observations")->capture_default_str();
    sim->add_option("--burn-in", sim_burn, "discarded leading observations")->capture_default_str();
    sim->set_config("--config", "", "read options from a TOML/INI file");

    InputOptions input;
    FitCliOptions fit_opts;

    auto* fit_cmd = app.add_subcommand("fit", "maximum-likelihood fit of a returns series");
    add_input_options(fit_cmd, input);
    add_fit_options(fit_cmd, fit_opts, true);

    auto* score_cmd = app.add_subcommand("score-test", "score test of a constant weight against smooth transition");
    std::vector<double> levels{0.05, 0.10};
    add_input_options(score_cmd, input);
    add_fit_options(score_cmd, fit_opts, false);
    score_cmd->add_option("--levels", levels, "significance levels")->capture_default_str();

    auto* stab_cmd = app.add_subcommand("stability", "second-moment stability check (exit code 2 when not stable)");
    std::size_t tail_k = kStabilityTruncation;
    add_theta_options(stab_cmd, theta);
    stab_cmd->add_option("--tail-kmax", tail_k, "truncation of the coefficient tail sum")->capture_default_str();

    auto* bt_cmd = app.add_subcommand("backtest", "in/out-of-sample comparison of the ST models and HYGARCH");
    std::size_t split = 1000;
    std::string forecast_path;
    add_input_options(bt_cmd, input);
    add_fit_options(bt_cmd, fit_opts, false);
    bt_cmd->add_option("--split", split, "in-sample length")->capture_default_str();
    bt_cmd->add_option("--forecasts", forecast_path, "write per-t squared returns, forecasts and errors here");

    auto* stats_cmd = app.add_subcommand("stats", "descriptive statistics of a returns series");
    bool excess = false;
    add_input_options(stats_cmd, input);
    stats_cmd->add_flag("--excess", excess, "report excess kurtosis (normal = 0)");

    auto* study = app.add_subcommand("study", "Monte Carlo studies");
    study->require_subcommand(1);
    study->fallthrough();
    StudyCliOptions so;
    auto* t1 = study->add_subcommand("table1", "bias and RMSE of the estimator");
    auto* t2 = study->add_subcommand("table2", "size and power of the score test");
    for (auto* t : {t1, t2}) {
        t->add_option("--replications", so.replications, "replications per cell")->capture_default_str();
        t->add_option("--n", so.n_values, "sample lengths")->capture_default_str();
        t->add_option("--burn-in", so.burn_in, "discarded leading observations")->capture_default_str();
        t->add_option("--multistart", so.multistart, "starting points per fit")->capture_default_str();
        add_theta_options(t, theta);
    }
    t1->add_flag("--estimate-b2", so.estimate_b2, "estimate b2 instead of holding it at the true value");
    t2->add_option("--gammas", so.gamma_grid, "gamma values")->capture_default_str();
    t2->add_option("--levels", so.levels, "significance levels")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*sim) return run_simulate(g, theta, sim_n, sim_burn);
        if (*fit_cmd) return run_fit(g, input, fit_opts);
        if (*score_cmd) return run_score_test(g, input, fit_opts, levels);
        if (*stab_cmd) return run_stability(g, theta, tail_k);
        if (*bt_cmd) return run_backtest(g, input, fit_opts, split, forecast_path);
        if (*stats_cmd) return run_stats(g, input, excess);
        if (*t1) {
            const auto result = run_estimation_study(study_config(g, so, theta, StudyTable::EstimationStudy));
            Output out(g.out);
            if (g.csv()) write_estimation_csv(out.stream(), result);
            else print_estimation_table(out.stream(), result);
            out.finish();
            return 0;
        }
        if (*t2) {
            const auto result = run_size_power_study(study_config(g, so, theta, StudyTable::SizePowerStudy));
            Output out(g.out);
            if (g.csv()) write_size_power_csv(out.stream(), result);
            else print_size_power_table(out.stream(), result);
            out.finish();
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitError;
}
