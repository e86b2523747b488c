#include "sthygarch/estimator.hpp"

#include "sthygarch/errors.hpp"
#include "sthygarch/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace sthygarch {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;  // ln(2 pi)

double sigmoid(double u) noexcept {
    return u >= 0.0 ? 1.0 / (1.0 + std::exp(-u)) : std::exp(u) / (1.0 + std::exp(u));
}

double logit(double p) noexcept {
    p = std::clamp(p, 1e-6, 1.0 - 1e-6);
    return std::log(p / (1.0 - p));
}

} // namespace

LikelihoodDerivatives evaluate_derivatives(const ThetaFull& theta, const TransitionSpec& spec,
                                           std::span<const double> y, const FilterSetup& setup,
                                           bool keep_rows) {
    if (y.empty()) throw DomainError("cannot evaluate the likelihood of an empty series");
    VarianceFilter filter(theta, spec, setup);
    const FracDiffCoeffs coeffs = pi_coeffs(theta.d, setup.k_max);
    const LaggedSum dfrac(pi_derivative(coeffs));

    const bool lagged_variance = spec.kind == TransitionKind::LaggedVariance;
    const bool store_rows = keep_rows || lagged_variance;
    const std::size_t n = y.size();

    LikelihoodDerivatives out;
    out.path.h.reserve(n);
    out.path.h1.reserve(n);
    out.path.h2.reserve(n);
    out.path.w.reserve(n);
    out.path.z.reserve(n);
    if (store_rows) out.dh.reserve(n);

    const ThetaFull& p = theta;
    std::array<double, 3> dh1{};  // d h1 / d (a0, a1, a2)
    std::array<double, 4> dh2{};  // d h2 / d (b0, b1, b2, d)
    double dfrac_prev = dfrac.at({}, setup.presample_sq);
    const Gradient zero{};

    for (std::size_t t = 0; t < n; ++t) {
        const FilterStep& s = filter.current();
        const double dfrac_now = dfrac.at(filter.squares(), setup.presample_sq);

        dh1 = {1.0 + p.a1 * dh1[0],
               s.h1_prev + p.a1 * dh1[1],
               s.sq_prev + p.a1 * dh1[2]};
        dh2 = {1.0 + p.b1 * dh2[0],
               s.h2_prev - s.sq_prev + p.b1 * dh2[1],
               s.sq_prev - s.frac_prev + p.b1 * dh2[2],
               dfrac_now - p.b2 * dfrac_prev + p.b1 * dh2[3]};

        Gradient row{};
        const double w = s.w;
        for (std::size_t j = 0; j < 3; ++j) row[kA0 + j] = (1.0 - w) * dh1[j];
        for (std::size_t j = 0; j < 4; ++j) row[kB0 + j] = w * dh2[j];
        const double spread = s.h2 - s.h1;
        if (spec.is_fixed()) {
            row[kGamma] = spread;
        } else {
            const Gradient& dz = (lagged_variance && t >= spec.lag) ? out.dh[t - spec.lag] : zero;
            const double slope = w * (1.0 - w);
            for (std::size_t j = 0; j < kGamma; ++j) row[j] += -p.gamma * slope * dz[j] * spread;
            row[kGamma] = -slope * (s.z + p.gamma * dz[kGamma]) * spread;
        }

        if (!(s.h > 0.0) || !std::isfinite(s.h) || !(s.h1 > 0.0) || !(s.h2 > 0.0)) {
            out.finite = false;
            out.loglik = -std::numeric_limits<double>::infinity();
            return out;
        }
        const double sq = y[t] * y[t];
        out.loglik -= 0.5 * (kLog2Pi + std::log(s.h) + sq / s.h);
        const double factor = 0.5 / s.h * (sq / s.h - 1.0);
        for (std::size_t j = 0; j < ThetaFull::kSize; ++j) out.gradient[j] += factor * row[j];

        out.path.h.push_back(s.h);
        out.path.h1.push_back(s.h1);
        out.path.h2.push_back(s.h2);
        out.path.w.push_back(s.w);
        out.path.z.push_back(s.z);
        if (store_rows) out.dh.push_back(row);

        dfrac_prev = dfrac_now;
        filter.observe(y[t]);
    }
    if (!std::isfinite(out.loglik)) out.finite = false;
    return out;
}

std::vector<double> neg2_loglik_terms(const ThetaFull& theta, const TransitionSpec& spec,
                                      std::span<const double> y, const FilterSetup& setup) {
    const VariancePath path = variance_path(theta, spec, y, setup);
    std::vector<double> terms(y.size());
    for (std::size_t t = 0; t < y.size(); ++t) {
        terms[t] = kLog2Pi + std::log(path.h[t]) + y[t] * y[t] / path.h[t];
    }
    return terms;
}

std::vector<double> neg2_loglik_terms(const ThetaFull& theta, const TransitionSpec& spec,
                                      std::span<const double> y, std::size_t k_max) {
    if (y.empty()) throw DomainError("cannot evaluate the likelihood of an empty series");
    return neg2_loglik_terms(theta, spec, y, estimation_setup(y, spec, k_max));
}

double loglik(const ThetaFull& theta, const TransitionSpec& spec, std::span<const double> y,
              const FilterSetup& setup) {
    double sum = 0.0;
    for (double l : neg2_loglik_terms(theta, spec, y, setup)) sum += l;
    return -0.5 * sum;
}

double loglik(const ThetaFull& theta, const TransitionSpec& spec, std::span<const double> y, std::size_t k_max) {
    if (y.empty()) throw DomainError("cannot evaluate the likelihood of an empty series");
    return loglik(theta, spec, y, estimation_setup(y, spec, k_max));
}

Gradient loglik_gradient(const ThetaFull& theta, const TransitionSpec& spec, std::span<const double> y,
                         const FilterSetup& setup) {
    validate(theta);
    if (!(theta.d > 0.0)) throw DomainError("the analytic gradient needs 0 < d < 1");
    const auto eval = evaluate_derivatives(theta, spec, y, setup);
    if (!eval.finite) throw NumericalError("likelihood is not finite at the requested parameters");
    return eval.gradient;
}

Gradient loglik_gradient(const ThetaFull& theta, const TransitionSpec& spec, std::span<const double> y,
                         std::size_t k_max) {
    if (y.empty()) throw DomainError("cannot evaluate the likelihood of an empty series");
    return loglik_gradient(theta, spec, y, estimation_setup(y, spec, k_max));
}

std::string_view to_string(FitKind kind) noexcept {
    switch (kind) {
    case FitKind::FullST: return "full-st";
    case FitKind::NullHalfWeight: return "null-half-weight";
    case FitKind::FixedWeightHygarch: return "hygarch";
    }
    return "unknown";
}

FitKind parse_fit_kind(std::string_view name) {
    for (auto kind : {FitKind::FullST, FitKind::NullHalfWeight, FitKind::FixedWeightHygarch}) {
        if (name == to_string(kind)) return kind;
    }
    throw ConfigurationError("unknown fit kind '" + std::string(name) + "'");
}

namespace {

// Maps optimizer coordinates onto the feasible set and pulls gradients back.
class Parameterization {
public:
    Parameterization(FitKind kind, std::optional<double> fixed_b2, std::optional<double> fixed_weight)
        : kind_(kind), fixed_b2_(fixed_b2), fixed_weight_(fixed_weight) {
        if (fixed_b2_ && !(*fixed_b2_ >= 0.0 && *fixed_b2_ < 1.0)) {
            throw ConfigurationError("fixed b2 must lie in [0, 1)");
        }
        if (fixed_weight_ && !(*fixed_weight_ >= 0.0 && *fixed_weight_ <= 1.0)) {
            throw ConfigurationError("fixed weight must lie in [0, 1]");
        }
        has_last_ = kind_ == FitKind::FullST || (kind_ == FitKind::FixedWeightHygarch && !fixed_weight_);
    }

    std::size_t dim() const noexcept { return 6 + (fixed_b2_ ? 0 : 1) + (has_last_ ? 1 : 0); }

    struct Decoded {
        ThetaFull theta;
        double weight = 0.5;
    };

    Decoded decode(std::span<const double> u) const {
        Decoded out;
        ThetaFull& th = out.theta;
        std::size_t k = 0;
        th.a0 = std::exp(u[k++]);
        th.a1 = std::exp(u[k++]);
        th.a2 = std::exp(u[k++]);
        th.b0 = std::exp(u[k++]);
        const double s1 = sigmoid(u[k++]);
        const double s2 = fixed_b2_ ? 0.0 : sigmoid(u[k++]);
        const double sd = sigmoid(u[k++]);
        if (fixed_b2_) {
            const double c = *fixed_b2_;
            th.d = c + (1.0 - c) * sd;
            th.b1 = c + (th.d - c) * s1;
            th.b2 = c;
        } else {
            th.d = sd;
            th.b1 = th.d * s1;
            th.b2 = th.b1 * s2;
        }
        th.gamma = 0.0;
        if (kind_ == FitKind::FullST) {
            th.gamma = std::exp(u[k++]);
        } else if (kind_ == FitKind::FixedWeightHygarch) {
            out.weight = fixed_weight_ ? *fixed_weight_ : sigmoid(u[k++]);
        }
        return out;
    }

    std::vector<double> encode(const ThetaFull& th, double weight) const {
        std::vector<double> u;
        auto safe_log = [](double v) { return std::log(std::max(v, 1e-8)); };
        u.push_back(safe_log(th.a0));
        u.push_back(safe_log(th.a1));
        u.push_back(safe_log(th.a2));
        u.push_back(safe_log(th.b0));
        if (fixed_b2_) {
            const double c = *fixed_b2_;
            const double d = std::max(th.d, c + 1e-6);
            u.push_back(logit((th.b1 - c) / (d - c)));
            u.push_back(logit((d - c) / (1.0 - c)));
        } else {
            u.push_back(logit(th.d > 0.0 ? th.b1 / th.d : 0.5));
            u.push_back(logit(th.b1 > 0.0 ? th.b2 / th.b1 : 0.5));
            u.push_back(logit(th.d));
        }
        if (kind_ == FitKind::FullST) {
            u.push_back(safe_log(th.gamma));
        } else if (has_last_) {
            u.push_back(logit(weight));
        }
        return u;
    }

    // Gradient in optimizer coordinates from the gradient in model coordinates.
    void pull_back(std::span<const double> u, const Decoded& dec, const Gradient& g, std::span<double> gu) const {
        const ThetaFull& th = dec.theta;
        std::size_t k = 0;
        gu[k++] = g[kA0] * th.a0;
        gu[k++] = g[kA1] * th.a1;
        gu[k++] = g[kA2] * th.a2;
        gu[k++] = g[kB0] * th.b0;
        const std::size_t i1 = k++;
        const std::size_t i2 = fixed_b2_ ? i1 : k++;
        const std::size_t id = k++;
        const double s1 = sigmoid(u[i1]);
        const double sd = sigmoid(u[id]);
        if (fixed_b2_) {
            const double c = *fixed_b2_;
            const double dd = (1.0 - c) * sd * (1.0 - sd);
            const double db1_du1 = (th.d - c) * s1 * (1.0 - s1);
            const double db1_dud = s1 * dd;
            gu[i1] = g[kB1] * db1_du1;
            gu[id] = g[kD] * dd + g[kB1] * db1_dud;
        } else {
            const double s2 = sigmoid(u[i2]);
            const double dd = sd * (1.0 - sd);
            const double db1_du1 = th.d * s1 * (1.0 - s1);
            const double db1_dud = s1 * dd;
            const double db2_du2 = th.b1 * s2 * (1.0 - s2);
            gu[i1] = g[kB1] * db1_du1 + g[kB2] * s2 * db1_du1;
            gu[i2] = g[kB2] * db2_du2;
            gu[id] = g[kD] * dd + g[kB1] * db1_dud + g[kB2] * s2 * db1_dud;
        }
        if (kind_ == FitKind::FullST) {
            gu[k++] = g[kGamma] * th.gamma;
        } else if (has_last_) {
            gu[k++] = g[kGamma] * dec.weight * (1.0 - dec.weight);
        }
    }

    TransitionSpec evaluation_spec(const TransitionSpec& spec, double weight) const {
        switch (kind_) {
        case FitKind::FullST: return spec;
        case FitKind::NullHalfWeight: return TransitionSpec::fixed_weight(0.5);
        case FitKind::FixedWeightHygarch: return TransitionSpec::fixed_weight(weight);
        }
        return spec;
    }

private:
    FitKind kind_;
    std::optional<double> fixed_b2_;
    std::optional<double> fixed_weight_;
    bool has_last_ = false;
};

struct Start {
    ThetaFull theta;
    double weight = 0.5;
};

std::vector<Start> default_starts(std::span<const double> y, FitKind kind, const FitOptions& options) {
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(y.size());
    double var = 0.0;
    for (double v : y) var += (v - mean) * (v - mean);
    var = std::max(var / static_cast<double>(y.size()), 1e-8);

    // (d, gamma, w) grid; the last point sits between the others.
    struct GridPoint {
        double d, gamma, weight;
    };
    constexpr std::array<GridPoint, 5> grid = {
        {{0.3, 0.5, 0.3}, {0.6, 2.0, 0.7}, {0.6, 0.5, 0.3}, {0.3, 2.0, 0.7}, {0.45, 1.0, 0.5}}};
    std::vector<Start> starts;
    if (options.initial) starts.push_back({*options.initial, 0.5});
    for (const auto& g : grid) {
        Start st;
        ThetaFull& th = st.theta;
        th.a0 = 0.3 * var;
        th.a1 = 0.3;
        th.a2 = 0.3;
        th.b0 = 0.1 * var;
        th.b2 = options.fixed_b2 ? *options.fixed_b2 : 0.1 * g.d;
        th.d = std::max(g.d, th.b2 + 0.05);
        th.b1 = std::max(0.5 * g.d, th.b2);
        th.gamma = kind == FitKind::FullST ? g.gamma : 0.0;
        st.weight = kind == FitKind::FixedWeightHygarch ? g.weight : 0.5;
        const bool duplicate = std::any_of(starts.begin(), starts.end(), [&](const Start& s) {
            return s.theta == st.theta && s.weight == st.weight;
        });
        if (!duplicate) starts.push_back(st);
    }
    // multistart = 0 keeps only the user's initial point when one is given.
    const std::size_t limit = std::max<std::size_t>(options.multistart + (options.initial ? 1 : 0), 1);
    if (starts.size() > limit) starts.resize(limit);
    return starts;
}

} // namespace

FitResult fit(std::span<const double> y, const TransitionSpec& spec, FitKind kind, const FitOptions& options) {
    if (y.size() < options.min_length) {
        throw DomainError("fit needs at least " + std::to_string(options.min_length) + " observations, got " +
                          std::to_string(y.size()));
    }
    spec.validate();
    if (kind == FitKind::FullST && spec.is_fixed()) {
        throw ConfigurationError("a smooth-transition fit needs a logistic transition spec, not fixed-w");
    }
    if (options.fixed_weight && kind != FitKind::FixedWeightHygarch) {
        throw ConfigurationError("fixed_weight applies to the constant-weight HYGARCH fit only");
    }

    const Parameterization param(kind, options.fixed_b2, options.fixed_weight);
    const FilterSetup setup = estimation_setup(y, spec, options.k_max);
    const double n_obs = static_cast<double>(y.size());

    const Objective objective = [&](std::span<const double> u, std::span<double> grad) {
        const auto dec = param.decode(u);
        if (!is_feasible(dec.theta)) return std::numeric_limits<double>::infinity();
        LikelihoodDerivatives eval;
        try {
            eval = evaluate_derivatives(dec.theta, param.evaluation_spec(spec, dec.weight), y, setup);
        } catch (const std::exception&) {
            return std::numeric_limits<double>::infinity();
        }
        if (!eval.finite) return std::numeric_limits<double>::infinity();
        param.pull_back(u, dec, eval.gradient, grad);
        for (double& g : grad) g = -g / n_obs;
        return -eval.loglik / n_obs;
    };

    BfgsOptions bfgs;
    bfgs.max_iter = options.max_iter;
    bfgs.grad_tol = options.grad_tol;
    bfgs.rel_obj_tol = options.rel_obj_tol;
    bfgs.record_trace = options.record_trace;

    std::optional<BfgsResult> best;
    std::size_t used = 0;
    for (const Start& start : default_starts(y, kind, options)) {
        BfgsResult res;
        try {
            res = minimize_bfgs(objective, param.encode(start.theta, start.weight), bfgs);
        } catch (const ConfigurationError&) {
            continue;
        }
        ++used;
        if (!best || res.f < best->f) best = std::move(res);
    }
    if (!best) throw ConfigurationError("no starting point gives a finite likelihood");

    const auto dec = param.decode(best->x);
    FitResult out;
    out.theta_hat = dec.theta;
    out.fit_kind = kind;
    out.spec = kind == FitKind::FixedWeightHygarch ? TransitionSpec::fixed_weight(dec.weight) : spec;
    out.setup = setup;
    out.loglik = -best->f * n_obs;
    out.loglik_per_obs = -best->f;
    out.grad_norm = best->grad_norm;
    out.n_obs = y.size();
    out.n_iter = best->iterations;
    out.starts_used = used;
    out.converged = best->converged;
    out.fixed_b2 = options.fixed_b2;
    for (double f : best->trace) out.trace.push_back(-f * n_obs);
    if (!out.converged) out.notes.push_back("optimizer stopped: " + best->stop_reason);
    for (auto& w : feasibility_warnings(out.theta_hat)) out.notes.push_back(std::move(w));

    const VariancePath path = variance_path(out.theta_hat, param.evaluation_spec(spec, dec.weight), y, setup);
    double wsum = 0.0;
    for (double w : path.w) wsum += w;
    out.mean_weight = wsum / n_obs;
    return out;
}

} // namespace sthygarch
