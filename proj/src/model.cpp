#include "sthygarch/model.hpp"

#include "sthygarch/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sthygarch {

namespace {

std::string describe(std::string_view what, double value) {
    std::ostringstream os;
    os << what << " (got " << value << ")";
    return os.str();
}

} // namespace

std::optional<std::string> feasibility_violation(const ThetaFull& theta, MemoryBound bound) {
    const auto values = theta.to_array();
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            return std::string(kParamNames[i]) + " must be finite";
        }
    }
    if (!(theta.a0 > 0.0)) return describe("a0 must be positive", theta.a0);
    if (!(theta.a1 >= 0.0)) return describe("a1 must be non-negative", theta.a1);
    if (!(theta.a2 >= 0.0)) return describe("a2 must be non-negative", theta.a2);
    if (!(theta.b0 > 0.0)) return describe("b0 must be positive", theta.b0);
    if (!(theta.b2 >= 0.0)) return describe("b2 must be non-negative", theta.b2);
    if (!(theta.b2 <= theta.b1)) return describe("b2 <= b1 is required", theta.b2);
    if (!(theta.b1 <= theta.d)) return describe("b1 <= d is required", theta.b1);
    if (bound == MemoryBound::Open ? !(theta.d < 1.0) : !(theta.d <= 1.0)) {
        return describe(bound == MemoryBound::Open ? "d < 1 is required" : "d <= 1 is required", theta.d);
    }
    if (!(theta.gamma >= 0.0)) return describe("gamma must be non-negative", theta.gamma);
    return std::nullopt;
}

bool is_feasible(const ThetaFull& theta, MemoryBound bound) {
    return !feasibility_violation(theta, bound).has_value();
}

void validate(const ThetaFull& theta, MemoryBound bound) {
    if (auto why = feasibility_violation(theta, bound)) {
        throw ParameterError("infeasible parameters: " + *why);
    }
}

std::vector<std::string> feasibility_warnings(const ThetaFull& theta) {
    std::vector<std::string> out;
    if (theta.b2 == 0.0) out.emplace_back("b2 = 0 sits on the boundary of the constraint 0 < b2 <= b1");
    if (theta.a1 == 0.0) out.emplace_back("a1 = 0 sits on the boundary of the constraint a1 > 0");
    if (theta.a2 == 0.0) out.emplace_back("a2 = 0 sits on the boundary of the constraint a2 > 0");
    return out;
}

void TransitionSpec::validate() const {
    if (lag < 1) throw ParameterError("transition lag must be at least 1");
    if (!(percentile > 0.0 && percentile < 1.0)) {
        throw ParameterError(describe("transition percentile must lie in (0, 1)", percentile));
    }
    if (!(fixed_w >= 0.0 && fixed_w <= 1.0)) {
        throw ParameterError(describe("fixed weight must lie in [0, 1]", fixed_w));
    }
}

std::string_view to_string(TransitionKind kind) noexcept {
    switch (kind) {
    case TransitionKind::LaggedReturn: return "lagged-return";
    case TransitionKind::LaggedVariance: return "lagged-variance";
    case TransitionKind::AsymmetricAverage: return "asym-avg";
    case TransitionKind::FixedWeight: return "fixed-w";
    }
    return "unknown";
}

TransitionKind parse_transition_kind(std::string_view name) {
    for (auto kind : {TransitionKind::LaggedReturn, TransitionKind::LaggedVariance,
                      TransitionKind::AsymmetricAverage, TransitionKind::FixedWeight}) {
        if (name == to_string(kind)) return kind;
    }
    throw ConfigurationError("unknown transition spec '" + std::string(name) + "'");
}

double squared_percentile(std::span<const double> y, double p) {
    if (y.empty()) throw DomainError("percentile of an empty series");
    if (!(p > 0.0 && p < 1.0)) throw DomainError(describe("percentile must lie in (0, 1)", p));
    std::vector<double> sq(y.size());
    std::transform(y.begin(), y.end(), sq.begin(), [](double v) { return v * v; });
    std::sort(sq.begin(), sq.end());
    const double pos = p * static_cast<double>(sq.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sq.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sq[lo] + frac * (sq[hi] - sq[lo]);
}

FilterSetup estimation_setup(std::span<const double> y, const TransitionSpec& spec, std::size_t k_max) {
    if (y.empty()) throw DomainError("cannot filter an empty return series");
    const double n = static_cast<double>(y.size());
    double sum = 0.0;
    double sum_sq = 0.0;
    for (double v : y) {
        sum += v;
        sum_sq += v * v;
    }
    const double mean = sum / n;
    double var = 0.0;
    for (double v : y) var += (v - mean) * (v - mean);
    var /= n;

    FilterSetup setup;
    setup.presample_sq = sum_sq / n;
    setup.presample_y = 0.0;
    setup.seed_h1 = var;
    setup.seed_h2 = var;
    setup.seed_h = var;
    setup.k_max = k_max;
    if (spec.kind == TransitionKind::AsymmetricAverage) {
        setup.threshold = squared_percentile(y, spec.percentile);
    }
    return setup;
}

double logistic_weight(double gamma, double z) noexcept {
    const double u = gamma * z;
    if (u >= 0.0) {
        const double e = std::exp(-u);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(u));
}

double transition_value(const TransitionSpec& spec, std::span<const double> y_hist,
                        std::span<const double> h_hist, const FilterSetup& setup) {
    auto lagged = [&](std::span<const double> hist, std::size_t lag, double fallback) {
        return lag <= hist.size() ? hist[hist.size() - lag] : fallback;
    };
    switch (spec.kind) {
    case TransitionKind::LaggedReturn:
        return lagged(y_hist, spec.lag, setup.presample_y);
    case TransitionKind::LaggedVariance:
        return lagged(h_hist, spec.lag, setup.seed_h);
    case TransitionKind::AsymmetricAverage: {
        const double y1 = lagged(y_hist, 1, setup.presample_y);
        if (y1 * y1 < setup.threshold) return y1;
        return (y1 + lagged(y_hist, 2, setup.presample_y) + lagged(y_hist, 3, setup.presample_y)) / 3.0;
    }
    case TransitionKind::FixedWeight:
        return 0.0;
    }
    return 0.0;
}

VarianceFilter::VarianceFilter(const ThetaFull& theta, const TransitionSpec& spec, const FilterSetup& setup)
    : theta_(theta), spec_(spec), setup_(setup) {
    validate(theta_);
    spec_.validate();
    if (setup_.k_max == 0) throw DomainError("truncation length k_max must be at least 1");
    frac_sum_ = LaggedSum(pi_coeffs(theta_.d, setup_.k_max).pi);
    compute_step();
}

void VarianceFilter::compute_step() {
    FilterStep next;
    if (!started_) {
        next.h1_prev = setup_.seed_h1;
        next.h2_prev = setup_.seed_h2;
        next.sq_prev = setup_.presample_sq;
        next.frac_prev = frac_sum_.at({}, setup_.presample_sq);
        started_ = true;
    } else {
        next.h1_prev = step_.h1;
        next.h2_prev = step_.h2;
        next.sq_prev = sq_.back();
        next.frac_prev = step_.frac;
    }
    next.frac = frac_sum_.at(sq_, setup_.presample_sq);

    const ThetaFull& p = theta_;
    next.h1 = p.a0 + p.a1 * next.h1_prev + p.a2 * next.sq_prev;
    next.h2 = p.b0 + p.b1 * next.h2_prev + (p.b2 - p.b1) * next.sq_prev + next.frac - p.b2 * next.frac_prev;
    if (spec_.is_fixed()) {
        next.z = 0.0;
        next.w = spec_.fixed_w;
    } else {
        next.z = transition_value(spec_, y_, h_, setup_);
        next.w = logistic_weight(p.gamma, next.z);
    }
    next.h = (1.0 - next.w) * next.h1 + next.w * next.h2;
    step_ = next;
}

void VarianceFilter::observe(double y) {
    y_.push_back(y);
    sq_.push_back(y * y);
    h_.push_back(step_.h);
    compute_step();
}

void VarianceFilter::set_threshold(double threshold) {
    setup_.threshold = threshold;
    // Component variances of the pending step do not involve the threshold.
    if (!spec_.is_fixed()) {
        step_.z = transition_value(spec_, y_, h_, setup_);
        step_.w = logistic_weight(theta_.gamma, step_.z);
        step_.h = (1.0 - step_.w) * step_.h1 + step_.w * step_.h2;
    }
}

VariancePath variance_path(const ThetaFull& theta, const TransitionSpec& spec, std::span<const double> y,
                           const FilterSetup& setup) {
    if (y.empty()) throw DomainError("cannot filter an empty return series");
    VarianceFilter filter(theta, spec, setup);
    VariancePath path;
    const std::size_t n = y.size();
    path.h.reserve(n);
    path.h1.reserve(n);
    path.h2.reserve(n);
    path.w.reserve(n);
    path.z.reserve(n);
    for (std::size_t t = 0; t < n; ++t) {
        const FilterStep& s = filter.current();
        if (!(s.h > 0.0 && s.h1 > 0.0 && s.h2 > 0.0)) {
            throw NumericalError("non-positive conditional variance at t = " + std::to_string(t + 1));
        }
        path.h.push_back(s.h);
        path.h1.push_back(s.h1);
        path.h2.push_back(s.h2);
        path.w.push_back(s.w);
        path.z.push_back(s.z);
        filter.observe(y[t]);
    }
    return path;
}

VariancePath variance_path(const ThetaFull& theta, const TransitionSpec& spec, std::span<const double> y,
                           std::size_t k_max) {
    return variance_path(theta, spec, y, estimation_setup(y, spec, k_max));
}

VariancePath hygarch_variance_path(const ThetaFull& theta, double w, std::span<const double> y,
                                   std::size_t k_max) {
    ThetaFull p = theta;
    p.gamma = 0.0;
    const auto spec = TransitionSpec::fixed_weight(w);
    return variance_path(p, spec, y, estimation_setup(y, spec, k_max));
}

} // namespace sthygarch
