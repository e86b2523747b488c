#pragma once

#include "sthygarch/fracdiff.hpp"

#include <array>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sthygarch {

/**
 * Parameters of the first-order ST-HYGARCH model
 *
 *   y_t    = sqrt(h_t) eps_t
 *   h_t    = (1 - w_t) h1_t + w_t h2_t
 *   h1_t   = a0 + a1 h1_{t-1} + a2 y_{t-1}^2
 *   h2_t   = b0 + b1 h2_{t-1} + [1 - b1 B - (1 - b2 B)(1 - B)^d] y_t^2
 *   w_t    = exp(-gamma z_t) / (1 + exp(-gamma z_t))
 *
 * Feasible set: a0, b0 > 0; a1, a2 >= 0; 0 <= b2 <= b1 <= d < 1; gamma >= 0.
 */
struct ThetaFull {
    double a0 = 0.0;
    double a1 = 0.0;
    double a2 = 0.0;
    double b0 = 0.0;
    double b1 = 0.0;
    double b2 = 0.0;
    double d = 0.0;
    double gamma = 0.0;

    static constexpr std::size_t kSize = 8;

    std::array<double, kSize> to_array() const noexcept { return {a0, a1, a2, b0, b1, b2, d, gamma}; }
    static ThetaFull from_array(const std::array<double, kSize>& v) noexcept {
        return {v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]};
    }

    friend bool operator==(const ThetaFull&, const ThetaFull&) = default;
};

// Slot order shared by gradients, derivative rows and parameter tables.
enum ParamIndex : std::size_t { kA0 = 0, kA1, kA2, kB0, kB1, kB2, kD, kGamma };

inline constexpr std::array<std::string_view, ThetaFull::kSize> kParamNames = {
    "a0", "a1", "a2", "b0", "b1", "b2", "d", "gamma"};

enum class MemoryBound { Open, Closed };

// Empty when feasible, otherwise a description of the first violated constraint.
// MemoryBound::Closed admits d = 1 (used by the stability analysis only).
std::optional<std::string> feasibility_violation(const ThetaFull& theta,
                                                 MemoryBound bound = MemoryBound::Open);
bool is_feasible(const ThetaFull& theta, MemoryBound bound = MemoryBound::Open);
// Throws ParameterError naming the violated constraint.
void validate(const ThetaFull& theta, MemoryBound bound = MemoryBound::Open);
// Non-fatal remarks: zero-valued coefficients sitting on the boundary of the feasible set.
std::vector<std::string> feasibility_warnings(const ThetaFull& theta);

enum class TransitionKind { LaggedReturn, LaggedVariance, AsymmetricAverage, FixedWeight };

/// Which observable drives the logistic weight.
struct TransitionSpec {
    TransitionKind kind = TransitionKind::LaggedReturn;
    std::size_t lag = 1;
    double percentile = 0.95;  // AsymmetricAverage only
    double fixed_w = 0.5;      // FixedWeight only

    static TransitionSpec lagged_return(std::size_t lag = 1) { return {TransitionKind::LaggedReturn, lag}; }
    static TransitionSpec lagged_variance(std::size_t lag = 1) { return {TransitionKind::LaggedVariance, lag}; }
    static TransitionSpec asymmetric_average(double percentile = 0.95) {
        return {TransitionKind::AsymmetricAverage, 1, percentile};
    }
    static TransitionSpec fixed_weight(double w) { return {TransitionKind::FixedWeight, 1, 0.95, w}; }

    bool is_fixed() const noexcept { return kind == TransitionKind::FixedWeight; }
    void validate() const;
};

std::string_view to_string(TransitionKind kind) noexcept;
// Accepts lagged-return, lagged-variance, asym-avg, fixed-w.
TransitionKind parse_transition_kind(std::string_view name);

/**
 * Initial conditions of the filter. Everything the recursion needs from before
 * the first observation lives here, so a setup can be frozen (e.g. at the end
 * of an in-sample window) and reused for out-of-sample forecasting.
 */
struct FilterSetup {
    double presample_sq = 0.0;  // y_s^2 for s <= 0
    double presample_y = 0.0;   // y_s for s <= 0, used by the transition variable
    double seed_h1 = 0.0;       // h1_0
    double seed_h2 = 0.0;       // h2_0
    double seed_h = 0.0;        // h_s for s <= 0, used by LaggedVariance
    double threshold = std::numeric_limits<double>::infinity();  // AsymmetricAverage cut-off on y^2
    std::size_t k_max = kDefaultTruncation;
};

/**
 * Estimation-time setup: presample y_s^2 is the mean of all squared
 * observations, component seeds and the h seed are the sample variance, and
 * the AsymmetricAverage threshold is the requested percentile of y^2.
 */
FilterSetup estimation_setup(std::span<const double> y, const TransitionSpec& spec,
                             std::size_t k_max = kDefaultTruncation);

// Linear-interpolation percentile (p in (0,1)) of the squared values.
double squared_percentile(std::span<const double> y, double p);

double logistic_weight(double gamma, double z) noexcept;

/**
 * Transition value for the next time index. `y_hist` and `h_hist` hold
 * y_1..y_{t-1} and h_1..h_{t-1}; missing history falls back to the setup's
 * presample values.
 */
double transition_value(const TransitionSpec& spec, std::span<const double> y_hist,
                        std::span<const double> h_hist, const FilterSetup& setup);

struct VariancePath {
    std::vector<double> h;
    std::vector<double> h1;
    std::vector<double> h2;
    std::vector<double> w;
    std::vector<double> z;

    std::size_t size() const noexcept { return h.size(); }
};

/// Quantities of the recursion at the upcoming time index t.
struct FilterStep {
    double h = 0.0;
    double h1 = 0.0;
    double h2 = 0.0;
    double w = 0.5;
    double z = 0.0;
    double frac = 0.0;       // sum_i pi_i y_{t-i}^2
    double frac_prev = 0.0;  // the same sum one period earlier
    double h1_prev = 0.0;
    double h2_prev = 0.0;
    double sq_prev = 0.0;    // y_{t-1}^2
};

/**
 * Causal step-by-step filter. current() describes time t before y_t is seen;
 * observe(y_t) advances to t + 1. Used directly by the simulator and the
 * forecaster; variance_path() is a loop over it.
 */
class VarianceFilter {
public:
    VarianceFilter(const ThetaFull& theta, const TransitionSpec& spec, const FilterSetup& setup);

    const FilterStep& current() const noexcept { return step_; }
    void observe(double y);
    void set_threshold(double threshold);

    std::size_t observed() const noexcept { return y_.size(); }
    std::span<const double> returns() const noexcept { return y_; }
    std::span<const double> squares() const noexcept { return sq_; }
    std::span<const double> variances() const noexcept { return h_; }
    const ThetaFull& theta() const noexcept { return theta_; }
    const TransitionSpec& spec() const noexcept { return spec_; }
    const FilterSetup& setup() const noexcept { return setup_; }

private:
    void compute_step();

    ThetaFull theta_;
    TransitionSpec spec_;
    FilterSetup setup_;
    LaggedSum frac_sum_;
    std::vector<double> y_;
    std::vector<double> sq_;
    std::vector<double> h_;
    FilterStep step_;
    bool started_ = false;
};

// Filter over y with the estimation-time setup.
VariancePath variance_path(const ThetaFull& theta, const TransitionSpec& spec, std::span<const double> y,
                           std::size_t k_max = kDefaultTruncation);
VariancePath variance_path(const ThetaFull& theta, const TransitionSpec& spec, std::span<const double> y,
                           const FilterSetup& setup);

// Constant-weight HYGARCH; theta.gamma is ignored.
VariancePath hygarch_variance_path(const ThetaFull& theta, double w, std::span<const double> y,
                                   std::size_t k_max = kDefaultTruncation);

} // namespace sthygarch
