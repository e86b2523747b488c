#pragma once

#include "sthygarch/model.hpp"

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace sthygarch {

using Gradient = std::array<double, ThetaFull::kSize>;

/**
 * Per-observation -2 log-density terms l_t = ln 2pi + ln h_t + y_t^2 / h_t.
 * The log-likelihood is -0.5 * sum l_t.
 */
std::vector<double> neg2_loglik_terms(const ThetaFull& theta, const TransitionSpec& spec,
                                      std::span<const double> y, std::size_t k_max = kDefaultTruncation);
std::vector<double> neg2_loglik_terms(const ThetaFull& theta, const TransitionSpec& spec,
                                      std::span<const double> y, const FilterSetup& setup);

double loglik(const ThetaFull& theta, const TransitionSpec& spec, std::span<const double> y,
              std::size_t k_max = kDefaultTruncation);
double loglik(const ThetaFull& theta, const TransitionSpec& spec, std::span<const double> y,
              const FilterSetup& setup);

/**
 * Log-likelihood together with d h_t / d theta for every t.
 *
 * Slot kGamma holds the derivative with respect to gamma for logistic
 * transitions and with respect to the constant weight w for FixedWeight.
 * Component derivatives are propagated recursively next to the filter; when
 * the transition variable is the lagged total variance, w_t itself depends on
 * the parameters and that dependence is carried through the chain rule.
 */
struct LikelihoodDerivatives {
    double loglik = 0.0;
    Gradient gradient{};
    VariancePath path;
    std::vector<Gradient> dh;  // filled when rows are requested
    bool finite = true;        // false if some h_t was non-positive or non-finite
};

LikelihoodDerivatives evaluate_derivatives(const ThetaFull& theta, const TransitionSpec& spec,
                                           std::span<const double> y, const FilterSetup& setup,
                                           bool keep_rows = false);

// Analytic gradient of the log-likelihood. Requires a feasible theta with 0 < d < 1.
Gradient loglik_gradient(const ThetaFull& theta, const TransitionSpec& spec, std::span<const double> y,
                         std::size_t k_max = kDefaultTruncation);
Gradient loglik_gradient(const ThetaFull& theta, const TransitionSpec& spec, std::span<const double> y,
                         const FilterSetup& setup);

enum class FitKind { FullST, NullHalfWeight, FixedWeightHygarch };

std::string_view to_string(FitKind kind) noexcept;
FitKind parse_fit_kind(std::string_view name);

struct FitOptions {
    std::size_t k_max = kDefaultTruncation;
    std::size_t max_iter = 500;
    double grad_tol = 1e-6;
    double rel_obj_tol = 1e-10;
    std::size_t multistart = 5;
    std::size_t min_length = 50;
    std::optional<ThetaFull> initial;     // tried before the default starting points
                                          // (multistart = 0 then uses it alone)
    std::optional<double> fixed_b2;       // hold b2 at this value
    std::optional<double> fixed_weight;   // FixedWeightHygarch only: hold w here
    bool record_trace = false;
};

struct FitResult {
    ThetaFull theta_hat;
    TransitionSpec spec;        // FixedWeightHygarch: carries the fitted weight
    FitKind fit_kind = FitKind::FullST;
    FilterSetup setup;          // estimation-time initial conditions
    double loglik = 0.0;
    double loglik_per_obs = 0.0;
    double grad_norm = 0.0;     // sup-norm in optimizer coordinates, per observation
    double mean_weight = 0.0;   // average fitted w_t
    std::size_t n_obs = 0;
    std::size_t n_iter = 0;
    std::size_t starts_used = 0;
    bool converged = false;
    std::optional<double> fixed_b2;
    std::vector<double> trace;  // log-likelihood per accepted iteration of the winning start
    std::vector<std::string> notes;
};

/**
 * Maximum-likelihood fit through BFGS in unconstrained coordinates:
 * a0, a1, a2, b0 and gamma are log-transformed; d = s(u_d), b1 = d s(u_1),
 * b2 = b1 s(u_2) with s the logistic function, so 0 <= b2 <= b1 <= d < 1 holds
 * for every iterate (a fixed b2 = c shifts the chain to c <= b1 <= d < 1).
 *
 * FullST estimates all parameters, NullHalfWeight fixes gamma = 0 (w_t = 1/2)
 * and FixedWeightHygarch replaces gamma with a constant logit-mapped weight.
 */
FitResult fit(std::span<const double> y, const TransitionSpec& spec, FitKind kind, const FitOptions& options = {});

} // namespace sthygarch
