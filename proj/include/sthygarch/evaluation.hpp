#pragma once

#include "sthygarch/estimator.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sthygarch {

struct Forecast {
    double variance = 0.0;
    bool from_unconverged_fit = false;
};

/**
 * h_{T+1} after filtering `history` (y_1..y_T). The setup overload keeps the
 * initial conditions fixed; the fit overload reuses the fit's estimation-time
 * setup so forecasts never look at data beyond the history.
 */
Forecast one_step_forecast(const ThetaFull& theta, const TransitionSpec& spec, std::span<const double> history,
                           const FilterSetup& setup);
Forecast one_step_forecast(const FitResult& fit, std::span<const double> history);

struct ModelSpec {
    std::string label;
    TransitionSpec spec;
    FitKind kind = FitKind::FullST;
};

struct BacktestReport {
    std::string label;
    std::size_t n_in = 0;
    std::size_t n_out = 0;
    double rmse_in = 0.0;
    double rmse_out = 0.0;
    double llv_in = 0.0;
    double llv_out = 0.0;
    std::vector<double> forecasts;  // h_t for every t; entries past the split are out-of-sample
    std::optional<FitResult> fit;
    bool ok = false;
    std::string error;
};

/**
 * Fits every model on y[0, split) and filters the whole series with the fitted
 * parameters and the in-sample initial conditions (presample, seeds and the
 * asym-avg threshold stay frozen), so each out-of-sample h_t is a one-step
 * forecast from data through t - 1. A failing model yields ok = false and does
 * not stop the others.
 */
std::vector<BacktestReport> backtest(std::span<const double> y, std::size_t split, std::span<const ModelSpec> models,
                                     const FitOptions& options = {});

// Root mean squared difference between forecasts and squared returns.
double rmse_vs_squared(std::span<const double> forecasts, std::span<const double> y);

// Log-likelihood value -0.5 * sum (ln 2 pi + ln h_t + y_t^2 / h_t).
double llv(std::span<const double> forecasts, std::span<const double> y);

struct DescriptiveStats {
    double mean = 0.0;
    double std_dev = 0.0;  // n - 1 denominator
    double min = 0.0;
    double max = 0.0;
    std::optional<double> skewness;  // empty for a constant series
    std::optional<double> kurtosis;
    bool excess_kurtosis = false;
};

// Skewness and kurtosis are standardized central moments (population form);
// kurtosis is raw (normal = 3) unless `excess` is set.
DescriptiveStats descriptive_stats(std::span<const double> y, bool excess = false);

} // namespace sthygarch
