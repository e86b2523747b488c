#include "sthygarch/evaluation.hpp"

#include "sthygarch/errors.hpp"

#include <algorithm>
#include <cmath>

namespace sthygarch {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

} // namespace

Forecast one_step_forecast(const ThetaFull& theta, const TransitionSpec& spec, std::span<const double> history,
                           const FilterSetup& setup) {
    if (history.empty()) throw DomainError("forecasting needs a non-empty history");
    VarianceFilter filter(theta, spec, setup);
    for (double v : history) filter.observe(v);
    return {filter.current().h, false};
}

Forecast one_step_forecast(const FitResult& fit, std::span<const double> history) {
    Forecast f = one_step_forecast(fit.theta_hat, fit.spec, history, fit.setup);
    f.from_unconverged_fit = !fit.converged;
    return f;
}

double rmse_vs_squared(std::span<const double> forecasts, std::span<const double> y) {
    if (forecasts.size() != y.size() || y.empty()) {
        throw DomainError("RMSE needs equally sized, non-empty sequences");
    }
    double acc = 0.0;
    for (std::size_t t = 0; t < y.size(); ++t) {
        const double e = forecasts[t] - y[t] * y[t];
        acc += e * e;
    }
    return std::sqrt(acc / static_cast<double>(y.size()));
}

double llv(std::span<const double> forecasts, std::span<const double> y) {
    if (forecasts.size() != y.size() || y.empty()) {
        throw DomainError("LLV needs equally sized, non-empty sequences");
    }
    double acc = 0.0;
    for (std::size_t t = 0; t < y.size(); ++t) {
        acc += kLog2Pi + std::log(forecasts[t]) + y[t] * y[t] / forecasts[t];
    }
    return -0.5 * acc;
}

std::vector<BacktestReport> backtest(std::span<const double> y, std::size_t split, std::span<const ModelSpec> models,
                                     const FitOptions& options) {
    if (split >= y.size()) throw DomainError("split must leave at least one out-of-sample observation");
    if (split < options.min_length) {
        throw DomainError("split is shorter than the minimum fit length " + std::to_string(options.min_length));
    }
    const auto in = y.first(split);
    const auto out = y.subspan(split);

    std::vector<BacktestReport> reports;
    reports.reserve(models.size());
    for (const ModelSpec& model : models) {
        BacktestReport rep;
        rep.label = model.label;
        rep.n_in = in.size();
        rep.n_out = out.size();
        try {
            FitResult f = fit(in, model.spec, model.kind, options);
            rep.forecasts = variance_path(f.theta_hat, f.spec, y, f.setup).h;
            const std::span<const double> h(rep.forecasts);
            rep.rmse_in = rmse_vs_squared(h.first(split), in);
            rep.rmse_out = rmse_vs_squared(h.subspan(split), out);
            rep.llv_in = llv(h.first(split), in);
            rep.llv_out = llv(h.subspan(split), out);
            rep.fit = std::move(f);
            rep.ok = true;
        } catch (const std::exception& e) {
            rep.ok = false;
            rep.error = e.what();
        }
        reports.push_back(std::move(rep));
    }
    return reports;
}

DescriptiveStats descriptive_stats(std::span<const double> y, bool excess) {
    if (y.size() < 2) throw DomainError("descriptive statistics need at least two observations");
    const double n = static_cast<double>(y.size());
    DescriptiveStats s;
    s.excess_kurtosis = excess;
    s.min = *std::min_element(y.begin(), y.end());
    s.max = *std::max_element(y.begin(), y.end());
    if (s.min == s.max) {
        s.mean = s.min;
        return s;  // std 0; skewness and kurtosis undefined
    }
    double sum = 0.0;
    for (double v : y) sum += v;
    s.mean = sum / n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : y) {
        const double c = v - s.mean;
        const double c2 = c * c;
        m2 += c2;
        m3 += c2 * c;
        m4 += c2 * c2;
    }
    s.std_dev = std::sqrt(m2 / (n - 1.0));
    m2 /= n;
    m3 /= n;
    m4 /= n;
    const double scale = std::max(std::abs(s.min), std::abs(s.max));
    if (m2 > 1e-28 * scale * scale && m2 > 0.0) {
        s.skewness = m3 / std::pow(m2, 1.5);
        s.kurtosis = m4 / (m2 * m2) - (excess ? 3.0 : 0.0);
    }
    return s;
}

} // namespace sthygarch
