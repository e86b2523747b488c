#include "reference.hpp"

#include "sthygarch/errors.hpp"
#include "sthygarch/evaluation.hpp"
#include "sthygarch/rng.hpp"
#include "sthygarch/simulator.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace sthygarch;

namespace {

const ThetaFull kTheta{0.35, 0.30, 0.40, 0.10, 0.20, 0.05, 0.60, 1.50};

std::vector<double> sim(std::size_t n, std::uint64_t seed, TransitionSpec spec = {}) {
    SimConfig cfg;
    cfg.theta = ThetaFull{0.35, 0.30, 0.40, 0.10, 0.20, 0.0, 0.60, 1.50};
    cfg.spec = spec;
    cfg.n = n;
    cfg.seed = seed;
    return simulate(cfg);
}

} // namespace

TEST_CASE("forecast on a zero history follows the intercept recursion") {
    FilterSetup setup;
    setup.seed_h1 = 0.0;
    setup.seed_h2 = 0.0;
    setup.k_max = 50;
    const std::vector<double> history(5, 0.0);
    const auto f = one_step_forecast(kTheta, TransitionSpec::lagged_return(), history, setup);
    double h1 = 0.0, h2 = 0.0;
    for (int t = 0; t < 6; ++t) {
        h1 = kTheta.a0 + kTheta.a1 * h1;
        h2 = kTheta.b0 + kTheta.b1 * h2;
    }
    CHECK(f.variance == doctest::Approx(0.5 * h1 + 0.5 * h2).epsilon(1e-14));
}

TEST_CASE("gamma = 0 forecast averages the component forecasts") {
    auto th = kTheta;
    th.gamma = 0.0;
    const auto y = sim(50, 3);
    const auto setup = estimation_setup(y, TransitionSpec::lagged_return(), 100);
    VarianceFilter filt(th, TransitionSpec::lagged_return(), setup);
    for (double v : y) filt.observe(v);
    const auto f = one_step_forecast(th, TransitionSpec::lagged_return(), y, setup);
    CHECK(f.variance == doctest::Approx(0.5 * (filt.current().h1 + filt.current().h2)).epsilon(1e-15));
}

TEST_CASE("forecast after 30 points matches the reference recursion") {
    const auto y = sim(31, 5);
    const std::vector<double> history(y.begin(), y.begin() + 30);
    const auto setup = estimation_setup(history, TransitionSpec::lagged_return(), 200);
    const auto f = one_step_forecast(kTheta, TransitionSpec::lagged_return(), history, setup);
    // The reference filter run over 31 points gives h_31 from y_1..y_30.
    const auto ref = reference::filter(kTheta, reference::Z::LaggedReturn, 0.5, y, setup.presample_sq,
                                       setup.seed_h1, setup.seed_h2, setup.seed_h, 200);
    CHECK(std::abs(f.variance - ref.h[30]) / ref.h[30] < 1e-12);
}

TEST_CASE("forecasts ignore data beyond the history") {
    auto y = sim(300, 7);
    const auto setup = estimation_setup(std::span<const double>(y.data(), 200), TransitionSpec::lagged_variance(), 200);
    const auto base = variance_path(kTheta, TransitionSpec::lagged_variance(), y, setup);
    for (std::size_t s : {150u, 220u, 299u}) {
        auto mutated = y;
        mutated[s] += 5.0;
        const auto p = variance_path(kTheta, TransitionSpec::lagged_variance(), mutated, setup);
        for (std::size_t t = 0; t <= s; ++t) REQUIRE(p.h[t] == base.h[t]);
        if (s + 1 < y.size()) CHECK(p.h[s + 1] != base.h[s + 1]);
    }
}

TEST_CASE("unconverged fits tag their forecasts") {
    const auto y = sim(200, 9);
    FitOptions opts;
    opts.max_iter = 1;
    opts.multistart = 1;
    opts.k_max = 100;
    const FitResult f = fit(y, TransitionSpec::lagged_return(), FitKind::FullST, opts);
    REQUIRE_FALSE(f.converged);
    const auto fc = one_step_forecast(f, y);
    CHECK(fc.from_unconverged_fit);
    CHECK(fc.variance > 0.0);
    CHECK_THROWS_AS(one_step_forecast(f, std::vector<double>{}), DomainError);
}

TEST_CASE("rmse and llv") {
    const std::vector<double> y{1.0, -2.0, 0.5};
    const std::vector<double> perfect{1.0, 4.0, 0.25};
    CHECK(rmse_vs_squared(perfect, y) == 0.0);
    const std::vector<double> off{2.0, 4.0, 0.25};
    CHECK(rmse_vs_squared(off, y) == doctest::Approx(std::sqrt(1.0 / 3.0)));
    double ref = 0.0;
    for (int i = 0; i < 3; ++i) ref += std::log(2 * std::numbers::pi) + std::log(off[i]) + y[i] * y[i] / off[i];
    CHECK(llv(off, y) == doctest::Approx(-0.5 * ref));
    CHECK_THROWS(rmse_vs_squared(off, std::vector<double>{1.0}));
}

TEST_CASE("backtest: no refits, in-sample llv equals the fit, out-of-sample forecasts are causal") {
    const auto y = sim(700, 11);
    const std::size_t split = 500;
    const std::vector<ModelSpec> models{{"ST", TransitionSpec::lagged_return(), FitKind::FullST},
                                        {"HYGARCH", TransitionSpec::fixed_weight(0.5), FitKind::FixedWeightHygarch}};
    const auto reports = backtest(y, split, models);
    REQUIRE(reports.size() == 2);
    for (const auto& r : reports) {
        REQUIRE(r.ok);
        CHECK(r.n_in == split);
        CHECK(r.n_out == 200);
        CHECK(r.forecasts.size() == y.size());
        for (double h : r.forecasts) CHECK(h > 0.0);
        CHECK(r.rmse_in >= 0.0);
        CHECK(r.rmse_out >= 0.0);
        CHECK(std::isfinite(r.llv_out));
        CHECK(std::abs(r.llv_in - r.fit->loglik) / std::abs(r.fit->loglik) < 1e-8);
        // Each out-of-sample forecast equals a one-step forecast from the prefix.
        for (std::size_t t : {split, split + 57, y.size() - 1}) {
            const auto f = one_step_forecast(*r.fit, std::span<const double>(y.data(), t));
            CHECK(f.variance == doctest::Approx(r.forecasts[t]).epsilon(1e-13));
        }
    }
}

TEST_CASE("backtest flags a failing model and keeps the rest") {
    const auto y = sim(200, 13);
    const std::vector<ModelSpec> models{{"bad", TransitionSpec::fixed_weight(0.5), FitKind::FullST},
                                        {"null", TransitionSpec::lagged_return(), FitKind::NullHalfWeight}};
    const auto reports = backtest(y, 150, models);
    CHECK_FALSE(reports[0].ok);
    CHECK_FALSE(reports[0].error.empty());
    CHECK(reports[1].ok);
    CHECK_THROWS_AS(backtest(y, 200, models), DomainError);
    CHECK_THROWS_AS(backtest(y, 20, models), DomainError);
}

TEST_CASE("descriptive statistics") {
    const auto two = descriptive_stats(std::vector<double>{-1.0, 1.0});
    CHECK(two.mean == 0.0);
    REQUIRE(two.skewness);
    CHECK(*two.skewness == doctest::Approx(0.0));
    CHECK(two.std_dev == doctest::Approx(std::sqrt(2.0)));
    CHECK(two.min == -1.0);
    CHECK(two.max == 1.0);

    const auto flat = descriptive_stats(std::vector<double>(10, 0.1));
    CHECK(flat.std_dev == 0.0);
    CHECK(flat.mean == 0.1);
    CHECK_FALSE(flat.skewness);
    CHECK_FALSE(flat.kurtosis);

    NormalStream rng(2718);
    std::vector<double> z(100000);
    for (auto& v : z) v = rng.normal();
    const auto s = descriptive_stats(z);
    CHECK(std::abs(*s.skewness) < 0.05);
    CHECK(std::abs(*s.kurtosis - 3.0) < 0.15);
    const auto e = descriptive_stats(z, true);
    CHECK(e.excess_kurtosis);
    CHECK(*e.kurtosis == doctest::Approx(*s.kurtosis - 3.0));

    CHECK_THROWS_AS(descriptive_stats(std::vector<double>{1.0}), DomainError);
}
