#include "sthygarch/simulator.hpp"

#include "sthygarch/errors.hpp"
#include "sthygarch/rng.hpp"

#include <cmath>
#include <string>

namespace sthygarch {

FilterSetup simulation_setup(const SimConfig& config) {
    FilterSetup setup;
    setup.presample_sq = 0.0;
    setup.presample_y = 0.0;
    setup.seed_h1 = config.theta.a0;
    setup.seed_h2 = config.theta.b0;
    setup.seed_h = 0.5 * (config.theta.a0 + config.theta.b0);
    setup.k_max = config.k_max;
    return setup;
}

SimulatedPath simulate_path(const SimConfig& config) {
    if (config.n < 1) throw DomainError("simulation length n must be at least 1");
    validate(config.theta);
    config.spec.validate();

    VarianceFilter filter(config.theta, config.spec, simulation_setup(config));
    NormalStream normals(config.seed);
    const bool refresh = config.spec.kind == TransitionKind::AsymmetricAverage && config.threshold_refresh > 0;

    SimulatedPath out;
    out.y.reserve(config.n);
    out.h.reserve(config.n);
    out.w.reserve(config.n);
    const std::size_t total = config.burn_in + config.n;
    for (std::size_t t = 0; t < total; ++t) {
        const FilterStep& s = filter.current();
        if (!(s.h > 0.0) || !std::isfinite(s.h)) {
            throw NumericalError("simulated conditional variance became invalid at step " + std::to_string(t + 1));
        }
        const double y = std::sqrt(s.h) * normals.normal();
        if (t >= config.burn_in) {
            out.y.push_back(y);
            out.h.push_back(s.h);
            out.w.push_back(s.w);
        }
        filter.observe(y);
        if (refresh && (t + 1) % config.threshold_refresh == 0) {
            filter.set_threshold(squared_percentile(filter.returns(), config.spec.percentile));
        }
    }
    return out;
}

std::vector<double> simulate(const SimConfig& config) {
    return simulate_path(config).y;
}

} // namespace sthygarch
