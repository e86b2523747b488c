#include "sthygarch/study.hpp"

#include "sthygarch/errors.hpp"
#include "sthygarch/io.hpp"
#include "sthygarch/parallel.hpp"
#include "sthygarch/rng.hpp"
#include "sthygarch/simulator.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

namespace sthygarch {

void ExperimentConfig::validate() const {
    if (replications < 1) throw ConfigurationError("replications must be at least 1");
    if (n_values.empty()) throw ConfigurationError("n_values must not be empty");
    for (double a : levels) {
        if (!(a > 0.0 && a < 1.0)) throw ConfigurationError("significance levels must lie in (0, 1)");
    }
    if (table == StudyTable::SizePowerStudy && gamma_grid.empty()) {
        throw ConfigurationError("gamma_grid must not be empty");
    }
    sthygarch::validate(theta);
    spec.validate();
}

namespace {

FitOptions study_fit_options(const ExperimentConfig& config) {
    FitOptions opts;
    opts.k_max = config.k_max;
    opts.multistart = config.multistart;
    return opts;
}

std::vector<double> simulate_replication(const ExperimentConfig& config, const ThetaFull& theta, std::size_t n,
                                         std::size_t rep) {
    SimConfig sim;
    sim.theta = theta;
    sim.spec = config.spec;
    sim.n = n;
    sim.burn_in = config.burn_in;
    sim.k_max = config.k_max;
    sim.seed = derive_seed(config.master_seed, rep);
    return simulate(sim);
}

void write_metadata(std::ostream& os, const ExperimentConfig& c, const char* table) {
    os << "# table=" << table << '\n';
    os << "# master_seed=" << c.master_seed << '\n';
    os << "# replications=" << c.replications << '\n';
    os << "# k_max=" << c.k_max << '\n';
    os << "# burn_in=" << c.burn_in << '\n';
    os << "# multistart=" << c.multistart << '\n';
    os << "# spec=" << to_string(c.spec.kind) << " lag=" << c.spec.lag << '\n';
    os << "# theta=";
    const auto v = c.theta.to_array();
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << kParamNames[i] << ':' << format_number(v[i]);
    os << '\n';
}

} // namespace

EstimationStudyResult run_estimation_study(const ExperimentConfig& config) {
    config.validate();
    EstimationStudyResult result;
    result.config = config;
    for (std::size_t j = 0; j < ThetaFull::kSize; ++j) {
        if (config.fix_b2 && j == kB2) continue;
        result.slots.push_back(j);
    }

    FitOptions opts = study_fit_options(config);
    if (config.fix_b2) opts.fixed_b2 = config.theta.b2;

    for (std::size_t n : config.n_values) {
        std::vector<std::optional<FitResult>> fits(config.replications);
        parallel_for(config.replications, config.threads, [&](std::size_t r) {
            try {
                const auto y = simulate_replication(config, config.theta, n, r);
                fits[r] = fit(y, config.spec, FitKind::FullST, opts);
            } catch (const std::exception&) {
                fits[r].reset();
            }
        });

        EstimationCell cell;
        cell.n = n;
        const auto truth = config.theta.to_array();
        Gradient sum{}, sum_sq{};
        for (const auto& f : fits) {
            if (!f) {
                ++cell.failures;
                continue;
            }
            ++cell.successes;
            if (!f->converged) ++cell.unconverged;
            cell.estimates.push_back(f->theta_hat);
            const auto est = f->theta_hat.to_array();
            for (std::size_t j = 0; j < ThetaFull::kSize; ++j) {
                const double e = est[j] - truth[j];
                sum[j] += e;
                sum_sq[j] += e * e;
            }
        }
        if (cell.successes > 0) {
            const double k = static_cast<double>(cell.successes);
            for (std::size_t j = 0; j < ThetaFull::kSize; ++j) {
                cell.bias[j] = sum[j] / k;
                cell.rmse[j] = std::sqrt(sum_sq[j] / k);
            }
        }
        result.cells.push_back(std::move(cell));
    }
    return result;
}

const SizePowerCell& SizePowerStudyResult::cell(double gamma, std::size_t n) const {
    for (const auto& c : cells) {
        if (c.gamma == gamma && c.n == n) return c;
    }
    throw ConfigurationError("no study cell for the requested (gamma, n)");
}

SizePowerStudyResult run_size_power_study(const ExperimentConfig& config) {
    config.validate();
    SizePowerStudyResult result;
    result.config = config;
    const FitOptions opts = study_fit_options(config);

    std::vector<double> critical;
    for (double a : config.levels) critical.push_back(chi2_1_critical(a));

    for (double gamma : config.gamma_grid) {
        ThetaFull theta = config.theta;
        theta.gamma = gamma;
        for (std::size_t n : config.n_values) {
            SizePowerCell cell;
            cell.gamma = gamma;
            cell.n = n;
            cell.statistics.assign(config.replications, std::numeric_limits<double>::quiet_NaN());
            std::vector<int> status(config.replications, 0);  // 0 ok, 1 failed, 2 degenerate
            parallel_for(config.replications, config.threads, [&](std::size_t r) {
                try {
                    const auto y = simulate_replication(config, theta, n, r);
                    const FitResult null_fit = fit(y, config.spec, FitKind::NullHalfWeight, opts);
                    const ScoreTestResult test = score_statistic(null_fit, y);
                    if (test.degenerate) {
                        status[r] = 2;
                    } else {
                        cell.statistics[r] = test.psi_s;
                    }
                } catch (const std::exception&) {
                    status[r] = 1;
                }
            });
            std::vector<std::size_t> rejections(config.levels.size(), 0);
            for (std::size_t r = 0; r < config.replications; ++r) {
                if (status[r] == 1) {
                    ++cell.failures;
                } else if (status[r] == 2) {
                    ++cell.degenerate;
                } else {
                    ++cell.successes;
                    for (std::size_t l = 0; l < critical.size(); ++l) {
                        if (cell.statistics[r] > critical[l]) ++rejections[l];
                    }
                }
            }
            for (std::size_t rej : rejections) {
                cell.rejection_rate.push_back(cell.successes > 0 ? static_cast<double>(rej) /
                                                                       static_cast<double>(cell.successes)
                                                                 : std::numeric_limits<double>::quiet_NaN());
            }
            result.cells.push_back(std::move(cell));
        }
    }
    return result;
}

void write_estimation_csv(std::ostream& os, const EstimationStudyResult& result) {
    write_metadata(os, result.config, "estimation");
    os << "parameter,true_value,n,bias,rmse,successes,failures,unconverged\n";
    const auto truth = result.config.theta.to_array();
    for (std::size_t j : result.slots) {
        for (const auto& cell : result.cells) {
            os << kParamNames[j] << ',' << format_number(truth[j]) << ',' << cell.n << ','
               << format_number(cell.bias[j]) << ',' << format_number(cell.rmse[j]) << ',' << cell.successes << ','
               << cell.failures << ',' << cell.unconverged << '\n';
        }
    }
}

void write_size_power_csv(std::ostream& os, const SizePowerStudyResult& result) {
    write_metadata(os, result.config, "size-power");
    os << "gamma,n,level,rejection_rate,successes,failures,degenerate\n";
    for (const auto& cell : result.cells) {
        for (std::size_t l = 0; l < result.config.levels.size(); ++l) {
            os << format_number(cell.gamma) << ',' << cell.n << ',' << format_number(result.config.levels[l]) << ','
               << format_number(cell.rejection_rate[l]) << ',' << cell.successes << ',' << cell.failures << ','
               << cell.degenerate << '\n';
        }
    }
}

void print_estimation_table(std::ostream& os, const EstimationStudyResult& result) {
    const auto truth = result.config.theta.to_array();
    os << std::left << std::setw(10) << "parameter" << std::setw(8) << "true";
    for (const auto& cell : result.cells) {
        os << std::right << std::setw(11) << ("bias@" + std::to_string(cell.n)) << std::setw(11)
           << ("rmse@" + std::to_string(cell.n));
    }
    os << '\n' << std::fixed << std::setprecision(4);
    for (std::size_t j : result.slots) {
        os << std::left << std::setw(10) << kParamNames[j] << std::setw(8) << truth[j] << std::right;
        for (const auto& cell : result.cells) os << std::setw(11) << cell.bias[j] << std::setw(11) << cell.rmse[j];
        os << '\n';
    }
    for (const auto& cell : result.cells) {
        os << "n=" << cell.n << ": " << cell.successes << " fits, " << cell.failures << " failed, "
           << cell.unconverged << " unconverged\n";
    }
    os << std::defaultfloat;
}

void print_size_power_table(std::ostream& os, const SizePowerStudyResult& result) {
    const auto& c = result.config;
    os << std::left << std::setw(8) << "gamma" << std::right;
    for (std::size_t n : c.n_values) {
        for (double a : c.levels) {
            std::ostringstream label;
            label << "n=" << n << "@" << a;
            os << std::setw(14) << label.str();
        }
    }
    os << '\n' << std::fixed;
    for (double gamma : c.gamma_grid) {
        os << std::left << std::setw(8) << std::setprecision(1) << gamma << std::right << std::setprecision(3);
        for (std::size_t n : c.n_values) {
            const auto& cell = result.cell(gamma, n);
            for (double rate : cell.rejection_rate) os << std::setw(14) << rate;
        }
        os << '\n';
    }
    os << std::defaultfloat;
}

} // namespace sthygarch
