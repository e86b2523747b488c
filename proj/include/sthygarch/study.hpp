#pragma once

#include "sthygarch/estimator.hpp"
#include "sthygarch/score_test.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace sthygarch {

enum class StudyTable { EstimationStudy, SizePowerStudy };

/**
 * Monte Carlo experiment description. Replication r of every cell draws its
 * innovations from derive_seed(master_seed, r), so cells that differ only in n
 * or gamma share random numbers; this keeps comparisons across cells sharp.
 */
struct ExperimentConfig {
    StudyTable table = StudyTable::EstimationStudy;
    std::vector<std::size_t> n_values{500, 1000, 2000};
    std::size_t replications = 200;
    ThetaFull theta{0.35, 0.30, 0.40, 0.10, 0.20, 0.0, 0.60, 1.50};
    std::vector<double> gamma_grid{0.0, 0.4, 2.0, 7.0};  // SizePowerStudy only
    std::vector<double> levels{0.05, 0.10};               // SizePowerStudy only
    std::uint64_t master_seed = 20160101;
    std::size_t k_max = kDefaultTruncation;
    std::size_t burn_in = 1000;
    TransitionSpec spec = TransitionSpec::lagged_return(1);
    bool fix_b2 = true;       // EstimationStudy: hold b2 at its true value
    std::size_t multistart = 5;
    std::size_t threads = 0;  // 0 = hardware concurrency

    void validate() const;
};

struct EstimationCell {
    std::size_t n = 0;
    std::size_t successes = 0;
    std::size_t failures = 0;       // fits that threw; excluded from the moments
    std::size_t unconverged = 0;    // included, but counted
    Gradient bias{};
    Gradient rmse{};
    std::vector<ThetaFull> estimates;  // successful fits in replication order
};

struct EstimationStudyResult {
    ExperimentConfig config;
    std::vector<std::size_t> slots;  // parameters that were estimated
    std::vector<EstimationCell> cells;
};

struct SizePowerCell {
    double gamma = 0.0;
    std::size_t n = 0;
    std::size_t successes = 0;
    std::size_t failures = 0;    // fit or test threw
    std::size_t degenerate = 0;  // test flagged degenerate; excluded
    std::vector<double> rejection_rate;  // per level
    std::vector<double> statistics;      // psi_s per replication, NaN when excluded
};

struct SizePowerStudyResult {
    ExperimentConfig config;
    std::vector<SizePowerCell> cells;  // gamma-major, then n

    const SizePowerCell& cell(double gamma, std::size_t n) const;
};

EstimationStudyResult run_estimation_study(const ExperimentConfig& config);
SizePowerStudyResult run_size_power_study(const ExperimentConfig& config);

// CSV with '#' metadata lines carrying the configuration.
void write_estimation_csv(std::ostream& os, const EstimationStudyResult& result);
void write_size_power_csv(std::ostream& os, const SizePowerStudyResult& result);

// Aligned console tables: parameters or gamma values down, sample sizes across.
void print_estimation_table(std::ostream& os, const EstimationStudyResult& result);
void print_size_power_table(std::ostream& os, const SizePowerStudyResult& result);

} // namespace sthygarch
