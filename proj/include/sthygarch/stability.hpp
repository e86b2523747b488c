#pragma once

#include "sthygarch/model.hpp"

#include <Eigen/Dense>

#include <optional>

namespace sthygarch {

inline constexpr std::size_t kStabilityTruncation = 100000;

// The displayed C has a unit eigenvalue for many feasible thetas (row 3 sums
// to one), so rho is compared against 1 with this margin to keep rounding in
// the eigenvalue computation from deciding the verdict.
inline constexpr double kUnitRootTolerance = 1e-10;

/**
 * Second-moment bound H_t <= A + C H_{t-1} on H_t = (E h_t, E h1_t, E h2_t, E h_{t-1}):
 *
 *       | |b2 - b1 + pi_1 - a2| + a2   a1        b1   S |        | a0 + |b0 - a0| |
 *   C = | 0                           a1 + a2   0    0 |    A = | a0             |
 *       | b2 - b1 + pi_1              0         b1   S |        | b0             |
 *       | 1                           0         0    0 |        | 0              |
 *
 * S stands for the lag polynomial sum_{i>=0} (pi_{i+2} - b2 pi_{i+1}) B^i acting
 * on the stationary level, i.e. evaluated at B = 1. With sum_i pi_i = 1 this is
 * (1 - d) - b2 exactly.
 */
struct CompanionMatrix {
    Eigen::Matrix4d C;
    double tail_sum = 0.0;            // closed form (1 - d) - b2
    double tail_sum_truncated = 0.0;  // the same sum over pi_1 .. pi_kmax
    double truncation_bound = 0.0;    // |closed - truncated| cannot exceed this
};

struct StabilityReport {
    double rho = 0.0;
    bool stable = false;
    Eigen::Matrix4d C;
    Eigen::Vector4d A;
    double tail_sum = 0.0;
    double tail_sum_truncated = 0.0;
    double truncation_bound = 0.0;
    std::optional<Eigen::Vector4d> bound;  // (I - C)^{-1} A when stable
};

// Admits d = 1 in addition to the usual feasible set. Requires k_max >= 2.
CompanionMatrix build_C(const ThetaFull& theta, std::size_t k_max = kStabilityTruncation);

/// Largest eigenvalue modulus. Power iteration first; falls back to a dense
/// eigen-decomposition when the iteration does not settle (complex or tied
/// dominant eigenvalues, defective matrices).
double spectral_radius(const Eigen::Matrix4d& C);

StabilityReport check_stability(const ThetaFull& theta, std::size_t k_max = kStabilityTruncation);

} // namespace sthygarch
