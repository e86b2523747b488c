#include "sthygarch/stability.hpp"

#include "sthygarch/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace sthygarch {

CompanionMatrix build_C(const ThetaFull& theta, std::size_t k_max) {
    validate(theta, MemoryBound::Closed);
    if (k_max < 2) throw DomainError("tail-sum truncation needs k_max >= 2");

    const FracDiffCoeffs coeffs = pi_coeffs(theta.d, k_max);
    const double pi1 = coeffs.pi[0];

    CompanionMatrix out;
    out.tail_sum = (1.0 - theta.d) - theta.b2;
    // sum_{i=0}^{K-2} (pi_{i+2} - b2 pi_{i+1}), summed from the small end.
    double upper = 0.0;
    double lower = 0.0;
    for (std::size_t i = k_max - 1; i >= 1; --i) upper += coeffs.pi[i];
    for (std::size_t i = k_max - 1; i-- > 0;) lower += coeffs.pi[i];
    out.tail_sum_truncated = upper - theta.b2 * lower;
    out.truncation_bound = truncated_mass(theta.d, k_max) + theta.b2 * truncated_mass(theta.d, k_max - 1);

    const double S = out.tail_sum;
    const double lead = theta.b2 - theta.b1 + pi1;
    Eigen::Matrix4d C;
    C << std::abs(lead - theta.a2) + theta.a2, theta.a1, theta.b1, S,
         0.0, theta.a1 + theta.a2, 0.0, 0.0,
         lead, 0.0, theta.b1, S,
         1.0, 0.0, 0.0, 0.0;
    out.C = C;
    return out;
}

double spectral_radius(const Eigen::Matrix4d& C) {
    if (!C.allFinite()) throw DomainError("spectral radius of a matrix with non-finite entries");
    if (C.cwiseAbs().maxCoeff() == 0.0) return 0.0;

    // For a non-negative matrix the spectral radius is itself an eigenvalue with
    // a non-negative eigenvector (Perron-Frobenius), and a strictly positive
    // start vector cannot be orthogonal to its left eigenvector, so power
    // iteration reaches it whenever it converges at all.
    if (C.minCoeff() >= 0.0) {
        Eigen::Vector4d v = Eigen::Vector4d::Constant(0.5);
        for (int it = 0; it < 5000; ++it) {
            Eigen::Vector4d next = C * v;
            const double norm = next.norm();
            if (norm == 0.0) return 0.0;
            next /= norm;
            const double lambda = next.dot(C * next);
            if ((C * next - lambda * next).norm() < 1e-12 * std::max(1.0, std::abs(lambda))) {
                return std::abs(lambda);
            }
            v = next;
        }
    }
    const Eigen::EigenSolver<Eigen::Matrix4d> solver(C, false);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

StabilityReport check_stability(const ThetaFull& theta, std::size_t k_max) {
    const CompanionMatrix cm = build_C(theta, k_max);
    StabilityReport rep;
    rep.C = cm.C;
    rep.tail_sum = cm.tail_sum;
    rep.tail_sum_truncated = cm.tail_sum_truncated;
    rep.truncation_bound = cm.truncation_bound;
    rep.A << theta.a0 + std::abs(theta.b0 - theta.a0), theta.a0, theta.b0, 0.0;
    rep.rho = spectral_radius(cm.C);
    rep.stable = rep.rho < 1.0 - kUnitRootTolerance;
    if (rep.stable) {
        rep.bound = (Eigen::Matrix4d::Identity() - cm.C).partialPivLu().solve(rep.A);
    }
    return rep;
}

} // namespace sthygarch
