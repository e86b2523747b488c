#include "sthygarch/errors.hpp"
#include "sthygarch/fracdiff.hpp"
#include "sthygarch/stability.hpp"

#include <doctest.h>

#include <array>
#include <cmath>
#include <complex>
#include <random>

using namespace sthygarch;

namespace {

const ThetaFull kDesignTheta{0.35, 0.30, 0.40, 0.10, 0.20, 0.0, 0.60, 1.50};

// Characteristic polynomial coefficients via Faddeev-LeVerrier, then all four
// roots by Durand-Kerner iteration; returns the largest root modulus.
double quartic_oracle(const Eigen::Matrix4d& C) {
    std::array<double, 5> c{};  // lambda^4 + c1 lambda^3 + ... + c4
    c[0] = 1.0;
    Eigen::Matrix4d M = Eigen::Matrix4d::Zero();
    for (int k = 1; k <= 4; ++k) {
        M = C * M + c[k - 1] * Eigen::Matrix4d::Identity();
        c[k] = -(C * M).trace() / k;
    }
    auto poly = [&](std::complex<double> z) {
        std::complex<double> v = 1.0;
        for (int k = 1; k <= 4; ++k) v = v * z + c[k];
        return v;
    };
    std::array<std::complex<double>, 4> r;
    const std::complex<double> seed(0.4, 0.9);
    for (int i = 0; i < 4; ++i) r[i] = std::pow(seed, i);
    for (int it = 0; it < 2000; ++it) {
        for (int i = 0; i < 4; ++i) {
            std::complex<double> den = 1.0;
            for (int j = 0; j < 4; ++j) if (j != i) den *= r[i] - r[j];
            r[i] -= poly(r[i]) / den;
        }
    }
    double rho = 0.0;
    for (auto z : r) rho = std::max(rho, std::abs(z));
    return rho;
}

ThetaFull random_feasible(std::mt19937_64& gen) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    ThetaFull th;
    th.a0 = 0.01 + u(gen);
    th.a1 = 0.6 * u(gen);
    th.a2 = 0.6 * u(gen);
    th.b0 = 0.01 + u(gen);
    th.d = 0.99 * u(gen);
    th.b1 = th.d * u(gen);
    th.b2 = th.b1 * u(gen);
    th.gamma = 3.0 * u(gen);
    return th;
}

} // namespace

TEST_CASE("tail sum closed form against truncated summation") {
    auto th = kDesignTheta;
    const auto cm = build_C(th);
    CHECK(cm.tail_sum == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(std::abs(cm.tail_sum - cm.tail_sum_truncated) <= cm.truncation_bound * (1 + 1e-9));
    CHECK(cm.truncation_bound < 1e-3);

    th.b2 = 0.15;
    const auto cm2 = build_C(th, 5000);
    CHECK(cm2.tail_sum == doctest::Approx(0.4 - 0.15));
    CHECK(std::abs(cm2.tail_sum - cm2.tail_sum_truncated) <= cm2.truncation_bound * (1 + 1e-9));

    // d = 1: pi_1 = 1 and nothing else, so the sum is -b2
    const ThetaFull unit{0.2, 0.1, 0.1, 0.2, 0.5, 0.3, 1.0, 0.0};
    const auto cm3 = build_C(unit, 100);
    CHECK(cm3.tail_sum == doctest::Approx(-0.3));
    CHECK(cm3.tail_sum_truncated == doctest::Approx(-0.3).epsilon(1e-14));
}

TEST_CASE("C entries for the simulation design") {
    const auto C = build_C(kDesignTheta).C;
    CHECK(C(1, 1) == doctest::Approx(0.70));
    CHECK(C(1, 0) == 0.0);
    CHECK(C(0, 0) == doctest::Approx(std::abs(0.0 - 0.2 + 0.6 - 0.4) + 0.4));
    CHECK(C(0, 1) == doctest::Approx(0.30));
    CHECK(C(0, 2) == doctest::Approx(0.20));
    CHECK(C(2, 0) == doctest::Approx(0.40));
    CHECK(C(2, 3) == doctest::Approx(0.40));
    CHECK(C(3, 0) == 1.0);
}

TEST_CASE("build_C rejects infeasible parameters and short truncations") {
    auto bad = kDesignTheta;
    bad.b1 = 0.7;
    CHECK_THROWS_AS(build_C(bad), ParameterError);
    CHECK_THROWS_AS(build_C(kDesignTheta, 1), DomainError);
}

TEST_CASE("spectral radius on matrices with known spectra") {
    CHECK(spectral_radius(0.5 * Eigen::Matrix4d::Identity()) == doctest::Approx(0.5).epsilon(1e-12));
    Eigen::Matrix4d U;
    U << 0.3, 1.0, -2.0, 0.5,
         0.0, -0.9, 0.7, 1.0,
         0.0, 0.0, 0.6, 3.0,
         0.0, 0.0, 0.0, 0.1;
    CHECK(spectral_radius(U) == doctest::Approx(0.9).epsilon(1e-10));
    Eigen::Matrix4d R = Eigen::Matrix4d::Zero();  // rotation block: eigenvalues +-0.8i
    R(0, 1) = -0.8;
    R(1, 0) = 0.8;
    R(2, 2) = 0.5;
    CHECK(spectral_radius(R) == doctest::Approx(0.8).epsilon(1e-10));
    CHECK(spectral_radius(Eigen::Matrix4d::Zero()) == 0.0);
    Eigen::Matrix4d nan = Eigen::Matrix4d::Identity();
    nan(0, 0) = std::nan("");
    CHECK_THROWS_AS(spectral_radius(nan), DomainError);
}

TEST_CASE("spectral radius of C matches the quartic root oracle") {
    const auto C = build_C(kDesignTheta).C;
    CHECK(std::abs(spectral_radius(C) - quartic_oracle(C)) < 1e-6);
    std::mt19937_64 gen(5);
    for (int i = 0; i < 50; ++i) {
        const auto Ci = build_C(random_feasible(gen), 2000).C;
        CHECK(std::abs(spectral_radius(Ci) - quartic_oracle(Ci)) < 1e-6);
    }
}

TEST_CASE("a1 + a2 is always an eigenvalue, so rho >= a1 + a2") {
    std::mt19937_64 gen(17);
    for (int i = 0; i < 100; ++i) {
        const auto th = random_feasible(gen);
        const auto C = build_C(th, 2000).C;
        const double s = th.a1 + th.a2;
        CHECK(std::abs((C - s * Eigen::Matrix4d::Identity()).determinant()) < 1e-10);
        CHECK(spectral_radius(C) >= s - 1e-12);
    }
    auto th = kDesignTheta;
    th.a1 = 0.5;
    th.a2 = 0.6;
    const auto rep = check_stability(th);
    CHECK(rep.rho >= 1.1 - 1e-12);
    CHECK_FALSE(rep.stable);
    CHECK_FALSE(rep.bound);
}

TEST_CASE("the FIGARCH row keeps rho at or above one") {
    // Row 3 of C sums to (b2 - b1 + d) + b1 + (1 - d - b2) = 1 and row 1 dominates it,
    // so the cubic factor is non-positive at 1 and rho(C) >= 1 on the feasible set.
    std::mt19937_64 gen(23);
    std::size_t stable = 0;
    for (int i = 0; i < 100; ++i) {
        const auto th = random_feasible(gen);
        const auto rep = check_stability(th, 2000);
        CHECK(rep.C.row(2).sum() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(rep.rho >= 1.0 - 1e-9);
        if (rep.stable) {
            ++stable;
            for (int k = 0; k < 4; ++k) CHECK((*rep.bound)(k) > 0.0);
        }
    }
    CHECK(stable == 0);
}

TEST_CASE("zero-feedback unit-memory case") {
    const ThetaFull th{0.5, 0.0, 0.0, 0.8, 0.0, 0.0, 1.0, 0.0};
    const auto rep = check_stability(th, 100);
    CHECK(rep.C(1, 1) == 0.0);
    CHECK(rep.tail_sum == 0.0);
    CHECK(rep.rho == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_FALSE(rep.stable);
    CHECK(rep.A(0) == doctest::Approx(0.5 + 0.3));
    CHECK(rep.A(1) == 0.5);
    CHECK(rep.A(2) == 0.8);
    CHECK(rep.A(3) == 0.0);
}

TEST_CASE("increasing a2 never decreases rho") {
    for (double a1 : {0.0, 0.2, 0.4}) {
        double prev = 0.0;
        for (double a2 = 0.0; a2 <= 0.6; a2 += 0.05) {
            const ThetaFull th{0.3, a1, a2, 0.2, 0.2, 0.05, 0.5, 1.0};
            const double rho = check_stability(th, 2000).rho;
            CHECK(rho >= prev - 1e-12);
            prev = rho;
        }
    }
}
