#include "sthygarch/errors.hpp"
#include "sthygarch/fracdiff.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <doctest.h>

#include <cmath>
#include <vector>

using namespace sthygarch;

namespace {

// pi_i = d Gamma(i - d) / (Gamma(1 - d) Gamma(i + 1))
double pi_gamma(double d, int i) {
    return d * boost::math::tgamma_ratio(i - d, i + 1.0) / boost::math::tgamma(1.0 - d);
}

} // namespace

TEST_CASE("pi coefficients match the Gamma-ratio closed form") {
    for (int k = 1; k <= 9; ++k) {
        const double d = 0.1 * k;
        const auto c = pi_coeffs(d, 50);
        for (int i = 1; i <= 50; ++i) {
            const double ref = pi_gamma(d, i);
            CHECK(std::abs(c.pi[i - 1] - ref) / ref < 1e-12);
        }
    }
}

TEST_CASE("pi coefficients at the ends of the memory range") {
    const auto zero = pi_coeffs(0.0, 10);
    for (double p : zero.pi) CHECK(p == 0.0);

    const auto one = pi_coeffs(1.0, 10);
    CHECK(one.pi[0] == 1.0);
    for (std::size_t i = 1; i < one.pi.size(); ++i) CHECK(one.pi[i] == 0.0);

    const auto half = pi_coeffs(0.5, 3);
    CHECK(half.pi[0] == doctest::Approx(0.5));
    CHECK(half.pi[1] == doctest::Approx(0.125));
    CHECK(half.pi[2] == doctest::Approx(0.0625));
}

TEST_CASE("pi coefficients are positive and decreasing for 0 < d < 1") {
    const auto c = pi_coeffs(0.37, 2000);
    CHECK(c.pi.size() == 2000);
    for (std::size_t i = 0; i < c.pi.size(); ++i) {
        CHECK(c.pi[i] > 0.0);
        if (i > 0) CHECK(c.pi[i] < c.pi[i - 1]);
    }
}

TEST_CASE("invalid memory parameter or truncation is rejected") {
    CHECK_THROWS_AS(pi_coeffs(-0.1, 10), DomainError);
    CHECK_THROWS_AS(pi_coeffs(1.2, 10), DomainError);
    CHECK_THROWS_AS(pi_coeffs(0.4, 0), DomainError);
    CHECK_THROWS_AS(pi_coeffs(std::nan(""), 10), DomainError);
    CHECK_THROWS_AS(pi_coeffs_dd(0.0, 10), DomainError);
    CHECK_THROWS_AS(pi_coeffs_dd(1.0, 10), DomainError);
}

TEST_CASE("derivative of pi with respect to d matches central differences") {
    const double h = 1e-6;
    for (double d : {0.15, 0.5, 0.83}) {
        const auto c = pi_coeffs_dd(d, 200);
        REQUIRE(c.has_derivative());
        const auto up = pi_coeffs(d + h, 200);
        const auto dn = pi_coeffs(d - h, 200);
        for (std::size_t i = 0; i < 200; ++i) {
            const double fd = (up.pi[i] - dn.pi[i]) / (2 * h);
            CHECK(std::abs(c.dpi_dd[i] - fd) <= 1e-7 * std::max(std::abs(fd), 1e-3));
        }
        const auto again = pi_derivative(c);
        for (std::size_t i = 0; i < 200; ++i) CHECK(again[i] == c.dpi_dd[i]);
    }
}

TEST_CASE("truncated mass agrees with direct summation and its asymptote") {
    for (double d : {0.2, 0.45, 0.6, 0.9}) {
        const auto c = pi_coeffs(d, 5000);
        double sum = 0.0;
        for (std::size_t k = 1; k <= 5000; ++k) {
            sum += c.pi[k - 1];
            if (k == 10 || k == 100 || k == 5000) CHECK(truncated_mass(d, k) == doctest::Approx(1.0 - sum).epsilon(1e-10));
        }
        const double asym = std::pow(5000.0, -d) / std::tgamma(1.0 - d);
        CHECK(truncated_mass(d, 5000) == doctest::Approx(asym).epsilon(1e-3));
    }
    CHECK(truncated_mass(0.6, 1000) < 1e-2);
    CHECK(truncated_mass(1.0, 5) == 0.0);
    CHECK(truncated_mass(0.0, 5) == 1.0);
}

TEST_CASE("lagged sum equals a straight loop with presample fill") {
    const std::vector<double> coeffs{0.5, 0.25, 0.125, 0.0625};
    const LaggedSum sum(coeffs);
    CHECK(sum.order() == 4);
    const std::vector<double> x{1.0, -2.0, 3.0, 4.0, -5.0, 6.0};
    const double pre = 0.7;
    for (std::size_t t = 0; t <= x.size(); ++t) {
        // history x_1..x_t, value for index t + 1
        double ref = 0.0;
        for (std::size_t i = 1; i <= coeffs.size(); ++i) {
            const double v = i <= t ? x[t - i] : pre;
            ref += coeffs[i - 1] * v;
        }
        CHECK(sum.at(std::span<const double>(x.data(), t), pre) == doctest::Approx(ref).epsilon(1e-15));
    }
}
