#include "sthygarch/fracdiff.hpp"

#include "sthygarch/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sthygarch {

namespace {

void check_args(double d, std::size_t k_max) {
    if (!(d >= 0.0 && d <= 1.0)) {
        throw DomainError("memory parameter d must lie in [0, 1], got " + std::to_string(d));
    }
    if (k_max == 0) {
        throw DomainError("truncation length k_max must be at least 1");
    }
}

} // namespace

FracDiffCoeffs pi_coeffs(double d, std::size_t k_max) {
    check_args(d, k_max);
    FracDiffCoeffs out;
    out.d = d;
    out.k_max = k_max;
    out.pi.resize(k_max);
    out.pi[0] = d;
    for (std::size_t i = 1; i < k_max; ++i) {
        const double fi = static_cast<double>(i);
        out.pi[i] = out.pi[i - 1] * (fi - d) / (fi + 1.0);
    }
    return out;
}

FracDiffCoeffs pi_coeffs_dd(double d, std::size_t k_max) {
    check_args(d, k_max);
    if (d <= 0.0 || d >= 1.0) {
        throw DomainError("coefficient derivatives need 0 < d < 1, got " + std::to_string(d));
    }
    FracDiffCoeffs out = pi_coeffs(d, k_max);
    out.dpi_dd = pi_derivative(out);
    return out;
}

std::vector<double> pi_derivative(const FracDiffCoeffs& coeffs) {
    const double d = coeffs.d;
    std::vector<double> dpi(coeffs.pi.size());
    if (dpi.empty()) return dpi;
    dpi[0] = 1.0;
    for (std::size_t i = 1; i < dpi.size(); ++i) {
        const double fi = static_cast<double>(i);
        dpi[i] = (dpi[i - 1] * (fi - d) - coeffs.pi[i - 1]) / (fi + 1.0);
    }
    return dpi;
}

double truncated_mass(double d, std::size_t k) {
    check_args(d, std::max<std::size_t>(k, 1));
    double mass = 1.0;
    for (std::size_t i = 1; i <= k; ++i) {
        mass *= 1.0 - d / static_cast<double>(i);
    }
    return mass;
}

LaggedSum::LaggedSum(std::span<const double> coeffs)
    : coeffs_(coeffs.begin(), coeffs.end()), suffix_(coeffs.size() + 1, 0.0) {
    for (std::size_t m = coeffs_.size(); m-- > 0;) {
        suffix_[m] = suffix_[m + 1] + coeffs_[m];
    }
}

double LaggedSum::at(std::span<const double> history, double presample) const noexcept {
    // Lags 1..m reach observed data; the remaining lags fall in the presample.
    const std::size_t m = std::min(history.size(), coeffs_.size());
    const double* x = history.data() + history.size();
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        acc += coeffs_[i] * x[-1 - static_cast<std::ptrdiff_t>(i)];
    }
    return acc + presample * suffix_[m];
}

} // namespace sthygarch
