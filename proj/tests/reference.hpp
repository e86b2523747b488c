#pragma once

// Straight-line reference implementations used as test oracles. They expand
// the FIGARCH polynomial directly instead of using the library's rearranged
// recursion, and share no code with the library beyond the parameter struct.

#include "sthygarch/model.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace reference {

// Coefficients of 1 - b1 B - (1 - b2 B)(1 - B)^d up to B^{K+1}, with (1 - B)^d
// truncated at K terms: lambda_1 = pi_1 + b2 - b1, lambda_j = pi_j - b2 pi_{j-1}.
inline std::vector<double> figarch_lambda(double d, double b1, double b2, std::size_t K) {
    std::vector<double> pi(K + 1, 0.0);
    double p = d;
    for (std::size_t i = 1; i <= K; ++i) {
        pi[i] = p;
        p = p * (static_cast<double>(i) - d) / static_cast<double>(i + 1);
    }
    std::vector<double> lambda(K + 2, 0.0);
    lambda[1] = pi[1] + b2 - b1;
    for (std::size_t j = 2; j <= K; ++j) lambda[j] = pi[j] - b2 * pi[j - 1];
    lambda[K + 1] = -b2 * pi[K];
    return lambda;
}

struct Path {
    std::vector<double> h, h1, h2, w;
};

enum class Z { LaggedReturn, LaggedVariance, Fixed };

/**
 * h_t for t = 1..T given presample y^2 value `pre_sq`, component seeds and a
 * constant presample for the transition (y_s = 0, h_s = seed_h for s <= 0).
 */
inline Path filter(const sthygarch::ThetaFull& th, Z z_kind, double fixed_w, const std::vector<double>& y,
                   double pre_sq, double seed_h1, double seed_h2, double seed_h, std::size_t K) {
    const auto lambda = figarch_lambda(th.d, th.b1, th.b2, K);
    Path out;
    double h1 = seed_h1, h2 = seed_h2;
    const std::size_t T = y.size();
    for (std::size_t t = 1; t <= T; ++t) {
        const double prev_sq = t >= 2 ? y[t - 2] * y[t - 2] : pre_sq;
        h1 = th.a0 + th.a1 * h1 + th.a2 * prev_sq;
        double s = 0.0;
        for (std::size_t j = 1; j <= K + 1; ++j) {
            const double v = t > j ? y[t - j - 1] * y[t - j - 1] : pre_sq;
            s += lambda[j] * v;
        }
        h2 = th.b0 + th.b1 * h2 + s;
        double w = fixed_w;
        if (z_kind != Z::Fixed) {
            double z = 0.0;
            if (z_kind == Z::LaggedReturn) z = t >= 2 ? y[t - 2] : 0.0;
            else z = t >= 2 ? out.h[t - 2] : seed_h;
            w = 1.0 / (1.0 + std::exp(th.gamma * z));
        }
        out.h1.push_back(h1);
        out.h2.push_back(h2);
        out.w.push_back(w);
        out.h.push_back((1.0 - w) * h1 + w * h2);
    }
    return out;
}

inline double loglik(const Path& p, const std::vector<double>& y) {
    double s = 0.0;
    for (std::size_t t = 0; t < y.size(); ++t) {
        s += std::log(2.0 * std::numbers::pi) + std::log(p.h[t]) + y[t] * y[t] / p.h[t];
    }
    return -0.5 * s;
}

} // namespace reference
