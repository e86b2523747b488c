#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace sthygarch {

// Returns f(x) and writes the gradient into `grad`. A non-finite return marks x as unusable.
using Objective = std::function<double(std::span<const double> x, std::span<double> grad)>;

struct BfgsOptions {
    std::size_t max_iter = 500;
    double grad_tol = 1e-6;       // sup-norm
    double rel_obj_tol = 1e-10;   // stagnation test on accepted steps
    std::size_t stall_limit = 3;  // consecutive stagnant steps before giving up
    double first_step = 1.0;      // sup-norm bound on the first trial step
    bool record_trace = false;
};

struct BfgsResult {
    std::vector<double> x;
    double f = 0.0;
    double grad_norm = 0.0;
    std::size_t iterations = 0;
    std::size_t evaluations = 0;
    bool converged = false;
    std::string stop_reason;
    std::vector<double> trace;  // f after every accepted step, starting point first
};

/**
 * Minimizes with BFGS on the inverse Hessian and a strong-Wolfe line search
 * (c1 = 1e-4, c2 = 0.9). Accepted steps always satisfy sufficient decrease, so
 * the trace is non-increasing. Throws ConfigurationError if f(x0) is not finite.
 */
BfgsResult minimize_bfgs(const Objective& objective, std::vector<double> x0, const BfgsOptions& options = {});

} // namespace sthygarch
