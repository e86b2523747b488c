#include "sthygarch/optimizer.hpp"

#include "sthygarch/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sthygarch {

namespace {

constexpr double kC1 = 1e-4;
constexpr double kC2 = 0.9;
constexpr std::size_t kMaxLineEvals = 40;

double dot(std::span<const double> a, std::span<const double> b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double sup_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

struct Trial {
    double alpha = 0.0;
    double f = 0.0;
    double slope = 0.0;
    std::vector<double> x;
    std::vector<double> g;
};

class LineSearch {
public:
    LineSearch(const Objective& objective, std::span<const double> x, std::span<const double> dir, double f0,
               double slope0, std::size_t& evaluations)
        : objective_(objective), x_(x), dir_(dir), f0_(f0), slope0_(slope0), evaluations_(evaluations) {}

    // Returns false when no step with sufficient decrease was found.
    bool run(double alpha0, Trial& accepted) {
        Trial prev{0.0, f0_, slope0_, {}, {}};
        double alpha = alpha0;
        for (std::size_t i = 0; i < kMaxLineEvals; ++i) {
            Trial cur = eval(alpha);
            if (!std::isfinite(cur.f) || cur.f > f0_ + kC1 * alpha * slope0_ || (i > 0 && cur.f >= prev.f)) {
                return zoom(prev, cur, accepted);
            }
            if (std::abs(cur.slope) <= -kC2 * slope0_) {
                accepted = std::move(cur);
                return true;
            }
            if (cur.slope >= 0.0) {
                return zoom(cur, prev, accepted);
            }
            prev = std::move(cur);
            alpha *= 2.0;
        }
        if (prev.alpha > 0.0) {
            accepted = std::move(prev);
            return true;
        }
        return false;
    }

private:
    Trial eval(double alpha) {
        Trial t;
        t.alpha = alpha;
        t.x.resize(x_.size());
        t.g.assign(x_.size(), 0.0);
        for (std::size_t i = 0; i < x_.size(); ++i) t.x[i] = x_[i] + alpha * dir_[i];
        ++evaluations_;
        t.f = objective_(t.x, t.g);
        t.slope = std::isfinite(t.f) ? dot(t.g, dir_) : 0.0;
        return t;
    }

    // lo satisfies sufficient decrease and has the lowest f seen; hi brackets a minimizer.
    bool zoom(Trial lo, Trial hi, Trial& accepted) {
        for (std::size_t i = 0; i < kMaxLineEvals; ++i) {
            const double width = hi.alpha - lo.alpha;
            double alpha = 0.5 * (lo.alpha + hi.alpha);
            if (std::isfinite(hi.f)) {
                const double denom = 2.0 * (hi.f - lo.f - lo.slope * width);
                if (denom > 0.0) {
                    const double cand = lo.alpha - lo.slope * width * width / denom;
                    const double a = lo.alpha + 0.1 * width;
                    const double b = hi.alpha - 0.1 * width;
                    alpha = std::clamp(cand, std::min(a, b), std::max(a, b));
                }
            }
            if (std::abs(width) < 1e-14 * std::max(1.0, std::abs(lo.alpha))) break;
            Trial cur = eval(alpha);
            if (!std::isfinite(cur.f) || cur.f > f0_ + kC1 * alpha * slope0_ || cur.f >= lo.f) {
                hi = std::move(cur);
                continue;
            }
            if (std::abs(cur.slope) <= -kC2 * slope0_) {
                accepted = std::move(cur);
                return true;
            }
            if (cur.slope * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
            lo = std::move(cur);
        }
        if (lo.alpha > 0.0) {
            accepted = std::move(lo);
            return true;
        }
        return false;
    }

    const Objective& objective_;
    std::span<const double> x_;
    std::span<const double> dir_;
    double f0_;
    double slope0_;
    std::size_t& evaluations_;
};

} // namespace

BfgsResult minimize_bfgs(const Objective& objective, std::vector<double> x0, const BfgsOptions& options) {
    const std::size_t n = x0.size();
    BfgsResult res;
    res.x = std::move(x0);
    std::vector<double> g(n, 0.0);
    res.f = objective(res.x, g);
    res.evaluations = 1;
    if (!std::isfinite(res.f)) {
        throw ConfigurationError("objective is not finite at the starting point");
    }
    if (options.record_trace) res.trace.push_back(res.f);

    // Inverse Hessian approximation, row-major.
    std::vector<double> H(n * n, 0.0);
    auto reset = [&] {
        std::fill(H.begin(), H.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) H[i * n + i] = 1.0;
    };
    reset();
    bool identity = true;
    bool scaled = false;
    std::size_t stalled = 0;
    std::vector<double> dir(n), s(n), y(n), Hy(n);

    res.grad_norm = sup_norm(g);
    while (true) {
        if (res.grad_norm < options.grad_tol) {
            res.converged = true;
            res.stop_reason = "gradient tolerance reached";
            break;
        }
        if (res.iterations >= options.max_iter) {
            res.stop_reason = "iteration limit reached";
            break;
        }

        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc -= H[i * n + j] * g[j];
            dir[i] = acc;
        }
        double slope = dot(dir, g);
        if (!(slope < 0.0)) {
            reset();
            identity = true;
            for (std::size_t i = 0; i < n; ++i) dir[i] = -g[i];
            slope = dot(dir, g);
        }
        double alpha0 = 1.0;
        if (identity && !scaled) alpha0 = std::min(1.0, options.first_step / sup_norm(dir));

        Trial step;
        LineSearch search(objective, res.x, dir, res.f, slope, res.evaluations);
        if (!search.run(alpha0, step)) {
            if (!identity) {
                reset();
                identity = true;
                continue;
            }
            res.stop_reason = "line search failed";
            break;
        }

        for (std::size_t i = 0; i < n; ++i) {
            s[i] = step.x[i] - res.x[i];
            y[i] = step.g[i] - g[i];
        }
        const double sy = dot(s, y);
        const double yy = dot(y, y);
        if (sy > 1e-12 * std::sqrt(dot(s, s) * yy)) {
            if (identity) {
                const double scale = sy / yy;
                for (std::size_t i = 0; i < n; ++i) H[i * n + i] = scale;
                scaled = true;
            }
            // H <- (I - rho s y') H (I - rho y s') + rho s s'
            const double rho = 1.0 / sy;
            for (std::size_t i = 0; i < n; ++i) {
                double acc = 0.0;
                for (std::size_t j = 0; j < n; ++j) acc += H[i * n + j] * y[j];
                Hy[i] = acc;
            }
            const double yHy = dot(y, Hy);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    H[i * n + j] += -rho * (Hy[i] * s[j] + s[i] * Hy[j]) + (rho * rho * yHy + rho) * s[i] * s[j];
                }
            }
            identity = false;
        }

        const double f_old = res.f;
        res.x = std::move(step.x);
        g = std::move(step.g);
        res.f = step.f;
        res.grad_norm = sup_norm(g);
        ++res.iterations;
        if (options.record_trace) res.trace.push_back(res.f);

        if (std::abs(f_old - res.f) <= options.rel_obj_tol * std::max(1.0, std::abs(res.f))) {
            if (++stalled >= options.stall_limit) {
                res.converged = res.grad_norm < options.grad_tol;
                res.stop_reason = "objective stagnated";
                break;
            }
        } else {
            stalled = 0;
        }
    }
    return res;
}

} // namespace sthygarch
