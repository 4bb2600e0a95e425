#pragma once

#include <functional>
#include <span>

namespace hti {

struct QuadratureOptions {
    double abs_tol = 1e-9;
    double rel_tol = 1e-8;
    int max_intervals = 4000;
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    int evaluations = 0;
    bool converged = true;
};

using Integrand = std::function<double(double)>;

/// Globally adaptive 15-point Gauss-Kronrod rule on [a, b]: the panel with the
/// largest error estimate is bisected until the summed estimate falls below
/// max(abs_tol, rel_tol * |value|).
[[nodiscard]] QuadratureResult integrate(const Integrand& f, double a, double b, const QuadratureOptions& opt = {});

/// Same, seeded with the panels delimited by the ascending `points`
/// (kinks and jumps of f should be among them).
[[nodiscard]] QuadratureResult integrate_panels(const Integrand& f, std::span<const double> points,
                                                const QuadratureOptions& opt = {});

}  // namespace hti
