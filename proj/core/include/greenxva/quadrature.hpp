#pragma once

#include <functional>
#include <vector>

namespace greenxva::quad {

struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// n-point Gauss-Legendre rule on [a, b].
[[nodiscard]] Rule gauss_legendre(int n, double a = -1.0, double b = 1.0);

// Composite rule: `panels` equal panels on [a, b], each with an n-point
// Gauss-Legendre rule.
[[nodiscard]] Rule composite_gauss_legendre(int n, int panels, double a, double b);

// Adaptive Gauss-Kronrod (7/15) on [a, b]. Throws ConvergenceError when the
// interval budget runs out before |error| <= max(abs_tol, rel_tol * |I|).
[[nodiscard]] double integrate_adaptive(const std::function<double(double)>& f, double a,
                                        double b, double abs_tol = 1e-13,
                                        double rel_tol = 1e-12, int max_intervals = 2000);

}  // namespace greenxva::quad
