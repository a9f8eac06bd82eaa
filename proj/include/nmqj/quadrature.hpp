#pragma once

#include <cstddef>
#include <functional>

namespace nmqj {

/// Adaptive Gauss-Kronrod integral of f over [a, b] to the given absolute
/// tolerance.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol = 1e-10);

/// Composite 31-point Kronrod rule on `panels` equal panels of [a, b].
double integrate_panels(const std::function<double(double)>& f, double a, double b,
                        std::size_t panels);

}  // namespace nmqj
