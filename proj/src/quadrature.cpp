#include "nmqj/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace nmqj {

namespace {

using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;

double adaptive(const std::function<double(double)>& f, double a, double b, double abs_tol,
                int depth) {
    double error = 0.0;
    double l1 = 0.0;
    const double value = Rule::integrate(f, a, b, 0, 0.0, &error, &l1);
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * l1;
    if (error <= std::max(abs_tol, floor) || depth >= 40) {
        return value;
    }
    const double mid = 0.5 * (a + b);
    return adaptive(f, a, mid, 0.5 * abs_tol, depth + 1) +
           adaptive(f, mid, b, 0.5 * abs_tol, depth + 1);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol) {
    if (a == b) {
        return 0.0;
    }
    if (std::abs(b - a) < 1e-12 * std::max(1.0, std::abs(a))) {
        return (b - a) * f(0.5 * (a + b));
    }
    return adaptive(f, a, b, abs_tol, 0);
}

double integrate_panels(const std::function<double(double)>& f, double a, double b,
                        std::size_t panels) {
    panels = std::max<std::size_t>(panels, 1);
    const double h = (b - a) / static_cast<double>(panels);
    double sum = 0.0;
    for (std::size_t k = 0; k < panels; ++k) {
        const double lo = a + static_cast<double>(k) * h;
        sum += Rule::integrate(f, lo, lo + h, 0);
    }
    return sum;
}

}  // namespace nmqj
