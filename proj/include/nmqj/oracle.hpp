#pragma once

// Independent references for the unraveling: closed-form solutions of the
// four atom models and a fixed-step RK4 integrator of the master equation.

#include <optional>
#include <span>
#include <vector>

#include "nmqj/linalg.hpp"
#include "nmqj/models.hpp"
#include "nmqj/series.hpp"

namespace nmqj {

/// Closed-form density matrix of one of the four atom models, built from the
/// accumulated rates D_i(t), L_i(t). Lamb-shift phases are included only when
/// the model enables the Lamb shift.
///
/// Nested integrals of the form int_0^t Delta_i(s) e^{...} ds (lambda and
/// ladder populations) are tabulated by cumulative trapezoid on a grid of
/// step `h` and on its halving, combined by Richardson extrapolation; the
/// remainder beyond the last grid point is integrated adaptively.
class AnalyticSolution {
  public:
    AnalyticSolution(ModelSpec model, double t_max, double h = 0.001);

    const ModelSpec& model() const { return model_; }
    DensityMatrix operator()(double t) const;

    /// Largest |T_{h/2} - T_h| / 3 over the tabulated nested integrals.
    double richardson_error_estimate() const { return richardson_error_; }

  private:
    struct NestedIntegral {
        std::vector<double> values;  // at s = k h
    };

    double nested(std::size_t which, double t) const;
    double integrand(std::size_t which, double s) const;

    ModelSpec model_;
    double h_;
    std::vector<NestedIntegral> tables_;
    double richardson_error_ = 0.0;
};

/// One-off evaluation; nested integrals by adaptive quadrature (tolerance 1e-8).
/// Throws UnsupportedModel if the channel layout does not match `model.kind`.
DensityMatrix analytic_density(const ModelSpec& model, double t);

/// AnalyticSolution sampled at the given times, with channel rates attached.
TrajectorySeries analytic_series(const ModelSpec& model, std::span<const double> times);

/// Classical RK4 on d rho / dt = L(rho, t) with signed rates, sampled every
/// `record_dt` (which must be a multiple of dt_int) on [0, t_max].
TrajectorySeries integrate_master_equation(const ModelSpec& model, double t_max, double dt_int,
                                           double record_dt);

/// Same integrator sampled at arbitrary ascending times, each a multiple of
/// dt_int.
TrajectorySeries integrate_master_equation(const ModelSpec& model,
                                           std::span<const double> record_times, double dt_int);

/// Earliest time whose density matrix has an eigenvalue below -tol.
std::optional<double> positivity_scan(const TrajectorySeries& series, double tol = 1e-6);

/// Two-level rate-equation structure: on every recording interval lying
/// strictly inside a negative-rate window rho_aa rises, rho_bb falls and
/// |rho_ab| rises; inside positive windows the opposite. Each comparison
/// tolerates a slack of dt |Delta| 1e-2.
bool rate_equation_sign_check(const ModelSpec& model, const TrajectorySeries& series);

/// Uniform grid 0, step, 2 step, ... up to t_max inclusive.
std::vector<double> time_grid(double t_max, double step);

}  // namespace nmqj
