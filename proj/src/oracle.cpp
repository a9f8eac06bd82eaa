#include "nmqj/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "nmqj/errors.hpp"
#include "nmqj/quadrature.hpp"

namespace nmqj {

namespace {

bool has_transition(const Operator& op, std::size_t target, std::size_t source) {
    for (std::size_t i = 0; i < op.dim(); ++i) {
        for (std::size_t j = 0; j < op.dim(); ++j) {
            const bool expected = (i == target && j == source);
            if (expected != (std::abs(op(i, j)) > 0.0)) {
                return false;
            }
        }
    }
    return true;
}

void validate_layout(const ModelSpec& m) {
    struct T {
        std::size_t target, source;
    };
    std::vector<T> layout;
    std::size_t dim = 3;
    switch (m.kind) {
        case ModelKind::JaynesCummings:
            dim = 2;
            layout = {{1, 0}};
            break;
        case ModelKind::Lambda:
            layout = {{1, 0}, {2, 0}};
            break;
        case ModelKind::Vee:
            layout = {{2, 0}, {2, 1}};
            break;
        case ModelKind::Ladder:
            layout = {{1, 0}, {2, 1}};
            break;
    }
    bool ok = m.dim == dim && m.channels.size() == layout.size();
    for (std::size_t j = 0; ok && j < layout.size(); ++j) {
        ok = has_transition(m.channels[j].jump, layout[j].target, layout[j].source);
    }
    if (!ok) {
        throw UnsupportedModel("no closed-form solution for this channel layout");
    }
}

std::size_t nested_count(ModelKind kind) {
    switch (kind) {
        case ModelKind::Lambda:
            return 2;
        case ModelKind::Ladder:
            return 1;
        default:
            return 0;
    }
}

struct Accumulated {
    std::vector<double> decay;  // D_i(t)
    std::vector<double> lamb;   // L_i(t), zero when the Lamb shift is off
};

Accumulated accumulated(const ModelSpec& m, double t) {
    Accumulated a;
    for (const auto& ch : m.channels) {
        a.decay.push_back(ch.rate->accumulated_decay(t));
        a.lamb.push_back(m.lamb_shift_enabled ? ch.rate->accumulated_lamb_shift(t) : 0.0);
    }
    return a;
}

// e^{-(i phase + damping)}
Complex decay_factor(double phase, double damping) {
    return std::exp(Complex{-damping, -phase});
}

DensityMatrix assemble(const ModelSpec& m, double t, std::span<const double> nested) {
    const DensityMatrix r0 = outer(m.initial_state);
    const Accumulated acc = accumulated(m, t);
    const auto& D = acc.decay;
    const auto& L = acc.lamb;
    DensityMatrix r(m.dim);
    const double aa = r0(0, 0).real();
    const double bb = r0(1, 1).real();

    switch (m.kind) {
        case ModelKind::JaynesCummings: {
            const double e1 = std::exp(-D[0]);
            r(0, 0) = e1 * aa;
            r(1, 1) = (1.0 - e1) * aa + bb;
            r(0, 1) = decay_factor(L[0], 0.5 * D[0]) * r0(0, 1);
            break;
        }
        case ModelKind::Lambda: {
            const double cc = r0(2, 2).real();
            const double e12 = std::exp(-(D[0] + D[1]));
            const Complex coh = decay_factor(L[0] + L[1], 0.5 * (D[0] + D[1]));
            r(0, 0) = e12 * aa;
            r(1, 1) = nested[0] * aa + bb;
            r(2, 2) = nested[1] * aa + cc;
            r(0, 1) = coh * r0(0, 1);
            r(0, 2) = coh * r0(0, 2);
            r(1, 2) = r0(1, 2);
            break;
        }
        case ModelKind::Vee: {
            const double cc = r0(2, 2).real();
            const double e1 = std::exp(-D[0]);
            const double e2 = std::exp(-D[1]);
            r(0, 0) = e1 * aa;
            r(1, 1) = e2 * bb;
            r(2, 2) = (1.0 - e1) * aa + (1.0 - e2) * bb + cc;
            r(0, 1) = decay_factor(L[0] - L[1], 0.5 * (D[0] + D[1])) * r0(0, 1);
            r(0, 2) = decay_factor(L[0], 0.5 * D[0]) * r0(0, 2);
            r(1, 2) = decay_factor(L[1], 0.5 * D[1]) * r0(1, 2);
            break;
        }
        case ModelKind::Ladder: {
            const double cc = r0(2, 2).real();
            const double e1 = std::exp(-D[0]);
            const double e2 = std::exp(-D[1]);
            r(0, 0) = e1 * aa;
            r(1, 1) = e2 * nested[0] * aa + e2 * bb;
            r(2, 2) = (1.0 - e1 - e2 * nested[0]) * aa + (1.0 - e2) * bb + cc;
            r(0, 1) = decay_factor(L[0] - L[1], 0.5 * (D[0] + D[1])) * r0(0, 1);
            r(0, 2) = decay_factor(L[0], 0.5 * D[0]) * r0(0, 2);
            r(1, 2) = decay_factor(L[1], 0.5 * D[1]) * r0(1, 2);
            break;
        }
    }
    for (std::size_t i = 0; i < m.dim; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            r(i, j) = std::conj(r(j, i));
        }
    }
    return r;
}

// Integrand of nested integral `which` at time s.
double nested_integrand(const ModelSpec& m, std::size_t which, double s) {
    const double d1 = m.channels[0].rate->accumulated_decay(s);
    const double d2 = m.channels[1].rate->accumulated_decay(s);
    if (m.kind == ModelKind::Lambda) {
        return m.channels[which].rate->decay_rate(s) * std::exp(-(d1 + d2));
    }
    return m.channels[0].rate->decay_rate(s) * std::exp(-d1 + d2);
}

}  // namespace

AnalyticSolution::AnalyticSolution(ModelSpec model, double t_max, double h)
    : model_(std::move(model)), h_(h) {
    validate_layout(model_);
    if (!(h > 0.0)) {
        throw InvalidParameter("analytic solution: grid step must be positive");
    }
    const auto n = static_cast<std::size_t>(std::ceil(t_max / h));
    for (std::size_t w = 0; w < nested_count(model_.kind); ++w) {
        NestedIntegral table;
        table.values.assign(n + 1, 0.0);
        double coarse = 0.0;
        double fine = 0.0;
        double left = integrand(w, 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            const double s0 = static_cast<double>(k) * h;
            const double mid = integrand(w, s0 + 0.5 * h);
            const double right = integrand(w, s0 + h);
            coarse += 0.5 * h * (left + right);
            fine += 0.25 * h * (left + 2.0 * mid + right);
            richardson_error_ = std::max(richardson_error_, std::abs(fine - coarse) / 3.0);
            table.values[k + 1] = fine + (fine - coarse) / 3.0;
            left = right;
        }
        tables_.push_back(std::move(table));
    }
}

double AnalyticSolution::integrand(std::size_t which, double s) const {
    return nested_integrand(model_, which, s);
}

double AnalyticSolution::nested(std::size_t which, double t) const {
    const auto& values = tables_[which].values;
    const double x = t / h_;
    const double nearest = std::round(x);
    auto k = static_cast<std::size_t>(std::abs(x - nearest) < 1e-9 ? nearest : std::floor(x));
    k = std::min(k, values.size() - 1);
    const double base = static_cast<double>(k) * h_;
    const double rest =
        t > base + 1e-9 * h_ ? integrate_adaptive([&](double s) { return integrand(which, s); }, base, t,
                                      1e-13)
                 : 0.0;
    return values[k] + rest;
}

DensityMatrix AnalyticSolution::operator()(double t) const {
    if (t < 0.0) {
        throw NegativeTime("analytic solution requested at negative time");
    }
    std::vector<double> n(tables_.size());
    for (std::size_t w = 0; w < tables_.size(); ++w) {
        n[w] = nested(w, t);
    }
    return assemble(model_, t, n);
}

DensityMatrix analytic_density(const ModelSpec& model, double t) {
    validate_layout(model);
    if (t < 0.0) {
        throw NegativeTime("analytic solution requested at negative time");
    }
    std::vector<double> n(nested_count(model.kind));
    for (std::size_t w = 0; w < n.size(); ++w) {
        n[w] = integrate_adaptive([&](double s) { return nested_integrand(model, w, s); }, 0.0,
                                  t, 1e-8);
    }
    return assemble(model, t, n);
}

std::vector<double> time_grid(double t_max, double step) {
    const auto n = static_cast<std::size_t>(std::llround(t_max / step));
    std::vector<double> out(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        out[k] = static_cast<double>(k) * step;
    }
    return out;
}

TrajectorySeries analytic_series(const ModelSpec& model, std::span<const double> times) {
    const double t_max = times.empty() ? 0.0 : *std::max_element(times.begin(), times.end());
    AnalyticSolution solution(model, t_max);
    TrajectorySeries series;
    series.dim = model.dim;
    for (double t : times) {
        series.times.push_back(t);
        series.rho.push_back(solution(t));
        std::vector<double> r;
        for (const auto& ch : model.channels) {
            r.push_back(ch.rate->decay_rate(t));
        }
        series.rates.push_back(std::move(r));
    }
    return series;
}

TrajectorySeries integrate_master_equation(const ModelSpec& model, double t_max, double dt_int,
                                           double record_dt) {
    if (!(record_dt > 0.0)) {
        throw InvalidParameter("record step must be positive");
    }
    const auto times = time_grid(t_max, record_dt);
    return integrate_master_equation(model, times, dt_int);
}

TrajectorySeries integrate_master_equation(const ModelSpec& model,
                                           std::span<const double> record_times, double dt_int) {
    if (!(dt_int > 0.0)) {
        throw InvalidParameter("integration step must be positive");
    }
    TrajectorySeries series;
    series.dim = model.dim;
    auto rates_at = [&](double t) {
        std::vector<double> r;
        for (const auto& ch : model.channels) {
            r.push_back(ch.rate->decay_rate(t));
        }
        return r;
    };
    auto rhs = [&](const DensityMatrix& r, double t) { return master_equation_rhs(model, r, t); };

    const double h = dt_int;
    const Complex half{0.5 * h, 0.0}, full{h, 0.0}, sixth{h / 6.0, 0.0}, two{2.0, 0.0};
    DensityMatrix rho = outer(model.initial_state);
    std::size_t step = 0;
    for (double target : record_times) {
        const double exact = target / h;
        const auto target_step = static_cast<std::size_t>(std::llround(exact));
        if (std::abs(exact - static_cast<double>(target_step)) > 1e-6 || target_step < step) {
            throw InvalidParameter("record times must be ascending multiples of dt_int");
        }
        for (; step < target_step; ++step) {
            const double t = static_cast<double>(step) * h;
            const DensityMatrix k1 = rhs(rho, t);
            const DensityMatrix k2 = rhs(rho + half * k1, t + 0.5 * h);
            const DensityMatrix k3 = rhs(rho + half * k2, t + 0.5 * h);
            const DensityMatrix k4 = rhs(rho + full * k3, t + h);
            rho += sixth * (k1 + two * k2 + two * k3 + k4);
        }
        series.times.push_back(target);
        series.rho.push_back(rho);
        series.rates.push_back(rates_at(target));
    }
    return series;
}

std::optional<double> positivity_scan(const TrajectorySeries& series, double tol) {
    for (std::size_t k = 0; k < series.size(); ++k) {
        if (min_eigenvalue(series.rho[k]) < -tol) {
            return series.times[k];
        }
    }
    return std::nullopt;
}

bool rate_equation_sign_check(const ModelSpec& model, const TrajectorySeries& series) {
    if (model.kind != ModelKind::JaynesCummings || model.channels.size() != 1) {
        throw UnsupportedModel("rate-equation sign check applies to the two-level model");
    }
    const auto& rate = *model.channels[0].rate;
    constexpr int kProbe = 16;
    for (std::size_t k = 0; k + 1 < series.size(); ++k) {
        const double t0 = series.times[k];
        const double t1 = series.times[k + 1];
        int sign = 0;
        bool mixed = false;
        double peak = 0.0;
        for (int p = 0; p <= kProbe; ++p) {
            const double d = rate.decay_rate(t0 + (t1 - t0) * p / kProbe);
            const int s = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
            if (s == 0 || (sign != 0 && s != sign)) {
                mixed = true;
                break;
            }
            sign = s;
            peak = std::max(peak, std::abs(d));
        }
        if (mixed) {
            continue;
        }
        const double slack = (t1 - t0) * peak * 1e-2;
        const auto& r0 = series.rho[k];
        const auto& r1 = series.rho[k + 1];
        const double d_aa = r1(0, 0).real() - r0(0, 0).real();
        const double d_bb = r1(1, 1).real() - r0(1, 1).real();
        const double d_ab = std::abs(r1(0, 1)) - std::abs(r0(0, 1));
        // Negative window: rho_aa up, rho_bb down, coherence up.
        const double dir = sign < 0 ? 1.0 : -1.0;
        if (dir * d_aa < -slack || -dir * d_bb < -slack || dir * d_ab < -slack) {
            return false;
        }
    }
    return true;
}

}  // namespace nmqj
