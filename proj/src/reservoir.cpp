#include "nmqj/reservoir.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nmqj/errors.hpp"
#include "nmqj/quadrature.hpp"

namespace nmqj {

namespace {

void require_nonnegative(double t) {
    if (t < 0.0 || std::isnan(t)) {
        throw NegativeTime("rate requested at negative time");
    }
}

}  // namespace

LorentzianReservoir::LorentzianReservoir(double coupling, double width, double cavity_freq)
    : coupling_(coupling), width_(width), cavity_freq_(cavity_freq) {
    if (!(coupling > 0.0)) {
        throw InvalidParameter("Lorentzian reservoir: coupling must be positive");
    }
    if (!(width > 0.0)) {
        throw InvalidParameter("Lorentzian reservoir: width must be positive");
    }
}

double LorentzianReservoir::spectral_density(double nu) const {
    const double x = nu - cavity_freq_;
    const double hw = 0.5 * width_;
    return coupling_ / (2.0 * std::numbers::pi) * width_ / (x * x + hw * hw);
}

double ChannelRate::accumulated_decay(double t) const {
    return accumulated_rate(*this, RateKind::Decay, t);
}

double ChannelRate::accumulated_lamb_shift(double t) const {
    return accumulated_rate(*this, RateKind::LambShift, t);
}

// Over the full real line the frequency integral of J(nu) e^{i(nu - omega)s}
// is coupling * e^{-width s / 2} e^{i detuning s}.

LorentzianChannelRate::LorentzianChannelRate(LorentzianReservoir reservoir, double detuning)
    : reservoir_(reservoir), detuning_(detuning) {}

double LorentzianChannelRate::damped_cos_integral(double t) const {
    const double a = 0.5 * reservoir_.width();
    const double d = detuning_;
    const double e = std::exp(-a * t);
    return (a + e * (d * std::sin(d * t) - a * std::cos(d * t))) / (a * a + d * d);
}

double LorentzianChannelRate::damped_sin_integral(double t) const {
    const double a = 0.5 * reservoir_.width();
    const double d = detuning_;
    const double e = std::exp(-a * t);
    return (d - e * (a * std::sin(d * t) + d * std::cos(d * t))) / (a * a + d * d);
}

double LorentzianChannelRate::decay_rate(double t) const {
    require_nonnegative(t);
    return 2.0 * reservoir_.coupling() * damped_cos_integral(t);
}

double LorentzianChannelRate::lamb_shift_rate(double t) const {
    require_nonnegative(t);
    return reservoir_.coupling() * damped_sin_integral(t);
}

double LorentzianChannelRate::accumulated_decay(double t) const {
    require_nonnegative(t);
    const double a = 0.5 * reservoir_.width();
    const double d = detuning_;
    const double s = damped_sin_integral(t);
    const double c = damped_cos_integral(t);
    return 2.0 * reservoir_.coupling() * (a * t + d * s - a * c) / (a * a + d * d);
}

double LorentzianChannelRate::accumulated_lamb_shift(double t) const {
    require_nonnegative(t);
    const double a = 0.5 * reservoir_.width();
    const double d = detuning_;
    const double s = damped_sin_integral(t);
    const double c = damped_cos_integral(t);
    return reservoir_.coupling() * (d * t - d * c - a * s) / (a * a + d * d);
}

double LorentzianChannelRate::markov_decay_rate() const {
    const double a = 0.5 * reservoir_.width();
    return 2.0 * reservoir_.coupling() * a / (a * a + detuning_ * detuning_);
}

double LorentzianChannelRate::markov_lamb_shift_rate() const {
    const double a = 0.5 * reservoir_.width();
    return reservoir_.coupling() * detuning_ / (a * a + detuning_ * detuning_);
}

double ConstantChannelRate::decay_rate(double t) const {
    require_nonnegative(t);
    return decay_;
}

double ConstantChannelRate::lamb_shift_rate(double t) const {
    require_nonnegative(t);
    return lamb_shift_;
}

double ConstantChannelRate::accumulated_decay(double t) const {
    require_nonnegative(t);
    return decay_ * t;
}

double ConstantChannelRate::accumulated_lamb_shift(double t) const {
    require_nonnegative(t);
    return lamb_shift_ * t;
}

QuadratureChannelRate::QuadratureChannelRate(std::function<double(double)> spectral_density,
                                             double bohr_freq, double nu_min, double nu_max,
                                             double resolution)
    : density_(std::move(spectral_density)),
      bohr_freq_(bohr_freq),
      nu_min_(nu_min),
      nu_max_(nu_max),
      resolution_(resolution) {
    if (!(nu_max > nu_min)) {
        throw InvalidParameter("quadrature window is empty");
    }
    if (!(resolution > 0.0)) {
        throw InvalidParameter("quadrature resolution must be positive");
    }
}

QuadratureChannelRate QuadratureChannelRate::lorentzian(const LorentzianReservoir& reservoir,
                                                        double detuning, double half_width) {
    const double cav = reservoir.cavity_freq();
    const double hw = half_width * reservoir.width();
    return QuadratureChannelRate(
        [reservoir](double nu) { return reservoir.spectral_density(nu); }, cav - detuning,
        std::max(0.0, cav - hw), cav + hw, 0.5 * reservoir.width());
}

std::size_t QuadratureChannelRate::panels(double s) const {
    const double width = std::min(resolution_, 2.0 / std::max(std::abs(s), 1e-300));
    return static_cast<std::size_t>(std::ceil((nu_max_ - nu_min_) / width));
}

double QuadratureChannelRate::inner_cos(double s) const {
    return integrate_panels(
        [&](double nu) { return density_(nu) * std::cos((nu - bohr_freq_) * s); }, nu_min_,
        nu_max_, panels(s));
}

double QuadratureChannelRate::inner_sin(double s) const {
    return integrate_panels(
        [&](double nu) { return density_(nu) * std::sin((nu - bohr_freq_) * s); }, nu_min_,
        nu_max_, panels(s));
}

std::vector<double> QuadratureChannelRate::cumulative(
    std::span<const double> times, const std::function<double(double)>& inner) const {
    std::vector<double> out;
    out.reserve(times.size());
    double prev_t = 0.0;
    double acc = 0.0;
    for (double t : times) {
        require_nonnegative(t);
        if (t < prev_t) {
            throw InvalidParameter("quadrature sample times must be ascending");
        }
        acc += integrate_adaptive(inner, prev_t, t, 1e-8);
        out.push_back(acc);
        prev_t = t;
    }
    return out;
}

std::vector<double> QuadratureChannelRate::decay_rate(std::span<const double> times) const {
    auto v = cumulative(times, [this](double s) { return inner_cos(s); });
    for (auto& x : v) {
        x *= 2.0;
    }
    return v;
}

std::vector<double> QuadratureChannelRate::lamb_shift_rate(std::span<const double> times) const {
    return cumulative(times, [this](double s) { return inner_sin(s); });
}

double QuadratureChannelRate::decay_rate(double t) const {
    const double ts[] = {t};
    return decay_rate(std::span<const double>(ts))[0];
}

double QuadratureChannelRate::lamb_shift_rate(double t) const {
    const double ts[] = {t};
    return lamb_shift_rate(std::span<const double>(ts))[0];
}

double accumulated_rate(const ChannelRate& rate, RateKind kind, double t, double abs_tol) {
    require_nonnegative(t);
    if (kind == RateKind::Decay) {
        return integrate_adaptive([&](double s) { return rate.decay_rate(s); }, 0.0, t, abs_tol);
    }
    return integrate_adaptive([&](double s) { return rate.lamb_shift_rate(s); }, 0.0, t,
                              abs_tol);
}

RateTable::RateTable(std::span<const std::shared_ptr<const ChannelRate>> channels, double dt,
                     std::size_t steps)
    : dt_(dt), steps_(steps) {
    decay_.reserve(channels.size());
    lamb_.reserve(channels.size());
    for (const auto& rate : channels) {
        std::vector<double> d(steps + 1), l(steps + 1);
        for (std::size_t n = 0; n <= steps; ++n) {
            const double t = static_cast<double>(n) * dt;
            d[n] = rate->decay_rate(t);
            l[n] = rate->lamb_shift_rate(t);
        }
        decay_.push_back(std::move(d));
        lamb_.push_back(std::move(l));
    }
}

}  // namespace nmqj
