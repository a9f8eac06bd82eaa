#pragma once

// Time-dependent decay rates Delta(t) and Lamb-shift rates lambda(t) of a
// zero-temperature structured reservoir. Time is measured in units of the
// inverse reservoir width, frequencies in units of the width.

#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace nmqj {

/// Lorentzian spectral density of a leaky cavity mode,
/// J(nu) = (coupling / 2 pi) * width / ((nu - cavity_freq)^2 + (width / 2)^2).
class LorentzianReservoir {
  public:
    LorentzianReservoir(double coupling, double width = 1.0, double cavity_freq = 1000.0);

    double coupling() const { return coupling_; }
    double width() const { return width_; }
    double cavity_freq() const { return cavity_freq_; }

    double spectral_density(double nu) const;

  private:
    double coupling_;
    double width_;
    double cavity_freq_;
};

/// Rate functions of a single decay channel. All members throw NegativeTime
/// for t < 0.
class ChannelRate {
  public:
    virtual ~ChannelRate() = default;

    virtual double decay_rate(double t) const = 0;
    virtual double lamb_shift_rate(double t) const = 0;

    /// D(t), the integral of decay_rate over [0, t].
    virtual double accumulated_decay(double t) const;
    /// L(t), the integral of lamb_shift_rate over [0, t].
    virtual double accumulated_lamb_shift(double t) const;
};

/// Closed-form rates of a Lorentzian reservoir under the broadband
/// approximation (frequency integral extended to the whole real line).
class LorentzianChannelRate final : public ChannelRate {
  public:
    /// detuning = cavity_freq - Bohr frequency of the transition.
    LorentzianChannelRate(LorentzianReservoir reservoir, double detuning);

    const LorentzianReservoir& reservoir() const { return reservoir_; }
    double detuning() const { return detuning_; }

    double decay_rate(double t) const override;
    double lamb_shift_rate(double t) const override;
    double accumulated_decay(double t) const override;
    double accumulated_lamb_shift(double t) const override;

    /// t -> infinity limits.
    double markov_decay_rate() const;
    double markov_lamb_shift_rate() const;

  private:
    // int_0^t e^{-a s} cos(delta s) ds and int_0^t e^{-a s} sin(delta s) ds
    double damped_cos_integral(double t) const;
    double damped_sin_integral(double t) const;

    LorentzianReservoir reservoir_;
    double detuning_;
};

/// Time-independent rates: the Markovian (Lindblad) limit.
class ConstantChannelRate final : public ChannelRate {
  public:
    explicit ConstantChannelRate(double decay, double lamb_shift = 0.0)
        : decay_(decay), lamb_shift_(lamb_shift) {}

    double decay_rate(double t) const override;
    double lamb_shift_rate(double t) const override;
    double accumulated_decay(double t) const override;
    double accumulated_lamb_shift(double t) const override;

  private:
    double decay_;
    double lamb_shift_;
};

/// Rates from an arbitrary spectral density by direct two-dimensional
/// quadrature of
///   Delta(t)  = 2 int_0^t ds int dnu J(nu) cos[(nu - omega) s]
///   lambda(t) =   int_0^t ds int dnu J(nu) sin[(nu - omega) s]
/// with the frequency integral restricted to [nu_min, nu_max]. The frequency
/// integral uses fixed panels no wider than `resolution` (the narrowest
/// feature of J) nor than a fraction of the oscillation period at s.
class QuadratureChannelRate final : public ChannelRate {
  public:
    QuadratureChannelRate(std::function<double(double)> spectral_density, double bohr_freq,
                          double nu_min, double nu_max, double resolution);

    /// Window [cavity - half_width, cavity + half_width] clipped at nu = 0.
    static QuadratureChannelRate lorentzian(const LorentzianReservoir& reservoir,
                                            double detuning, double half_width = 50.0);

    double decay_rate(double t) const override;
    double lamb_shift_rate(double t) const override;

    /// Values at many (ascending) times, sharing the s-integral between
    /// consecutive sample points.
    std::vector<double> decay_rate(std::span<const double> times) const;
    std::vector<double> lamb_shift_rate(std::span<const double> times) const;

  private:
    std::size_t panels(double s) const;
    double inner_cos(double s) const;
    double inner_sin(double s) const;
    std::vector<double> cumulative(std::span<const double> times,
                                   const std::function<double(double)>& inner) const;

    std::function<double(double)> density_;
    double bohr_freq_;
    double nu_min_;
    double nu_max_;
    double resolution_;
};

/// D(t) or L(t) by adaptive quadrature of the rate (absolute tolerance 1e-8),
/// independent of any closed-form antiderivative.
enum class RateKind { Decay, LambShift };
double accumulated_rate(const ChannelRate& rate, RateKind kind, double t, double abs_tol = 1e-8);

/// Rates sampled on the grid t_n = n * dt, n = 0..steps, for every channel of
/// a model. Read-only after construction.
class RateTable {
  public:
    RateTable() = default;
    RateTable(std::span<const std::shared_ptr<const ChannelRate>> channels, double dt,
              std::size_t steps);

    double dt() const { return dt_; }
    std::size_t steps() const { return steps_; }
    std::size_t channels() const { return decay_.size(); }

    double decay(std::size_t channel, std::size_t step) const { return decay_[channel][step]; }
    double lamb_shift(std::size_t channel, std::size_t step) const {
        return lamb_[channel][step];
    }

  private:
    double dt_ = 0.0;
    std::size_t steps_ = 0;
    std::vector<std::vector<double>> decay_;
    std::vector<std::vector<double>> lamb_;
};

}  // namespace nmqj
