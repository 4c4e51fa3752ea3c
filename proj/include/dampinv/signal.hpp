#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace dampinv {

/// Scalar time modulation lambda(t), sampled on t_i = i dt, i = 0..steps.
class Modulation {
 public:
  Modulation(std::vector<double> samples, double dt);

  template <typename F>
  static Modulation from_function(F&& f, double tau, std::size_t steps) {
    const double dt = tau / static_cast<double>(steps);
    std::vector<double> s(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i) s[i] = f(static_cast<double>(i) * dt);
    return Modulation(std::move(s), dt);
  }

  static Modulation constant(double c, double tau, std::size_t steps);

  std::span<const double> samples() const { return samples_; }
  std::size_t steps() const { return samples_.size() - 1; }
  double dt() const { return dt_; }
  double tau() const { return dt_ * static_cast<double>(steps()); }
  double lambda0() const { return samples_.front(); }
  double operator[](std::size_t i) const { return samples_[i]; }

  /// Linear interpolation; constant extension outside [0, tau].
  double at(double t) const;

  /// ||lambda'||_{L2(0,tau)}: centred differences (one-sided at the ends),
  /// trapezoid quadrature.
  double hprime_l2() const;

  Modulation scaled(double c) const;

 private:
  std::vector<double> samples_;
  double dt_;
};

/// Vector-valued samples h(t_i) in a finite observation space, stored
/// row-major as [step][component].
class TimeSignal {
 public:
  TimeSignal(std::size_t steps, std::size_t dim, double dt);
  TimeSignal(std::vector<double> data, std::size_t dim, double dt);

  std::size_t steps() const { return data_.size() / dim_ - 1; }
  std::size_t dim() const { return dim_; }
  double dt() const { return dt_; }
  double tau() const { return dt_ * static_cast<double>(steps()); }

  double& operator()(std::size_t step, std::size_t c) { return data_[step * dim_ + c]; }
  double operator()(std::size_t step, std::size_t c) const { return data_[step * dim_ + c]; }
  std::span<const double> row(std::size_t step) const {
    return std::span<const double>(data_).subspan(step * dim_, dim_);
  }
  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  /// Trapezoid-in-time inner product with the Euclidean product on components.
  double inner(const TimeSignal& other) const;
  double l2_norm() const;

  /// Componentwise time derivative: centred differences, one-sided ends.
  TimeSignal derivative() const;

 private:
  std::vector<double> data_;
  std::size_t dim_;
  double dt_;
};

/// CSV with header "t,component,value", one row per (step, component).
void write_time_signal_csv(std::ostream& os, const TimeSignal& h);

}  // namespace dampinv
