#include "dampinv/signal.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include "dampinv/csv.hpp"
#include "dampinv/error.hpp"

namespace dampinv {

Modulation::Modulation(std::vector<double> samples, double dt)
    : samples_(std::move(samples)), dt_(dt) {
  if (samples_.size() < 2) throw InvalidArgument("Modulation needs at least one step");
  if (!(dt_ > 0.0)) throw InvalidArgument("Modulation time step must be positive");
}

Modulation Modulation::constant(double c, double tau, std::size_t steps) {
  return from_function([c](double) { return c; }, tau, steps);
}

double Modulation::at(double t) const {
  const double pos = t / dt_;
  if (pos <= 0.0) return samples_.front();
  const auto last = static_cast<double>(steps());
  if (pos >= last) return samples_.back();
  const auto i = static_cast<std::size_t>(std::floor(pos));
  const double frac = pos - static_cast<double>(i);
  if (frac == 0.0) return samples_[i];
  return (1.0 - frac) * samples_[i] + frac * samples_[i + 1];
}

double Modulation::hprime_l2() const {
  const std::size_t n = samples_.size();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double d = 0.0;
    if (n == 2) {
      d = (samples_[1] - samples_[0]) / dt_;
    } else if (i == 0) {
      d = (-3.0 * samples_[0] + 4.0 * samples_[1] - samples_[2]) / (2.0 * dt_);
    } else if (i == n - 1) {
      d = (3.0 * samples_[n - 1] - 4.0 * samples_[n - 2] + samples_[n - 3]) / (2.0 * dt_);
    } else {
      d = (samples_[i + 1] - samples_[i - 1]) / (2.0 * dt_);
    }
    const double w = (i == 0 || i == n - 1) ? 0.5 * dt_ : dt_;
    acc += w * d * d;
  }
  return std::sqrt(acc);
}

Modulation Modulation::scaled(double c) const {
  std::vector<double> s(samples_);
  for (double& v : s) v *= c;
  return Modulation(std::move(s), dt_);
}

// ---------------------------------------------------------------------------

TimeSignal::TimeSignal(std::size_t steps, std::size_t dim, double dt)
    : data_((steps + 1) * dim, 0.0), dim_(dim), dt_(dt) {
  if (dim == 0) throw InvalidArgument("TimeSignal dimension must be positive");
  if (!(dt > 0.0)) throw InvalidArgument("TimeSignal time step must be positive");
}

TimeSignal::TimeSignal(std::vector<double> data, std::size_t dim, double dt)
    : data_(std::move(data)), dim_(dim), dt_(dt) {
  if (dim == 0 || data_.size() % dim != 0 || data_.size() / dim < 2) {
    throw InvalidArgument("TimeSignal data size inconsistent with dimension");
  }
  if (!(dt > 0.0)) throw InvalidArgument("TimeSignal time step must be positive");
}

double TimeSignal::inner(const TimeSignal& other) const {
  if (other.dim_ != dim_ || other.data_.size() != data_.size()) {
    throw InvalidArgument("TimeSignal::inner: shape mismatch");
  }
  const std::size_t n = steps() + 1;
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row_acc = 0.0;
    for (std::size_t c = 0; c < dim_; ++c) row_acc += (*this)(i, c) * other(i, c);
    acc += ((i == 0 || i == n - 1) ? 0.5 : 1.0) * row_acc;
  }
  return acc * dt_;
}

double TimeSignal::l2_norm() const { return std::sqrt(inner(*this)); }

TimeSignal TimeSignal::derivative() const {
  const std::size_t n = steps() + 1;
  TimeSignal out(steps(), dim_, dt_);
  for (std::size_t c = 0; c < dim_; ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      double d = 0.0;
      if (n == 2) {
        d = ((*this)(1, c) - (*this)(0, c)) / dt_;
      } else if (i == 0) {
        d = ((*this)(1, c) - (*this)(0, c)) / dt_;
      } else if (i == n - 1) {
        d = ((*this)(n - 1, c) - (*this)(n - 2, c)) / dt_;
      } else {
        d = ((*this)(i + 1, c) - (*this)(i - 1, c)) / (2.0 * dt_);
      }
      out(i, c) = d;
    }
  }
  return out;
}

void write_time_signal_csv(std::ostream& os, const TimeSignal& h) {
  os << "t,component,value\n";
  for (std::size_t i = 0; i <= h.steps(); ++i) {
    const std::string t = csv::format(static_cast<double>(i) * h.dt());
    for (std::size_t c = 0; c < h.dim(); ++c) {
      os << t << ',' << c << ',' << csv::format(h(i, c)) << '\n';
    }
  }
}

}  // namespace dampinv
