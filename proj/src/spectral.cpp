#include "dampinv/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "dampinv/error.hpp"

namespace dampinv {

using std::numbers::pi;

Eigenpair eigenpair(ModeIndex mode) {
  if (mode.k < 0 || mode.l < 0) {
    throw InvalidArgument("mode indices must be non-negative");
  }
  const double kk = mode.k + 0.5;
  const double ll = mode.l + 0.5;
  const double lambda = (kk * kk + ll * ll) * pi * pi;
  return {mode, lambda, std::sqrt(lambda)};
}

double eval_phi2d(ModeIndex mode, double x, double y) {
  return 2.0 * std::cos((mode.k + 0.5) * pi * x) * std::cos((mode.l + 0.5) * pi * y);
}

double eval_phi1d(int k, double s) {
  return std::numbers::sqrt2 * std::cos((k + 0.5) * pi * s);
}

// ---------------------------------------------------------------------------
// SampledFunction1D

SampledFunction1D::SampledFunction1D(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() < 3) {
    throw InvalidArgument("SampledFunction1D needs at least 3 samples, got " +
                          std::to_string(values_.size()));
  }
}

SampledFunction1D SampledFunction1D::constant(double c, std::size_t n) {
  return SampledFunction1D(std::vector<double>(n, c));
}

double SampledFunction1D::at(double s) const {
  const std::size_t n = values_.size();
  s = std::clamp(s, 0.0, 1.0);
  const double pos = s * static_cast<double>(n - 1);
  auto i = static_cast<std::size_t>(std::floor(pos));
  if (i >= n - 1) return values_[n - 1];
  const double frac = pos - static_cast<double>(i);
  if (frac == 0.0) return values_[i];
  return (1.0 - frac) * values_[i] + frac * values_[i + 1];
}

SampledFunction1D SampledFunction1D::resampled(std::size_t m) const {
  if (m == values_.size()) return *this;
  return sample([this](double s) { return at(s); }, m);
}

double SampledFunction1D::min() const { return *std::min_element(values_.begin(), values_.end()); }

double SampledFunction1D::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

SampledFunction1D SampledFunction1D::operator*(double c) const {
  std::vector<double> out(values_);
  for (double& v : out) v *= c;
  return SampledFunction1D(std::move(out));
}

namespace {

template <typename Op>
SampledFunction1D zip(const SampledFunction1D& a, const SampledFunction1D& b, Op op) {
  if (a.size() != b.size()) {
    throw InvalidArgument("sample counts differ: " + std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()));
  }
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = op(a[i], b[i]);
  return SampledFunction1D(std::move(out));
}

}  // namespace

SampledFunction1D operator*(const SampledFunction1D& a, const SampledFunction1D& b) {
  return zip(a, b, [](double x, double y) { return x * y; });
}
SampledFunction1D operator-(const SampledFunction1D& a, const SampledFunction1D& b) {
  return zip(a, b, [](double x, double y) { return x - y; });
}
SampledFunction1D operator+(const SampledFunction1D& a, const SampledFunction1D& b) {
  return zip(a, b, [](double x, double y) { return x + y; });
}

std::vector<double> trapezoid_weights(std::size_t n) {
  const double h = 1.0 / static_cast<double>(n - 1);
  std::vector<double> w(n, h);
  w.front() = w.back() = 0.5 * h;
  return w;
}

// ---------------------------------------------------------------------------
// DampingPair

DampingPair::DampingPair(SampledFunction1D a1, SampledFunction1D a2, double corner_tol)
    : a1_(std::move(a1)), a2_(std::move(a2)) {
  if (a1_.size() != a2_.size()) {
    throw InvalidArgument("damping sides must share a sample count");
  }
  if (std::abs(a1_[0] - a2_[0]) > corner_tol) {
    throw InvalidArgument("corner condition a1(0) = a2(0) violated: " + std::to_string(a1_[0]) +
                          " vs " + std::to_string(a2_[0]));
  }
  for (std::size_t i = 0; i < a1_.size(); ++i) {
    if (!(a1_[i] >= 0.0) || !(a2_[i] >= 0.0)) {
      throw InvalidArgument("damping must be non-negative and finite");
    }
  }
}

DampingPair DampingPair::zero(std::size_t n) { return constant(0.0, n); }

DampingPair DampingPair::constant(double c, std::size_t n) {
  return {SampledFunction1D::constant(c, n), SampledFunction1D::constant(c, n)};
}

double DampingPair::reconstructed_corner_tol(const SampledFunction1D& a1,
                                             const SampledFunction1D& a2) {
  return std::max({std::abs(a1[1] - a1[0]), std::abs(a2[1] - a2[0]), kAnalyticCornerTol});
}

double DampingPair::min() const { return std::min(a1_.min(), a2_.min()); }

double DampingPair::max() const { return std::max(a1_.max_abs(), a2_.max_abs()); }

bool DampingPair::is_zero() const { return max() == 0.0; }

bool DampingPair::admissible() const {
  if (min() < m_lower) return false;
  const auto n1 = sobolev_norms(a1_);
  const auto n2 = sobolev_norms(a2_);
  return n1.h1 * n1.h1 <= M_upper && n2.h1 * n2.h1 <= M_upper;
}

DampingPair DampingPair::scaled(double c) const {
  DampingPair out(a1_ * c, a2_ * c, std::numeric_limits<double>::infinity());
  out.m_lower = m_lower * c;
  out.M_upper = M_upper * c * c;
  out.holder_exponent = holder_exponent;
  return out;
}

DampingPair DampingPair::swapped() const {
  DampingPair out(a2_, a1_, std::numeric_limits<double>::infinity());
  out.m_lower = m_lower;
  out.M_upper = M_upper;
  out.holder_exponent = holder_exponent;
  return out;
}

DampingPair DampingPair::resampled(std::size_t n) const {
  DampingPair out(a1_.resampled(n), a2_.resampled(n), std::numeric_limits<double>::infinity());
  out.m_lower = m_lower;
  out.M_upper = M_upper;
  out.holder_exponent = holder_exponent;
  return out;
}

double DampingPair::l2_norm() const {
  const double n1 = sobolev_norms(a1_).l2;
  const double n2 = sobolev_norms(a2_).l2;
  return std::sqrt(n1 * n1 + n2 * n2);
}

// ---------------------------------------------------------------------------
// Fourier analysis

FourierCoeffs fourier_project(const SampledFunction1D& f, int order, Side side) {
  if (order < 0) throw InvalidArgument("truncation order must be >= 0");
  const auto n = f.size();
  const double samples_per_period = 2.0 * static_cast<double>(n - 1) / (order + 0.5);
  if (samples_per_period < 8.0) {
    throw ResolutionError("fourier_project: order " + std::to_string(order) + " needs at least " +
                          std::to_string(static_cast<int>(std::ceil(4.0 * (order + 0.5)))) +
                          " cells, have " + std::to_string(n - 1));
  }
  const auto w = trapezoid_weights(n);
  FourierCoeffs out{side, std::vector<double>(static_cast<std::size_t>(order) + 1, 0.0)};
  for (int k = 0; k <= order; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += w[i] * f[i] * eval_phi1d(k, f.node(i));
    out.coeffs[static_cast<std::size_t>(k)] = acc;
  }
  return out;
}

SampledFunction1D fourier_synthesize(const FourierCoeffs& c, std::size_t n) {
  return SampledFunction1D::sample(
      [&](double s) {
        double acc = 0.0;
        for (std::size_t k = 0; k < c.coeffs.size(); ++k) {
          acc += c.coeffs[k] * eval_phi1d(static_cast<int>(k), s);
        }
        return acc;
      },
      n);
}

// ---------------------------------------------------------------------------
// Norms

double gagliardo_seminorm_sq(const SampledFunction1D& f) {
  const std::size_t cells = f.size() - 1;
  std::vector<double> mid(cells);
  for (std::size_t c = 0; c < cells; ++c) mid[c] = 0.5 * (f[c] + f[c + 1]);
  // h^2 |fc - fd|^2 / ((c-d) h)^2: the spacing cancels.
  double acc = 0.0;
  for (std::size_t c = 0; c < cells; ++c) {
    for (std::size_t d = c + 1; d < cells; ++d) {
      const double diff = mid[c] - mid[d];
      const double gap = static_cast<double>(d - c);
      acc += diff * diff / (gap * gap);
    }
  }
  return 2.0 * acc;
}

SobolevNorms sobolev_norms(const SampledFunction1D& f) {
  const auto n = f.size();
  const auto w = trapezoid_weights(n);
  const double h = f.spacing();
  double l2sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) l2sq += w[i] * f[i] * f[i];
  double grad_sq = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double d = f[i + 1] - f[i];
    grad_sq += d * d / h;
  }
  return {std::sqrt(l2sq), std::sqrt(l2sq + grad_sq), std::sqrt(l2sq + gagliardo_seminorm_sq(f))};
}

double holder_seminorm(const SampledFunction1D& f, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw InvalidArgument("Hoelder exponent must lie in (0, 1]");
  }
  const auto n = f.size();
  const double h = f.spacing();
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dist = static_cast<double>(j - i) * h;
      best = std::max(best, std::abs(f[j] - f[i]) / std::pow(dist, alpha));
    }
  }
  return best;
}

MultiplierCheck multiplier_bound_check(const SampledFunction1D& a, const SampledFunction1D& f,
                                       double alpha, double rel_tol) {
  if (!(alpha > 0.5 && alpha <= 1.0)) {
    throw InvalidArgument("multiplier bound needs 1/2 < alpha <= 1");
  }
  const auto af = a * f;
  const double lhs = sobolev_norms(af).h_half;
  const double holder_norm = a.max_abs() + holder_seminorm(a, alpha);
  const double rhs = holder_norm * sobolev_norms(f).h_half / (2.0 * alpha - 1.0);
  return {lhs, rhs, lhs <= rhs * (1.0 + rel_tol)};
}

// ---------------------------------------------------------------------------
// Corner compatibility

CompatResult compat_integral(const SampledFunction1D& g1, const SampledFunction1D& g2,
                             double window_tol) {
  if (g1.size() != g2.size()) throw InvalidArgument("compat_integral: sample counts differ");
  const auto n = g1.size();
  const double h = g1.spacing();
  auto integrand = [&](std::size_t i) {
    const double d = g1[i] - g2[i];
    return d * d / g1.node(i);
  };

  CompatResult out;
  // Cell [t_i, t_{i+1}] for i >= 1 goes to the dyadic window of its midpoint.
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double contrib = 0.5 * h * (integrand(i) + integrand(i + 1));
    const double mid = (static_cast<double>(i) + 0.5) * h;
    const auto j = static_cast<std::size_t>(std::floor(-std::log2(mid)));
    if (out.windows.size() <= j) out.windows.resize(j + 1, 0.0);
    out.windows[j] += contrib;
    out.value += contrib;
  }

  // Only windows (2^{-j-1}, 2^{-j}] lying entirely above t_1 are fully sampled.
  std::size_t full = 0;
  while (full < out.windows.size() && std::ldexp(1.0, -static_cast<int>(full) - 1) >= h) ++full;
  if (full >= 3) {
    out.divergent = out.windows[full - 1] > window_tol && out.windows[full - 2] > window_tol &&
                    out.windows[full - 3] > window_tol;
  }
  return out;
}

bool damping_compat_check(const DampingPair& a, const SampledFunction1D& g1,
                          const SampledFunction1D& g2, double window_tol) {
  if (compat_integral(g1, g2, window_tol).divergent) {
    throw InvalidArgument("damping_compat_check: (g1, g2) is not corner compatible");
  }
  const auto n = g1.size();
  const auto a1 = a.a1().resampled(n);
  const auto a2 = a.a2().resampled(n);
  return !compat_integral(a1 * g1, a2 * g2, window_tol).divergent;
}

}  // namespace dampinv
