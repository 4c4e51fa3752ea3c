#pragma once

// Exact spectral objects of the mixed Dirichlet/Neumann Laplacian on the unit
// square, the induced 1-D boundary modes, and the norm machinery used on the
// damped sides.

#include <compare>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace dampinv {

struct ModeIndex {
  int k = 0;
  int l = 0;

  auto operator<=>(const ModeIndex&) const = default;
};

struct Eigenpair {
  ModeIndex mode;
  double lambda = 0.0;  // ((k+1/2)^2 + (l+1/2)^2) pi^2
  double omega = 0.0;   // sqrt(lambda)
};

Eigenpair eigenpair(ModeIndex mode);

/// phi_kl(x, y) = 2 cos((k+1/2) pi x) cos((l+1/2) pi y). Vanishes on x=1 and
/// y=1, has zero normal derivative on x=0 and y=0, unit L2 norm.
double eval_phi2d(ModeIndex mode, double x, double y);

/// Orthonormal boundary mode phi_k(s) = sqrt(2) cos((k+1/2) pi s) on (0,1).
double eval_phi1d(int k, double s);

/// Samples of a real function on the uniform nodes s_i = i/(n-1).
class SampledFunction1D {
 public:
  explicit SampledFunction1D(std::vector<double> values);

  template <typename F>
  static SampledFunction1D sample(F&& f, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
      v[i] = f(static_cast<double>(i) / static_cast<double>(n - 1));
    }
    return SampledFunction1D(std::move(v));
  }

  static SampledFunction1D constant(double c, std::size_t n);

  std::size_t size() const { return values_.size(); }
  double spacing() const { return 1.0 / static_cast<double>(values_.size() - 1); }
  double node(std::size_t i) const { return static_cast<double>(i) * spacing(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }

  /// Piecewise-linear interpolant evaluated at s (clamped to [0,1]).
  double at(double s) const;
  /// Resample the piecewise-linear interpolant onto m nodes.
  SampledFunction1D resampled(std::size_t m) const;

  double min() const;
  double max_abs() const;

  SampledFunction1D operator*(double c) const;
  friend SampledFunction1D operator*(const SampledFunction1D& a, const SampledFunction1D& b);
  friend SampledFunction1D operator-(const SampledFunction1D& a, const SampledFunction1D& b);
  friend SampledFunction1D operator+(const SampledFunction1D& a, const SampledFunction1D& b);

 private:
  std::vector<double> values_;
};

/// Composite trapezoid weights (times the spacing) for n uniform nodes on [0,1].
std::vector<double> trapezoid_weights(std::size_t n);

/// Boundary damping coefficient a = (a1, a2): a1 lives on y=0 (parametrised by
/// x), a2 on x=0 (parametrised by y). Both share the corner value at the origin.
class DampingPair {
 public:
  static constexpr double kAnalyticCornerTol = 1e-12;

  /// Throws InvalidArgument when a1(0) != a2(0) beyond `corner_tol`, when a
  /// value is negative, or when the sample counts differ.
  DampingPair(SampledFunction1D a1, SampledFunction1D a2,
              double corner_tol = kAnalyticCornerTol);

  static DampingPair zero(std::size_t n);
  static DampingPair constant(double c, std::size_t n);

  /// Corner tolerance for reconstructed pairs: one cell of interpolation error.
  static double reconstructed_corner_tol(const SampledFunction1D& a1,
                                         const SampledFunction1D& a2);

  const SampledFunction1D& a1() const { return a1_; }
  const SampledFunction1D& a2() const { return a2_; }
  std::size_t size() const { return a1_.size(); }

  double corner() const { return 0.5 * (a1_[0] + a2_[0]); }
  double min() const;
  double max() const;
  bool is_zero() const;

  /// Class bounds m <= a_j and ||a_j||^2_{H1} <= M, Hoelder exponent alpha.
  double m_lower = 0.0;
  double M_upper = std::numeric_limits<double>::infinity();
  double holder_exponent = 1.0;

  /// True when both sides satisfy the tagged class bounds.
  bool admissible() const;

  DampingPair scaled(double c) const;
  /// (a1, a2) -> (a2, a1); the problem is symmetric under x <-> y.
  DampingPair swapped() const;
  DampingPair resampled(std::size_t n) const;

  /// sqrt(||a1||^2 + ||a2||^2) in L2(0,1).
  double l2_norm() const;

 private:
  SampledFunction1D a1_;
  SampledFunction1D a2_;
};

enum class Side { Gamma11, Gamma12 };

struct FourierCoeffs {
  Side side = Side::Gamma11;
  std::vector<double> coeffs;  // k = 0..N

  int order() const { return static_cast<int>(coeffs.size()) - 1; }
};

/// coeffs[k] = int_0^1 f phi_k by the trapezoid rule. Throws ResolutionError
/// when the highest mode has fewer than 8 samples per period.
FourierCoeffs fourier_project(const SampledFunction1D& f, int order,
                              Side side = Side::Gamma11);

/// sum_k c_k phi_k sampled on n nodes.
SampledFunction1D fourier_synthesize(const FourierCoeffs& c, std::size_t n);

struct SobolevNorms {
  double l2 = 0.0;
  double h1 = 0.0;
  double h_half = 0.0;
};

/// L2 (trapezoid), H1 (L2 plus cellwise difference quotients) and H^{1/2}
/// (L2 plus the Gagliardo double integral by the midpoint rule on cells,
/// diagonal cells excluded).
SobolevNorms sobolev_norms(const SampledFunction1D& f);

/// Gagliardo seminorm squared, the double-integral part of the H^{1/2} norm.
double gagliardo_seminorm_sq(const SampledFunction1D& f);

/// max over node pairs of |f(x)-f(y)| / |x-y|^alpha.
double holder_seminorm(const SampledFunction1D& f, double alpha);

struct MultiplierCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// ||a f||_{H^{1/2}} against (2 alpha - 1)^{-1} (||a||_inf + [a]_alpha) ||f||_{H^{1/2}}.
MultiplierCheck multiplier_bound_check(const SampledFunction1D& a, const SampledFunction1D& f,
                                       double alpha, double rel_tol = 1e-12);

struct CompatResult {
  double value = 0.0;
  bool divergent = false;
  std::vector<double> windows;  // contribution of (2^{-j-1}, 2^{-j}], j = 0, 1, ...
};

/// int_{t_1}^1 |g1 - g2|^2 dt / t with dyadic divergence detection near t = 0:
/// divergent when each of the last three dyadic windows contributes more than
/// `window_tol`.
CompatResult compat_integral(const SampledFunction1D& g1, const SampledFunction1D& g2,
                             double window_tol = 1e-3);

/// Whether (a1 g1, a2 g2) satisfies the corner compatibility condition.
bool damping_compat_check(const DampingPair& a, const SampledFunction1D& g1,
                          const SampledFunction1D& g2, double window_tol = 1e-3);

}  // namespace dampinv
