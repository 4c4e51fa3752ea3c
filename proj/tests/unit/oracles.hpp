#pragma once

// Independent quadrature helpers for the unit tests. They deliberately avoid
// the library's own weights so a shared bug cannot cancel out.

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

inline constexpr double pi = std::numbers::pi;

/// Composite Simpson on [a, b] with an even number of panels.
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      std::size_t panels = 4096) {
  if (panels % 2) ++panels;
  const double h = (b - a) / static_cast<double>(panels);
  double acc = f(a) + f(b);
  for (std::size_t i = 1; i < panels; ++i) {
    acc += (i % 2 ? 4.0 : 2.0) * f(a + static_cast<double>(i) * h);
  }
  return acc * h / 3.0;
}

/// Plain trapezoid over samples on [0, len].
inline double trapezoid(const std::vector<double>& v, double len = 1.0) {
  const double h = len / static_cast<double>(v.size() - 1);
  double acc = 0.5 * (v.front() + v.back());
  for (std::size_t i = 1; i + 1 < v.size(); ++i) acc += v[i];
  return acc * h;
}

inline double phi1(int k, double s) { return std::sqrt(2.0) * std::cos((k + 0.5) * pi * s); }

inline double phi2(int k, int l, double x, double y) {
  return 2.0 * std::cos((k + 0.5) * pi * x) * std::cos((l + 0.5) * pi * y);
}

inline double lambda(int k, int l) { return ((k + 0.5) * (k + 0.5) + (l + 0.5) * (l + 0.5)) * pi * pi; }

}  // namespace oracle
