#pragma once

// Fixtures shared by the unit tests. Closed-form signals here are written
// out directly (radians, std::cos) rather than through the library.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <random>
#include <vector>

#include "anhkit/signal.hpp"

namespace anh::test {

inline constexpr double kPi = std::numbers::pi;

inline Signal tone(double f_hz, double fs, std::size_t n, double amplitude = 1.0, double phase = 0.0) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = amplitude * std::cos(2.0 * kPi * f_hz * static_cast<double>(i) / fs + phase);
  }
  return Signal(std::move(v), fs);
}

inline Signal white_noise(std::size_t n, double sigma, std::uint64_t seed, double fs = 3000.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, sigma);
  std::vector<double> v(n);
  for (double& s : v) s = g(rng);
  return Signal(std::move(v), fs);
}

inline Signal sum(const Signal& a, const Signal& b) {
  std::vector<double> v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] + b[i];
  return Signal(std::move(v), a.fs());
}

inline Signal scaled(const Signal& a, double k) {
  std::vector<double> v(a.samples().begin(), a.samples().end());
  for (double& s : v) s *= k;
  return Signal(std::move(v), a.fs());
}

// 70t + (15/2pi) cos(2 pi t) at 3000 Hz for one second.
inline PhaseTrack test_phase(std::size_t n = 3000, double fs = 3000.0) {
  PhaseTrack p;
  p.fs = fs;
  p.phi.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / fs;
    p.phi[i] = 70.0 * t + 15.0 / (2.0 * kPi) * std::cos(2.0 * kPi * t);
  }
  return p;
}

inline WaveShape four_term_shape() {
  return WaveShape::from_polar(std::vector<double>{1.0, 0.7, 0.5, 0.35},
                               std::vector<double>{0.0, 0.3, 0.6, 0.9});
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace anh::test
