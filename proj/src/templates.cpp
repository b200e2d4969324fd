#include "anhkit/signal.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace anh {

namespace {

constexpr std::size_t kPeriodSamples = 512;

// Periodic Gaussian bump on the unit circle of phase, centre and width in
// fractions of a period.
double wrapped_bump(double u, double centre, double width) {
  double acc = 0.0;
  for (int shift = -1; shift <= 1; ++shift) {
    const double d = u - centre + static_cast<double>(shift);
    acc += std::exp(-0.5 * d * d / (width * width));
  }
  return acc;
}

}  // namespace

std::vector<WaveShape> bundled_pulse_templates(std::size_t count) {
  // Fixed generator seed: the template pool is part of the test fixtures.
  std::mt19937_64 rng(0x5eed'0a0e'7a5eULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  std::vector<WaveShape> out;
  out.reserve(count);
  std::vector<double> period(kPeriodSamples);
  for (std::size_t i = 0; i < count; ++i) {
    const double systole_centre = draw(0.12, 0.2);
    const double systole_width = draw(0.045, 0.075);
    const double reflect_centre = systole_centre + draw(0.1, 0.18);
    const double reflect_width = draw(0.05, 0.09);
    const double reflect_height = draw(0.3, 0.65);
    const double dicrotic_centre = draw(0.42, 0.55);
    const double dicrotic_width = draw(0.035, 0.06);
    const double dicrotic_height = draw(0.08, 0.25);
    const double runoff = draw(0.0, 0.2);
    for (std::size_t m = 0; m < kPeriodSamples; ++m) {
      const double u = static_cast<double>(m) / static_cast<double>(kPeriodSamples);
      period[m] = wrapped_bump(u, systole_centre, systole_width) +
                  reflect_height * wrapped_bump(u, reflect_centre, reflect_width) +
                  dicrotic_height * wrapped_bump(u, dicrotic_centre, dicrotic_width) +
                  runoff * std::exp(-3.0 * u);
    }
    const std::size_t order = 6 + i % 7;
    out.push_back(wsf_from_template(period, order));
  }
  return out;
}

}  // namespace anh
