#include "anhkit/ridge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace anh {

namespace {

using Diff = std::ptrdiff_t;

// Best bin in frame n next to c1 (and c2 two frames away, if any).
std::size_t step(const TfMagnitude& mag, std::size_t n, std::size_t c1, const std::size_t* c2,
                 const RidgeParams& p) {
  const std::size_t lo = c1 > p.max_jump ? c1 - p.max_jump : 0;
  const std::size_t hi = std::min(mag.n_bins - 1, c1 + p.max_jump);
  std::size_t best = lo;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t c = lo; c <= hi; ++c) {
    const double e = mag.at(n, c);
    const auto d1 = static_cast<double>(static_cast<Diff>(c) - static_cast<Diff>(c1));
    double score = e * e - p.lambda * d1 * d1;
    if (c2 != nullptr) {
      const auto d2 = static_cast<double>(static_cast<Diff>(c) - 2 * static_cast<Diff>(c1) +
                                          static_cast<Diff>(*c2));
      score -= p.mu * d2 * d2;
    }
    if (score > best_score) {
      best_score = score;
      best = c;
    }
  }
  return best;
}

}  // namespace

double Ridge::mean_bin() const {
  if (bins.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t b : bins) acc += static_cast<double>(b);
  return acc / static_cast<double>(bins.size());
}

double Ridge::max_freq_hz() const {
  if (freq_hz.empty()) return 0.0;
  return *std::max_element(freq_hz.begin(), freq_hz.end());
}

std::size_t Ridge::max_step() const {
  std::size_t out = 0;
  for (std::size_t n = 1; n < bins.size(); ++n) {
    out = std::max(out, bins[n] > bins[n - 1] ? bins[n] - bins[n - 1] : bins[n - 1] - bins[n]);
  }
  return out;
}

Ridge extract_ridge(const TfMagnitude& mag, const RidgeParams& p) {
  if (mag.n_frames == 0 || mag.n_bins == 0 || mag.values.empty()) {
    throw std::invalid_argument("extract_ridge: empty magnitude matrix");
  }
  if (!(p.lambda >= 0.0) || !(p.mu >= 0.0)) {
    throw std::invalid_argument("extract_ridge: lambda and mu must be >= 0");
  }
  if (p.max_jump < 1) throw std::invalid_argument("extract_ridge: max_jump must be >= 1");

  const auto seed_it = std::max_element(mag.values.begin(), mag.values.end());
  const auto seed = static_cast<std::size_t>(seed_it - mag.values.begin());
  const std::size_t n0 = seed / mag.n_bins;

  std::vector<std::size_t> c(mag.n_frames, 0);
  c[n0] = seed % mag.n_bins;
  for (std::size_t n = n0 + 1; n < mag.n_frames; ++n) {
    c[n] = step(mag, n, c[n - 1], n >= n0 + 2 ? &c[n - 2] : nullptr, p);
  }
  for (std::size_t n = n0; n-- > 0;) {
    c[n] = step(mag, n, c[n + 1], n + 2 <= n0 ? &c[n + 2] : nullptr, p);
  }

  Ridge r;
  r.bins.resize(mag.n_frames);
  r.freq_hz.resize(mag.n_frames);
  for (std::size_t n = 0; n < mag.n_frames; ++n) {
    r.bins[n] = mag.first_bin + c[n];
    r.freq_hz[n] = static_cast<double>(r.bins[n]) * mag.bin_hz;
  }
  return r;
}

TfMagnitude mask_band(const TfMagnitude& mag, const Ridge& ridge, std::size_t half_width) {
  if (half_width < 1) throw std::invalid_argument("mask_band: half_width must be >= 1");
  if (ridge.size() != mag.n_frames) throw std::invalid_argument("mask_band: ridge length mismatch");
  TfMagnitude out = mag;
  for (std::size_t n = 0; n < mag.n_frames; ++n) {
    const auto centre = static_cast<Diff>(ridge.bins[n]) - static_cast<Diff>(mag.first_bin);
    const Diff lo = std::max<Diff>(0, centre - static_cast<Diff>(half_width));
    const Diff hi = std::min<Diff>(static_cast<Diff>(mag.n_bins) - 1, centre + static_cast<Diff>(half_width));
    for (Diff k = lo; k <= hi; ++k) out.at(n, static_cast<std::size_t>(k)) = 0.0;
  }
  return out;
}

std::vector<double> unwrap_cycles(std::span<const Complex> y) {
  std::vector<double> out(y.size());
  double offset = 0.0;
  double prev = 0.0;
  for (std::size_t n = 0; n < y.size(); ++n) {
    const double a = std::arg(y[n]);
    if (n > 0) {
      const double d = a - prev;
      if (d > std::numbers::pi) offset -= 2.0 * std::numbers::pi;
      if (d < -std::numbers::pi) offset += 2.0 * std::numbers::pi;
    }
    prev = a;
    out[n] = (a + offset) / (2.0 * std::numbers::pi);
  }
  return out;
}

ComponentEstimate reconstruct_band(const TFR& tfr, const Ridge& ridge, std::size_t delta_bins) {
  const std::vector<std::size_t> widths(tfr.n_frames, delta_bins);
  return reconstruct_band(tfr, ridge, widths);
}

ComponentEstimate reconstruct_band(const TFR& tfr, const Ridge& ridge,
                                   std::span<const std::size_t> delta_bins) {
  if (ridge.size() != tfr.n_frames || delta_bins.size() != tfr.n_frames) {
    throw std::invalid_argument("reconstruct_band: ridge/width length differs from frame count");
  }
  ComponentEstimate est;
  est.y.resize(tfr.n_frames);
  const double scale = 2.0 / (static_cast<double>(tfr.n_fft) * tfr.window.centre());
  const auto stored_lo = static_cast<Diff>(tfr.first_bin);
  const auto stored_hi = static_cast<Diff>(tfr.first_bin + tfr.n_bins) - 1;
  for (std::size_t n = 0; n < tfr.n_frames; ++n) {
    if (delta_bins[n] < 1) throw std::invalid_argument("reconstruct_band: delta_bins must be >= 1");
    const auto c = static_cast<Diff>(ridge.bins[n]);
    const auto d = static_cast<Diff>(delta_bins[n]);
    Diff lo = c - d + 1;
    Diff hi = c + d - 1;
    if (lo < stored_lo || hi > stored_hi) {
      est.clipped = true;
      lo = std::max(lo, stored_lo);
      hi = std::min(hi, stored_hi);
    }
    Complex acc{};
    const auto row = tfr.frame(n);
    for (Diff k = lo; k <= hi; ++k) acc += row[static_cast<std::size_t>(k - stored_lo)];
    est.y[n] = scale * acc;
  }
  est.amp.amp.resize(tfr.n_frames);
  for (std::size_t n = 0; n < tfr.n_frames; ++n) est.amp.amp[n] = std::abs(est.y[n]);
  est.phase.fs = tfr.fs;
  est.phase.phi = unwrap_cycles(est.y);
  for (std::size_t n = 1; n < est.phase.phi.size(); ++n) {
    if (est.phase.phi[n] < est.phase.phi[n - 1]) {
      est.non_monotone = true;
      break;
    }
  }
  return est;
}

double window_bandwidth_bins(const Window& w, std::size_t n_fft) {
  return static_cast<double>(n_fft) * std::sqrt(w.sigma) / std::numbers::pi;
}

}  // namespace anh
