#include "anhkit/reference.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace anh::reference {

TFR stft(const Signal& x, const Window& w) {
  const std::size_t n_len = x.size();
  if (w.support() > n_len) throw std::invalid_argument("reference::stft: window too long");
  const std::size_t k_bins = n_len / 2 + 1;
  // exp(-2 pi i j / N) for j = 0..N-1, indexed by (k m) mod N.
  std::vector<Complex> twiddle(n_len);
  for (std::size_t j = 0; j < n_len; ++j) {
    const double theta = -2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n_len);
    twiddle[j] = {std::cos(theta), std::sin(theta)};
  }
  TFR out;
  out.n_frames = n_len;
  out.n_fft = n_len;
  out.first_bin = 0;
  out.n_bins = k_bins;
  out.fs = x.fs();
  out.window = w;
  out.values.assign(n_len * k_bins, Complex{});
  const auto half = static_cast<std::ptrdiff_t>(w.half_length);
  const auto size = static_cast<std::ptrdiff_t>(n_len);
  for (std::ptrdiff_t n = 0; n < size; ++n) {
    for (std::size_t k = 0; k < k_bins; ++k) {
      Complex acc{};
      for (std::ptrdiff_t m = -half; m <= half; ++m) {
        const std::ptrdiff_t idx = n + m;
        if (idx < 0 || idx >= size) continue;
        const auto m_mod = static_cast<std::size_t>((m + size) % size);
        acc += x[static_cast<std::size_t>(idx)] * w.at(m) * twiddle[(k * m_mod) % n_len];
      }
      out.values[static_cast<std::size_t>(n) * k_bins + k] = acc;
    }
  }
  return out;
}

Cepstrum stct(const TFR& tfr, double gamma) {
  if (!tfr.is_full()) throw std::invalid_argument("reference::stct: requires a full TFR");
  const std::size_t n_fft = tfr.n_fft;
  const std::size_t k_bins = tfr.n_bins;
  Cepstrum c;
  c.n_frames = tfr.n_frames;
  c.n_quefrency = k_bins;
  c.fs = tfr.fs;
  c.values.assign(c.n_frames * k_bins, 0.0);
  std::vector<double> mag(n_fft);
  for (std::size_t n = 0; n < tfr.n_frames; ++n) {
    for (std::size_t k = 0; k < n_fft; ++k) {
      const std::size_t folded = k < k_bins ? k : n_fft - k;
      mag[k] = std::pow(std::abs(tfr.at(n, folded)), gamma);
    }
    for (std::size_t j = 0; j < k_bins; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n_fft; ++k) {
        const double theta = 2.0 * std::numbers::pi * static_cast<double>((j * k) % n_fft) /
                             static_cast<double>(n_fft);
        acc += mag[k] * std::cos(theta);
      }
      c.values[n * k_bins + j] = acc;
    }
  }
  return c;
}

}  // namespace anh::reference
