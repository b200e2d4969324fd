#include "anhkit/signal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace anh {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Modulation depth of the HRV phase model (cycles per second per unit weight).
constexpr double kHrvDepth = 0.035;

void remove_mean(std::vector<double>& v) {
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  for (double& s : v) s -= mean;
}

}  // namespace

Signal::Signal(std::vector<double> samples, double fs, double t0)
    : samples_(std::move(samples)), fs_(fs), t0_(t0) {
  if (samples_.size() < 2) {
    throw std::invalid_argument("Signal: at least two samples are required");
  }
  if (!(fs_ > 0.0) || !std::isfinite(fs_)) {
    throw std::invalid_argument("Signal: sampling rate must be positive");
  }
}

double Signal::power() const {
  double acc = 0.0;
  for (double s : samples_) acc += s * s;
  return acc / static_cast<double>(samples_.size());
}

double WaveShape::amplitude(std::size_t l) const {
  return std::hypot(alpha.at(l - 1), beta.at(l - 1));
}

double WaveShape::phase(std::size_t l) const {
  return std::atan2(beta.at(l - 1), alpha.at(l - 1));
}

void WaveShape::validate() const {
  if (alpha.size() != beta.size()) {
    throw std::invalid_argument("WaveShape: alpha and beta differ in length");
  }
  if (alpha.empty()) {
    throw std::invalid_argument("WaveShape: order must be at least 1");
  }
  if (alpha[0] == 0.0 && beta[0] == 0.0) {
    throw std::invalid_argument("WaveShape: fundamental coefficient is zero");
  }
}

WaveShape WaveShape::from_polar(std::span<const double> amplitudes,
                                std::span<const double> phases) {
  if (amplitudes.size() != phases.size()) {
    throw std::invalid_argument("WaveShape::from_polar: size mismatch");
  }
  WaveShape ws;
  ws.alpha.resize(amplitudes.size());
  ws.beta.resize(amplitudes.size());
  for (std::size_t l = 0; l < amplitudes.size(); ++l) {
    ws.alpha[l] = amplitudes[l] * std::cos(phases[l]);
    ws.beta[l] = amplitudes[l] * std::sin(phases[l]);
  }
  return ws;
}

bool is_fundamental_dominant(const WaveShape& ws) {
  const double a1 = ws.amplitude(1);
  for (std::size_t l = 2; l <= ws.order(); ++l) {
    if (!(a1 > ws.amplitude(l))) return false;
  }
  return true;
}

bool PhaseTrack::is_strictly_increasing() const {
  for (std::size_t n = 1; n < phi.size(); ++n) {
    if (!(phi[n] > phi[n - 1])) return false;
  }
  return true;
}

std::vector<double> PhaseTrack::instantaneous_frequency() const {
  std::vector<double> f(phi.size(), 0.0);
  for (std::size_t n = 1; n < phi.size(); ++n) f[n] = fs * (phi[n] - phi[n - 1]);
  if (f.size() > 1) f[0] = f[1];
  return f;
}

Signal synth_anh(const WaveShape& ws, const AmplitudeTrack& amp, const PhaseTrack& phase,
                 bool remove_mean_flag) {
  ws.validate();
  const std::size_t n_samples = phase.size();
  if (amp.size() != n_samples) {
    throw std::invalid_argument("synth_anh: amplitude and phase lengths differ");
  }
  if (!phase.is_strictly_increasing()) {
    throw std::invalid_argument("synth_anh: phase track is not strictly increasing");
  }
  std::vector<double> out(n_samples, 0.0);
  for (std::size_t n = 0; n < n_samples; ++n) {
    double acc = 0.0;
    for (std::size_t l = 1; l <= ws.order(); ++l) {
      const double theta = kTwoPi * static_cast<double>(l) * phase.phi[n];
      acc += ws.alpha[l - 1] * std::cos(theta) + ws.beta[l - 1] * std::sin(theta);
    }
    out[n] = amp.amp[n] * acc;
  }
  if (remove_mean_flag) remove_mean(out);
  return Signal(std::move(out), phase.fs);
}

std::size_t sample_count(double fs, double duration) {
  if (!(fs > 0.0) || !(duration > 0.0)) {
    throw std::invalid_argument("sample_count: fs and duration must be positive");
  }
  return static_cast<std::size_t>(std::llround(fs * duration));
}

PhaseTrack phase_family(PhaseFamily kind, double fs, double duration) {
  const std::size_t n_samples = sample_count(fs, duration);
  PhaseTrack track;
  track.fs = fs;
  track.phi.resize(n_samples);
  for (std::size_t n = 0; n < n_samples; ++n) {
    const double t = static_cast<double>(n) / fs;
    switch (kind) {
      case PhaseFamily::NoModulation:
        track.phi[n] = 100.0 * t;
        break;
      case PhaseFamily::LinearModulation:
        track.phi[n] = 7.5 * t * t + 50.0 * t;
        break;
      case PhaseFamily::SinusoidalModulation:
        track.phi[n] = -(15.0 / kTwoPi) * std::cos(kTwoPi * t) + 70.0 * t;
        break;
    }
  }
  return track;
}

AmplitudeTrack sqrt_amplitude(double rate, double fs, std::size_t n) {
  AmplitudeTrack a;
  a.amp.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    a.amp[i] = 1.0 + rate * std::sqrt(static_cast<double>(i) / fs);
  }
  return a;
}

HrvWeights hrv_weights(double lhpr, double max_dev) {
  if (!(lhpr > 0.0) || !(max_dev >= 0.0) || !std::isfinite(lhpr) || !std::isfinite(max_dev)) {
    throw std::invalid_argument("hrv_phase: need lhpr > 0 and max_dev >= 0");
  }
  if (max_dev >= 1.0) {
    // phi' = 1 - max_dev would reach zero.
    throw std::invalid_argument("hrv_phase: max_dev >= 1 makes the phase non-increasing");
  }
  const double total = max_dev / kHrvDepth;
  const double ratio = std::sqrt(lhpr);
  HrvWeights w;
  w.b = total / (1.0 + ratio);
  w.a = ratio * w.b;
  return w;
}

PhaseTrack hrv_phase(double f_low, double f_high, double lhpr, double max_dev, double fs,
                     double duration) {
  if (!(f_low < f_high) || !(f_low > 0.0)) {
    throw std::invalid_argument("hrv_phase: need 0 < f_low < f_high");
  }
  const HrvWeights w = hrv_weights(lhpr, max_dev);
  const std::size_t n_samples = sample_count(fs, duration);
  auto rate = [&](double t) {
    return 1.0 + kHrvDepth * w.a * std::sin(kTwoPi * f_low * t) +
           kHrvDepth * w.b * std::sin(kTwoPi * f_high * t);
  };
  PhaseTrack track;
  track.fs = fs;
  track.phi.resize(n_samples);
  track.phi[0] = 0.0;
  const double dt = 1.0 / fs;
  double prev = rate(0.0);
  for (std::size_t n = 1; n < n_samples; ++n) {
    const double cur = rate(static_cast<double>(n) * dt);
    track.phi[n] = track.phi[n - 1] + 0.5 * dt * (prev + cur);
    prev = cur;
  }
  return track;
}

Signal add_noise(const Signal& x, double snr_db, std::uint64_t seed) {
  const double p = x.power();
  if (!(p > 0.0)) {
    throw std::invalid_argument("add_noise: input signal has zero power");
  }
  const double sigma = std::sqrt(p / std::pow(10.0, snr_db / 10.0));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> out(x.samples().begin(), x.samples().end());
  for (double& s : out) s += sigma * gauss(rng);
  return Signal(std::move(out), x.fs(), x.t0());
}

double snr_out(std::span<const double> reference, std::span<const double> estimate) {
  if (reference.size() != estimate.size()) {
    throw std::invalid_argument("snr_out: length mismatch");
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t n = 0; n < reference.size(); ++n) {
    num += reference[n] * reference[n];
    const double e = reference[n] - estimate[n];
    den += e * e;
  }
  if (den == 0.0) return kInfiniteSnr;
  return 10.0 * std::log10(num / den);
}

double snr_out(const Signal& reference, const Signal& estimate) {
  return snr_out(reference.samples(), estimate.samples());
}

WaveShape wsf_from_template(std::span<const double> period, std::size_t r0) {
  const std::size_t m = period.size();
  if (r0 < 1 || m < 2 * r0 + 1) {
    throw std::invalid_argument("wsf_from_template: period needs at least 2*r0+1 samples (r0=" +
                                std::to_string(r0) + ", length=" + std::to_string(m) + ")");
  }
  const double mean = std::accumulate(period.begin(), period.end(), 0.0) / static_cast<double>(m);
  WaveShape ws;
  ws.alpha.assign(r0, 0.0);
  ws.beta.assign(r0, 0.0);
  for (std::size_t l = 1; l <= r0; ++l) {
    double c = 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      // Reduce l*i mod m first so the angle stays exact for long periods.
      const double theta = kTwoPi * static_cast<double>((l * i) % m) / static_cast<double>(m);
      c += (period[i] - mean) * std::cos(theta);
      s += (period[i] - mean) * std::sin(theta);
    }
    ws.alpha[l - 1] = 2.0 * c / static_cast<double>(m);
    ws.beta[l - 1] = 2.0 * s / static_cast<double>(m);
  }
  return ws;
}

std::vector<double> sample_period(const WaveShape& ws, std::size_t count) {
  std::vector<double> out(count, 0.0);
  for (std::size_t i = 0; i < count; ++i) {
    const double theta = kTwoPi * static_cast<double>(i) / static_cast<double>(count);
    for (std::size_t l = 1; l <= ws.order(); ++l) {
      out[i] += ws.alpha[l - 1] * std::cos(static_cast<double>(l) * theta) +
                ws.beta[l - 1] * std::sin(static_cast<double>(l) * theta);
    }
  }
  return out;
}

}  // namespace anh
