#pragma once

// Core value types of the adaptive non-harmonic model and the synthetic
// signal generators built on them.
//
// Phases are stored in cycles, so the l-th harmonic of a track `phi` is
// cos(2*pi*l*phi(n)). Every type here is an immutable value once built.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace anh {

/// Uniformly sampled real-valued series.
class Signal {
public:
  Signal() = default;
  /// Throws std::invalid_argument unless samples.size() >= 2 and fs > 0.
  Signal(std::vector<double> samples, double fs, double t0 = 0.0);

  std::span<const double> samples() const { return samples_; }
  double operator[](std::size_t n) const { return samples_[n]; }
  std::size_t size() const { return samples_.size(); }
  double fs() const { return fs_; }
  double t0() const { return t0_; }
  double duration() const { return static_cast<double>(samples_.size()) / fs_; }
  double time(std::size_t n) const { return t0_ + static_cast<double>(n) / fs_; }

  /// Mean square of the samples.
  double power() const;

private:
  std::vector<double> samples_;
  double fs_ = 1.0;
  double t0_ = 0.0;
};

/// Fourier description of one period of a wave-shape function:
/// s(theta) = sum_l alpha[l-1] cos(l theta) + beta[l-1] sin(l theta).
struct WaveShape {
  std::vector<double> alpha;
  std::vector<double> beta;

  std::size_t order() const { return alpha.size(); }
  double amplitude(std::size_t l) const;  // a_l, 1-based
  double phase(std::size_t l) const;      // atan2(beta_l, alpha_l), 1-based

  /// Throws std::invalid_argument when sizes differ, order is zero or the
  /// fundamental vanishes.
  void validate() const;

  /// alpha_l = a_l cos(p_l), beta_l = a_l sin(p_l), so each term equals
  /// a_l cos(l theta - p_l) and phase(l) recovers p_l.
  static WaveShape from_polar(std::span<const double> amplitudes,
                              std::span<const double> phases);
};

/// True iff a_1 > a_l for every l >= 2.
bool is_fundamental_dominant(const WaveShape& ws);

/// Instantaneous phase, in cycles, sampled at fs.
struct PhaseTrack {
  std::vector<double> phi;
  double fs = 1.0;

  std::size_t size() const { return phi.size(); }
  bool is_strictly_increasing() const;
  /// fs * (phi(n) - phi(n-1)); the first entry repeats the second.
  std::vector<double> instantaneous_frequency() const;
};

struct AmplitudeTrack {
  std::vector<double> amp;

  std::size_t size() const { return amp.size(); }
};

/// A(n) * s(2 pi phi(n)). The mean is removed unless `remove_mean` is false,
/// which keeps the output exactly inside the span of the pseudo-Fourier
/// dictionary.
Signal synth_anh(const WaveShape& ws, const AmplitudeTrack& amp,
                 const PhaseTrack& phase, bool remove_mean = true);

enum class PhaseFamily { NoModulation, LinearModulation, SinusoidalModulation };

/// NM: 100t, LM: 7.5t^2 + 50t, SM: 70t - (15/2pi) cos(2 pi t).
PhaseTrack phase_family(PhaseFamily kind, double fs, double duration);

/// Sample count used for a duration at fs (rounded to nearest).
std::size_t sample_count(double fs, double duration);

/// 1 + rate * sqrt(t) sampled at fs.
AmplitudeTrack sqrt_amplitude(double rate, double fs, std::size_t n);

/// Solved HRV mixing weights.
struct HrvWeights {
  double a = 0.0;
  double b = 0.0;
};

/// a^2/b^2 = lhpr and 0.035 (a + b) = max_dev.
HrvWeights hrv_weights(double lhpr, double max_dev);

/// phi'(t) = 1 + 0.035 a sin(2 pi fL t) + 0.035 b sin(2 pi fH t), integrated
/// by the cumulative trapezoidal rule from phi(0) = 0.
PhaseTrack hrv_phase(double f_low, double f_high, double lhpr, double max_dev,
                     double fs, double duration);

/// x plus white Gaussian noise of variance power(x) / 10^(snr_db/10).
Signal add_noise(const Signal& x, double snr_db, std::uint64_t seed);

/// Returned by snr_out when the reconstruction is exact.
inline constexpr double kInfiniteSnr = std::numeric_limits<double>::infinity();

/// 20 log10(||x|| / ||x - estimate||) over the whole series.
double snr_out(std::span<const double> reference, std::span<const double> estimate);
double snr_out(const Signal& reference, const Signal& estimate);

/// Order-r0 discrete Fourier projection of one mean-removed sampled period.
WaveShape wsf_from_template(std::span<const double> period, std::size_t r0);

/// Evaluates the wave-shape at `count` equispaced points of one period.
std::vector<double> sample_period(const WaveShape& ws, std::size_t count);

/// Synthetic pulse-like periods (a dominant systolic peak, a reflected wave
/// and a dicrotic bump) projected onto 6 to 12 harmonics. Deterministic.
std::vector<WaveShape> bundled_pulse_templates(std::size_t count = 36);

}  // namespace anh
