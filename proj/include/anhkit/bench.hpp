#pragma once

// Monte-Carlo harnesses. Every realization draws from its own generator,
// seeded from (seed, condition index, realization index), so results do not
// depend on scheduling. Rows are sorted before they are returned.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "anhkit/pipeline.hpp"
#include "anhkit/signal.hpp"

namespace anh {

struct BenchRow {
  std::string condition;
  std::string method;  // criterion code, "fixed<r>", "hard" or "soft"
  std::uint64_t seed = 0;
  std::string r_star;  // "r", "r1:r2", or empty
  double snr_out = 0.0;

  auto operator<=>(const BenchRow&) const = default;
};

struct BenchReport {
  std::string name;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> parameters;
  std::vector<BenchRow> rows;
  std::size_t failures = 0;  // realizations whose pipeline threw

  std::vector<const BenchRow*> select(const std::string& condition, const std::string& method) const;
  std::vector<std::string> conditions() const;
};

/// Generator seed of one task.
std::uint64_t task_seed(std::uint64_t seed, std::uint64_t condition, std::uint64_t realization);

/// a_1 = 1 and a_l ~ U[lo, hi] for l >= 2; phases ~ U[0, 2 pi) or all zero.
WaveShape random_wave_shape(std::size_t r0, std::uint64_t seed, bool random_phase = true,
                            double lo = 0.1, double hi = 0.9);

std::string phase_family_name(PhaseFamily f);

struct OrderRecoveryConfig {
  std::vector<PhaseFamily> families{PhaseFamily::NoModulation, PhaseFamily::LinearModulation,
                                    PhaseFamily::SinusoidalModulation};
  std::vector<std::size_t> orders{1, 3, 6, 9};
  std::vector<double> snr_db{0.0, 5.0, 10.0, 15.0};
  std::size_t realizations = 100;
  std::uint64_t seed = 1;
  double fs = 3000.0;
  double duration = 1.0;
  double amp_rate = 0.05;
  PipelineConfig pipeline;
};

/// Condition labels are "<family>/r0=<r0>/snr=<snr>".
BenchReport bench_order_recovery(const OrderRecoveryConfig& cfg);

struct PulseDenoiseConfig {
  std::vector<WaveShape> shapes;  // bundled_pulse_templates() when empty
  std::size_t n_shapes = 36;
  std::vector<double> snr_db{0.0, 10.0, 20.0, 30.0};
  std::vector<std::size_t> fixed_orders{3, 6, 9, 12};
  std::uint64_t seed = 1;
  double fs = 58.33;
  double duration = 120.0;
  double amp_rate = 0.02;
  double f_low = 0.05;
  double f_high = 0.2;
  double lhpr = 3.0;
  double max_dev = 0.035;
  PipelineConfig pipeline = default_pipeline();

  /// De-shape on, fundamental searched in [0.5, 3] Hz, window from a Renyi
  /// grid of time spreads 25..280 samples.
  static PipelineConfig default_pipeline();
};

/// Condition labels are "shape=<i>/snr=<snr>". SNR_out skips one window
/// half-length at each end.
BenchReport bench_pulse_denoise(const PulseDenoiseConfig& cfg);

struct TwoChirpConfig {
  std::size_t r1 = 4;
  std::size_t r2 = 3;
  std::vector<double> snr_db{0.0};
  std::size_t realizations = 50;
  std::uint64_t seed = 1;
  double fs = 3000.0;
  double duration = 1.0;
  PipelineConfig pipeline = default_pipeline();

  /// Plain STFT with the ridge search limited to [100, 250] Hz, the band
  /// holding both fundamentals; harmonics of the first component start at
  /// 240 Hz.
  static PipelineConfig default_pipeline();
};

/// s1 = sum a_{1,l} cos(2 pi l (120 t + 15 t^2)), s2 = sum a_{2,l}
/// cos(2 pi l (200 t + (25/2pi) cos 2 pi t)), leading amplitudes 1, the rest
/// drawn from U[0.1, 0.9].
Signal two_chirp(const WaveShape& s1, const WaveShape& s2, double fs, double duration);
PhaseTrack two_chirp_phase(std::size_t component, double fs, double duration);

/// Condition labels are "snr=<snr>"; r_star is "r1:r2".
BenchReport bench_two_chirp(const TwoChirpConfig& cfg);

/// SNR_out over [edge, N - edge).
double interior_snr(std::span<const double> reference, std::span<const double> estimate,
                    std::size_t edge);

}  // namespace anh
