#pragma once

// End-to-end estimation: fundamental ridge -> amplitude/phase tracks ->
// order sweep -> criteria -> reconstruction, plus the STFT-thresholding
// denoising baseline.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "anhkit/criteria.hpp"
#include "anhkit/regression.hpp"
#include "anhkit/ridge.hpp"
#include "anhkit/signal.hpp"
#include "anhkit/tf_analysis.hpp"

namespace anh {

struct PipelineConfig {
  double sigma = 1e-4;
  double trunc_eps = 1e-8;
  // Non-empty: the window is picked from this grid by Renyi entropy.
  std::vector<double> renyi_sigma_grid;
  double renyi_alpha = 3.0;
  std::size_t renyi_frame_stride = 1;

  bool use_deshape = false;
  double gamma = 0.3;
  RidgeParams ridge;
  std::size_t delta_bins = 50;
  // Caps the band half-width at half the ridge bin, keeping the second
  // harmonic out of the band integral for low fundamentals.
  bool harmonic_guard = true;
  // Trims the band to the offsets from the ridge whose mean power is at
  // least twice the estimated noise floor.
  bool adaptive_band = true;
  // Search band for the fundamental ridge; (0, fs/2] when empty.
  std::optional<FrequencyRange> f_range;

  std::vector<Criterion> criteria{Criterion::G, Criterion::R, Criterion::W, Criterion::K};
  std::vector<double> c_set{2.1, 5.0, 8.0, 12.0};
  std::optional<std::size_t> fixed_h;
  // Orders reconstructed regardless of the criteria (fixed-order baselines).
  std::vector<std::size_t> fixed_orders;
  std::optional<std::size_t> r_max_override;

  std::uint64_t seed = 0;

  /// Throws std::invalid_argument on out-of-range parameters.
  void validate() const;
};

/// Result of the time-frequency stage for one component.
struct FundamentalEstimate {
  Window window;
  Ridge ridge;
  ComponentEstimate component;
  double noise_variance = 0.0;
};

/// One reconstructed order, chosen by a criterion or fixed by the caller.
struct OrderChoice {
  std::optional<Criterion> criterion;  // empty for a fixed order
  std::size_t r = 0;
  CoefficientVector coefficients;
  std::vector<double> reconstruction;
  double mse = 0.0;
};

struct AnhResult {
  FundamentalEstimate fundamental;
  std::size_t r_max = 0;
  std::vector<double> mse_curve;
  std::vector<CriterionCurve> curves;
  std::vector<OrderChoice> choices;

  /// Throws std::out_of_range when absent.
  const OrderChoice& by_criterion(Criterion c) const;
  const OrderChoice& by_order(std::size_t r) const;
  const CriterionCurve& curve(Criterion c) const;
};

Window pipeline_window(const Signal& x, const PipelineConfig& cfg);

/// STFT (or de-shape) ridge of the dominant fundamental and its band
/// reconstruction.
FundamentalEstimate estimate_fundamental(const Signal& x, const PipelineConfig& cfg);

/// Order sweep, criteria and reconstructions for given tracks.
AnhResult fit_orders(const Signal& x, FundamentalEstimate fundamental, const PipelineConfig& cfg);

AnhResult anh_reconstruct(const Signal& x, const PipelineConfig& cfg);

/// Skips the time-frequency stage and uses the supplied tracks.
AnhResult anh_reconstruct_with_tracks(const Signal& x, const AmplitudeTrack& amp,
                                      const PhaseTrack& phase, const PipelineConfig& cfg);

struct MultiResult {
  std::vector<FundamentalEstimate> components;  // sorted by mean frequency
  std::size_t r1_max = 0;
  std::size_t r2_max = 0;
  std::vector<CriterionSurface> surfaces;
  struct Choice {
    Criterion criterion;
    std::size_t r1 = 0;
    std::size_t r2 = 0;
    CoefficientVector coefficients1;
    CoefficientVector coefficients2;
    std::vector<double> reconstruction;
    double mse = 0.0;
  };
  std::vector<Choice> choices;

  const Choice& by_criterion(Criterion c) const;
};

/// Two-component version: extract, mask, extract again, then a joint
/// two-dimensional order search. Throws std::runtime_error when the second
/// ridge falls within 2 bins of the first on average.
MultiResult anh_reconstruct_multi(const Signal& x, const PipelineConfig& cfg);

/// STFT thresholding at eta = 3 sigma_hat ||g||_2 and frequency-sum inversion.
std::vector<double> denoise_threshold(const Signal& x, const PipelineConfig& cfg, ThresholdMode mode);

}  // namespace anh
