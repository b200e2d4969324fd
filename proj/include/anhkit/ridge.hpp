#pragma once

// Greedy penalised ridge extraction on a time-frequency magnitude surface and
// band-integration recovery of the component that follows the ridge.

#include <cstddef>
#include <span>
#include <vector>

#include "anhkit/signal.hpp"
#include "anhkit/tf_analysis.hpp"

namespace anh {

struct Ridge {
  std::vector<std::size_t> bins;  // absolute DFT bin per frame
  std::vector<double> freq_hz;

  std::size_t size() const { return bins.size(); }
  double mean_bin() const;
  double max_freq_hz() const;
  /// Largest |bins(n) - bins(n-1)|.
  std::size_t max_step() const;
};

struct RidgeParams {
  double lambda = 0.1;
  double mu = 0.1;
  std::size_t max_jump = 10;
};

/// Seeds at the global maximum of |W|^2 and extends forward, then backward,
/// one frame at a time. Frame n takes the bin c within max_jump of its
/// neighbour maximising
///   |W(n,c)|^2 - lambda (c - c1)^2 - mu (c - 2 c1 + c2)^2,
/// where c1, c2 are the previously assigned neighbours (the mu term is
/// dropped next to the seed). Ties go to the lower bin.
Ridge extract_ridge(const TfMagnitude& mag, const RidgeParams& params = {});

/// Copy of `mag` with |k - ridge.bins(n)| <= half_width zeroed in every frame.
TfMagnitude mask_band(const TfMagnitude& mag, const Ridge& ridge, std::size_t half_width);

struct ComponentEstimate {
  std::vector<Complex> y;
  AmplitudeTrack amp;
  PhaseTrack phase;
  bool clipped = false;       // some band ran past the stored bins
  bool non_monotone = false;  // unwrapped phase decreased somewhere
};

/// y(n) = (2 / (N g(0))) sum_{|k - c(n)| < delta} F(n,k), which returns
/// A(n) exp(2 pi i phi(n)) for a slowly varying A(n) cos(2 pi phi(n)).
/// amp = |y|, phase = unwrap(arg y) / (2 pi).
ComponentEstimate reconstruct_band(const TFR& tfr, const Ridge& ridge, std::size_t delta_bins);

/// Same with a half-width per frame.
ComponentEstimate reconstruct_band(const TFR& tfr, const Ridge& ridge,
                                   std::span<const std::size_t> delta_bins);

/// Unwrapped argument in cycles.
std::vector<double> unwrap_cycles(std::span<const Complex> y);

/// One standard deviation of the window's frequency response, in bins.
double window_bandwidth_bins(const Window& w, std::size_t n_fft);

}  // namespace anh
