#pragma once

// Short-time Fourier analysis with a truncated Gaussian window.
//
// Every frame n of a length-N signal is transformed with an N-point DFT of
// the zero-padded windowed segment, so the bin spacing is exactly fs/N and
// the one-sided spectrum has K = floor(N/2) + 1 bins:
//
//   F(n, k) = sum_m x(n + m) g(m) exp(-2 pi i k m / N),  |m| <= L,
//
// with samples outside [0, N) read as zero. Frames are independent, and the
// kernels below run them in parallel with OpenMP. Each frame is summed in a
// fixed order, so results do not depend on the thread count.

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "anhkit/signal.hpp"

namespace anh {

using Complex = std::complex<double>;

struct Window {
  std::vector<double> taps;  // taps[m + half_length] = g(m)
  std::size_t half_length = 0;
  double sigma = 0.0;

  double at(std::ptrdiff_t m) const;
  double centre() const { return taps[half_length]; }
  std::size_t support() const { return taps.size(); }
  double norm1() const;
  double norm2() const;
};

/// g(n) = exp(-2 sigma n^2) for |n| <= L, L the smallest n with
/// g(n) < trunc_eps.
Window gaussian_window(double sigma, double trunc_eps = 1e-8);

/// Inclusive range of one-sided DFT bins.
struct BinRange {
  std::size_t first = 0;
  std::size_t last = 0;

  std::size_t count() const { return last - first + 1; }
  bool contains(std::size_t k) const { return k >= first && k <= last; }
};

struct FrequencyRange {
  double lo = 0.0;
  double hi = 0.0;
};

/// Bins whose centre frequency lies in [lo, hi], clipped to [0, K).
BinRange bins_in(FrequencyRange range, double fs, std::size_t n_fft);

/// Time-frequency representation; rows are frames, columns are the stored
/// bins first_bin .. first_bin + n_bins - 1 of the N-point DFT.
struct TFR {
  std::size_t n_frames = 0;
  std::size_t n_fft = 0;
  std::size_t first_bin = 0;
  std::size_t n_bins = 0;
  double fs = 1.0;
  Window window;
  std::vector<Complex> values;

  std::size_t full_bins() const { return n_fft / 2 + 1; }
  bool is_full() const { return first_bin == 0 && n_bins == full_bins(); }
  BinRange bins() const { return {first_bin, first_bin + n_bins - 1}; }
  double bin_hz() const { return fs / static_cast<double>(n_fft); }
  /// Frequency of stored column j.
  double freq_hz(std::size_t j) const { return static_cast<double>(first_bin + j) * bin_hz(); }
  std::vector<double> freq_axis() const;

  Complex at(std::size_t frame, std::size_t column) const {
    return values[frame * n_bins + column];
  }
  std::span<const Complex> frame(std::size_t n) const {
    return {values.data() + n * n_bins, n_bins};
  }
};

/// Real matrix sharing a TFR's frame/bin layout (magnitudes, masks).
struct TfMagnitude {
  std::size_t n_frames = 0;
  std::size_t n_bins = 0;
  std::size_t first_bin = 0;
  double bin_hz = 1.0;
  std::vector<double> values;

  double at(std::size_t frame, std::size_t column) const {
    return values[frame * n_bins + column];
  }
  double& at(std::size_t frame, std::size_t column) { return values[frame * n_bins + column]; }
};

TfMagnitude magnitude(const TFR& tfr);

/// Full one-sided STFT. Throws std::invalid_argument when the window support
/// exceeds the signal length.
TFR stft(const Signal& x, const Window& w);
/// STFT restricted to a bin range; entries equal the matching columns of the
/// full transform.
TFR stft(const Signal& x, const Window& w, BinRange bins);

/// Inverts a full TFR by summing every frame over frequency:
/// x(n) = (1 / (N g(0))) * (F(n,0) + 2 Re sum_{0<k<N/2} F(n,k) + F(n,N/2)).
std::vector<double> inverse_stft(const TFR& tfr);

/// Robust noise variance from the real parts of the STFT:
/// 2 * (median |Re F| / (0.6745 ||g||_2))^2, median over all stored entries.
/// The factor 2 accounts for Re F of real white noise carrying half of the
/// windowed noise power in every bin except DC and Nyquist.
double noise_variance(const TFR& tfr);

/// Short-time cepstrum: C(n, j) = sum_{k=0}^{N-1} |F(n,k)|^gamma cos(2 pi j k / N)
/// over the two-sided magnitude spectrum, for quefrencies j / fs, j < K.
struct Cepstrum {
  std::size_t n_frames = 0;
  std::size_t n_quefrency = 0;
  double fs = 1.0;
  std::vector<double> values;

  double at(std::size_t frame, std::size_t j) const { return values[frame * n_quefrency + j]; }
  double quefrency_s(std::size_t j) const { return static_cast<double>(j) / fs; }
};

/// Requires a full TFR.
Cepstrum stct(const TFR& tfr, double gamma);

/// De-shape STFT: W(n,k) = F(n,k) U(n,k) with U(n,k) = max(0, C(n, fs/f_k))
/// interpolated linearly on the quefrency grid; bins outside f_range are zero.
/// Requires a full TFR; the result has the same layout.
TFR deshape(const TFR& tfr, double gamma, FrequencyRange f_range);

/// Weight applied to frame spectrum bins by deshape (exposed for tests).
double inverted_quefrency_weight(std::span<const double> cepstrum_frame, std::size_t bin,
                                 std::size_t n_fft);

/// Options for the single-pass analysis used by the pipeline.
struct AnalysisRequest {
  std::optional<BinRange> stft_bins;  // all bins when empty
  bool noise = true;
  struct Deshape {
    double gamma = 0.3;
    FrequencyRange f_range;
  };
  std::optional<Deshape> deshape;  // result restricted to f_range bins
};

struct AnalysisResult {
  TFR stft;
  std::optional<TFR> deshaped;
  double noise_variance = 0.0;
};

/// Computes the requested STFT columns, the noise variance over all K bins
/// and the de-shape STFT in one pass over the frames, without materialising
/// the full transform.
AnalysisResult analyze(const Signal& x, const Window& w, const AnalysisRequest& request);

/// Order-alpha Renyi entropy (bits) of the unit-mass one-sided spectrogram,
/// evaluated on every `frame_stride`-th frame.
double renyi_entropy(const Signal& x, const Window& w, double alpha,
                     std::size_t frame_stride = 1);

/// Window from the grid minimising the Renyi entropy. Grid entries whose
/// window does not fit in the signal are skipped.
Window select_window_renyi(const Signal& x, std::span<const double> sigma_grid,
                           double alpha = 3.0, std::size_t frame_stride = 1);

enum class ThresholdMode { Hard, Soft };

/// STFT thresholding followed by the frequency-sum inversion of
/// inverse_stft. Hard keeps entries with |F| >= eta; soft shrinks |F| by eta
/// and keeps the argument.
std::vector<double> threshold_synthesis(const Signal& x, const Window& w, double eta,
                                        ThresholdMode mode);

}  // namespace anh
