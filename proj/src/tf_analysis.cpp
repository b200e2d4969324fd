#include "anhkit/tf_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>

#include "fft.hpp"

namespace anh {

namespace {

// Sum weight of one-sided bin k in the frequency-sum inversion.
double fold_weight(std::size_t k, std::size_t n_fft) {
  if (k == 0) return 1.0;
  if (n_fft % 2 == 0 && k == n_fft / 2) return 1.0;
  return 2.0;
}

void require_fit(const Signal& x, const Window& w) {
  if (w.taps.empty()) throw std::invalid_argument("stft: empty window");
  if (w.support() > x.size()) {
    throw std::invalid_argument("stft: window support (" + std::to_string(w.support()) +
                                ") exceeds signal length (" + std::to_string(x.size()) + ")");
  }
}

void require_full(const TFR& tfr, const char* who) {
  if (!tfr.is_full()) {
    throw std::invalid_argument(std::string(who) + ": requires a full one-sided TFR");
  }
}

template <typename T>
double median_in_place(std::vector<T>& v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = static_cast<double>(v[mid]);
  if (v.size() % 2 == 1) return upper;
  const double lower =
      static_cast<double>(*std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
  return 0.5 * (lower + upper);
}

double variance_from_median(double median_abs_real, const Window& w) {
  const double sigma = median_abs_real / (0.6745 * w.norm2());
  return 2.0 * sigma * sigma;
}

// Per-thread frame transformer: windowed segment -> N-point spectrum, and
// optionally the cepstrum of that spectrum's gamma-root magnitude.
class FrameKernel {
public:
  FrameKernel(std::span<const double> x, const Window& w) : x_(x), w_(w), fft_(x.size()) {}

  std::span<const Complex> spectrum(std::size_t n) {
    auto in = fft_.input();
    std::fill(in.begin(), in.end(), 0.0);
    const auto size = static_cast<std::ptrdiff_t>(x_.size());
    const auto half = static_cast<std::ptrdiff_t>(w_.half_length);
    const auto centre = static_cast<std::ptrdiff_t>(n);
    const std::ptrdiff_t m_lo = std::max(-half, -centre);
    const std::ptrdiff_t m_hi = std::min(half, size - 1 - centre);
    for (std::ptrdiff_t m = m_lo; m <= m_hi; ++m) {
      in[static_cast<std::size_t>((m + size) % size)] =
          x_[static_cast<std::size_t>(centre + m)] * w_.taps[static_cast<std::size_t>(m + half)];
    }
    fft_.execute();
    return fft_.output();
  }

  std::span<const double> cepstrum(std::span<const Complex> spec, double gamma) {
    const std::size_t n_fft = x_.size();
    const std::size_t k_bins = n_fft / 2 + 1;
    if (!cep_fft_) {
      cep_fft_ = std::make_unique<detail::RealFft>(n_fft);
      cep_.resize(k_bins);
    }
    auto in = cep_fft_->input();
    for (std::size_t k = 0; k < k_bins; ++k) {
      const double mag = std::abs(spec[k]);
      in[k] = gamma == 1.0 ? mag : std::pow(mag, gamma);
    }
    for (std::size_t k = k_bins; k < n_fft; ++k) in[k] = in[n_fft - k];
    cep_fft_->execute();
    const auto out = cep_fft_->output();
    for (std::size_t j = 0; j < k_bins; ++j) cep_[j] = out[j].real();
    return cep_;
  }

private:
  std::span<const double> x_;
  const Window& w_;
  detail::RealFft fft_;
  std::unique_ptr<detail::RealFft> cep_fft_;
  std::vector<double> cep_;
};

// Same as FrameKernel::cepstrum but for a stored full frame.
class CepstrumKernel {
public:
  explicit CepstrumKernel(std::size_t n_fft) : fft_(n_fft), cep_(n_fft / 2 + 1) {}

  std::span<const double> operator()(std::span<const Complex> spec, double gamma) {
    const std::size_t n_fft = fft_.size();
    const std::size_t k_bins = n_fft / 2 + 1;
    auto in = fft_.input();
    for (std::size_t k = 0; k < k_bins; ++k) {
      const double mag = std::abs(spec[k]);
      in[k] = gamma == 1.0 ? mag : std::pow(mag, gamma);
    }
    for (std::size_t k = k_bins; k < n_fft; ++k) in[k] = in[n_fft - k];
    fft_.execute();
    const auto out = fft_.output();
    for (std::size_t j = 0; j < k_bins; ++j) cep_[j] = out[j].real();
    return cep_;
  }

private:
  detail::RealFft fft_;
  std::vector<double> cep_;
};

void check_gamma(double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument("de-shape: gamma must lie in (0, 1]");
  }
}

BinRange deshape_bins(FrequencyRange f_range, double fs, std::size_t n_fft) {
  if (!(f_range.lo > 0.0)) throw std::invalid_argument("deshape: f_lo must be positive");
  if (f_range.hi > fs / 2.0) throw std::invalid_argument("deshape: f_hi exceeds Nyquist");
  return bins_in(f_range, fs, n_fft);
}

TFR empty_like(const Signal& x, const Window& w, BinRange bins) {
  TFR out;
  out.n_frames = x.size();
  out.n_fft = x.size();
  out.first_bin = bins.first;
  out.n_bins = bins.count();
  out.fs = x.fs();
  out.window = w;
  out.values.assign(out.n_frames * out.n_bins, Complex{});
  return out;
}

}  // namespace

double Window::at(std::ptrdiff_t m) const {
  const auto half = static_cast<std::ptrdiff_t>(half_length);
  if (m < -half || m > half) return 0.0;
  return taps[static_cast<std::size_t>(m + half)];
}

double Window::norm1() const {
  double acc = 0.0;
  for (double t : taps) acc += std::abs(t);
  return acc;
}

double Window::norm2() const {
  double acc = 0.0;
  for (double t : taps) acc += t * t;
  return std::sqrt(acc);
}

Window gaussian_window(double sigma, double trunc_eps) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_window: sigma must be positive");
  if (!(trunc_eps > 0.0 && trunc_eps < 1.0)) {
    throw std::invalid_argument("gaussian_window: trunc_eps must lie in (0, 1)");
  }
  // Smallest integer n with 2 sigma n^2 > ln(1/eps); refine against exp().
  auto half = static_cast<std::size_t>(std::floor(std::sqrt(std::log(1.0 / trunc_eps) / (2.0 * sigma))));
  while (half > 0 && std::exp(-2.0 * sigma * static_cast<double>(half - 1) * static_cast<double>(half - 1)) < trunc_eps) {
    --half;
  }
  while (!(std::exp(-2.0 * sigma * static_cast<double>(half) * static_cast<double>(half)) < trunc_eps)) {
    ++half;
  }
  Window w;
  w.sigma = sigma;
  w.half_length = half;
  w.taps.resize(2 * half + 1);
  for (std::size_t i = 0; i < w.taps.size(); ++i) {
    const double m = static_cast<double>(i) - static_cast<double>(half);
    w.taps[i] = std::exp(-2.0 * sigma * m * m);
  }
  return w;
}

BinRange bins_in(FrequencyRange range, double fs, std::size_t n_fft) {
  const std::size_t k_bins = n_fft / 2 + 1;
  const double scale = static_cast<double>(n_fft) / fs;
  const double lo = std::max(0.0, std::ceil(range.lo * scale - 1e-9));
  const double hi = std::min(static_cast<double>(k_bins - 1), std::floor(range.hi * scale + 1e-9));
  if (!(range.lo <= range.hi) || lo > hi) {
    throw std::invalid_argument("frequency range contains no DFT bin");
  }
  return {static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)};
}

std::vector<double> TFR::freq_axis() const {
  std::vector<double> f(n_bins);
  for (std::size_t j = 0; j < n_bins; ++j) f[j] = freq_hz(j);
  return f;
}

TfMagnitude magnitude(const TFR& tfr) {
  TfMagnitude m;
  m.n_frames = tfr.n_frames;
  m.n_bins = tfr.n_bins;
  m.first_bin = tfr.first_bin;
  m.bin_hz = tfr.bin_hz();
  m.values.resize(tfr.values.size());
  for (std::size_t i = 0; i < tfr.values.size(); ++i) m.values[i] = std::abs(tfr.values[i]);
  return m;
}

TFR stft(const Signal& x, const Window& w) {
  return stft(x, w, BinRange{0, x.size() / 2});
}

TFR stft(const Signal& x, const Window& w, BinRange bins) {
  AnalysisRequest req;
  req.stft_bins = bins;
  req.noise = false;
  return analyze(x, w, req).stft;
}

AnalysisResult analyze(const Signal& x, const Window& w, const AnalysisRequest& request) {
  require_fit(x, w);
  const std::size_t n_frames = x.size();
  const std::size_t k_bins = n_frames / 2 + 1;
  const BinRange bins = request.stft_bins.value_or(BinRange{0, k_bins - 1});
  if (bins.first > bins.last || bins.last >= k_bins) {
    throw std::invalid_argument("stft: bin range outside [0, K)");
  }

  AnalysisResult result;
  result.stft = empty_like(x, w, bins);

  std::optional<BinRange> ds_bins;
  if (request.deshape) {
    check_gamma(request.deshape->gamma);
    ds_bins = deshape_bins(request.deshape->f_range, x.fs(), n_frames);
    result.deshaped = empty_like(x, w, *ds_bins);
  }

  // Single precision is enough for the median and halves the footprint of
  // long recordings.
  std::vector<float> abs_real;
  if (request.noise) abs_real.resize(n_frames * k_bins);

  const auto samples = x.samples();
  const auto n_signed = static_cast<std::ptrdiff_t>(n_frames);
#pragma omp parallel
  {
    FrameKernel kernel(samples, w);
#pragma omp for schedule(static)
    for (std::ptrdiff_t ns = 0; ns < n_signed; ++ns) {
      const auto n = static_cast<std::size_t>(ns);
      const auto spec = kernel.spectrum(n);
      std::copy_n(spec.begin() + static_cast<std::ptrdiff_t>(bins.first), bins.count(),
                  result.stft.values.begin() + static_cast<std::ptrdiff_t>(n * bins.count()));
      if (request.noise) {
        float* row = abs_real.data() + n * k_bins;
        for (std::size_t k = 0; k < k_bins; ++k) row[k] = static_cast<float>(std::abs(spec[k].real()));
      }
      if (ds_bins) {
        const auto cep = kernel.cepstrum(spec, request.deshape->gamma);
        Complex* row = result.deshaped->values.data() + n * ds_bins->count();
        for (std::size_t k = ds_bins->first; k <= ds_bins->last; ++k) {
          row[k - ds_bins->first] = spec[k] * inverted_quefrency_weight(cep, k, n_frames);
        }
      }
    }
  }

  if (request.noise) result.noise_variance = variance_from_median(median_in_place(abs_real), w);
  return result;
}

std::vector<double> inverse_stft(const TFR& tfr) {
  require_full(tfr, "inverse_stft");
  std::vector<double> out(tfr.n_frames, 0.0);
  const double scale = 1.0 / (static_cast<double>(tfr.n_fft) * tfr.window.centre());
  for (std::size_t n = 0; n < tfr.n_frames; ++n) {
    const auto row = tfr.frame(n);
    double acc = 0.0;
    for (std::size_t k = 0; k < row.size(); ++k) acc += fold_weight(k, tfr.n_fft) * row[k].real();
    out[n] = scale * acc;
  }
  return out;
}

double noise_variance(const TFR& tfr) {
  if (tfr.values.empty()) throw std::invalid_argument("noise_variance: empty TFR");
  std::vector<double> abs_real(tfr.values.size());
  for (std::size_t i = 0; i < tfr.values.size(); ++i) abs_real[i] = std::abs(tfr.values[i].real());
  return variance_from_median(median_in_place(abs_real), tfr.window);
}

Cepstrum stct(const TFR& tfr, double gamma) {
  require_full(tfr, "stct");
  check_gamma(gamma);
  Cepstrum c;
  c.n_frames = tfr.n_frames;
  c.n_quefrency = tfr.n_bins;
  c.fs = tfr.fs;
  c.values.resize(c.n_frames * c.n_quefrency);
  const auto n_signed = static_cast<std::ptrdiff_t>(tfr.n_frames);
#pragma omp parallel
  {
    CepstrumKernel kernel(tfr.n_fft);
#pragma omp for schedule(static)
    for (std::ptrdiff_t ns = 0; ns < n_signed; ++ns) {
      const auto n = static_cast<std::size_t>(ns);
      const auto cep = kernel(tfr.frame(n), gamma);
      std::copy(cep.begin(), cep.end(), c.values.begin() + static_cast<std::ptrdiff_t>(n * c.n_quefrency));
    }
  }
  return c;
}

double inverted_quefrency_weight(std::span<const double> cepstrum_frame, std::size_t bin,
                                 std::size_t n_fft) {
  if (bin == 0 || cepstrum_frame.empty()) return 0.0;
  const std::size_t last = cepstrum_frame.size() - 1;
  // Quefrency 1/f_k in samples is N/k.
  const double j = static_cast<double>(n_fft) / static_cast<double>(bin);
  const double j_floor = std::floor(j);
  if (j_floor >= static_cast<double>(last)) {
    return j == static_cast<double>(last) ? std::max(0.0, cepstrum_frame[last]) : 0.0;
  }
  const auto j0 = static_cast<std::size_t>(j_floor);
  const double frac = j - j_floor;
  const double v = (1.0 - frac) * cepstrum_frame[j0] + frac * cepstrum_frame[j0 + 1];
  return std::max(0.0, v);
}

TFR deshape(const TFR& tfr, double gamma, FrequencyRange f_range) {
  require_full(tfr, "deshape");
  check_gamma(gamma);
  const BinRange keep = deshape_bins(f_range, tfr.fs, tfr.n_fft);
  TFR out = tfr;
  std::fill(out.values.begin(), out.values.end(), Complex{});
  const auto n_signed = static_cast<std::ptrdiff_t>(tfr.n_frames);
#pragma omp parallel
  {
    CepstrumKernel kernel(tfr.n_fft);
#pragma omp for schedule(static)
    for (std::ptrdiff_t ns = 0; ns < n_signed; ++ns) {
      const auto n = static_cast<std::size_t>(ns);
      const auto row = tfr.frame(n);
      const auto cep = kernel(row, gamma);
      for (std::size_t k = keep.first; k <= keep.last; ++k) {
        out.values[n * out.n_bins + k] = row[k] * inverted_quefrency_weight(cep, k, tfr.n_fft);
      }
    }
  }
  return out;
}

double renyi_entropy(const Signal& x, const Window& w, double alpha, std::size_t frame_stride) {
  if (!(alpha > 0.0) || alpha == 1.0) {
    throw std::invalid_argument("renyi_entropy: alpha must be positive and differ from 1");
  }
  require_fit(x, w);
  frame_stride = std::max<std::size_t>(frame_stride, 1);
  // The entropy is scale invariant; unit RMS keeps |F|^(2 alpha) in range.
  const double rms = std::sqrt(x.power());
  if (!(rms > 0.0)) throw std::invalid_argument("renyi_entropy: zero signal");
  std::vector<double> unit(x.samples().begin(), x.samples().end());
  for (double& s : unit) s /= rms;

  const std::size_t n_used = (x.size() + frame_stride - 1) / frame_stride;
  std::vector<double> energy(n_used, 0.0);
  std::vector<double> moment(n_used, 0.0);
  const auto n_signed = static_cast<std::ptrdiff_t>(n_used);
#pragma omp parallel
  {
    FrameKernel kernel(unit, w);
#pragma omp for schedule(static)
    for (std::ptrdiff_t is = 0; is < n_signed; ++is) {
      const auto i = static_cast<std::size_t>(is);
      const auto spec = kernel.spectrum(i * frame_stride);
      double e = 0.0;
      double m = 0.0;
      for (const Complex& v : spec) {
        const double p = std::norm(v);
        e += p;
        m += std::pow(p, alpha);
      }
      energy[i] = e;
      moment[i] = m;
    }
  }
  double total = 0.0;
  double total_moment = 0.0;
  for (std::size_t i = 0; i < n_used; ++i) {
    total += energy[i];
    total_moment += moment[i];
  }
  return std::log2(total_moment / std::pow(total, alpha)) / (1.0 - alpha);
}

Window select_window_renyi(const Signal& x, std::span<const double> sigma_grid, double alpha,
                           std::size_t frame_stride) {
  if (sigma_grid.empty()) throw std::invalid_argument("select_window_renyi: empty grid");
  std::optional<Window> best;
  double best_entropy = 0.0;
  for (double sigma : sigma_grid) {
    Window w = gaussian_window(sigma);
    if (w.support() > x.size()) continue;
    const double h = renyi_entropy(x, w, alpha, frame_stride);
    if (!best || h < best_entropy) {
      best = std::move(w);
      best_entropy = h;
    }
  }
  if (!best) throw std::invalid_argument("select_window_renyi: no grid window fits the signal");
  return *best;
}

std::vector<double> threshold_synthesis(const Signal& x, const Window& w, double eta,
                                        ThresholdMode mode) {
  require_fit(x, w);
  if (!(eta >= 0.0)) throw std::invalid_argument("threshold_synthesis: eta must be >= 0");
  const std::size_t n_fft = x.size();
  const double scale = 1.0 / (static_cast<double>(n_fft) * w.centre());
  std::vector<double> out(n_fft, 0.0);
  const auto n_signed = static_cast<std::ptrdiff_t>(n_fft);
#pragma omp parallel
  {
    FrameKernel kernel(x.samples(), w);
#pragma omp for schedule(static)
    for (std::ptrdiff_t ns = 0; ns < n_signed; ++ns) {
      const auto n = static_cast<std::size_t>(ns);
      const auto spec = kernel.spectrum(n);
      double acc = 0.0;
      for (std::size_t k = 0; k < spec.size(); ++k) {
        const double mag = std::abs(spec[k]);
        double re = 0.0;
        if (mode == ThresholdMode::Hard) {
          re = mag >= eta ? spec[k].real() : 0.0;
        } else if (mag > eta) {
          re = spec[k].real() * (mag - eta) / mag;
        }
        acc += fold_weight(k, n_fft) * re;
      }
      out[n] = scale * acc;
    }
  }
  return out;
}

}  // namespace anh
