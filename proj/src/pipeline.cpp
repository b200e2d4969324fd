#include "anhkit/pipeline.hpp"

#include <algorithm>
#include <array>
#include <numbers>
#include <tuple>
#include <cmath>
#include <stdexcept>
#include <string>

namespace anh {

namespace {

struct SearchBands {
  BinRange search;  // ridge candidates
  BinRange stored;  // search widened by the band half-width
};

SearchBands search_bands(const Signal& x, const PipelineConfig& cfg) {
  const std::size_t n = x.size();
  const std::size_t k_bins = n / 2 + 1;
  BinRange search{1, k_bins - 1};
  if (cfg.f_range) search = bins_in(*cfg.f_range, x.fs(), n);
  search.first = std::max<std::size_t>(search.first, 1);
  if (search.first > search.last) throw std::invalid_argument("f_range contains no positive bin");
  const std::size_t pad = cfg.delta_bins - 1;
  BinRange stored{search.first > pad ? search.first - pad : 0, std::min(k_bins - 1, search.last + pad)};
  return {search, stored};
}

AnalysisResult run_analysis(const Signal& x, const Window& w, const PipelineConfig& cfg,
                            const SearchBands& bands) {
  AnalysisRequest req;
  req.stft_bins = bands.stored;
  req.noise = true;
  if (cfg.use_deshape) {
    const double bin_hz = x.fs() / static_cast<double>(x.size());
    req.deshape = AnalysisRequest::Deshape{
        cfg.gamma, {static_cast<double>(bands.search.first) * bin_hz,
                    static_cast<double>(bands.search.last) * bin_hz}};
  }
  return analyze(x, w, req);
}

// |W| over the search bins, from the de-shape TFR when present.
TfMagnitude search_magnitude(const AnalysisResult& a, const SearchBands& bands) {
  const TFR& src = a.deshaped ? *a.deshaped : a.stft;
  TfMagnitude m;
  m.n_frames = src.n_frames;
  m.first_bin = bands.search.first;
  m.n_bins = bands.search.count();
  m.bin_hz = src.bin_hz();
  m.values.resize(m.n_frames * m.n_bins);
  const std::size_t offset = bands.search.first - src.first_bin;
  for (std::size_t n = 0; n < m.n_frames; ++n) {
    const auto row = src.frame(n);
    for (std::size_t j = 0; j < m.n_bins; ++j) m.values[n * m.n_bins + j] = std::abs(row[offset + j]);
  }
  return m;
}

std::size_t guarded_width(const PipelineConfig& cfg, std::size_t ridge_bin) {
  if (cfg.harmonic_guard) return std::min(cfg.delta_bins, std::max<std::size_t>(1, ridge_bin / 2));
  return cfg.delta_bins;
}

// Shrinks the per-frame caps to the offsets where the ridge-aligned mean
// power exceeds twice the noise floor sigma^2 ||g||^2, i.e. where a bin adds
// more signal than noise on average. Offsets past the last such one are
// dropped in every frame.
void fit_band_to_noise(const TFR& stft, const Ridge& ridge, double sigma2,
                       std::vector<std::size_t>& widths) {
  const std::size_t top = *std::max_element(widths.begin(), widths.end());
  std::vector<double> power(top, 0.0);
  std::vector<std::size_t> count(top, 0);
  const BinRange stored = stft.bins();
  for (std::size_t n = 0; n < stft.n_frames; ++n) {
    const auto row = stft.frame(n);
    const std::size_t c = ridge.bins[n];
    for (std::size_t j = 0; j < widths[n]; ++j) {
      for (int side : {-1, 1}) {
        if (j == 0 && side < 0) continue;
        if (side < 0 && j > c) continue;
        const std::size_t k = side < 0 ? c - j : c + j;
        if (!stored.contains(k)) continue;
        power[j] += std::norm(row[k - stored.first]);
        ++count[j];
      }
    }
  }
  const double floor = 2.0 * sigma2 * std::pow(stft.window.norm2(), 2);
  std::size_t keep = 1;
  for (std::size_t j = 0; j < top; ++j) {
    if (count[j] > 0 && power[j] / static_cast<double>(count[j]) > floor) keep = j + 1;
  }
  for (auto& w : widths) w = std::min(w, keep);
}

void require_component(const ComponentEstimate& c, const char* which) {
  const bool any = std::any_of(c.amp.amp.begin(), c.amp.amp.end(), [](double a) { return a > 0.0; });
  if (!any) throw std::runtime_error(std::string("ridge: empty band for ") + which);
}

double max_track_frequency(const FundamentalEstimate& f) {
  if (!f.ridge.freq_hz.empty()) return f.ridge.max_freq_hz();
  const auto inst = f.component.phase.instantaneous_frequency();
  return *std::max_element(inst.begin(), inst.end());
}

double estimate_noise(const Signal& x, const Window& w) {
  AnalysisRequest req;
  req.stft_bins = BinRange{0, 0};
  req.noise = true;
  return analyze(x, w, req).noise_variance;
}

}  // namespace

void PipelineConfig::validate() const {
  if (!(sigma > 0.0)) throw std::invalid_argument("config: sigma must be positive");
  for (double s : renyi_sigma_grid) {
    if (!(s > 0.0)) throw std::invalid_argument("config: Renyi grid entries must be positive");
  }
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("config: gamma must lie in (0, 1]");
  if (!(ridge.lambda >= 0.0) || !(ridge.mu >= 0.0)) {
    throw std::invalid_argument("config: lambda and mu must be >= 0");
  }
  if (ridge.max_jump < 1) throw std::invalid_argument("config: max jump I must be >= 1");
  if (delta_bins < 1) throw std::invalid_argument("config: delta must be >= 1 bin");
  if (f_range && !(f_range->lo < f_range->hi)) throw std::invalid_argument("config: f_range needs lo < hi");
  for (double c : c_set) {
    if (!(c > 2.0)) throw std::invalid_argument("config: every c must exceed 2");
  }
  if (c_set.empty()) throw std::invalid_argument("config: empty c set");
  for (std::size_t r : fixed_orders) {
    if (r < 1) throw std::invalid_argument("config: fixed orders must be >= 1");
  }
  if (criteria.empty() && fixed_orders.empty()) {
    throw std::invalid_argument("config: no criteria and no fixed order requested");
  }
  if (fixed_h && *fixed_h < 1) throw std::invalid_argument("config: fixed h must be >= 1");
}

const OrderChoice& AnhResult::by_criterion(Criterion c) const {
  for (const auto& ch : choices) {
    if (ch.criterion == c) return ch;
  }
  throw std::out_of_range(std::string("no result for criterion ") + criterion_code(c));
}

const OrderChoice& AnhResult::by_order(std::size_t r) const {
  for (const auto& ch : choices) {
    if (!ch.criterion && ch.r == r) return ch;
  }
  throw std::out_of_range("no fixed-order result for r=" + std::to_string(r));
}

const CriterionCurve& AnhResult::curve(Criterion c) const {
  for (const auto& cv : curves) {
    if (cv.kind == c) return cv;
  }
  throw std::out_of_range(std::string("no curve for criterion ") + criterion_code(c));
}

const MultiResult::Choice& MultiResult::by_criterion(Criterion c) const {
  for (const auto& ch : choices) {
    if (ch.criterion == c) return ch;
  }
  throw std::out_of_range(std::string("no result for criterion ") + criterion_code(c));
}

Window pipeline_window(const Signal& x, const PipelineConfig& cfg) {
  if (cfg.renyi_sigma_grid.empty()) return gaussian_window(cfg.sigma, cfg.trunc_eps);
  return select_window_renyi(x, cfg.renyi_sigma_grid, cfg.renyi_alpha, cfg.renyi_frame_stride);
}

FundamentalEstimate estimate_fundamental(const Signal& x, const PipelineConfig& cfg) {
  cfg.validate();
  FundamentalEstimate f;
  f.window = pipeline_window(x, cfg);
  const SearchBands bands = search_bands(x, cfg);
  const AnalysisResult a = run_analysis(x, f.window, cfg, bands);
  f.noise_variance = a.noise_variance;
  f.ridge = extract_ridge(search_magnitude(a, bands), cfg.ridge);
  std::vector<std::size_t> widths(x.size());
  for (std::size_t n = 0; n < x.size(); ++n) widths[n] = guarded_width(cfg, f.ridge.bins[n]);
  if (cfg.adaptive_band) fit_band_to_noise(a.stft, f.ridge, a.noise_variance, widths);
  f.component = reconstruct_band(a.stft, f.ridge, widths);
  require_component(f.component, "the fundamental");
  return f;
}

AnhResult fit_orders(const Signal& x, FundamentalEstimate fundamental, const PipelineConfig& cfg) {
  cfg.validate();
  AnhResult res;
  res.r_max = cfg.r_max_override ? *cfg.r_max_override
                                 : r_max(x.fs(), max_track_frequency(fundamental));
  if (res.r_max < 1) throw std::runtime_error("order sweep: r_max is zero");
  std::size_t r_top = res.r_max;
  for (std::size_t r : cfg.fixed_orders) r_top = std::max(r_top, r);
  if (2 * r_top >= x.size()) {
    throw std::invalid_argument("order sweep: 2 r must stay below N (r=" + std::to_string(r_top) + ")");
  }

  const OrderSweep sweep(x, fundamental.component.amp, fundamental.component.phase, r_top);
  res.mse_curve = sweep.mse_curve();
  res.mse_curve.resize(res.r_max);

  CriteriaParams params;
  params.c_set = cfg.c_set;
  params.fixed_h = cfg.fixed_h;
  params.sigma2 = fundamental.noise_variance;

  auto choose = [&](std::optional<Criterion> crit, std::size_t r) {
    OrderChoice ch;
    ch.criterion = crit;
    ch.r = r;
    ch.coefficients = sweep.coefficients(r);
    ch.reconstruction = sweep.at(r).fitted;
    ch.mse = sweep.at(r).mse;
    res.choices.push_back(std::move(ch));
  };
  for (Criterion c : cfg.criteria) {
    res.curves.push_back(evaluate(c, sweep, params, res.r_max));
    choose(c, res.curves.back().r_star);
  }
  for (std::size_t r : cfg.fixed_orders) choose(std::nullopt, r);
  res.fundamental = std::move(fundamental);
  return res;
}

AnhResult anh_reconstruct(const Signal& x, const PipelineConfig& cfg) {
  return fit_orders(x, estimate_fundamental(x, cfg), cfg);
}

AnhResult anh_reconstruct_with_tracks(const Signal& x, const AmplitudeTrack& amp,
                                      const PhaseTrack& phase, const PipelineConfig& cfg) {
  cfg.validate();
  if (amp.size() != x.size() || phase.size() != x.size()) {
    throw std::invalid_argument("anh_reconstruct_with_tracks: track length differs from N");
  }
  FundamentalEstimate f;
  f.window = pipeline_window(x, cfg);
  f.noise_variance = estimate_noise(x, f.window);
  f.component.amp = amp;
  f.component.phase = phase;
  f.component.y.resize(x.size());
  for (std::size_t n = 0; n < x.size(); ++n) {
    f.component.y[n] = std::polar(amp.amp[n], 2.0 * std::numbers::pi * phase.phi[n]);
  }
  f.component.non_monotone = !phase.is_strictly_increasing();
  return fit_orders(x, std::move(f), cfg);
}

MultiResult anh_reconstruct_multi(const Signal& x, const PipelineConfig& cfg) {
  cfg.validate();
  const Window w = pipeline_window(x, cfg);
  const SearchBands bands = search_bands(x, cfg);
  const AnalysisResult a = run_analysis(x, w, cfg, bands);
  const TfMagnitude mag = search_magnitude(a, bands);

  const Ridge first = extract_ridge(mag, cfg.ridge);
  const auto mask_width =
      static_cast<std::size_t>(std::max(1.0, std::ceil(3.0 * window_bandwidth_bins(w, x.size()))));
  const Ridge second = extract_ridge(mask_band(mag, first, mask_width), cfg.ridge);
  if (std::abs(first.mean_bin() - second.mean_bin()) <= 2.0) {
    throw std::runtime_error("ridge: second ridge collapsed onto the first (mean bins " +
                             std::to_string(first.mean_bin()) + " and " +
                             std::to_string(second.mean_bin()) + ")");
  }
  std::array<const Ridge*, 2> ridges{&first, &second};
  if (second.mean_bin() < first.mean_bin()) std::swap(ridges[0], ridges[1]);

  MultiResult res;
  for (const Ridge* rg : ridges) {
    std::vector<std::size_t> widths(x.size());
    for (std::size_t n = 0; n < x.size(); ++n) {
      const std::size_t gap = first.bins[n] > second.bins[n] ? first.bins[n] - second.bins[n]
                                                            : second.bins[n] - first.bins[n];
      widths[n] = std::max<std::size_t>(1, std::min(guarded_width(cfg, rg->bins[n]), gap / 2));
    }
    if (cfg.adaptive_band) fit_band_to_noise(a.stft, *rg, a.noise_variance, widths);
    FundamentalEstimate f;
    f.window = w;
    f.ridge = *rg;
    f.noise_variance = a.noise_variance;
    f.component = reconstruct_band(a.stft, *rg, widths);
    require_component(f.component, rg == &first ? "the first ridge" : "the second ridge");
    res.components.push_back(std::move(f));
  }

  res.r1_max = r_max(x.fs(), max_track_frequency(res.components[0]));
  res.r2_max = r_max(x.fs(), max_track_frequency(res.components[1]));
  const auto& c1 = res.components[0].component;
  const auto& c2 = res.components[1].component;
  const OrderSweep2D sweep(x, c1.amp, c1.phase, c2.amp, c2.phase, res.r1_max, res.r2_max);

  Criteria2DParams params;
  params.c = *std::min_element(cfg.c_set.begin(), cfg.c_set.end());
  params.h = cfg.fixed_h;
  params.sigma2 = a.noise_variance;
  for (Criterion c : cfg.criteria) {
    res.surfaces.push_back(criteria_2d(sweep, c, params));
    const auto& s = res.surfaces.back();
    MultiResult::Choice ch;
    ch.criterion = c;
    ch.r1 = s.r1_star;
    ch.r2 = s.r2_star;
    std::tie(ch.coefficients1, ch.coefficients2) = sweep.coefficients(ch.r1, ch.r2);
    ch.reconstruction = sweep.at(ch.r1, ch.r2).fitted;
    ch.mse = sweep.at(ch.r1, ch.r2).mse;
    res.choices.push_back(std::move(ch));
  }
  return res;
}

std::vector<double> denoise_threshold(const Signal& x, const PipelineConfig& cfg, ThresholdMode mode) {
  cfg.validate();
  const Window w = pipeline_window(x, cfg);
  const double sigma_hat = std::sqrt(estimate_noise(x, w));
  return threshold_synthesis(x, w, 3.0 * sigma_hat * w.norm2(), mode);
}

}  // namespace anh
