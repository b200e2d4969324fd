#include "anhkit/bench.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace anh {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::string list(const std::vector<double>& v) {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : ",") + fmt(x);
  return s;
}

std::string list(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t x : v) s += (s.empty() ? "" : ",") + std::to_string(x);
  return s;
}

void finish(BenchReport& rep, std::vector<std::vector<BenchRow>>& per_task) {
  for (auto& rows : per_task) {
    for (auto& r : rows) rep.rows.push_back(std::move(r));
  }
  std::sort(rep.rows.begin(), rep.rows.end());
}

}  // namespace

std::vector<const BenchRow*> BenchReport::select(const std::string& condition,
                                                 const std::string& method) const {
  std::vector<const BenchRow*> out;
  for (const auto& r : rows) {
    if (r.condition == condition && r.method == method) out.push_back(&r);
  }
  return out;
}

std::vector<std::string> BenchReport::conditions() const {
  std::set<std::string> s;
  for (const auto& r : rows) s.insert(r.condition);
  return {s.begin(), s.end()};
}

std::uint64_t task_seed(std::uint64_t seed, std::uint64_t condition, std::uint64_t realization) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(condition), static_cast<std::uint32_t>(realization),
                    static_cast<std::uint32_t>(realization >> 32)};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

WaveShape random_wave_shape(std::size_t r0, std::uint64_t seed, bool random_phase, double lo,
                            double hi) {
  if (r0 < 1) throw std::invalid_argument("random_wave_shape: r0 must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> amp(lo, hi);
  std::uniform_real_distribution<double> ph(0.0, 2.0 * std::numbers::pi);
  std::vector<double> a(r0, 1.0);
  std::vector<double> p(r0, 0.0);
  for (std::size_t l = 1; l < r0; ++l) a[l] = amp(rng);
  if (random_phase) {
    for (auto& v : p) v = ph(rng);
  }
  return WaveShape::from_polar(a, p);
}

std::string phase_family_name(PhaseFamily f) {
  switch (f) {
    case PhaseFamily::NoModulation: return "nm";
    case PhaseFamily::LinearModulation: return "lm";
    case PhaseFamily::SinusoidalModulation: return "sm";
  }
  return "?";
}

double interior_snr(std::span<const double> reference, std::span<const double> estimate,
                    std::size_t edge) {
  if (reference.size() != estimate.size() || 2 * edge >= reference.size()) {
    throw std::invalid_argument("interior_snr: bad lengths or edge");
  }
  const std::size_t len = reference.size() - 2 * edge;
  return snr_out(reference.subspan(edge, len), estimate.subspan(edge, len));
}

BenchReport bench_order_recovery(const OrderRecoveryConfig& cfg) {
  if (cfg.realizations < 1) throw std::invalid_argument("bench: realizations must be >= 1");
  cfg.pipeline.validate();
  BenchReport rep;
  rep.name = "order-recovery";
  rep.seed = cfg.seed;
  rep.parameters = {{"realizations", std::to_string(cfg.realizations)},
                    {"orders", list(cfg.orders)},
                    {"snr_db", list(cfg.snr_db)},
                    {"fs", fmt(cfg.fs)},
                    {"duration", fmt(cfg.duration)},
                    {"amp_rate", fmt(cfg.amp_rate)}};

  struct Condition {
    PhaseFamily family;
    std::size_t r0;
    double snr;
    std::string label;
  };
  std::vector<Condition> conds;
  for (auto f : cfg.families) {
    for (auto r0 : cfg.orders) {
      for (double snr : cfg.snr_db) {
        conds.push_back({f, r0, snr,
                         phase_family_name(f) + "/r0=" + std::to_string(r0) + "/snr=" + fmt(snr)});
      }
    }
  }
  std::vector<PhaseTrack> phases;
  for (auto f : cfg.families) phases.push_back(phase_family(f, cfg.fs, cfg.duration));
  const std::size_t n = sample_count(cfg.fs, cfg.duration);
  const AmplitudeTrack amp = sqrt_amplitude(cfg.amp_rate, cfg.fs, n);
  const std::size_t edge = pipeline_window(Signal(std::vector<double>(n, 0.0), cfg.fs), cfg.pipeline).half_length;

  const std::size_t n_tasks = conds.size() * cfg.realizations;
  std::vector<std::vector<BenchRow>> per_task(n_tasks);
  std::size_t failures = 0;
#pragma omp parallel for schedule(dynamic) reduction(+ : failures)
  for (std::ptrdiff_t ts = 0; ts < static_cast<std::ptrdiff_t>(n_tasks); ++ts) {
    const auto t = static_cast<std::size_t>(ts);
    const std::size_t ci = t / cfg.realizations;
    const std::size_t ri = t % cfg.realizations;
    const Condition& c = conds[ci];
    const std::uint64_t s = task_seed(cfg.seed, ci, ri);
    std::mt19937_64 rng(s);
    try {
      const WaveShape ws = random_wave_shape(c.r0, rng());
      const auto fam = static_cast<std::size_t>(
          std::find(cfg.families.begin(), cfg.families.end(), c.family) - cfg.families.begin());
      const Signal clean = synth_anh(ws, amp, phases[fam]);
      const Signal noisy = add_noise(clean, c.snr, rng());
      const AnhResult res = anh_reconstruct(noisy, cfg.pipeline);
      for (const auto& ch : res.choices) {
        BenchRow row;
        row.condition = c.label;
        row.method = ch.criterion ? std::string(1, criterion_code(*ch.criterion))
                                  : "fixed" + std::to_string(ch.r);
        row.seed = s;
        row.r_star = std::to_string(ch.r);
        row.snr_out = interior_snr(clean.samples(), ch.reconstruction, edge);
        per_task[t].push_back(std::move(row));
      }
    } catch (const std::exception&) {
      ++failures;
    }
  }
  rep.failures = failures;
  finish(rep, per_task);
  return rep;
}

PipelineConfig PulseDenoiseConfig::default_pipeline() {
  PipelineConfig p;
  p.use_deshape = true;
  p.f_range = FrequencyRange{0.5, 3.0};
  for (double spread : {25.0, 35.0, 50.0, 70.0, 100.0, 140.0, 200.0, 280.0}) {
    p.renyi_sigma_grid.push_back(1.0 / (4.0 * spread * spread));
  }
  p.renyi_frame_stride = 8;
  return p;
}

PipelineConfig TwoChirpConfig::default_pipeline() {
  PipelineConfig p;
  p.f_range = FrequencyRange{100.0, 250.0};
  return p;
}

BenchReport bench_pulse_denoise(const PulseDenoiseConfig& cfg) {
  cfg.pipeline.validate();
  std::vector<WaveShape> shapes = cfg.shapes;
  if (shapes.empty()) shapes = bundled_pulse_templates(cfg.n_shapes);
  if (shapes.size() > cfg.n_shapes) shapes.resize(cfg.n_shapes);
  if (shapes.empty()) throw std::invalid_argument("bench: no pulse shapes");

  BenchReport rep;
  rep.name = "pulse-denoise";
  rep.seed = cfg.seed;
  rep.parameters = {{"shapes", std::to_string(shapes.size())},
                    {"snr_db", list(cfg.snr_db)},
                    {"fixed_orders", list(cfg.fixed_orders)},
                    {"fs", fmt(cfg.fs)},
                    {"duration", fmt(cfg.duration)},
                    {"amp_rate", fmt(cfg.amp_rate)},
                    {"hrv", fmt(cfg.f_low) + "," + fmt(cfg.f_high) + "," + fmt(cfg.lhpr) + "," +
                                fmt(cfg.max_dev)}};

  const PhaseTrack phase = hrv_phase(cfg.f_low, cfg.f_high, cfg.lhpr, cfg.max_dev, cfg.fs, cfg.duration);
  const AmplitudeTrack amp = sqrt_amplitude(cfg.amp_rate, cfg.fs, phase.size());
  PipelineConfig pcfg = cfg.pipeline;
  pcfg.fixed_orders = cfg.fixed_orders;

  const std::size_t n_tasks = shapes.size() * cfg.snr_db.size();
  std::vector<std::vector<BenchRow>> per_task(n_tasks);
  std::size_t failures = 0;
#pragma omp parallel for schedule(dynamic) reduction(+ : failures)
  for (std::ptrdiff_t ts = 0; ts < static_cast<std::ptrdiff_t>(n_tasks); ++ts) {
    const auto t = static_cast<std::size_t>(ts);
    const std::size_t shape = t / cfg.snr_db.size();
    const double snr = cfg.snr_db[t % cfg.snr_db.size()];
    const std::uint64_t s = task_seed(cfg.seed, t, 0);
    const std::string label = "shape=" + std::to_string(shape) + "/snr=" + fmt(snr);
    try {
      const Signal clean = synth_anh(shapes[shape], amp, phase);
      const Signal noisy = add_noise(clean, snr, s);
      const AnhResult res = anh_reconstruct(noisy, pcfg);
      const Window& w = res.fundamental.window;
      const std::size_t edge = w.half_length;
      auto push = [&](std::string method, std::string r, std::span<const double> est) {
        per_task[t].push_back({label, std::move(method), s, std::move(r),
                               interior_snr(clean.samples(), est, edge)});
      };
      for (const auto& ch : res.choices) {
        push(ch.criterion ? std::string(1, criterion_code(*ch.criterion)) : "fixed" + std::to_string(ch.r),
             std::to_string(ch.r), ch.reconstruction);
      }
      const double eta = 3.0 * std::sqrt(res.fundamental.noise_variance) * w.norm2();
      push("hard", "", threshold_synthesis(noisy, w, eta, ThresholdMode::Hard));
      push("soft", "", threshold_synthesis(noisy, w, eta, ThresholdMode::Soft));
    } catch (const std::exception&) {
      ++failures;
    }
  }
  rep.failures = failures;
  finish(rep, per_task);
  return rep;
}

PhaseTrack two_chirp_phase(std::size_t component, double fs, double duration) {
  const std::size_t n = sample_count(fs, duration);
  PhaseTrack p;
  p.fs = fs;
  p.phi.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / fs;
    if (component == 1) {
      p.phi[i] = 120.0 * t + 15.0 * t * t;
    } else if (component == 2) {
      p.phi[i] = 200.0 * t + (25.0 / (2.0 * std::numbers::pi)) * std::cos(2.0 * std::numbers::pi * t);
    } else {
      throw std::invalid_argument("two_chirp_phase: component must be 1 or 2");
    }
  }
  return p;
}

Signal two_chirp(const WaveShape& s1, const WaveShape& s2, double fs, double duration) {
  const PhaseTrack p1 = two_chirp_phase(1, fs, duration);
  const PhaseTrack p2 = two_chirp_phase(2, fs, duration);
  const AmplitudeTrack unit{std::vector<double>(p1.size(), 1.0)};
  const Signal a = synth_anh(s1, unit, p1, false);
  const Signal b = synth_anh(s2, unit, p2, false);
  std::vector<double> sum(a.size());
  for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = a[i] + b[i];
  return Signal(std::move(sum), fs);
}

BenchReport bench_two_chirp(const TwoChirpConfig& cfg) {
  if (cfg.realizations < 1) throw std::invalid_argument("bench: realizations must be >= 1");
  cfg.pipeline.validate();
  BenchReport rep;
  rep.name = "two-chirp";
  rep.seed = cfg.seed;
  rep.parameters = {{"realizations", std::to_string(cfg.realizations)},
                    {"r1", std::to_string(cfg.r1)},
                    {"r2", std::to_string(cfg.r2)},
                    {"snr_db", list(cfg.snr_db)},
                    {"fs", fmt(cfg.fs)},
                    {"duration", fmt(cfg.duration)}};
  const std::size_t n = sample_count(cfg.fs, cfg.duration);
  const std::size_t edge = pipeline_window(Signal(std::vector<double>(n, 0.0), cfg.fs), cfg.pipeline).half_length;
  const std::size_t n_tasks = cfg.snr_db.size() * cfg.realizations;
  std::vector<std::vector<BenchRow>> per_task(n_tasks);
  std::size_t failures = 0;
#pragma omp parallel for schedule(dynamic) reduction(+ : failures)
  for (std::ptrdiff_t ts = 0; ts < static_cast<std::ptrdiff_t>(n_tasks); ++ts) {
    const auto t = static_cast<std::size_t>(ts);
    const std::size_t ci = t / cfg.realizations;
    const std::size_t ri = t % cfg.realizations;
    const double snr = cfg.snr_db[ci];
    const std::uint64_t s = task_seed(cfg.seed, ci, ri);
    std::mt19937_64 rng(s);
    try {
      const WaveShape w1 = random_wave_shape(cfg.r1, rng(), false);
      const WaveShape w2 = random_wave_shape(cfg.r2, rng(), false);
      const Signal clean = two_chirp(w1, w2, cfg.fs, cfg.duration);
      const Signal noisy = add_noise(clean, snr, rng());
      const MultiResult res = anh_reconstruct_multi(noisy, cfg.pipeline);
      for (const auto& ch : res.choices) {
        per_task[t].push_back({"snr=" + fmt(snr), std::string(1, criterion_code(ch.criterion)), s,
                               std::to_string(ch.r1) + ":" + std::to_string(ch.r2),
                               interior_snr(clean.samples(), ch.reconstruction, edge)});
      }
    } catch (const std::exception&) {
      ++failures;
    }
  }
  rep.failures = failures;
  finish(rep, per_task);
  return rep;
}

}  // namespace anh
