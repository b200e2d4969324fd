// anhkit command-line driver.
//
//   anhkit synth        synthesize a signal (optionally noisy)
//   anhkit analyze      spectrogram, de-shape, ridge and fundamental tracks
//   anhkit reconstruct  adaptive order selection and reconstruction
//   anhkit denoise      STFT thresholding baselines
//   anhkit bench        Monte-Carlo harnesses
//
// Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <omp.h>

#include <CLI11.hpp>

#include "anhkit/bench.hpp"
#include "anhkit/io.hpp"
#include "anhkit/pipeline.hpp"

namespace {

using anh::io::Json;
namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------- manifest

struct Manifest {
  std::string command;
  std::vector<std::string> argv;
  Json config = Json::object();
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::uint64_t seed = 0;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  void write(const fs::path& path) const {
    const std::time_t now = std::time(nullptr);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    Json j{{"command", command},
           {"argv", argv},
           {"config", config},
           {"inputs", inputs},
           {"outputs", outputs},
           {"seed", seed},
           {"version", ANHKIT_VERSION},
           {"finished_utc", stamp},
           {"wall_clock_s",
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};
    anh::io::write_json(path, j);
  }
};

// ---------------------------------------------------------------- options

std::optional<std::uint64_t> env_seed() {
  const char* v = std::getenv("ANHKIT_SEED");
  if (!v || !*v) return std::nullopt;
  try {
    std::size_t used = 0;
    const auto s = std::stoull(v, &used);
    if (used != std::string(v).size()) throw std::invalid_argument(v);
    return s;
  } catch (const std::exception&) {
    throw UsageError(std::string("ANHKIT_SEED is not an unsigned integer: ") + v);
  }
}

std::vector<double> parse_list(const std::string& s, const char* what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw UsageError(std::string(what) + ": cannot parse '" + cell + "'");
    }
  }
  if (out.empty()) throw UsageError(std::string(what) + ": empty list");
  return out;
}

std::vector<std::size_t> parse_orders(const std::string& s, const char* what) {
  std::vector<std::size_t> out;
  for (double v : parse_list(s, what)) {
    if (!(v >= 1.0) || v != std::floor(v)) throw UsageError(std::string(what) + ": orders are positive integers");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

// Flags shared by every command that runs the pipeline. Unset flags leave
// the JSON or built-in value alone.
struct PipelineFlags {
  std::optional<std::string> config;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::optional<double> sigma;
  std::optional<std::string> renyi;
  std::optional<bool> deshape;
  std::optional<double> gamma;
  std::optional<double> lambda;
  std::optional<double> mu;
  std::optional<std::size_t> max_jump;
  std::optional<std::size_t> delta;
  std::optional<bool> guard;
  std::optional<bool> adaptive_band;
  std::vector<double> f_range;
  std::optional<std::string> criteria;
  std::optional<std::string> c_set;
  std::optional<std::size_t> fixed_h;
  std::optional<std::size_t> r_max;
  std::optional<std::string> orders;

  void add_common(CLI::App& app) {
    app.add_option("--config", config, "JSON file with pipeline settings")->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "random seed (default: ANHKIT_SEED or 1)");
    app.add_option("--jobs", jobs, "OpenMP threads")->check(CLI::PositiveNumber);
  }

  void add_pipeline(CLI::App& app) {
    app.add_option("--sigma", sigma, "Gaussian window parameter (g(n) = exp(-2 sigma n^2))");
    app.add_option("--renyi", renyi, "comma-separated window time spreads in samples; pick by Renyi entropy");
    app.add_flag("--deshape,!--no-deshape", deshape, "extract the ridge on the de-shape STFT");
    app.add_option("--gamma", gamma, "de-shape cepstral exponent");
    app.add_option("--lambda", lambda, "ridge first-difference penalty");
    app.add_option("--mu", mu, "ridge second-difference penalty");
    app.add_option("--max-jump", max_jump, "ridge jump bound I in bins");
    app.add_option("--delta", delta, "band half-width in bins");
    app.add_flag("--harmonic-guard,!--no-harmonic-guard", guard, "cap the band at half the ridge bin");
    app.add_flag("--adaptive-band,!--no-adaptive-band", adaptive_band,
                 "trim the band where it holds less signal than noise");
    app.add_option("--f-range", f_range, "fundamental search band in Hz")->expected(2);
    app.add_option("--criteria", criteria, "criteria to evaluate, e.g. g,r,w,k");
    app.add_option("--c-set", c_set, "Wang c values, comma-separated");
    app.add_option("--fixed-h", fixed_h, "fix the Kavalieris-Hannan AR order");
    app.add_option("--r-max", r_max, "override the largest order examined");
  }

  anh::PipelineConfig build(anh::PipelineConfig cfg, std::uint64_t& seed_out) const {
    if (jobs) omp_set_num_threads(*jobs);
    bool json_seed = false;
    try {
      if (config) {
        const Json j = anh::io::read_json(*config);
        anh::io::apply_json(j, cfg);
        json_seed = j.contains("seed");
      }
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    if (sigma) {
      cfg.sigma = *sigma;
      cfg.renyi_sigma_grid.clear();
    }
    if (renyi) {
      cfg.renyi_sigma_grid.clear();
      for (double spread : parse_list(*renyi, "--renyi")) {
        if (!(spread > 0.0)) throw UsageError("--renyi: spreads must be positive");
        cfg.renyi_sigma_grid.push_back(1.0 / (4.0 * spread * spread));
      }
    }
    if (deshape) cfg.use_deshape = *deshape;
    if (gamma) cfg.gamma = *gamma;
    if (lambda) cfg.ridge.lambda = *lambda;
    if (mu) cfg.ridge.mu = *mu;
    if (max_jump) cfg.ridge.max_jump = *max_jump;
    if (delta) cfg.delta_bins = *delta;
    if (guard) cfg.harmonic_guard = *guard;
    if (adaptive_band) cfg.adaptive_band = *adaptive_band;
    if (!f_range.empty()) cfg.f_range = anh::FrequencyRange{f_range[0], f_range[1]};
    if (criteria) {
      try {
        cfg.criteria = criteria->empty() ? std::vector<anh::Criterion>{} : anh::parse_criteria(*criteria);
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
    }
    if (c_set) cfg.c_set = parse_list(*c_set, "--c-set");
    if (fixed_h) cfg.fixed_h = *fixed_h;
    if (r_max) cfg.r_max_override = *r_max;
    if (orders) {
      cfg.fixed_orders = parse_orders(*orders, "--order");
      // A fixed order alone bypasses the criteria.
      if (!criteria) cfg.criteria.clear();
    }
    if (seed) cfg.seed = *seed;
    else if (!json_seed) cfg.seed = env_seed().value_or(1);
    seed_out = cfg.seed;
    try {
      cfg.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    return cfg;
  }
};

anh::Signal load_signal(const std::string& path, std::optional<double> fs_hz) {
  if (fs_hz && !(*fs_hz > 0.0)) throw UsageError("--fs must be positive");
  return anh::io::read_signal_csv(path, fs_hz);
}

std::vector<double> time_axis(const anh::Signal& x) {
  std::vector<double> t(x.size());
  for (std::size_t n = 0; n < x.size(); ++n) t[n] = x.time(n);
  return t;
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
  std::string phase = "sm";
  std::optional<std::size_t> r0;
  std::optional<std::string> wsf;
  std::optional<std::string> period;
  std::optional<double> fs;
  std::optional<double> duration;
  double amp_rate = 0.05;
  std::optional<double> snr;
  std::optional<std::uint64_t> seed;
  bool zero_phase = false;
  double f_low = 0.05;
  double f_high = 0.2;
  double lhpr = 3.0;
  double max_dev = 0.035;
  std::string out;
  std::optional<std::string> clean_out;
};

int cmd_synth(const SynthArgs& a, Manifest& m) {
  const bool hrv = a.phase == "hrv";
  const double fs_hz = a.fs.value_or(hrv ? 58.33 : 3000.0);
  const double duration = a.duration.value_or(hrv ? 120.0 : 1.0);
  const std::uint64_t seed = a.seed ? *a.seed : env_seed().value_or(1);
  m.seed = seed;

  const int sources = (a.r0 && !a.period ? 1 : 0) + (a.wsf ? 1 : 0) + (a.period ? 1 : 0);
  if (sources != 1) throw UsageError("synth: give exactly one of --r0, --wsf or --period (with --r0)");
  if (a.period && !a.r0) throw UsageError("synth: --period needs --r0");

  anh::WaveShape ws;
  std::mt19937_64 rng(seed);
  if (a.wsf) {
    ws = anh::io::read_wave_shape_json(*a.wsf);
    m.inputs.push_back(*a.wsf);
  } else if (a.period) {
    ws = anh::wsf_from_template(anh::io::read_period_csv(*a.period), *a.r0);
    m.inputs.push_back(*a.period);
  } else {
    if (*a.r0 < 1) throw UsageError("synth: --r0 must be >= 1");
    ws = anh::random_wave_shape(*a.r0, rng(), !a.zero_phase);
  }
  ws.validate();

  anh::PhaseTrack phase;
  if (hrv) {
    phase = anh::hrv_phase(a.f_low, a.f_high, a.lhpr, a.max_dev, fs_hz, duration);
  } else if (a.phase == "nm") {
    phase = anh::phase_family(anh::PhaseFamily::NoModulation, fs_hz, duration);
  } else if (a.phase == "lm") {
    phase = anh::phase_family(anh::PhaseFamily::LinearModulation, fs_hz, duration);
  } else if (a.phase == "sm") {
    phase = anh::phase_family(anh::PhaseFamily::SinusoidalModulation, fs_hz, duration);
  } else {
    throw UsageError("synth: --phase must be nm, lm, sm or hrv");
  }
  const auto amp = anh::sqrt_amplitude(a.amp_rate, fs_hz, phase.size());
  const anh::Signal clean = anh::synth_anh(ws, amp, phase);
  const anh::Signal x = a.snr ? anh::add_noise(clean, *a.snr, rng()) : clean;

  anh::io::write_signal_csv(a.out, x);
  m.outputs.push_back(a.out);
  if (a.clean_out) {
    anh::io::write_signal_csv(*a.clean_out, clean);
    m.outputs.push_back(*a.clean_out);
  }
  const fs::path wsf_path = fs::path(a.out).replace_extension(".wsf.json");
  anh::io::write_json(wsf_path, anh::io::to_json(ws));
  m.outputs.push_back(wsf_path.string());
  m.config = {{"phase", a.phase},         {"fs", fs_hz},        {"duration", duration},
              {"amp_rate", a.amp_rate},   {"r0", ws.order()},   {"zero_phase", a.zero_phase},
              {"snr_db", a.snr ? Json(*a.snr) : Json(nullptr)}};
  if (hrv) {
    m.config["hrv"] = {{"f_low", a.f_low}, {"f_high", a.f_high}, {"lhpr", a.lhpr}, {"max_dev", a.max_dev}};
  }
  m.write(fs::path(a.out).replace_extension(".manifest.json"));
  return 0;
}

// ---------------------------------------------------------------- analyze

struct AnalyzeArgs {
  std::string input;
  std::optional<double> fs;
  std::string out_dir = "analysis";
  bool no_spectrogram = false;
};

int cmd_analyze(const AnalyzeArgs& a, const PipelineFlags& flags, Manifest& m) {
  const anh::Signal x = load_signal(a.input, a.fs);
  m.inputs.push_back(a.input);
  const anh::PipelineConfig cfg = flags.build(anh::PipelineConfig{}, m.seed);
  m.config = anh::io::to_json(cfg);
  const fs::path dir = a.out_dir;

  const anh::FundamentalEstimate f = anh::estimate_fundamental(x, cfg);
  if (!a.no_spectrogram) {
    const anh::TFR tfr = anh::stft(x, f.window);
    anh::io::write_spectrogram(dir / "spectrogram.csv", tfr);
    m.outputs.push_back((dir / "spectrogram.csv").string());
    if (cfg.use_deshape) {
      const anh::FrequencyRange range =
          cfg.f_range.value_or(anh::FrequencyRange{tfr.bin_hz(), x.fs() / 2.0});
      anh::io::write_spectrogram(dir / "deshape.csv", anh::deshape(tfr, cfg.gamma, range));
      m.outputs.push_back((dir / "deshape.csv").string());
    }
  }
  anh::io::write_ridge_csv(dir / "ridge.csv", f.ridge);
  anh::io::write_series_csv(dir / "component.csv", {"t", "amp", "phase"},
                            {time_axis(x), f.component.amp.amp, f.component.phase.phi});
  m.outputs.push_back((dir / "ridge.csv").string());
  m.outputs.push_back((dir / "component.csv").string());
  anh::io::write_json(dir / "analysis.json",
                      Json{{"window_sigma", f.window.sigma},
                           {"window_half_length", f.window.half_length},
                           {"noise_variance", f.noise_variance},
                           {"ridge_mean_hz", f.ridge.mean_bin() * x.fs() / static_cast<double>(x.size())},
                           {"phase_clipped", f.component.clipped},
                           {"phase_non_monotone", f.component.non_monotone}});
  m.outputs.push_back((dir / "analysis.json").string());
  m.write(dir / "manifest.json");
  return 0;
}

// ---------------------------------------------------------------- reconstruct

struct ReconstructArgs {
  std::string input;
  std::optional<double> fs;
  std::string out_dir = "reconstruction";
  std::size_t components = 1;
};

std::string choice_label(const std::optional<anh::Criterion>& c, std::size_t r) {
  return c ? std::string(1, anh::criterion_code(*c)) : "fixed" + std::to_string(r);
}

int cmd_reconstruct(const ReconstructArgs& a, const PipelineFlags& flags, Manifest& m) {
  const anh::Signal x = load_signal(a.input, a.fs);
  m.inputs.push_back(a.input);
  const anh::PipelineConfig cfg = flags.build(anh::PipelineConfig{}, m.seed);
  m.config = anh::io::to_json(cfg);
  m.config["components"] = a.components;
  const fs::path dir = a.out_dir;

  std::vector<std::string> header{"t"};
  std::vector<std::vector<double>> cols{time_axis(x)};
  Json coeffs = Json::object();

  if (a.components == 1) {
    const anh::AnhResult res = anh::anh_reconstruct(x, cfg);
    for (const auto& ch : res.choices) {
      const std::string label = choice_label(ch.criterion, ch.r);
      header.push_back(label);
      cols.push_back(ch.reconstruction);
      coeffs[label] = anh::io::to_json(ch.coefficients);
      coeffs[label]["mse"] = ch.mse;
    }
    for (const auto& cv : res.curves) {
      const fs::path p = dir / (std::string("curve_") + anh::criterion_code(cv.kind) + ".csv");
      anh::io::write_curve_csv(p, cv);
      m.outputs.push_back(p.string());
    }
    std::vector<double> r_axis(res.mse_curve.size());
    for (std::size_t r = 0; r < r_axis.size(); ++r) r_axis[r] = static_cast<double>(r + 1);
    anh::io::write_series_csv(dir / "mse.csv", {"r", "mse"}, {r_axis, res.mse_curve});
    anh::io::write_ridge_csv(dir / "ridge.csv", res.fundamental.ridge);
    m.outputs.push_back((dir / "mse.csv").string());
    m.outputs.push_back((dir / "ridge.csv").string());
    coeffs["r_max"] = res.r_max;
    coeffs["noise_variance"] = res.fundamental.noise_variance;
  } else if (a.components == 2) {
    if (!cfg.fixed_orders.empty()) throw UsageError("reconstruct: --order applies to one component only");
    const anh::MultiResult res = anh::anh_reconstruct_multi(x, cfg);
    for (const auto& ch : res.choices) {
      const std::string label(1, anh::criterion_code(ch.criterion));
      header.push_back(label);
      cols.push_back(ch.reconstruction);
      coeffs[label] = {{"r1", ch.r1},
                       {"r2", ch.r2},
                       {"mse", ch.mse},
                       {"component1", anh::io::to_json(ch.coefficients1)},
                       {"component2", anh::io::to_json(ch.coefficients2)}};
    }
    for (const auto& s : res.surfaces) {
      const fs::path p = dir / (std::string("surface_") + anh::criterion_code(s.kind) + ".csv");
      anh::io::write_surface_csv(p, s);
      m.outputs.push_back(p.string());
    }
    for (std::size_t i = 0; i < res.components.size(); ++i) {
      const fs::path p = dir / ("ridge" + std::to_string(i + 1) + ".csv");
      anh::io::write_ridge_csv(p, res.components[i].ridge);
      m.outputs.push_back(p.string());
    }
    coeffs["r1_max"] = res.r1_max;
    coeffs["r2_max"] = res.r2_max;
  } else {
    throw UsageError("reconstruct: --components must be 1 or 2");
  }
  anh::io::write_series_csv(dir / "reconstruction.csv", header, cols);
  anh::io::write_json(dir / "coefficients.json", coeffs);
  m.outputs.push_back((dir / "reconstruction.csv").string());
  m.outputs.push_back((dir / "coefficients.json").string());
  m.write(dir / "manifest.json");
  return 0;
}

// ---------------------------------------------------------------- denoise

struct DenoiseArgs {
  std::string input;
  std::optional<double> fs;
  std::string mode = "hard";
  std::string out = "denoised.csv";
};

int cmd_denoise(const DenoiseArgs& a, const PipelineFlags& flags, Manifest& m) {
  const anh::Signal x = load_signal(a.input, a.fs);
  m.inputs.push_back(a.input);
  const anh::PipelineConfig cfg = flags.build(anh::PipelineConfig{}, m.seed);
  m.config = anh::io::to_json(cfg);
  m.config["mode"] = a.mode;
  std::vector<std::string> header{"t"};
  std::vector<std::vector<double>> cols{time_axis(x)};
  for (const char* mode : {"hard", "soft"}) {
    if (a.mode != mode && a.mode != "both") continue;
    header.emplace_back(mode);
    cols.push_back(anh::denoise_threshold(
        x, cfg, std::string(mode) == "hard" ? anh::ThresholdMode::Hard : anh::ThresholdMode::Soft));
  }
  if (cols.size() == 1) throw UsageError("denoise: --mode must be hard, soft or both");
  anh::io::write_series_csv(a.out, header, cols);
  m.outputs.push_back(a.out);
  m.write(fs::path(a.out).replace_extension(".manifest.json"));
  return 0;
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
  std::string mode;
  std::optional<std::size_t> realizations;
  std::optional<std::string> snr;
  std::optional<std::string> orders;
  std::optional<std::string> families;
  std::optional<std::size_t> shapes;
  std::optional<std::string> fixed;
  std::string out_dir = "bench";
};

int cmd_bench(const BenchArgs& a, const PipelineFlags& flags, Manifest& m) {
  anh::BenchReport rep;
  if (a.mode == "order-recovery") {
    anh::OrderRecoveryConfig c;
    c.pipeline = flags.build(c.pipeline, m.seed);
    c.seed = m.seed;
    if (a.realizations) c.realizations = *a.realizations;
    if (a.snr) c.snr_db = parse_list(*a.snr, "--snr");
    if (a.orders) c.orders = parse_orders(*a.orders, "--orders");
    if (a.families) {
      c.families.clear();
      std::stringstream ss(*a.families);
      std::string f;
      while (std::getline(ss, f, ',')) {
        if (f == "nm") c.families.push_back(anh::PhaseFamily::NoModulation);
        else if (f == "lm") c.families.push_back(anh::PhaseFamily::LinearModulation);
        else if (f == "sm") c.families.push_back(anh::PhaseFamily::SinusoidalModulation);
        else throw UsageError("--families: expected nm, lm or sm, got '" + f + "'");
      }
    }
    m.config = anh::io::to_json(c.pipeline);
    rep = anh::bench_order_recovery(c);
  } else if (a.mode == "pulse-denoise") {
    anh::PulseDenoiseConfig c;
    c.pipeline = flags.build(c.pipeline, m.seed);
    c.seed = m.seed;
    if (a.snr) c.snr_db = parse_list(*a.snr, "--snr");
    if (a.shapes) c.n_shapes = *a.shapes;
    if (a.fixed) c.fixed_orders = parse_orders(*a.fixed, "--fixed");
    m.config = anh::io::to_json(c.pipeline);
    rep = anh::bench_pulse_denoise(c);
  } else if (a.mode == "two-chirp") {
    anh::TwoChirpConfig c;
    c.pipeline = flags.build(c.pipeline, m.seed);
    c.seed = m.seed;
    if (a.realizations) c.realizations = *a.realizations;
    if (a.snr) c.snr_db = parse_list(*a.snr, "--snr");
    m.config = anh::io::to_json(c.pipeline);
    rep = anh::bench_two_chirp(c);
  } else {
    throw UsageError("bench: mode must be order-recovery, pulse-denoise or two-chirp");
  }
  for (const auto& [k, v] : rep.parameters) m.config["bench"][k] = v;
  const fs::path dir = a.out_dir;
  anh::io::write_bench_csv(dir / "report.csv", rep);
  anh::io::write_json(dir / "summary.json", anh::io::bench_summary(rep));
  m.outputs.push_back((dir / "report.csv").string());
  m.outputs.push_back((dir / "summary.json").string());
  m.write(dir / "manifest.json");
  if (rep.failures > 0) {
    std::cerr << "anhkit bench: " << rep.failures << " realization(s) failed\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive non-harmonic model: wave-shape order selection and reconstruction"};
  app.set_version_flag("--version", ANHKIT_VERSION);
  app.require_subcommand(1);

  Manifest manifest;
  manifest.argv.assign(argv, argv + argc);

  SynthArgs synth;
  auto* sc = app.add_subcommand("synth", "synthesize an adaptive non-harmonic signal");
  sc->add_option("--phase", synth.phase, "nm, lm, sm or hrv")->capture_default_str();
  sc->add_option("--r0", synth.r0, "wave-shape order; random amplitudes in [0.1, 0.9] unless --wsf");
  sc->add_option("--wsf", synth.wsf, "wave-shape JSON {alpha, beta}")->check(CLI::ExistingFile);
  sc->add_option("--period", synth.period, "sampled period CSV, projected onto --r0 harmonics")
      ->check(CLI::ExistingFile);
  sc->add_option("--fs", synth.fs, "sampling rate in Hz (3000; 58.33 for hrv)");
  sc->add_option("--duration", synth.duration, "seconds (1; 120 for hrv)");
  sc->add_option("--amp-rate", synth.amp_rate, "amplitude 1 + rate sqrt(t)")->capture_default_str();
  sc->add_option("--snr", synth.snr, "add white Gaussian noise at this SNR in dB");
  sc->add_option("--seed", synth.seed, "random seed (default: ANHKIT_SEED or 1)");
  sc->add_flag("--zero-phase", synth.zero_phase, "harmonic phases zero instead of uniform");
  sc->add_option("--f-low", synth.f_low, "HRV low frequency (Hz)")->capture_default_str();
  sc->add_option("--f-high", synth.f_high, "HRV high frequency (Hz)")->capture_default_str();
  sc->add_option("--lhpr", synth.lhpr, "HRV low/high power ratio")->capture_default_str();
  sc->add_option("--max-dev", synth.max_dev, "HRV maximal rate deviation")->capture_default_str();
  sc->add_option("-o,--output", synth.out, "signal CSV")->required();
  sc->add_option("--clean", synth.clean_out, "also write the noiseless signal here");

  PipelineFlags aflags;
  AnalyzeArgs analyze;
  auto* ac = app.add_subcommand("analyze", "spectrogram, ridge and fundamental tracks");
  ac->add_option("input", analyze.input, "signal CSV")->required()->check(CLI::ExistingFile);
  ac->add_option("--fs", analyze.fs, "sampling rate when the CSV has no time column");
  ac->add_option("-o,--output", analyze.out_dir, "output directory")->capture_default_str();
  ac->add_flag("--no-spectrogram", analyze.no_spectrogram, "skip the N x K matrices");
  aflags.add_common(*ac);
  aflags.add_pipeline(*ac);

  PipelineFlags rflags;
  ReconstructArgs recon;
  auto* rc = app.add_subcommand("reconstruct", "select the wave-shape order and reconstruct");
  rc->add_option("input", recon.input, "signal CSV")->required()->check(CLI::ExistingFile);
  rc->add_option("--fs", recon.fs, "sampling rate when the CSV has no time column");
  rc->add_option("-o,--output", recon.out_dir, "output directory")->capture_default_str();
  rc->add_option("--components", recon.components, "1 or 2")->capture_default_str();
  rc->add_option("--order", rflags.orders, "fixed order(s), comma-separated; skips the criteria");
  rflags.add_common(*rc);
  rflags.add_pipeline(*rc);

  PipelineFlags dflags;
  DenoiseArgs denoise;
  auto* dc = app.add_subcommand("denoise", "STFT hard or soft thresholding");
  dc->add_option("input", denoise.input, "signal CSV")->required()->check(CLI::ExistingFile);
  dc->add_option("--fs", denoise.fs, "sampling rate when the CSV has no time column");
  dc->add_option("--mode", denoise.mode, "hard, soft or both")->capture_default_str();
  dc->add_option("-o,--output", denoise.out, "output CSV")->capture_default_str();
  dflags.add_common(*dc);
  dflags.add_pipeline(*dc);

  PipelineFlags bflags;
  BenchArgs bench;
  auto* bc = app.add_subcommand("bench", "Monte-Carlo harnesses");
  bc->add_option("mode", bench.mode, "order-recovery, pulse-denoise or two-chirp")->required();
  bc->add_option("--realizations", bench.realizations, "realizations per condition");
  bc->add_option("--snr", bench.snr, "input SNRs in dB, comma-separated");
  bc->add_option("--orders", bench.orders, "true orders r0 (order-recovery)");
  bc->add_option("--families", bench.families, "phase families nm,lm,sm (order-recovery)");
  bc->add_option("--shapes", bench.shapes, "number of bundled pulse shapes (pulse-denoise)");
  bc->add_option("--fixed", bench.fixed, "fixed-order baselines (pulse-denoise)");
  bc->add_option("-o,--output", bench.out_dir, "output directory")->capture_default_str();
  bflags.add_common(*bc);
  bflags.add_pipeline(*bc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*sc) {
      manifest.command = "synth";
      return cmd_synth(synth, manifest);
    }
    if (*ac) {
      manifest.command = "analyze";
      return cmd_analyze(analyze, aflags, manifest);
    }
    if (*rc) {
      manifest.command = "reconstruct";
      return cmd_reconstruct(recon, rflags, manifest);
    }
    if (*dc) {
      manifest.command = "denoise";
      return cmd_denoise(denoise, dflags, manifest);
    }
    if (*bc) {
      manifest.command = "bench";
      return cmd_bench(bench, bflags, manifest);
    }
  } catch (const UsageError& e) {
    std::cerr << "anhkit: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "anhkit " << manifest.command << ": " << e.what() << "\n";
    return 1;
  }
  return 2;
}
