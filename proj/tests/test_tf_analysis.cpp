#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <complex>

#include <omp.h>

#include "anhkit/reference.hpp"
#include "anhkit/tf_analysis.hpp"
#include "support.hpp"

using namespace anh;
using Catch::Approx;
using test::kPi;

namespace {

double max_entry_diff(const TFR& a, const TFR& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
  return m;
}

double max_magnitude(const TFR& a) {
  double m = 0.0;
  for (const auto& v : a.values) m = std::max(m, std::abs(v));
  return m;
}

std::size_t argmax_bin(std::span<const Complex> row, std::size_t lo = 0) {
  std::size_t best = lo;
  for (std::size_t k = lo; k < row.size(); ++k) {
    if (std::abs(row[k]) > std::abs(row[best])) best = k;
  }
  return best;
}

}  // namespace

TEST_CASE("Gaussian window taps and truncation", "[tf]") {
  const Window w = gaussian_window(1e-4);
  CHECK(w.half_length == 304);
  CHECK(w.centre() == 1.0);
  CHECK(w.at(304) < 1e-8);
  CHECK(std::exp(-2e-4 * 303.0 * 303.0) >= 1e-8);
  for (std::ptrdiff_t m = 1; m <= 304; ++m) {
    CHECK(w.at(m) == w.at(-m));
    CHECK(w.at(m) == Approx(std::exp(-2e-4 * static_cast<double>(m * m))));
  }
  CHECK(w.at(400) == 0.0);
  CHECK_THROWS_AS(gaussian_window(0.0), std::invalid_argument);
  CHECK_THROWS_AS(gaussian_window(1e-4, 1.5), std::invalid_argument);
}

TEST_CASE("doubling sigma narrows the half-power width by sqrt 2", "[tf]") {
  // Half-power point from the taps by linear interpolation.
  auto half_power = [](const Window& w) {
    for (std::size_t m = 1; m <= w.half_length; ++m) {
      const double a = w.at(static_cast<std::ptrdiff_t>(m - 1));
      const double b = w.at(static_cast<std::ptrdiff_t>(m));
      if (b * b < 0.5) return static_cast<double>(m - 1) + (a * a - 0.5) / (a * a - b * b);
    }
    return 0.0;
  };
  const double w1 = half_power(gaussian_window(1e-4));
  const double w2 = half_power(gaussian_window(2e-4));
  CHECK(w1 / w2 == Approx(std::sqrt(2.0)).epsilon(0.01));
}

TEST_CASE("bins_in maps frequencies to the fs/N grid", "[tf]") {
  const BinRange r = bins_in({0.5, 3.0}, 58.33, 7000);
  CHECK(r.first == 61);   // ceil(0.5 * 7000 / 58.33)
  CHECK(r.last == 360);   // floor(3 * 7000 / 58.33)
  const BinRange all = bins_in({0.0, 1500.0}, 3000.0, 3000);
  CHECK(all.first == 0);
  CHECK(all.last == 1500);
  CHECK_THROWS_AS(bins_in({10.2, 10.4}, 3000.0, 3000), std::invalid_argument);
}

TEST_CASE("STFT matches a direct DFT of every frame", "[tf]") {
  for (std::size_t n : {64u, 65u, 97u}) {
    const Signal x = test::white_noise(n, 1.0, n);
    const Window w = gaussian_window(0.01);
    const TFR fast = stft(x, w);
    const TFR slow = reference::stft(x, w);
    REQUIRE(fast.n_bins == n / 2 + 1);
    REQUIRE(fast.n_frames == n);
    CHECK(max_entry_diff(fast, slow) < 1e-10 * max_magnitude(slow));
  }
}

TEST_CASE("STFT follows the stated sum with zero padding", "[tf]") {
  // Independent evaluation of a single entry.
  const std::size_t n = 60;
  const Signal x = test::white_noise(n, 1.0, 5);
  const Window w = gaussian_window(0.02);
  const TFR f = stft(x, w);
  for (std::size_t frame : {0u, 7u, 59u}) {
    for (std::size_t k : {0u, 3u, 30u}) {
      std::complex<double> acc{};
      for (std::ptrdiff_t m = -static_cast<std::ptrdiff_t>(w.half_length);
           m <= static_cast<std::ptrdiff_t>(w.half_length); ++m) {
        const std::ptrdiff_t idx = static_cast<std::ptrdiff_t>(frame) + m;
        if (idx < 0 || idx >= static_cast<std::ptrdiff_t>(n)) continue;
        acc += x[static_cast<std::size_t>(idx)] * w.at(m) *
               std::polar(1.0, -2.0 * kPi * static_cast<double>(k) * static_cast<double>(m) / n);
      }
      CHECK(std::abs(f.at(frame, k) - acc) < 1e-10);
    }
  }
}

TEST_CASE("banded STFT equals the matching columns", "[tf]") {
  const Signal x = test::white_noise(200, 1.0, 9);
  const Window w = gaussian_window(0.005);
  const TFR full = stft(x, w);
  const TFR band = stft(x, w, BinRange{17, 42});
  REQUIRE(band.n_bins == 26);
  REQUIRE(band.first_bin == 17);
  for (std::size_t n = 0; n < 200; ++n) {
    for (std::size_t j = 0; j < 26; ++j) CHECK(band.at(n, j) == full.at(n, 17 + j));
  }
  CHECK_THROWS_AS(stft(x, w, BinRange{90, 101}), std::invalid_argument);
}

TEST_CASE("STFT is linear and vanishes on zero input", "[tf]") {
  const Window w = gaussian_window(0.01);
  const Signal a = test::white_noise(64, 1.0, 1);
  const Signal b = test::white_noise(64, 2.0, 2);
  const TFR fa = stft(a, w);
  const TFR fb = stft(b, w);
  const TFR fab = stft(test::sum(a, b), w);
  for (std::size_t i = 0; i < fab.values.size(); ++i) {
    CHECK(std::abs(fab.values[i] - fa.values[i] - fb.values[i]) < 1e-10);
  }
  const TFR z = stft(Signal(std::vector<double>(64, 0.0), 1.0), w);
  CHECK(max_magnitude(z) == 0.0);
  CHECK_THROWS_AS(stft(Signal(std::vector<double>(64, 0.0), 1.0), gaussian_window(1e-4)),
                  std::invalid_argument);
}

TEST_CASE("100 Hz tone peaks at bin 100 in interior frames", "[tf]") {
  const Signal x = test::tone(100.0, 3000.0, 3000);
  const TFR f = stft(x, gaussian_window(1e-4));
  CHECK(f.bin_hz() == 1.0);
  for (std::size_t n = 305; n < 3000 - 305; n += 97) CHECK(argmax_bin(f.frame(n)) == 100);
}

TEST_CASE("frequency-sum inversion returns the signal", "[tf]") {
  for (std::size_t n : {300u, 301u}) {
    const Signal x = test::white_noise(n, 1.0, 77);
    const TFR f = stft(x, gaussian_window(1e-3));
    const auto y = inverse_stft(f);
    CHECK(test::max_abs_diff(x.samples(), y) < 1e-10);
  }
  const Signal x = test::white_noise(300, 1.0, 1);
  CHECK_THROWS_AS(inverse_stft(stft(x, gaussian_window(1e-3), BinRange{0, 10})), std::invalid_argument);
}

TEST_CASE("frame energy is shift invariant for a periodic input", "[tf][property]") {
  // Period 30 samples; interior frames 30 apart see identical segments.
  const Signal x = test::sum(test::tone(100.0, 3000.0, 3000), test::tone(300.0, 3000.0, 3000, 0.4, 1.0));
  const TFR f = stft(x, gaussian_window(1e-4));
  auto energy = [&](std::size_t n) {
    double e = 0.0;
    for (const auto& v : f.frame(n)) e += std::norm(v);
    return e;
  };
  for (std::size_t n = 400; n < 2500; n += 131) CHECK(energy(n + 30) == Approx(energy(n)).epsilon(1e-6));
}

TEST_CASE("noise variance on pure noise", "[tf][property]") {
  const Window w = gaussian_window(1e-4);
  for (std::uint64_t s = 1; s <= 20; ++s) {
    const Signal x = test::white_noise(3000, 1.0, s);
    const double v = noise_variance(stft(x, w));
    CHECK(v >= 0.85);
    CHECK(v <= 1.15);
  }
}

TEST_CASE("noise variance is homogeneous and robust to a tone", "[tf]") {
  const Window w = gaussian_window(1e-4);
  const Signal x = test::white_noise(3000, 1.0, 4);
  const double v = noise_variance(stft(x, w));
  CHECK(noise_variance(stft(test::scaled(x, 2.0), w)) == Approx(4.0 * v).epsilon(1e-12));
  CHECK(noise_variance(stft(Signal(std::vector<double>(3000, 0.0), 3000.0), w)) == 0.0);
}

TEST_CASE("noise variance drifts less than 5% under a 0 dB tone", "[tf][property]") {
  // Mean relative drift over 20 noise draws.
  const Window w = gaussian_window(1e-4);
  const Signal tone = test::tone(100.0, 3000.0, 3000, std::sqrt(2.0));
  double drift = 0.0;
  for (std::uint64_t s = 1; s <= 20; ++s) {
    const Signal x = test::white_noise(3000, 1.0, s);
    const double v = noise_variance(stft(x, w));
    drift += std::abs(noise_variance(stft(test::sum(x, tone), w)) / v - 1.0) / 20.0;
  }
  CHECK(drift < 0.05);
}

TEST_CASE("short-time cepstrum matches the direct cosine sum", "[tf]") {
  const Signal x = test::white_noise(90, 1.0, 3);
  const TFR f = stft(x, gaussian_window(0.01));
  for (double gamma : {0.3, 1.0}) {
    const Cepstrum fast = stct(f, gamma);
    const Cepstrum slow = reference::stct(f, gamma);
    double m = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < fast.values.size(); ++i) {
      m = std::max(m, std::abs(fast.values[i] - slow.values[i]));
      scale = std::max(scale, std::abs(slow.values[i]));
    }
    CHECK(m < 1e-10 * scale);
  }
}

TEST_CASE("cepstrum of a tone peaks at its period", "[tf]") {
  const Signal x = test::tone(100.0, 3000.0, 3000);
  const Cepstrum c = stct(stft(x, gaussian_window(1e-4)), 0.3);
  const std::size_t n = 1500;
  std::size_t best = 10;
  for (std::size_t j = 10; j <= 50; ++j) {
    if (c.at(n, j) > c.at(n, best)) best = j;
  }
  // The line pair at +-100 Hz gives cos(2 pi j / 30) under a Gaussian
  // envelope in j; the envelope slope pulls the discrete maximum down by
  // about one sample (to j = 29 here), so the check allows one grid step.
  CHECK(std::abs(c.quefrency_s(best) - 0.01) <= 1.0 / 3000.0 + 1e-12);
  CHECK(c.at(n, best) > 0.0);
  CHECK(c.at(n, 15) < 0.0);
}

TEST_CASE("cepstrum degenerate inputs", "[tf]") {
  const Signal z(std::vector<double>(64, 0.0), 64.0);
  const Cepstrum c = stct(stft(z, gaussian_window(0.01)), 1.0);
  CHECK(std::all_of(c.values.begin(), c.values.end(), [](double v) { return v == 0.0; }));

  // An impulse at the frame centre has a flat spectrum: only q = 0 survives.
  std::vector<double> v(64, 0.0);
  v[32] = 1.0;
  const Cepstrum d = stct(stft(Signal(v, 64.0), gaussian_window(0.01)), 1.0);
  CHECK(d.at(32, 0) == Approx(64.0));
  for (std::size_t j = 1; j < d.n_quefrency; ++j) CHECK(std::abs(d.at(32, j)) < 1e-9);
  CHECK_THROWS_AS(stct(stft(z, gaussian_window(0.01)), 0.0), std::invalid_argument);
}

TEST_CASE("de-shape weights follow the interpolated inverted quefrency", "[tf]") {
  const Signal x = test::sum(test::tone(50.0, 400.0, 400), test::tone(100.0, 400.0, 400, 0.7));
  const TFR f = stft(x, gaussian_window(1e-3));
  const Cepstrum c = reference::stct(f, 0.3);
  const TFR w = deshape(f, 0.3, {10.0, 190.0});
  for (std::size_t n : {100u, 200u}) {
    for (std::size_t k = 0; k < f.n_bins; ++k) {
      Complex expected{};
      const double fk = f.freq_hz(k);
      if (fk >= 10.0 && fk <= 190.0) {
        // quefrency index j = fs / f_k = N / k, linear interpolation.
        const double j = 400.0 / static_cast<double>(k);
        const auto j0 = static_cast<std::size_t>(std::floor(j));
        double u = 0.0;
        if (j0 + 1 < c.n_quefrency) {
          u = (1.0 - (j - j0)) * c.at(n, j0) + (j - j0) * c.at(n, j0 + 1);
        }
        expected = f.at(n, k) * std::max(0.0, u);
      }
      CHECK(std::abs(w.at(n, k) - expected) < 1e-8 * (1.0 + std::abs(expected)));
    }
  }
}

TEST_CASE("de-shape suppresses harmonics", "[tf]") {
  const double fs = 3000.0;
  const PhaseTrack p = test::test_phase();
  const WaveShape ws{{1.0, 0.8, 0.6}, {0.0, 0.0, 0.0}};
  const Signal x = synth_anh(ws, AmplitudeTrack{std::vector<double>(3000, 1.0)}, p);
  const TFR f = stft(x, gaussian_window(1e-4));
  const TFR w = deshape(f, 0.3, {20.0, 1000.0});
  const auto inst = p.instantaneous_frequency();
  for (std::size_t n = 400; n < 2600; n += 111) {
    const double peak = w.freq_hz(argmax_bin(w.frame(n)));
    CHECK(std::abs(peak - inst[n]) <= 3.0);
  }
  CHECK_THROWS_AS(deshape(f, 0.3, {0.0, 100.0}), std::invalid_argument);
  CHECK_THROWS_AS(deshape(f, 0.3, {10.0, fs}), std::invalid_argument);
}

TEST_CASE("de-shape of a pure tone keeps the STFT ridge", "[tf]") {
  const Signal x = test::tone(120.0, 3000.0, 3000);
  const TFR f = stft(x, gaussian_window(1e-4));
  const TFR w = deshape(f, 0.3, {20.0, 1000.0});
  for (std::size_t n = 400; n < 2600; n += 200) CHECK(argmax_bin(w.frame(n)) == argmax_bin(f.frame(n)));
}

TEST_CASE("de-shape magnitude bound", "[tf][property]") {
  const Signal x = test::white_noise(256, 1.0, 8, 256.0);
  const TFR f = stft(x, gaussian_window(0.002));
  const Cepstrum c = stct(f, 0.3);
  const TFR w = deshape(f, 0.3, {2.0, 120.0});
  for (std::size_t n = 0; n < f.n_frames; ++n) {
    double cmax = 0.0;
    for (std::size_t j = 0; j < c.n_quefrency; ++j) cmax = std::max(cmax, c.at(n, j));
    for (std::size_t k = 0; k < f.n_bins; ++k) {
      CHECK(std::abs(w.at(n, k)) <= std::abs(f.at(n, k)) * cmax * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("single-pass analysis agrees with the separate transforms", "[tf]") {
  const PhaseTrack p = test::test_phase();
  const Signal x = add_noise(synth_anh(test::four_term_shape(), sqrt_amplitude(0.05, 3000.0, 3000), p), 5.0, 2);
  const Window w = gaussian_window(1e-4);
  AnalysisRequest req;
  req.stft_bins = BinRange{30, 130};
  req.deshape = AnalysisRequest::Deshape{0.3, {40.0, 120.0}};
  const AnalysisResult a = analyze(x, w, req);
  const TFR full = stft(x, w);
  const TFR ds = deshape(full, 0.3, {40.0, 120.0});
  for (std::size_t n = 0; n < 3000; n += 37) {
    for (std::size_t j = 0; j < a.stft.n_bins; ++j) CHECK(a.stft.at(n, j) == full.at(n, 30 + j));
    for (std::size_t j = 0; j < a.deshaped->n_bins; ++j) {
      const Complex ref = ds.at(n, a.deshaped->first_bin + j);
      CHECK(std::abs(a.deshaped->at(n, j) - ref) <= 1e-9 * (1.0 + std::abs(ref)));
    }
  }
  CHECK(a.noise_variance == Approx(noise_variance(full)).epsilon(1e-6));
}

TEST_CASE("kernels give identical results for any thread count", "[tf][property]") {
  const Signal x = test::white_noise(1000, 1.0, 12);
  const Window w = gaussian_window(5e-4);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const TFR one = stft(x, w);
  const auto t_one = threshold_synthesis(x, w, 1.0, ThresholdMode::Soft);
  omp_set_num_threads(4);
  const TFR four = stft(x, w);
  const auto t_four = threshold_synthesis(x, w, 1.0, ThresholdMode::Soft);
  omp_set_num_threads(saved);
  CHECK(one.values == four.values);
  CHECK(t_one == t_four);
}

TEST_CASE("Renyi selection", "[tf]") {
  const Signal x = test::tone(100.0, 3000.0, 3000);
  const std::vector<double> one{3e-4};
  CHECK(select_window_renyi(x, one).sigma == 3e-4);
  const std::vector<double> grid{1e-5, 1e-4, 1e-3};
  const double h_long = renyi_entropy(x, gaussian_window(1e-5), 3.0);
  const double h_mid = renyi_entropy(x, gaussian_window(1e-4), 3.0);
  const double h_short = renyi_entropy(x, gaussian_window(1e-3), 3.0);
  CHECK(h_long < h_mid);
  CHECK(h_mid < h_short);
  CHECK(select_window_renyi(x, grid).sigma == 1e-5);
  // Grid entries that do not fit are skipped.
  const Signal short_x = test::tone(100.0, 3000.0, 1000);
  CHECK(select_window_renyi(short_x, grid).sigma == 1e-4);
  CHECK_THROWS_AS(renyi_entropy(x, gaussian_window(1e-4), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(select_window_renyi(x, std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("Renyi entropy of a single-bin spectrogram", "[tf]") {
  // Closed form: unit mass spread uniformly over M cells gives log2 M.
  // A length-N signal with a single impulse at the centre and a window of
  // one tap spreads the mass evenly over the K bins of one frame.
  std::vector<double> v(64, 0.0);
  v[20] = 1.0;
  Window w;
  w.taps = {1.0};
  w.half_length = 0;
  w.sigma = 1.0;
  const double h = renyi_entropy(Signal(v, 64.0), w, 3.0);
  CHECK(h == Approx(std::log2(33.0)).epsilon(1e-6));
}

TEST_CASE("threshold synthesis", "[tf]") {
  const Signal x = test::white_noise(600, 1.0, 21);
  const Window w = gaussian_window(2e-4);
  // eta = 0 is the plain round trip.
  CHECK(test::max_abs_diff(x.samples(), threshold_synthesis(x, w, 0.0, ThresholdMode::Hard)) < 1e-9);
  CHECK(test::max_abs_diff(x.samples(), threshold_synthesis(x, w, 0.0, ThresholdMode::Soft)) < 1e-9);
  // Pure noise at eta = 3 sigma ||g||: most of the power goes.
  const double eta = 3.0 * w.norm2();
  const auto hard = threshold_synthesis(x, w, eta, ThresholdMode::Hard);
  const auto soft = threshold_synthesis(x, w, eta, ThresholdMode::Soft);
  const double p_in = x.power();
  CHECK(Signal(hard, 1.0).power() < p_in);
  CHECK(Signal(soft, 1.0).power() <= Signal(hard, 1.0).power());
  const auto none = threshold_synthesis(x, w, 1e9, ThresholdMode::Hard);
  CHECK(std::all_of(none.begin(), none.end(), [](double v) { return v == 0.0; }));
  CHECK_THROWS_AS(threshold_synthesis(x, w, -1.0, ThresholdMode::Hard), std::invalid_argument);
}
