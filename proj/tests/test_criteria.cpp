#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Dense>

#include "anhkit/criteria.hpp"
#include "support.hpp"

using namespace anh;
using Catch::Approx;

namespace {

// Yule-Walker by a dense Toeplitz solve for one order h.
double yule_walker_variance(const std::vector<double>& u, std::size_t h) {
  const std::size_t n = u.size();
  std::vector<double> acf(h + 1, 0.0);
  for (std::size_t k = 0; k <= h; ++k) {
    for (std::size_t i = k; i < n; ++i) acf[k] += u[i] * u[i - k];
    acf[k] /= static_cast<double>(n);
  }
  Eigen::MatrixXd t(static_cast<Eigen::Index>(h), static_cast<Eigen::Index>(h));
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(h));
  for (std::size_t i = 0; i < h; ++i) {
    rhs(static_cast<Eigen::Index>(i)) = acf[i + 1];
    for (std::size_t j = 0; j < h; ++j) {
      t(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = acf[i > j ? i - j : j - i];
    }
  }
  const Eigen::VectorXd a = t.partialPivLu().solve(rhs);
  return acf[0] - a.dot(rhs);
}

std::vector<double> ar1(std::size_t n, double rho, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<double> u(n);
  double prev = 0.0;
  for (double& v : u) {
    v = rho * prev + g(rng);
    prev = v;
  }
  return u;
}

struct TwoFixture {
  PhaseTrack p1 = test::test_phase();
  AmplitudeTrack a1{std::vector<double>(3000, 1.0)};
  PhaseTrack p2;
  AmplitudeTrack a2{std::vector<double>(3000, 1.0)};
  TwoFixture() {
    p2 = p1;
    for (double& v : p2.phi) v *= 1.7;
  }
};

}  // namespace

TEST_CASE("criterion codes", "[criteria]") {
  CHECK(parse_criterion('G') == Criterion::G);
  CHECK(criterion_code(Criterion::K) == 'k');
  CHECK(parse_criteria("g,r,w,k").size() == 4);
  CHECK(parse_criteria("w,w").size() == 1);
  CHECK_THROWS_AS(parse_criteria("g,x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_criteria(""), std::invalid_argument);
  CHECK_THROWS_AS(parse_criteria("gr"), std::invalid_argument);
}

TEST_CASE("maximum order from the Nyquist limit", "[criteria]") {
  CHECK(r_max(3000.0, 85.0) == 17);
  CHECK(r_max(3000.0, 100.0) == 15);
  CHECK(r_max(3000.0, 1499.0) == 1);
  CHECK_THROWS_AS(r_max(3000.0, 1500.0), std::invalid_argument);
  CHECK_THROWS_AS(r_max(3000.0, 0.0), std::invalid_argument);
}

TEST_CASE("order selection ties go to the smaller order", "[criteria]") {
  CHECK(select_order(std::vector<double>{7.0, 5.0, 5.0, 5.0}) == 2);
  CHECK(select_order(std::vector<double>{3.0, 1.0, 2.0}) == 2);
  CHECK(select_order(std::vector<double>{1.0}) == 1);
  CHECK_THROWS_AS(select_order(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("Wang criterion", "[criteria]") {
  const std::vector<double> flat(10, 0.3);
  CHECK(wang(flat, 3000, 2.1).r_star == 1);
  const std::vector<double> mse{1.0, 0.5, 0.1, 0.099, 0.098};
  const auto w = wang(mse, 3000, 5.0);
  CHECK(w.value(3) == Approx(std::log(0.1) + 5.0 * 3.0 * std::log(3000.0) / 3000.0));
  CHECK(w.r_star == 3);
  CHECK(w.nuisance == std::vector<double>(5, 5.0));
  CHECK_THROWS_AS(wang(mse, 3000, 2.0), std::invalid_argument);

  const std::vector<double> exact{1.0, 0.0};
  const auto e = wang(exact, 3000, 2.1);
  CHECK(e.exact_fit);
  CHECK(e.r_star == 2);
}

TEST_CASE("Wang penalty grows with c", "[criteria][property]") {
  std::vector<double> mse;
  for (int r = 1; r <= 15; ++r) mse.push_back(1.0 / (1.0 + 0.2 * r));
  std::size_t prev_r = 15;
  for (double c : {2.1, 3.0, 5.0, 8.0, 12.0, 50.0}) {
    const auto w = wang(mse, 3000, c);
    CHECK(w.r_star <= prev_r);
    prev_r = w.r_star;
    const auto w2 = wang(mse, 3000, c + 1.0);
    for (std::size_t r = 1; r <= 15; ++r) CHECK(w2.value(r) > w.value(r));
  }
}

TEST_CASE("Wang sweep keeps the curve with the smallest minimum", "[criteria]") {
  const std::vector<double> mse{1.0, 0.2, 0.19, 0.185};
  const std::vector<double> cs{2.1, 5.0, 8.0, 12.0};
  const auto s = wang_sweep(mse, 3000, cs);
  double best = std::numeric_limits<double>::infinity();
  double best_c = 0.0;
  for (double c : cs) {
    const auto w = wang(mse, 3000, c);
    if (w.value(w.r_star) < best) {
      best = w.value(w.r_star);
      best_c = c;
    }
  }
  CHECK(s.nuisance.front() == best_c);
  CHECK(s.value(s.r_star) == best);
  CHECK_THROWS_AS(wang_sweep(mse, 3000, std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("autoregressive order limit", "[criteria]") {
  CHECK(kavalieris_h_max(3000) == 64);
  CHECK(kavalieris_h_max(7000) == 78);
  CHECK(kavalieris_h_max(2) == 1);
}

TEST_CASE("Levinson recursion matches the Toeplitz solve", "[criteria]") {
  for (std::uint64_t s = 1; s <= 4; ++s) {
    const auto u = ar1(500, 0.3 * static_cast<double>(s - 1), s);
    const auto v = ar_prediction_variances(u, 12);
    REQUIRE(v.size() == 12);
    for (std::size_t h = 1; h <= 12; ++h) {
      CHECK(v[h - 1] == Approx(yule_walker_variance(u, h)).epsilon(1e-9));
    }
  }
  const std::vector<double> zero(50, 0.0);
  for (double v : ar_prediction_variances(zero, 5)) CHECK(v == kMseFloor);
  CHECK_THROWS_AS(ar_prediction_variances(zero, 50), std::invalid_argument);
  CHECK_THROWS_AS(ar_prediction_variances(zero, 0), std::invalid_argument);
}

TEST_CASE("Kavalieris-Hannan on white and coloured residuals", "[criteria]") {
  const auto w = test::white_noise(3000, 1.0, 3).samples();
  const std::vector<std::vector<double>> white{{w.begin(), w.end()}};
  const auto kw = kavalieris(white);
  CHECK(kw.nuisance.front() == 1.0);

  const std::vector<std::vector<double>> coloured{ar1(3000, 0.8, 5), ar1(3000, 0.0, 6)};
  const auto kc = kavalieris(coloured);
  CHECK(kc.nuisance[0] >= 1.0);
  CHECK(kc.nuisance[0] <= 64.0);
  // Direct minimum over h of the stated objective.
  const double pen = std::log(3000.0) / 3000.0;
  for (std::size_t r = 1; r <= 2; ++r) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t h = 1; h <= 64; ++h) {
      best = std::min(best, std::log(yule_walker_variance(coloured[r - 1], h)) + (5.0 * r + h) * pen);
    }
    CHECK(kc.value(r) == Approx(best).epsilon(1e-9));
  }

  const auto fixed = kavalieris(coloured, 3);
  CHECK(fixed.nuisance == std::vector<double>{3.0, 3.0});
  CHECK(fixed.value(1) == Approx(std::log(yule_walker_variance(coloured[0], 3)) + 8.0 * pen).epsilon(1e-9));
  CHECK_THROWS_AS(kavalieris(coloured, 65), std::invalid_argument);
  CHECK_THROWS_AS(kavalieris(coloured, 0), std::invalid_argument);
}

TEST_CASE("generalised cross-validation", "[criteria]") {
  const std::vector<double> mse{0.8, 0.4, 0.39, 0.388};
  const auto g = gcv(mse, 3000);
  CHECK(g.value(2) == Approx(3000.0 * 3000.0 * 0.4 / (2995.0 * 2995.0)));
  std::vector<double> half(mse);
  for (double& v : half) v /= 2.0;
  const auto gh = gcv(half, 3000);
  for (std::size_t r = 1; r <= 4; ++r) {
    CHECK(gh.value(r) == Approx(g.value(r) / 2.0));
    CHECK(g.value(r) >= mse[r - 1]);
  }
  CHECK_FALSE(g.truncated);
  const auto t = gcv(std::vector<double>(6, 1.0), 10);
  CHECK(t.truncated);
  CHECK(t.r_max() == 4);
  CHECK_THROWS_AS(gcv(std::vector<double>(3, 1.0), 3), std::invalid_argument);
}

TEST_CASE("unbiased risk", "[criteria]") {
  const std::vector<double> mse{0.8, 0.4, 0.39, 0.388};
  const auto zero = unbiased_risk(mse, 3000, 0.0);
  for (std::size_t r = 1; r <= 4; ++r) CHECK(zero.value(r) == mse[r - 1]);
  CHECK(zero.r_star == 4);
  CHECK(unbiased_risk(mse, 3000, 1e6).r_star == 1);
  const auto one = unbiased_risk(mse, 3000, 1.0);
  CHECK(one.value(3) == Approx(0.39 + 2.0 * 7.0 / 3000.0));
  CHECK_THROWS_AS(unbiased_risk(mse, 3000, -1.0), std::invalid_argument);
}

TEST_CASE("evaluate dispatches on a sweep", "[criteria]") {
  const PhaseTrack p = test::test_phase();
  const AmplitudeTrack a{std::vector<double>(3000, 1.0)};
  const Signal x = add_noise(synth_anh(test::four_term_shape(), a, p), 10.0, 2);
  const OrderSweep sweep(x, a, p, 10);
  CriteriaParams params;
  params.sigma2 = 0.1;
  const auto g = evaluate(Criterion::G, sweep, params, 6);
  CHECK(g.r_max() == 6);
  const std::vector<double> curve = sweep.mse_curve();
  CHECK(g.values == gcv(std::vector<double>(curve.begin(), curve.begin() + 6), 3000).values);
  CHECK(evaluate(Criterion::R, sweep, params).r_max() == 10);
  CHECK(evaluate(Criterion::W, sweep, params).nuisance.size() == 10);
  CHECK(evaluate(Criterion::K, sweep, params, 20).r_max() == 10);
  for (Criterion c : kAllCriteria) CHECK(evaluate(c, sweep, params).r_star == 4);
}

TEST_CASE("two-component criteria surfaces", "[criteria]") {
  const TwoFixture f;
  const Signal s1 = synth_anh(test::four_term_shape(), f.a1, f.p1);
  const Signal s2 = synth_anh(WaveShape{{0.8, 0.4, 0.2}, {0.0, 0.1, 0.0}}, f.a2, f.p2);
  const Signal x = add_noise(test::sum(s1, s2), 10.0, 3);
  const OrderSweep2D sweep(x, f.a1, f.p1, f.a2, f.p2, 6, 5);
  const double pen = std::log(3000.0) / 3000.0;
  Criteria2DParams params;
  const Signal clean = test::sum(s1, s2);
  std::vector<double> e(3000);
  for (std::size_t n = 0; n < 3000; ++n) e[n] = x[n] - clean[n];
  params.sigma2 = Signal(e, 3000.0).power();
  for (Criterion c : kAllCriteria) {
    const CriterionSurface s = criteria_2d(sweep, c, params);
    // Independent argmin with the tie rule.
    std::size_t b1 = 1;
    std::size_t b2 = 1;
    for (std::size_t r1 = 1; r1 <= 6; ++r1) {
      for (std::size_t r2 = 1; r2 <= 5; ++r2) {
        const double v = s.value(r1, r2);
        const double bv = s.value(b1, b2);
        if (v < bv || (v == bv && r1 + r2 < b1 + b2)) {
          b1 = r1;
          b2 = r2;
        }
        const double m = sweep.mse(r1, r2);
        const double tot = static_cast<double>(r1 + r2);
        if (c == Criterion::W) CHECK(v == Approx(std::log(m) + 2.1 * tot * pen));
        if (c == Criterion::G) CHECK(v == Approx(9e6 * m / std::pow(3000.0 - 2.0 * tot - 1.0, 2)));
        if (c == Criterion::R) CHECK(v == Approx(m + 2.0 * params.sigma2 * (2.0 * tot + 1.0) / 3000.0));
      }
    }
    CHECK(s.r1_star == b1);
    CHECK(s.r2_star == b2);
    if (c == Criterion::W || c == Criterion::K) {
      CHECK(s.r1_star == 4);
      CHECK(s.r2_star == 3);
    }
    if (c == Criterion::K) {
      for (double h : s.nuisance) {
        CHECK(h >= 1.0);
        CHECK(h <= 64.0);
      }
    } else {
      CHECK(s.nuisance.empty());
    }
  }
  params.h = 5;
  for (double h : criteria_2d(sweep, Criterion::K, params).nuisance) CHECK(h == 5.0);
  params.c = 2.0;
  CHECK_THROWS_AS(criteria_2d(sweep, Criterion::W, params), std::invalid_argument);
}

TEST_CASE("absent second component selects one harmonic for it", "[criteria][property]") {
  const TwoFixture f;
  const Signal x = add_noise(synth_anh(test::four_term_shape(), f.a1, f.p1), 10.0, 4);
  const OrderSweep2D sweep(x, f.a1, f.p1, f.a2, f.p2, 6, 5);
  for (Criterion c : {Criterion::W, Criterion::K}) {
    const auto s = criteria_2d(sweep, c);
    CHECK(s.r2_star == 1);
    CHECK(s.r1_star == 4);
  }
}

TEST_CASE("two-component criteria with one order reduce to 1D", "[criteria][property]") {
  // With r2 fixed, the W surface row differs from the 1D formula on the
  // same MSEs only by the constant penalty of the second component.
  const TwoFixture f;
  const Signal x = add_noise(synth_anh(test::four_term_shape(), f.a1, f.p1), 5.0, 5);
  const OrderSweep2D sweep(x, f.a1, f.p1, f.a2, f.p2, 6, 2);
  const auto s = criteria_2d(sweep, Criterion::W);
  std::vector<double> row;
  for (std::size_t r1 = 1; r1 <= 6; ++r1) row.push_back(sweep.mse(r1, 1));
  const auto w = wang(row, 3000, 2.1);
  const double shift = 2.1 * std::log(3000.0) / 3000.0;
  for (std::size_t r1 = 1; r1 <= 6; ++r1) CHECK(s.value(r1, 1) == Approx(w.value(r1) + shift));
}
