#include "anhkit/criteria.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace anh {

namespace {

double floored_log(double v, bool& exact_fit) {
  if (!(v > kMseFloor)) {
    exact_fit = true;
    return std::log(kMseFloor);
  }
  return std::log(v);
}

double log_n_over_n(std::size_t n) {
  const auto nd = static_cast<double>(n);
  return std::log(nd) / nd;
}

void check_curve(std::span<const double> mse_curve, std::size_t n) {
  if (mse_curve.empty()) throw std::invalid_argument("criterion: empty MSE curve");
  if (n < 2) throw std::invalid_argument("criterion: N must be >= 2");
}

// Order-h_max Levinson-Durbin on r(0..h_max); returns E(1..h_max).
std::vector<double> levinson(std::span<const double> acf, std::size_t h_max) {
  std::vector<double> out(h_max, kMseFloor);
  double e = acf[0];
  if (!(e > 0.0)) return out;
  std::vector<double> a(h_max + 1, 0.0);
  std::vector<double> prev(h_max + 1, 0.0);
  for (std::size_t m = 1; m <= h_max; ++m) {
    double acc = acf[m];
    for (std::size_t j = 1; j < m; ++j) acc -= a[j] * acf[m - j];
    const double kappa = acc / e;
    prev = a;
    a[m] = kappa;
    for (std::size_t j = 1; j < m; ++j) a[j] = prev[j] - kappa * prev[m - j];
    e *= (1.0 - kappa * kappa);
    if (!(e > kMseFloor)) {
      // Perfectly predictable; later orders cannot do better.
      std::fill(out.begin() + static_cast<std::ptrdiff_t>(m - 1), out.end(), kMseFloor);
      return out;
    }
    out[m - 1] = e;
  }
  return out;
}

}  // namespace

char criterion_code(Criterion c) {
  switch (c) {
    case Criterion::G: return 'g';
    case Criterion::R: return 'r';
    case Criterion::W: return 'w';
    case Criterion::K: return 'k';
  }
  return '?';
}

Criterion parse_criterion(char code) {
  switch (std::tolower(static_cast<unsigned char>(code))) {
    case 'g': return Criterion::G;
    case 'r': return Criterion::R;
    case 'w': return Criterion::W;
    case 'k': return Criterion::K;
    default: throw std::invalid_argument(std::string("unknown criterion '") + code + "'");
  }
}

std::vector<Criterion> parse_criteria(const std::string& list) {
  std::vector<Criterion> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.size() != 1) throw std::invalid_argument("unknown criterion '" + item + "'");
    const Criterion c = parse_criterion(item[0]);
    if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
  }
  if (out.empty()) throw std::invalid_argument("empty criteria list");
  return out;
}

std::size_t r_max(double fs, double f_max) {
  if (!(fs > 0.0) || !(f_max > 0.0)) throw std::invalid_argument("r_max: fs and f_max must be positive");
  if (!(f_max < fs / 2.0)) throw std::invalid_argument("r_max: f_max must lie below fs/2");
  return static_cast<std::size_t>(std::floor((fs / 2.0) / f_max));
}

std::size_t select_order(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("select_order: empty curve");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] < values[best]) best = i;
  }
  return best + 1;
}

CriterionCurve wang(std::span<const double> mse_curve, std::size_t n, double c) {
  check_curve(mse_curve, n);
  if (!(c > 2.0)) throw std::invalid_argument("wang: c must exceed 2");
  CriterionCurve out;
  out.kind = Criterion::W;
  out.values.resize(mse_curve.size());
  out.nuisance.assign(mse_curve.size(), c);
  for (std::size_t i = 0; i < mse_curve.size(); ++i) {
    const auto r = static_cast<double>(i + 1);
    out.values[i] = floored_log(mse_curve[i], out.exact_fit) + c * r * log_n_over_n(n);
  }
  out.r_star = select_order(out.values);
  return out;
}

CriterionCurve wang_sweep(std::span<const double> mse_curve, std::size_t n,
                          std::span<const double> c_set) {
  if (c_set.empty()) throw std::invalid_argument("wang_sweep: empty c set");
  std::optional<CriterionCurve> best;
  for (double c : c_set) {
    CriterionCurve cur = wang(mse_curve, n, c);
    if (!best || cur.value(cur.r_star) < best->value(best->r_star)) best = std::move(cur);
  }
  return *best;
}

std::size_t kavalieris_h_max(std::size_t n) {
  if (n < 2) throw std::invalid_argument("kavalieris: N must be >= 2");
  const double l = std::log(static_cast<double>(n));
  const auto h = static_cast<std::size_t>(std::floor(l * l));
  return std::clamp<std::size_t>(h, 1, n - 1);
}

std::vector<double> ar_prediction_variances(std::span<const double> u, std::size_t h_max) {
  if (h_max < 1 || h_max >= u.size()) {
    throw std::invalid_argument("ar_prediction_variances: need 1 <= h_max < N");
  }
  const std::size_t n = u.size();
  std::vector<double> acf(h_max + 1, 0.0);
  for (std::size_t k = 0; k <= h_max; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i + k < n; ++i) acc += u[i] * u[i + k];
    acf[k] = acc / static_cast<double>(n);
  }
  return levinson(acf, h_max);
}

CriterionCurve kavalieris(std::span<const std::vector<double>> residuals,
                          std::optional<std::size_t> fixed_h) {
  if (residuals.empty()) throw std::invalid_argument("kavalieris: no residuals");
  const std::size_t n = residuals.front().size();
  const std::size_t h_max = kavalieris_h_max(n);
  if (fixed_h && (*fixed_h < 1 || *fixed_h > h_max)) {
    throw std::invalid_argument("kavalieris: fixed h outside [1, H]");
  }
  CriterionCurve out;
  out.kind = Criterion::K;
  out.values.resize(residuals.size());
  out.nuisance.resize(residuals.size());
  const double pen = log_n_over_n(n);
  for (std::size_t i = 0; i < residuals.size(); ++i) {
    if (residuals[i].size() != n) throw std::invalid_argument("kavalieris: residual length mismatch");
    const std::vector<double> s2 = ar_prediction_variances(residuals[i], fixed_h.value_or(h_max));
    const auto r = static_cast<double>(i + 1);
    const std::size_t h_lo = fixed_h.value_or(1);
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_h = h_lo;
    for (std::size_t h = h_lo; h <= s2.size(); ++h) {
      bool exact = false;
      const double v = floored_log(s2[h - 1], exact) + (5.0 * r + static_cast<double>(h)) * pen;
      if (v < best) {
        best = v;
        best_h = h;
      }
      if (exact) out.exact_fit = true;
    }
    out.values[i] = best;
    out.nuisance[i] = static_cast<double>(best_h);
  }
  out.r_star = select_order(out.values);
  return out;
}

CriterionCurve gcv(std::span<const double> mse_curve, std::size_t n) {
  check_curve(mse_curve, n);
  CriterionCurve out;
  out.kind = Criterion::G;
  const auto nd = static_cast<double>(n);
  for (std::size_t i = 0; i < mse_curve.size(); ++i) {
    const double dof = nd - 2.0 * static_cast<double>(i + 1) - 1.0;
    if (!(dof > 0.0)) {
      out.truncated = true;
      break;
    }
    out.values.push_back(nd * nd * mse_curve[i] / (dof * dof));
  }
  if (out.values.empty()) throw std::invalid_argument("gcv: no order satisfies N - 2r - 1 > 0");
  out.r_star = select_order(out.values);
  return out;
}

CriterionCurve unbiased_risk(std::span<const double> mse_curve, std::size_t n, double sigma2) {
  check_curve(mse_curve, n);
  if (!(sigma2 >= 0.0)) throw std::invalid_argument("unbiased_risk: sigma2 must be >= 0");
  CriterionCurve out;
  out.kind = Criterion::R;
  out.values.resize(mse_curve.size());
  for (std::size_t i = 0; i < mse_curve.size(); ++i) {
    const auto r = static_cast<double>(i + 1);
    out.values[i] = mse_curve[i] + 2.0 * sigma2 * (2.0 * r + 1.0) / static_cast<double>(n);
  }
  out.r_star = select_order(out.values);
  return out;
}

CriterionCurve evaluate(Criterion kind, const OrderSweep& sweep, const CriteriaParams& params,
                        std::size_t r_limit) {
  const std::size_t n = sweep.at(1).residual.size();
  const std::size_t top = r_limit == 0 ? sweep.r_max() : std::min(r_limit, sweep.r_max());
  std::vector<double> curve = sweep.mse_curve();
  curve.resize(top);
  switch (kind) {
    case Criterion::G: return gcv(curve, n);
    case Criterion::R: return unbiased_risk(curve, n, params.sigma2);
    case Criterion::W: return wang_sweep(curve, n, params.c_set);
    case Criterion::K: {
      std::vector<std::vector<double>> res;
      res.reserve(top);
      for (std::size_t r = 1; r <= top; ++r) res.push_back(sweep.at(r).residual);
      return kavalieris(res, params.fixed_h);
    }
  }
  throw std::logic_error("evaluate: unknown criterion");
}

CriterionSurface criteria_2d(const OrderSweep2D& sweep, Criterion kind, const Criteria2DParams& p) {
  const std::size_t n = sweep.at(1, 1).residual.size();
  const auto nd = static_cast<double>(n);
  const double pen = log_n_over_n(n);
  const std::size_t h_max = p.h.value_or(kavalieris_h_max(n));
  if (kind == Criterion::W && !(p.c > 2.0)) throw std::invalid_argument("criteria_2d: c must exceed 2");
  if (kind == Criterion::R && !(p.sigma2 >= 0.0)) {
    throw std::invalid_argument("criteria_2d: sigma2 must be >= 0");
  }

  CriterionSurface s;
  s.kind = kind;
  s.r1_max = sweep.r1_max();
  s.r2_max = sweep.r2_max();
  s.values.resize(s.r1_max * s.r2_max);
  if (kind == Criterion::K) s.nuisance.resize(s.values.size());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t r1 = 1; r1 <= s.r1_max; ++r1) {
    for (std::size_t r2 = 1; r2 <= s.r2_max; ++r2) {
      const double total = static_cast<double>(r1 + r2);
      const double m = sweep.mse(r1, r2);
      double v = 0.0;
      switch (kind) {
        case Criterion::W:
          v = floored_log(m, s.exact_fit) + p.c * total * pen;
          break;
        case Criterion::K: {
          // Fixed h when given, otherwise minimised over h = 1..H as in 1D.
          const auto s2 = ar_prediction_variances(sweep.at(r1, r2).residual, h_max);
          const std::size_t h_lo = p.h ? h_max : 1;
          v = std::numeric_limits<double>::infinity();
          for (std::size_t h = h_lo; h <= h_max; ++h) {
            bool exact = false;
            const double vh = floored_log(s2[h - 1], exact) + (5.0 * total + static_cast<double>(h)) * pen;
            if (vh < v) {
              v = vh;
              s.nuisance[(r1 - 1) * s.r2_max + (r2 - 1)] = static_cast<double>(h);
            }
            s.exact_fit = s.exact_fit || exact;
          }
          break;
        }
        case Criterion::G: {
          const double dof = nd - 2.0 * total - 1.0;
          v = dof > 0.0 ? nd * nd * m / (dof * dof) : std::numeric_limits<double>::infinity();
          break;
        }
        case Criterion::R:
          v = m + 2.0 * p.sigma2 * (2.0 * total + 1.0) / nd;
          break;
      }
      s.values[(r1 - 1) * s.r2_max + (r2 - 1)] = v;
      // Row-major scan; a later cell only wins a tie if its total order is smaller.
      const bool better = v < best || (v == best && r1 + r2 < s.r1_star + s.r2_star);
      if (better) {
        best = v;
        s.r1_star = r1;
        s.r2_star = r2;
      }
    }
  }
  return s;
}

}  // namespace anh
