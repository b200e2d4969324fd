#pragma once

// Trigonometric-regression order-selection criteria, one- and
// two-dimensional. Natural logarithms throughout.
//
//   W (Wang)              log MSE(r) + c r log(N) / N
//   K (Kavalieris-Hannan) min_h log s2_r(h) + (5r + h) log(N) / N
//   G (GCV)               N^2 MSE(r) / (N - 2r - 1)^2
//   R (unbiased risk)     MSE(r) + 2 sigma2 (2r + 1) / N
//
// s2_r(h) is the order-h autoregressive prediction-error variance of the
// order-r residual. Two-dimensional versions replace r by r1 + r2.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "anhkit/regression.hpp"

namespace anh {

enum class Criterion { G, R, W, K };

inline constexpr Criterion kAllCriteria[] = {Criterion::G, Criterion::R, Criterion::W, Criterion::K};

char criterion_code(Criterion c);
/// Accepts g, r, w, k in either case.
Criterion parse_criterion(char code);
/// Comma-separated list, e.g. "g,r,w,k".
std::vector<Criterion> parse_criteria(const std::string& list);

/// Log-argument floor for exact fits.
inline constexpr double kMseFloor = 1e-300;

struct CriterionCurve {
  Criterion kind = Criterion::G;
  std::vector<double> values;    // values[r - 1]
  std::vector<double> nuisance;  // c for W, h for K, empty otherwise
  std::size_t r_star = 1;
  bool exact_fit = false;  // some log argument hit kMseFloor
  bool truncated = false;  // G only: orders with N - 2r - 1 <= 0 dropped

  std::size_t r_max() const { return values.size(); }
  double value(std::size_t r) const { return values.at(r - 1); }
};

/// floor((fs/2) / f_max). Throws unless 0 < f_max < fs/2.
std::size_t r_max(double fs, double f_max);

/// First index of the minimum plus one; ties go to the smaller order.
std::size_t select_order(std::span<const double> values);

/// Throws unless c > 2.
CriterionCurve wang(std::span<const double> mse_curve, std::size_t n, double c);
/// Evaluates every c and returns the curve whose global minimum is smallest;
/// its nuisance trace holds that c.
CriterionCurve wang_sweep(std::span<const double> mse_curve, std::size_t n,
                          std::span<const double> c_set);

/// floor((ln N)^2), clamped to [1, N - 1].
std::size_t kavalieris_h_max(std::size_t n);

/// s2(h) for h = 1..h_max from the biased autocorrelation of u by
/// Levinson-Durbin recursion. Entries are floored at kMseFloor.
std::vector<double> ar_prediction_variances(std::span<const double> u, std::size_t h_max);

/// residuals[r - 1] is the order-r residual. Minimises over h in
/// [1, kavalieris_h_max(N)] unless `fixed_h` is set.
CriterionCurve kavalieris(std::span<const std::vector<double>> residuals,
                          std::optional<std::size_t> fixed_h = std::nullopt);

CriterionCurve gcv(std::span<const double> mse_curve, std::size_t n);

CriterionCurve unbiased_risk(std::span<const double> mse_curve, std::size_t n, double sigma2);

/// One criterion over orders 1..r_limit of a sweep (all orders when 0).
struct CriteriaParams {
  std::vector<double> c_set{2.1, 5.0, 8.0, 12.0};
  std::optional<std::size_t> fixed_h;
  double sigma2 = 0.0;
};
CriterionCurve evaluate(Criterion kind, const OrderSweep& sweep, const CriteriaParams& params,
                        std::size_t r_limit = 0);

struct CriterionSurface {
  Criterion kind = Criterion::G;
  std::size_t r1_max = 0;
  std::size_t r2_max = 0;
  std::vector<double> values;  // row-major (r1 - 1, r2 - 1)
  std::vector<double> nuisance;  // selected h per cell for K, empty otherwise
  std::size_t r1_star = 1;
  std::size_t r2_star = 1;
  bool exact_fit = false;

  double value(std::size_t r1, std::size_t r2) const {
    return values.at((r1 - 1) * r2_max + (r2 - 1));
  }
};

struct Criteria2DParams {
  double c = 2.1;
  std::optional<std::size_t> h;  // minimised over 1..kavalieris_h_max(N) when empty
  double sigma2 = 0.0;
};

/// Argmin over the rectangle, ties toward the smaller total order and then
/// the smaller r1.
CriterionSurface criteria_2d(const OrderSweep2D& sweep, Criterion kind,
                             const Criteria2DParams& params = {});

}  // namespace anh
