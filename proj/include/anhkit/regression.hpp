#pragma once

// Least-squares fitting of wave-shape Fourier coefficients on the
// pseudo-Fourier dictionary built from estimated amplitude and phase tracks.

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "anhkit/signal.hpp"

namespace anh {

/// N x 2r, columns [c_1..c_r, d_1..d_r] with c_l = A cos(2 pi l phi) and
/// d_l = A sin(2 pi l phi).
struct Dictionary {
  Eigen::MatrixXd columns;
  std::size_t r = 0;
  double fs = 1.0;

  std::size_t rows() const { return static_cast<std::size_t>(columns.rows()); }
};

/// Throws std::invalid_argument when r == 0, the tracks differ in length or
/// 2r >= N.
Dictionary build_dictionary(const AmplitudeTrack& amp, const PhaseTrack& phase, std::size_t r);

/// gamma = [alpha_1..alpha_r, beta_1..beta_r].
struct CoefficientVector {
  std::vector<double> gamma;
  bool rank_deficient = false;  // minimum-norm solution was returned

  std::size_t order() const { return gamma.size() / 2; }
  std::span<const double> alpha() const { return {gamma.data(), order()}; }
  std::span<const double> beta() const { return {gamma.data() + order(), order()}; }
  WaveShape wave_shape() const;
};

/// Column-pivoted QR; when the numerical rank (relative tolerance 1e-10) is
/// below 2r, an SVD minimum-norm solution is returned and flagged.
CoefficientVector fit_wsf(const Signal& x, const Dictionary& dict);

/// C_r gamma.
Signal reconstruct(const Dictionary& dict, const CoefficientVector& gamma);

/// (1/N) ||x - y||^2.
double mse(std::span<const double> x, std::span<const double> y);

/// Least-squares fits on every column prefix of a fixed matrix from a single
/// Householder factorisation. Prefix p uses columns 0..p-1.
class NestedLeastSquares {
public:
  NestedLeastSquares(Eigen::MatrixXd columns, std::span<const double> x);

  std::size_t max_columns() const { return static_cast<std::size_t>(qr_.cols()); }
  /// Fitted values of prefix p.
  Eigen::VectorXd fitted(std::size_t p) const;
  /// Coefficients of prefix p in column order.
  Eigen::VectorXd solve(std::size_t p) const;
  /// True if some leading diagonal entry of R up to p is below tolerance.
  bool rank_deficient(std::size_t p) const;

private:
  Eigen::MatrixXd columns_;
  Eigen::VectorXd x_;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr_;
  Eigen::VectorXd qtx_;
  std::vector<bool> deficient_;  // deficient_[p] for p = 0..max_columns
};

/// Fit of one order in a sweep.
struct OrderFit {
  std::vector<double> fitted;
  std::vector<double> residual;
  double mse = 0.0;
  bool rank_deficient = false;
};

/// All orders 1..r_max of one component, sharing one factorisation of the
/// harmonic-interleaved dictionary [c_1, d_1, c_2, d_2, ...].
class OrderSweep {
public:
  OrderSweep(const Signal& x, const AmplitudeTrack& amp, const PhaseTrack& phase,
             std::size_t r_max);

  std::size_t r_max() const { return fits_.size(); }
  const OrderFit& at(std::size_t r) const { return fits_.at(r - 1); }
  double mse(std::size_t r) const { return at(r).mse; }
  std::vector<double> mse_curve() const;
  CoefficientVector coefficients(std::size_t r) const;

private:
  NestedLeastSquares ls_;
  std::vector<OrderFit> fits_;
};

/// Joint two-component sweep over (r1, r2) in [1, r1_max] x [1, r2_max].
class OrderSweep2D {
public:
  OrderSweep2D(const Signal& x, const AmplitudeTrack& amp1, const PhaseTrack& phase1,
               const AmplitudeTrack& amp2, const PhaseTrack& phase2, std::size_t r1_max,
               std::size_t r2_max);

  std::size_t r1_max() const { return r1_max_; }
  std::size_t r2_max() const { return r2_max_; }
  const OrderFit& at(std::size_t r1, std::size_t r2) const;
  double mse(std::size_t r1, std::size_t r2) const { return at(r1, r2).mse; }
  /// {component 1, component 2} coefficients at (r1, r2).
  std::pair<CoefficientVector, CoefficientVector> coefficients(std::size_t r1, std::size_t r2) const;

private:
  std::size_t r1_max_;
  std::size_t r2_max_;
  std::vector<NestedLeastSquares> ls_;  // one per r1, columns [comp1 prefix | comp2 all]
  std::vector<OrderFit> fits_;          // row-major (r1 - 1, r2 - 1)
};

}  // namespace anh
