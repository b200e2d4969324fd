#include "anhkit/regression.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace anh {

namespace {

constexpr double kRankTol = 1e-10;

void check_tracks(const AmplitudeTrack& amp, const PhaseTrack& phase, std::size_t columns) {
  if (amp.size() != phase.size()) {
    throw std::invalid_argument("dictionary: amplitude and phase lengths differ");
  }
  if (columns >= phase.size()) {
    throw std::invalid_argument("dictionary: " + std::to_string(columns) +
                                " columns need more than that many samples (N=" +
                                std::to_string(phase.size()) + ")");
  }
}

// [c_1, d_1, ..., c_R, d_R].
Eigen::MatrixXd interleaved(const AmplitudeTrack& amp, const PhaseTrack& phase, std::size_t r) {
  if (r == 0) throw std::invalid_argument("order sweep: maximum order must be >= 1");
  check_tracks(amp, phase, 2 * r);
  const auto n_rows = static_cast<Eigen::Index>(phase.size());
  Eigen::MatrixXd m(n_rows, static_cast<Eigen::Index>(2 * r));
  for (Eigen::Index n = 0; n < n_rows; ++n) {
    const double a = amp.amp[static_cast<std::size_t>(n)];
    const double phi = phase.phi[static_cast<std::size_t>(n)];
    for (std::size_t l = 1; l <= r; ++l) {
      const double theta = 2.0 * std::numbers::pi * static_cast<double>(l) * phi;
      m(n, static_cast<Eigen::Index>(2 * l - 2)) = a * std::cos(theta);
      m(n, static_cast<Eigen::Index>(2 * l - 1)) = a * std::sin(theta);
    }
  }
  return m;
}

CoefficientVector from_interleaved(const Eigen::VectorXd& v, std::size_t offset, std::size_t r) {
  CoefficientVector c;
  c.gamma.resize(2 * r);
  for (std::size_t l = 0; l < r; ++l) {
    c.gamma[l] = v(static_cast<Eigen::Index>(offset + 2 * l));
    c.gamma[r + l] = v(static_cast<Eigen::Index>(offset + 2 * l + 1));
  }
  return c;
}

Eigen::VectorXd min_norm(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(kRankTol);
  return svd.solve(b);
}

OrderFit make_fit(const Eigen::VectorXd& fitted, std::span<const double> x, bool deficient) {
  OrderFit f;
  f.fitted.assign(fitted.data(), fitted.data() + fitted.size());
  f.residual.resize(x.size());
  for (std::size_t n = 0; n < x.size(); ++n) f.residual[n] = x[n] - f.fitted[n];
  f.mse = mse(x, f.fitted);
  f.rank_deficient = deficient;
  return f;
}

}  // namespace

Dictionary build_dictionary(const AmplitudeTrack& amp, const PhaseTrack& phase, std::size_t r) {
  if (r == 0) throw std::invalid_argument("build_dictionary: order must be >= 1");
  check_tracks(amp, phase, 2 * r);
  Dictionary d;
  d.r = r;
  d.fs = phase.fs;
  const auto n_rows = static_cast<Eigen::Index>(phase.size());
  d.columns.resize(n_rows, static_cast<Eigen::Index>(2 * r));
  for (Eigen::Index n = 0; n < n_rows; ++n) {
    const double a = amp.amp[static_cast<std::size_t>(n)];
    const double phi = phase.phi[static_cast<std::size_t>(n)];
    for (std::size_t l = 1; l <= r; ++l) {
      const double theta = 2.0 * std::numbers::pi * static_cast<double>(l) * phi;
      d.columns(n, static_cast<Eigen::Index>(l - 1)) = a * std::cos(theta);
      d.columns(n, static_cast<Eigen::Index>(r + l - 1)) = a * std::sin(theta);
    }
  }
  return d;
}

WaveShape CoefficientVector::wave_shape() const {
  WaveShape ws;
  ws.alpha.assign(alpha().begin(), alpha().end());
  ws.beta.assign(beta().begin(), beta().end());
  return ws;
}

CoefficientVector fit_wsf(const Signal& x, const Dictionary& dict) {
  if (dict.rows() != x.size()) throw std::invalid_argument("fit_wsf: dictionary rows != N");
  const Eigen::Map<const Eigen::VectorXd> b(x.samples().data(), static_cast<Eigen::Index>(x.size()));
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(dict.columns);
  qr.setThreshold(kRankTol);
  CoefficientVector c;
  Eigen::VectorXd sol;
  if (qr.rank() < dict.columns.cols()) {
    sol = min_norm(dict.columns, b);
    c.rank_deficient = true;
  } else {
    sol = qr.solve(b);
  }
  c.gamma.assign(sol.data(), sol.data() + sol.size());
  return c;
}

Signal reconstruct(const Dictionary& dict, const CoefficientVector& gamma) {
  if (static_cast<Eigen::Index>(gamma.gamma.size()) != dict.columns.cols()) {
    throw std::invalid_argument("reconstruct: coefficient length != dictionary columns");
  }
  const Eigen::Map<const Eigen::VectorXd> g(gamma.gamma.data(), dict.columns.cols());
  const Eigen::VectorXd y = dict.columns * g;
  return Signal(std::vector<double>(y.data(), y.data() + y.size()), dict.fs);
}

double mse(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.empty()) throw std::invalid_argument("mse: length mismatch");
  double acc = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    const double e = x[n] - y[n];
    acc += e * e;
  }
  return acc / static_cast<double>(x.size());
}

NestedLeastSquares::NestedLeastSquares(Eigen::MatrixXd columns, std::span<const double> x)
    : columns_(std::move(columns)),
      x_(Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()))),
      qr_(columns_) {
  if (static_cast<std::size_t>(columns_.rows()) != x.size()) {
    throw std::invalid_argument("NestedLeastSquares: row count != N");
  }
  qtx_ = qr_.householderQ().transpose() * x_;
  double scale = 0.0;
  for (Eigen::Index j = 0; j < columns_.cols(); ++j) scale = std::max(scale, columns_.col(j).norm());
  deficient_.assign(static_cast<std::size_t>(columns_.cols()) + 1, false);
  for (Eigen::Index i = 0; i < columns_.cols(); ++i) {
    const bool bad = !(std::abs(qr_.matrixQR()(i, i)) > kRankTol * scale);
    deficient_[static_cast<std::size_t>(i) + 1] = deficient_[static_cast<std::size_t>(i)] || bad;
  }
}

bool NestedLeastSquares::rank_deficient(std::size_t p) const { return deficient_.at(p); }

Eigen::VectorXd NestedLeastSquares::solve(std::size_t p) const {
  if (p == 0 || p > max_columns()) throw std::out_of_range("NestedLeastSquares: bad prefix");
  const auto ps = static_cast<Eigen::Index>(p);
  if (rank_deficient(p)) return min_norm(columns_.leftCols(ps), x_);
  return qr_.matrixQR().topLeftCorner(ps, ps).triangularView<Eigen::Upper>().solve(qtx_.head(ps));
}

Eigen::VectorXd NestedLeastSquares::fitted(std::size_t p) const {
  if (p == 0 || p > max_columns()) throw std::out_of_range("NestedLeastSquares: bad prefix");
  const auto ps = static_cast<Eigen::Index>(p);
  if (rank_deficient(p)) return columns_.leftCols(ps) * solve(p);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(x_.size());
  v.head(ps) = qtx_.head(ps);
  return qr_.householderQ() * v;
}

OrderSweep::OrderSweep(const Signal& x, const AmplitudeTrack& amp, const PhaseTrack& phase,
                       std::size_t r_max)
    : ls_(interleaved(amp, phase, r_max), x.samples()) {
  if (x.size() != phase.size()) throw std::invalid_argument("OrderSweep: signal/track length mismatch");
  fits_.reserve(r_max);
  for (std::size_t r = 1; r <= r_max; ++r) {
    fits_.push_back(make_fit(ls_.fitted(2 * r), x.samples(), ls_.rank_deficient(2 * r)));
  }
}

std::vector<double> OrderSweep::mse_curve() const {
  std::vector<double> out;
  out.reserve(fits_.size());
  for (const auto& f : fits_) out.push_back(f.mse);
  return out;
}

CoefficientVector OrderSweep::coefficients(std::size_t r) const {
  CoefficientVector c = from_interleaved(ls_.solve(2 * r), 0, r);
  c.rank_deficient = ls_.rank_deficient(2 * r);
  return c;
}

OrderSweep2D::OrderSweep2D(const Signal& x, const AmplitudeTrack& amp1, const PhaseTrack& phase1,
                           const AmplitudeTrack& amp2, const PhaseTrack& phase2,
                           std::size_t r1_max, std::size_t r2_max)
    : r1_max_(r1_max), r2_max_(r2_max) {
  if (r1_max == 0 || r2_max == 0) throw std::invalid_argument("OrderSweep2D: orders must be >= 1");
  if (x.size() != phase1.size() || x.size() != phase2.size()) {
    throw std::invalid_argument("OrderSweep2D: signal/track length mismatch");
  }
  check_tracks(amp1, phase1, 2 * (r1_max + r2_max));
  const Eigen::MatrixXd b1 = interleaved(amp1, phase1, r1_max);
  const Eigen::MatrixXd b2 = interleaved(amp2, phase2, r2_max);
  ls_.reserve(r1_max);
  fits_.reserve(r1_max * r2_max);
  for (std::size_t r1 = 1; r1 <= r1_max; ++r1) {
    Eigen::MatrixXd cols(b1.rows(), static_cast<Eigen::Index>(2 * (r1 + r2_max)));
    cols << b1.leftCols(static_cast<Eigen::Index>(2 * r1)), b2;
    ls_.emplace_back(std::move(cols), x.samples());
    const auto& ls = ls_.back();
    for (std::size_t r2 = 1; r2 <= r2_max; ++r2) {
      const std::size_t p = 2 * (r1 + r2);
      fits_.push_back(make_fit(ls.fitted(p), x.samples(), ls.rank_deficient(p)));
    }
  }
}

const OrderFit& OrderSweep2D::at(std::size_t r1, std::size_t r2) const {
  if (r1 < 1 || r1 > r1_max_ || r2 < 1 || r2 > r2_max_) {
    throw std::out_of_range("OrderSweep2D: order pair out of range");
  }
  return fits_[(r1 - 1) * r2_max_ + (r2 - 1)];
}

std::pair<CoefficientVector, CoefficientVector> OrderSweep2D::coefficients(std::size_t r1,
                                                                          std::size_t r2) const {
  (void)at(r1, r2);
  const auto& ls = ls_[r1 - 1];
  const std::size_t p = 2 * (r1 + r2);
  const Eigen::VectorXd v = ls.solve(p);
  auto c1 = from_interleaved(v, 0, r1);
  auto c2 = from_interleaved(v, 2 * r1, r2);
  c1.rank_deficient = c2.rank_deficient = ls.rank_deficient(p);
  return {std::move(c1), std::move(c2)};
}

}  // namespace anh
