#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace anh::detail {

/// RAII wrapper around an FFTW real-to-complex plan with owned buffers.
/// Plan creation and destruction are serialised; execution is thread-safe
/// as long as each thread owns its RealFft.
class RealFft {
public:
  explicit RealFft(std::size_t n);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const { return n_; }
  std::span<double> input() { return {in_, n_}; }
  /// n/2 + 1 bins, valid after execute().
  std::span<const std::complex<double>> output() const { return {out_, n_ / 2 + 1}; }
  void execute();

private:
  std::size_t n_;
  double* in_ = nullptr;
  std::complex<double>* out_ = nullptr;
  void* plan_ = nullptr;
};

}  // namespace anh::detail
