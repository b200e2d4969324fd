#pragma once

// Serial direct-sum versions of the frame-parallel kernels. They share no
// code with the FFT path and exist to cross-check it in tests and to give
// the benchmark a baseline.

#include "anhkit/tf_analysis.hpp"

namespace anh::reference {

/// Direct DFT of every windowed frame, O(N K L).
TFR stft(const Signal& x, const Window& w);

/// Direct cosine sum over the two-sided gamma-root magnitude, O(N K^2).
Cepstrum stct(const TFR& tfr, double gamma);

}  // namespace anh::reference
