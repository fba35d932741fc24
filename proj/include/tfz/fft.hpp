#pragma once

#include <span>

#include "tfz/grid.hpp"

namespace tfz::fft {

// Unnormalized DFT, X[k] = sum_l x[l] e^{-i 2 pi l k / n}. Out-of-place only.
void forward(std::span<const cd> in, std::span<cd> out);

// Unnormalized inverse kernel, x[l] = sum_k X[k] e^{+i 2 pi l k / n}.
// Callers divide by n where the identity requires it.
void backward(std::span<const cd> in, std::span<cd> out);

}  // namespace tfz::fft
