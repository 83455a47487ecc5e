#pragma once

#include <complex>
#include <vector>

namespace fiberlink {

/// In-place iterative radix-2 transform; data.size() must be a power of two.
/// inverse=true applies the conjugate transform including the 1/N scale.
void fft_radix2(std::vector<std::complex<double>>& data, bool inverse);

/// Smallest power of two >= n (and >= 2).
std::size_t next_pow2(std::size_t n);

}  // namespace fiberlink
