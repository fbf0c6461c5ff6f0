#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace fsflow {

using cplx = std::complex<double>;

/// In-place complex DFT of length n (any n >= 1): radix-2 when n is a power of
/// two, Bluestein otherwise. sign = -1 forward, +1 inverse (unnormalized).
void dft(cplx* data, std::size_t n, int sign);

/// Unnormalized inverse followed by 1/n scaling.
void idft_normalized(cplx* data, std::size_t n);

/// DFT along one axis of a row-major multi-dimensional array.
/// dims: extents; axis: which extent to transform. Unnormalized.
void dft_axis(cplx* data, const std::vector<std::size_t>& dims, int axis, int sign);

} // namespace fsflow
