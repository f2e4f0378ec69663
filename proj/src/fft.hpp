#pragma once

// Thin wrapper over FFTW: cached unaligned plans, executed on caller buffers.
// Plan creation is serialized; execution is reentrant.

#include <complex>
#include <cstddef>
#include <span>

namespace snls::fft {

enum class Direction { forward, backward };

// In-place, unnormalized transform of a row-major cube with `dim` axes of
// length `extent`.  forward uses e^{-2 pi i kx/M}, backward e^{+2 pi i kx/M}.
void transform_cube(std::span<std::complex<double>> data, int dim, int extent, Direction dir);

// In-place unnormalized 1-D transform.
void transform_1d(std::span<std::complex<double>> data, Direction dir);

// Smallest n >= minimum whose prime factors are in {2,3,5,7}.
std::size_t friendly_size(std::size_t minimum);

}  // namespace snls::fft
