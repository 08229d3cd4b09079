#pragma once

#include "besovkit/grid.hpp"

namespace besov {

/// g_j := 2^{jn} g(. * 2^j) for a node-centered kernel grid, realized by exact
/// stride-2^j subsampling.  j = 0 returns g unchanged.  Throws when the
/// rescaled support drops below 2 grid cells.
GridFunction rescale_kernel(const GridFunction& g, int j);

/// Riemann-sum convolution h^n * sum_y g(x - y) f(y) of two grids with the
/// same spacing, truncated to f's box with zero extension.  The three routes
/// agree to 1e-10: direct summation (serial reference and OpenMP) and an
/// FFT route with zero padding.
GridFunction convolve_direct_serial(const GridFunction& f, const GridFunction& g);
GridFunction convolve_direct(const GridFunction& f, const GridFunction& g);
GridFunction convolve_fft(const GridFunction& f, const GridFunction& g);

/// Dispatches to the FFT route for large products, direct otherwise.
GridFunction convolve(const GridFunction& f, const GridFunction& g);

}  // namespace besov
