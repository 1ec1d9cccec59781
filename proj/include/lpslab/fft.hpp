#pragma once

#include <complex>
#include <vector>

#include "lpslab/grid.hpp"

namespace lpslab {

/**
 * Half spectrum of a real GridFunction as produced by a real-to-complex DFT
 * (last axis truncated to N/2+1 entries). Unnormalised, FFTW sign convention.
 */
struct Spectrum {
    Grid grid;
    std::vector<std::complex<double>> data;
};

Spectrum forward(const GridFunction& f);
GridFunction inverse(const Spectrum& s);

/// Kernel convolution with a precomputed spectrum of the kernel: hⁿ·IDFT(K̂·f̂)/size.
GridFunction convolve_spectrum(const Spectrum& kernel, const GridFunction& f);

/// Number of complex entries in a half spectrum for this grid.
std::size_t half_spectrum_size(const Grid& grid);

} // namespace lpslab
