#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "lpslab/grid.hpp"

namespace testsupport {

/// O(N²) periodic convolution, the reference for the spectral path.
inline lpslab::GridFunction direct_convolve(const lpslab::GridFunction& f, const lpslab::GridFunction& g) {
    const lpslab::Grid& grid = f.grid();
    std::vector<double> out(grid.size(), 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        auto xi = grid.axis_indices(i);
        double s = 0.0;
        for (std::size_t j = 0; j < grid.size(); ++j) {
            auto xj = grid.axis_indices(j);
            std::size_t d = grid.shifted(grid.flat_index(xi[0], xi[1]), -static_cast<long>(xj[0]),
                                         -static_cast<long>(xj[1]));
            s += f[j] * g[d];
        }
        out[i] = s * grid.cell_volume();
    }
    return lpslab::GridFunction(grid, std::move(out));
}

inline lpslab::GridFunction random_function(const lpslab::Grid& grid, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    std::vector<double> v(grid.size());
    for (double& x : v) x = nd(rng);
    return lpslab::GridFunction(grid, std::move(v));
}

/// Random trigonometric polynomial with frequencies |m| ≤ max_freq.
inline lpslab::GridFunction random_trig(const lpslab::Grid& grid, int max_freq, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    std::vector<double> v(grid.size(), 0.0);
    const double tau = 2.0 * M_PI;
    const int kmax1 = grid.dim() == 2 ? max_freq : 0;
    for (int m0 = -max_freq; m0 <= max_freq; ++m0)
        for (int m1 = -kmax1; m1 <= kmax1; ++m1) {
            const double a = nd(rng), b = nd(rng);
            if (m0 == 0 && m1 == 0) continue;
            for (std::size_t i = 0; i < grid.size(); ++i) {
                auto x = grid.position(i);
                const double ph = tau * (m0 * x[0] + m1 * x[1]);
                v[i] += a * std::cos(ph) + b * std::sin(ph);
            }
        }
    return lpslab::GridFunction(grid, std::move(v));
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

} // namespace testsupport
