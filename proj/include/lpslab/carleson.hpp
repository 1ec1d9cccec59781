#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <string>

#include "lpslab/grid.hpp"
#include "lpslab/kernels.hpp"

namespace lpslab {

/** Q = 2^{−ℓ}(index + [0,1)ⁿ) ⊂ [0,1)ⁿ. */
struct DyadicCube {
    int level = 0;
    std::array<std::size_t, 2> index{0, 0};
    int dim = 1;

    double side() const { return std::ldexp(1.0, -level); }
    double volume() const { return std::pow(side(), dim); }
    Position corner() const;
    Position center() const;
    bool contains(const Position& x) const;
    /// Grid indices per axis covered by the cube: [first, first + count).
    std::size_t first_sample(const Grid& g, int axis) const;
    std::size_t samples_per_side(const Grid& g) const;
    std::string to_string() const;
    bool operator==(const DyadicCube&) const = default;
};

/// Cube of the given level containing grid point i.
DyadicCube cube_of(const Grid& g, std::size_t i, int level);

struct CarlesonReport {
    double constant = 0.0;
    DyadicCube argmax_cube;
    std::map<int, double> per_level;       ///< level → max normalised mass
    std::map<int, DyadicCube> per_level_argmax;
    /// "2^{−k} ≤ ℓ(Q)" is read as a closed inequality: scales k ≥ ℓ enter a level-ℓ box.
    static constexpr const char* scale_convention = "closed: 2^-k <= l(Q)";
    std::string csv() const;
};

using CubeFilter = std::function<bool(const DyadicCube&)>;

/**
 * max over dyadic cubes of levels 0..max_level of (1/|Q|)Σ_{k ≥ ℓ(Q)} ∫_Q μ_k.
 * Per level the partial sums A_ℓ = Σ_{k ≥ ℓ} μ_k are accumulated once and pooled into cubes,
 * so the cost is O(levels · points). Cubes rejected by `filter` are skipped.
 */
CarlesonReport carleson_constant(const std::map<int, GridFunction>& mu, const ScaleRange& scales, int max_level,
                                 const CubeFilter& filter = {});

/// Carleson constant of μ_k = 2^{2Mk}|Q_kF|² over the bank's scales.
CarlesonReport bmo_m_constant(const GridFunction& F, int M, const ConvolutionBank& bank, int max_level,
                              const CubeFilter& filter = {});

/// max over dyadic cubes of (1/|Q|)∫_Q|F − avg_Q F|.
double dyadic_bmo_norm(const GridFunction& F, int max_level);

} // namespace lpslab
