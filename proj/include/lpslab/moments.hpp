#pragma once

#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "lpslab/kernels.hpp"
#include "lpslab/lpso.hpp"
#include "lpslab/moment_table.hpp"

namespace lpslab {

/** M_{α,β} = (−1)^{|β|−|α|} β!/(β−α)! ∫φ(y)y^{β−α}dy for α ≤ β, else 0. */
struct MomentMatrix {
    int order = 0;
    int dim = 1;
    std::vector<MultiIndex> indices;  ///< all |α| ≤ order
    std::vector<double> entries;      ///< row-major over indices
    double c0 = 0.0;                  ///< Σ|M_{α,β}|

    double at(const MultiIndex& alpha, const MultiIndex& beta) const;
    std::string csv() const;
};

MomentMatrix moment_matrix(const MotherPair& phi, int L);

struct MomentOptions {
    int blocks_per_axis = 16;  ///< block trick tiling for operator-only families
    /// Certified decay N of the family; orders |α| ≥ N − n are rejected.
    double decay_N = std::numeric_limits<double>::infinity();
};

/**
 * [[Λ_k]]_α(x) = 2^{k|α|}∫λ_k(x,y)(x−y)^α dy for all k and |α| ≤ L.
 * Convolution: a constant per (k, α); Tabulated: quadrature in y per row; Composed and
 * Corrected: the operator is applied to (c−y)^γ on blocks with centre c and the binomial
 * expansion of (x−y)^α = ((x−c)+(c−y))^α is reassembled.
 */
MomentTable moment_table(const LpsoFamily& fam, int L, const MomentOptions& opts = {});

/// [[K]]_β = 2^{k|β|}∫K(z)z^β dz for one tabulated convolution kernel at scale k.
double convolution_moment(const GridFunction& K, int k, const MultiIndex& beta);

struct CascadeResult {
    std::shared_ptr<const LpsoFamily> corrected;
    std::vector<MomentTable> staged;  ///< [[Λ_k^{(m)}]]_α for m = 0..L, all |α| ≤ L
    MomentTable base;                 ///< [[Λ_k]]_α
};

/**
 * Λ^{(0)} = Λ − [[Λ]]_0·P_k, then stage m subtracts Σ_{|α|=m} (−1)^{|α|}([[Λ^{(m−1)}]]_α/α!)·(D^αφ)_k∗f.
 * Staged tables are propagated with the discrete moments of the tabulated P_k and (D^αφ)_k
 * kernels, so annihilation is exact to round-off.
 */
CascadeResult correction_cascade(const LpsoFamily& fam, int L, const ConvolutionBank& p_bank,
                                 const MomentOptions& opts = {});

struct GrowthReport {
    double c0 = 0.0;
    std::vector<double> max_ratio;  ///< per stage: max over (k, x) of lhs / rhs
    std::vector<double> bound;      ///< (1+C_0)^{m+1}
    long violations = 0;
    long points_checked = 0;
    std::string csv() const;
};

/// Σ_{|α|≤L}|[[Λ^{(m)}]]_α(x)| ≤ (1+C_0)^{m+1}Σ_{|α|≤L}|[[Λ]]_α(x)| at every grid point and scale.
GrowthReport growth_bound_check(const MomentTable& base, const std::vector<MomentTable>& staged,
                                const MomentMatrix& mm);

/// y-centred moment 2^{k|β|}∫λ(x,y)(y−x)^β dy of P_kD^α, by Gauss–Legendre quadrature of the analytic kernel.
double p_derivative_moment(const MotherPair& mp, const MultiIndex& alpha, const MultiIndex& beta, int k);
/// The same moment by the rectangle rule on unprojected grid samples of (D^αφ)_k.
double p_derivative_moment_sampled(const MotherPair& mp, const MultiIndex& alpha, const MultiIndex& beta, int k,
                                   const Grid& grid);

} // namespace lpslab
