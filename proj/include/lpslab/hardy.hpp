#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lpslab/carleson.hpp"
#include "lpslab/grid.hpp"
#include "lpslab/kernels.hpp"
#include "lpslab/lpso.hpp"

namespace lpslab {

/// Offset between the cube level and the kernel scale: cubes of side 2^{−(j+N_0)} go with scale j.
inline constexpr int kCubeOffset = 2;

/// sup over radii {0} ∪ {2^{−ℓ}: 1 ≤ ℓ ≤ G} of the average of |f| over the closed torus ball of grid points.
GridFunction hl_maximal(const GridFunction& f);

/// Nearest grid point to the centre of a cube (the upper-middle sample when the side count is even).
std::size_t cube_center_index(const Grid& g, const DyadicCube& q);

/**
 * 𝓜_j^r f = {𝓜[(Σ_Q f(c_Q)χ_Q)^r]}^{1/r} over cubes of level j + N_0; `center_values` is indexed by
 * the flat cube index (row-major in 2D). Absolute values are taken before the power.
 */
GridFunction mjr_maximal(const std::vector<double>& center_values, int j, double r, const Grid& grid,
                         int cube_offset = kCubeOffset);

/// 𝓝^φf(x) = max over k in scales and grid y with |x−y| ≤ 2^{−k} of |P_kf(y)|.
GridFunction nontangential_maximal(const GridFunction& f, const KernelBank& phi_bank);
GridFunction nontangential_maximal(const GridFunction& f, const MotherPair& phi, const ScaleRange& scales);

struct HardyNormEstimate {
    double p = 1.0;
    double via_square = 0.0;
    double via_maximal = 0.0;
    double via_discrete = 0.0;
};

/// Smallest M with M > n(1/p − 1).
int required_moments(double p, int dim);

HardyNormEstimate hp_norm(const GridFunction& f, double p, const ConvolutionBank& bank);

/// Σ_k |ψ̂_k|² over the bank's tabulated kernels, at every grid frequency (flat FFT order).
std::vector<double> frame_symbol(const KernelBank& psi);

struct FrameBounds {
    double lower = 0.0;
    double upper = 0.0;
};
/// min and max of frame_symbol over the frequencies selected by `in_band` (argument: signed index m).
FrameBounds frame_bounds(const KernelBank& psi, const std::function<bool(const std::array<long, 2>&)>& in_band);

/// ‖Σ_k Q_k*Q_kf − c·f‖₂ / ‖f‖₂.
double reconstruction_defect(const KernelBank& psi, const GridFunction& f, double c);

struct Atom {
    double p = 1.0;
    DyadicCube cube;
    GridFunction values;
    int moment_order = 0;
};

/// Deterministic smooth atom on `cube` with moments through ⌊n(1/p−1)⌋ removed and sup = |Q|^{−1/p}.
Atom make_atom(double p, const DyadicCube& cube, unsigned long long seed, const Grid& grid);

struct AtomSpec {
    int level = 0;
    unsigned long long seed = 0;
};

enum class AtomPlacement {
    Random,    ///< cube index drawn from the seed
    Anchored,  ///< the level-ℓ cube whose lower corner is the anchor point
};

struct ExperimentOptions {
    AtomPlacement placement = AtomPlacement::Random;
    Position anchor{0.5, 0.5};
    /// L + δ of the family's certificate; when set, p must satisfy n/(n+L+δ) < p ≤ 1.
    std::optional<double> smoothness;
};

struct ExperimentRow {
    int level = 0;
    unsigned long long seed = 0;
    DyadicCube cube;
    double p = 1.0;
    double ratio = 0.0;
    HardyNormEstimate hp;
    double sqfn_lp = 0.0;
};

struct ExperimentReport {
    std::vector<ExperimentRow> rows;  ///< sorted by (level, seed)
    double max_ratio = 0.0;
    double min_ratio = 0.0;
    double slope = 0.0;  ///< least-squares slope of ln ρ against level
    std::string csv() const;
};

/// ρ(a) = ‖S_Λa‖_{L^p} / hp_norm(a).via_square over the atom ensemble.
ExperimentReport boundedness_experiment(const LpsoFamily& fam, double p, const std::vector<AtomSpec>& atoms,
                                        const ConvolutionBank& bank, const ExperimentOptions& opts = {});

/// Ratio-versus-level plot for a boundedness report CSV.
std::string gnuplot_script(const std::string& csv_path);

/// Least-squares slope of y against x.
double ls_slope(const std::vector<double>& x, const std::vector<double>& y);

/**
 * Left side Σ_Q |Q|Φ^{n+ν}_{min(j,k)}(x−c_Q)f(c_Q) of the Φ-sum inequality, over cubes of level j + N_0,
 * at every grid point (spike train convolved with the envelope).
 */
GridFunction phi_cube_sum(const std::vector<double>& center_values, int j, int k, double nu, const Grid& grid,
                          int cube_offset = kCubeOffset);
/// The same sum at one grid point by direct summation.
double phi_cube_sum_at(const std::vector<double>& center_values, int j, int k, double nu, const Grid& grid,
                       std::size_t x, int cube_offset = kCubeOffset);

struct PhiSumCalibration {
    double C = 0.0;
    int worst_j = 0, worst_k = 0;
    std::size_t worst_x = 0;
    std::string worst_input;
};

/// C = max over inputs, grid x and j, k in `scales` of Σ_Q(...) / (2^{max(0,j−k)ν}·𝓜_j^r f(x)).
PhiSumCalibration calibrate_phi_sum(const Grid& grid, const ScaleRange& scales, double r, double nu,
                                    const std::vector<std::pair<std::string, std::function<std::vector<double>(int)>>>& inputs,
                                    int cube_offset = kCubeOffset);

/// ‖(Σ_j 𝓜_j^r(ψ_j∗a)(x)²)^{1/2}‖_{L^p} with ψ_j∗a read at the level-(j+N_0) cube centres.
double maximal_square_norm(const GridFunction& a, const ConvolutionBank& bank, double r, double p,
                           int cube_offset = kCubeOffset);

} // namespace lpslab
