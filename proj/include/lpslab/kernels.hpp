#pragma once

#include <complex>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "lpslab/fft.hpp"
#include "lpslab/grid.hpp"

namespace lpslab {

/// D^α of b(u) = exp(−s/(1−|u|²)) on |u| < 1 (zero outside); u has `dim` coordinates.
double bump_derivative(const MultiIndex& alpha, const Position& u, double sharpness);

struct PsiProfile;

/** Analytic description of the mothers; evaluators are built from it. */
struct MotherSpec {
    int dim = 1;
    int moments = 0;          ///< M: ψ ∈ D_M
    double support_radius = 0.25;
    static constexpr double phi_sharpness = 1.0;
    static constexpr double psi_sharpness = 8.0;
};

/**
 * φ (unit-mass bump of radius r) and ψ ∈ D_M, as evaluators and as samples on a grid.
 * For M = 0, ψ(x) = 2ⁿφ(2x) − φ(x); for M ≥ 1, ψ is an L¹-normalised
 * (M+1)-th derivative of the sharper bump exp(−8/(1−|x/r|²)).
 */
struct MotherPair {
    MotherSpec spec;
    Evaluator phi_eval;
    Evaluator psi_eval;
    GridFunction phi;
    GridFunction psi;
    double phi_norm = 0.0;  ///< c with φ(x) = c·r^{−n}·b(x/r)
    double psi_norm = 0.0;
    std::shared_ptr<const PsiProfile> psi_profile;  ///< dense 1D node table behind psi_hat

    int dim() const { return spec.dim; }
    int moments() const { return spec.moments; }
    double support_radius() const { return spec.support_radius; }
    /// D^αφ as an evaluator on displacements.
    Evaluator phi_derivative(const MultiIndex& alpha) const;
    /// C_β = ∫φ(y)y^β dy, by quadrature of the radial profile.
    double phi_moment(const MultiIndex& beta) const;
    /// ψ̂(ξ) = ∫ψ(x)e^{ix·ξ}dx off the grid, by dense quadrature; 0 once the transform is below 1e−30.
    std::complex<double> psi_hat(const Position& xi) const;
};

MotherPair build_mothers(int M, double support_radius, const Grid& grid);

/// Φ_k^N(x) = 2^{kn}(1+2^k|x|)^{−N}, |x| the torus distance to 0.
double eval_phi_kN(int k, double N, const Position& x, int dim);
GridFunction sample_phi_kN(int k, double N, const Grid& grid);

/// f̂ over all grid frequencies (flat FFT order) with f̂(ξ) = ∫f e^{ix·ξ}dx, so f̂(0) = ∫f.
std::vector<std::complex<double>> fourier_symbol(const GridFunction& f);
/// ξ = 2π·m for the flat frequency index i, m signed in [−N/2, N/2).
Position grid_frequency(const Grid& grid, std::size_t i);

/** A tabulated convolution kernel with its spectrum. */
struct Kernel {
    GridFunction values;
    Spectrum spectrum;
    explicit Kernel(GridFunction v);
    GridFunction apply(const GridFunction& f) const { return convolve_spectrum(spectrum, f); }
};

/// Moment constraints ∫K(z)z^β dz = target for each listed β.
struct MomentTargets {
    std::vector<MultiIndex> orders;
    std::vector<double> values;
};

/**
 * Per-scale tabulated kernels g_k(x) = 2^{kn}g(2^k x), each optionally corrected by a
 * φ_k-weighted polynomial so that its discrete moments hit the given targets.
 */
class KernelBank {
public:
    KernelBank() = default;
    KernelBank(std::string name, const Grid& grid, ScaleRange scales, std::map<int, Kernel> kernels);

    const std::string& name() const { return name_; }
    const Grid& grid() const { return grid_; }
    const ScaleRange& scales() const { return scales_; }
    const Kernel& at(int k) const;
    GridFunction apply(int k, const GridFunction& f) const { return at(k).apply(f); }

private:
    std::string name_;
    Grid grid_{1, 6};
    ScaleRange scales_;
    std::map<int, Kernel> kernels_;
};

/// Samples the dilates of `mother` and, when `targets_for_scale` yields constraints, projects them.
KernelBank make_dilate_bank(std::string name, const MotherPair& mp, const Evaluator& mother, const Grid& grid,
                            ScaleRange scales, const std::function<MomentTargets(int)>& targets_for_scale);

/// ∫K(z) z^β dz by quadrature with torus displacement.
double kernel_moment(const GridFunction& K, const MultiIndex& beta);

/** Mothers together with their ψ_k and φ_k dilates. */
struct ConvolutionBank {
    std::shared_ptr<const MotherPair> mother;
    ScaleRange scales;
    KernelBank psi;
    KernelBank phi;
    int phi_fix = 2;

    const Grid& grid() const { return psi.grid(); }
    int moments() const { return mother->moments(); }
};

struct BankOptions {
    int phi_fix = 2;          ///< φ_k moments fixed through this order
    bool project = true;      ///< apply the moment projection
};

ConvolutionBank make_bank(std::shared_ptr<const MotherPair> mother, ScaleRange scales, BankOptions opts = {});

/// (D^αφ)_k dilates with moments through max(|α|, fix) set to their analytic values.
KernelBank make_derivative_bank(const MotherPair& mp, const MultiIndex& alpha, const Grid& grid, ScaleRange scales,
                                int fix, bool project = true);

/// ψ^{(μ)}_k dilates, ψ^{(μ)}(x) = x^μψ(x); moments through M − |μ| projected to 0.
KernelBank make_weighted_psi_bank(const MotherPair& mp, const MultiIndex& mu, const Grid& grid, ScaleRange scales);

/// Two-column CSV (position, value) of a 1D function, or (x0, x1, value) in 2D.
std::string mother_csv(const GridFunction& f);

} // namespace lpslab
