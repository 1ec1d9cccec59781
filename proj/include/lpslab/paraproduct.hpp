#pragma once

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "lpslab/carleson.hpp"
#include "lpslab/grid.hpp"
#include "lpslab/kernels.hpp"
#include "lpslab/lpso.hpp"

namespace lpslab {

/**
 * Π_βf = Σ_j Q_j(Q_jβ·P_jf) over the shared scales. Q_jβ is computed once at construction.
 * Invariants: ψ ∈ D_{L+1}, φ_k moments fixed through order ≥ L, both banks on one grid and scale range.
 */
class BonyParaproduct {
public:
    BonyParaproduct(GridFunction beta, std::shared_ptr<const ConvolutionBank> q_bank,
                    std::shared_ptr<const ConvolutionBank> p_bank, int L);
    /// Skips the D_{L+1} requirement; only for constructing cancellation-failure contrasts.
    static BonyParaproduct without_cancellation_check(GridFunction beta, std::shared_ptr<const ConvolutionBank> q_bank,
                                                      std::shared_ptr<const ConvolutionBank> p_bank, int L);

    const GridFunction& beta() const { return beta_; }
    const ConvolutionBank& q_bank() const { return *q_; }
    const ConvolutionBank& p_bank() const { return *p_; }
    std::shared_ptr<const ConvolutionBank> q_bank_ptr() const { return q_; }
    const ScaleRange& scales() const { return q_->scales; }
    const Grid& grid() const { return q_->grid(); }
    int L() const { return L_; }
    const GridFunction& q_beta(int j) const { return qbeta_.at(j); }

private:
    BonyParaproduct(GridFunction beta, std::shared_ptr<const ConvolutionBank> q_bank,
                    std::shared_ptr<const ConvolutionBank> p_bank, int L, bool check);
    GridFunction beta_;
    std::shared_ptr<const ConvolutionBank> q_;
    std::shared_ptr<const ConvolutionBank> p_;
    int L_;
    std::map<int, GridFunction> qbeta_;
};

GridFunction apply_bony(const BonyParaproduct& pp, const GridFunction& f);

/// Λ_k = Q_k∘Π_β, with Q_k from the paraproduct's own ψ bank.
LpsoFamily bony_family(std::shared_ptr<const BonyParaproduct> pp);

struct AdjointMomentReport {
    int max_order = 0;
    std::vector<MultiIndex> alphas;
    /// values[f][a] = |∫Π_βf·x^α dx| / (‖f‖₂‖β‖₂); 0 when β = 0.
    std::vector<std::vector<double>> values;
    double max_normalized = 0.0;
    std::string csv() const;
};

/**
 * |∫Π_βf(x)x^α dx| for |α| ≤ max_order (default L), x ∈ [0,1)ⁿ. Each f must vanish within
 * the paraproduct's reach of the period boundary, so Π_βf does not wrap.
 */
AdjointMomentReport adjoint_moment_check(const BonyParaproduct& pp, const std::vector<GridFunction>& test_fns);
AdjointMomentReport adjoint_moment_check(const BonyParaproduct& pp, const std::vector<GridFunction>& test_fns,
                                         int max_order);

/// Support radius of Π_β around a point: ψ_j and φ_j radii at the coarsest scale.
double bony_reach(const BonyParaproduct& pp);

/// ⟨[[Π_β]]_α, ψ_k^x⟩ = Σ_{μ≤α} C(α,μ)C_{α−μ} Σ_j 2^{−|α|j} Q_kQ_j^{(μ)}Q_jβ(x), per k.
std::map<int, GridFunction> bony_moment_reduced(const BonyParaproduct& pp, const MultiIndex& alpha);

/// Q_k applied to [[Π_β]]_α(x) = ∫K(x,y)(x−y)^α dy, with K tabulated column by column. O(N²); small grids.
std::map<int, GridFunction> bony_moment_direct(const BonyParaproduct& pp, const MultiIndex& alpha);

/// Carleson report of μ_k = 2^{2|α|k}|⟨[[Π_β]]_α, ψ_k^x⟩|² over the paraproduct's scales.
CarlesonReport bony_moment_carleson(const BonyParaproduct& pp, const MultiIndex& alpha, int max_level);

struct MultiplierProfile {
    double s = 0.0;
    ScaleRange scales;
    Grid grid{1, 6};
    std::vector<double> values;  ///< m(ξ) per flat grid frequency
    double sup_abs = 0.0;
    std::string csv() const;
};

/// m(ξ) = Σ_{k∈scales} V̂(2^{−k}ξ) with V̂(ξ) = |ξ|^s|ψ̂(ξ)|² at the grid frequencies; requires |s| ≤ M.
MultiplierProfile multiplier_bound(const MotherPair& psi, double s, const ScaleRange& scales, const Grid& grid);

/// min of m over nonzero frequencies with |m_i| in [lo, hi] (signed index per axis, max norm).
double multiplier_min(const MultiplierProfile& m, long lo, long hi);

struct OrthogonalityPoint {
    int j = 0, k = 0;
    double a = 0.0;
};

struct DecayFit {
    double exponent = 0.0;   ///< e in log2 a ≈ c − e|j−k|
    double intercept = 0.0;
    double residual = 0.0;   ///< RMS residual of the log2 fit
    std::size_t points = 0;
};

struct OrthogonalityReport {
    std::vector<OrthogonalityPoint> points;
    DecayFit all, k_above_j, j_above_k;  ///< branch fits include the diagonal
    int L = 0;
    double delta = 0.0;
    double max_moment = 0.0;  ///< sup |[[Λ_k]]_α| over |α| ≤ L
    std::string warning;      ///< non-empty when moments through L are not annihilated
    std::string csv() const;
};

struct OrthogonalityOptions {
    std::size_t center = std::size_t(-1);  ///< probe centre (grid index); default N/2 + 37 per axis
    double moment_tolerance = 1e-6;
};

/**
 * a(j,k) = sup_x |Λ_kψ_j^c(x)| / Φ^{n+L+δ}_{min(j,k)}(x − c) for j over the bank's scales intersected
 * with the family's, ψ_j^c the bank's ψ_j centred at c; decay exponents by least squares on log2 a.
 */
OrthogonalityReport orthogonality_probe(const LpsoFamily& fam, const ConvolutionBank& bank, int L, double delta,
                                        const OrthogonalityOptions& opts = {});

DecayFit fit_decay(const std::vector<OrthogonalityPoint>& pts);

/** Concrete BMO representatives. */
enum class BetaKind {
    Half,        ///< 1 on {x_0 ≥ 1/2}
    DyadicStep,  ///< i.i.d. standard normal values on the level-ℓ dyadic cubes
    Sawtooth,    ///< x_0 on [0,1): one jump per period
    Lacunary,    ///< Σ_{j=1}^{8} cos 2π(2^j x_0 + θ_j), random phases
};

BetaKind parse_beta_kind(const std::string& name);
std::string to_string(BetaKind kind);
GridFunction make_beta(BetaKind kind, const Grid& grid, unsigned long long seed = 0, int level = 4);

/// max over the grid of (Φ_j^N∗Φ_k^N)(x) / Φ^N_{min(j,k)}(x).
double envelope_convolution_ratio(int j, int k, double N, const Grid& grid);

} // namespace lpslab
