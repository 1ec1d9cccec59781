#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "lpslab/grid.hpp"
#include "lpslab/kernels.hpp"
#include "lpslab/moment_table.hpp"

namespace lpslab {

using Operator = std::function<GridFunction(const GridFunction&)>;

class LpsoFamily;

struct ConvolutionVariant {
    std::shared_ptr<const KernelBank> bank;
};

/// λ_k(x_i, y_j) stored row-major, (2^G)^{2n} entries per scale.
struct TabulatedVariant {
    std::map<int, std::vector<double>> matrices;
};

/// Λ_k = Q_k ∘ T with T never materialised.
struct ComposedVariant {
    std::shared_ptr<const KernelBank> outer;
    Operator inner;
    std::string inner_name;
};

/**
 * Λ_k^{(L)}f = Λ_kf − [[Λ_k]]_0·P_kf − Σ_{1≤|α|≤L} (−1)^{|α|}([[Λ_k^{(|α|−1)}]]_α/α!)·(D^αφ)_k∗f.
 * `coefficients` holds [[Λ_k]]_0 and [[Λ_k^{(m−1)}]]_α for |α| = m ≤ L.
 */
struct CorrectedVariant {
    std::shared_ptr<const LpsoFamily> base;
    MomentTable coefficients;
    std::shared_ptr<const KernelBank> p_bank;
    std::map<MultiIndex, std::shared_ptr<const KernelBank>> derivative_banks;
    int order = 0;
};

/** An indexed family k ↦ Λ_k of operators on one grid. */
class LpsoFamily {
public:
    using Variant = std::variant<ConvolutionVariant, TabulatedVariant, ComposedVariant, CorrectedVariant>;

    LpsoFamily(Grid grid, ScaleRange scales, Variant v, std::string name);

    static LpsoFamily convolution(std::shared_ptr<const KernelBank> bank, std::string name = "convolution");
    static LpsoFamily tabulated(const Grid& grid, ScaleRange scales, std::map<int, std::vector<double>> matrices,
                                std::string name = "tabulated");
    /// Tabulates λ_k(x, y) = kernel(k, x_i, y_j) for every scale.
    static LpsoFamily tabulate(const Grid& grid, ScaleRange scales,
                               const std::function<double(int, std::size_t, std::size_t)>& kernel,
                               std::string name = "tabulated");
    static LpsoFamily composed(std::shared_ptr<const KernelBank> outer, Operator inner, std::string inner_name);

    const Grid& grid() const { return grid_; }
    const ScaleRange& scales() const { return scales_; }
    const Variant& variant() const { return v_; }
    const std::string& name() const { return name_; }

    GridFunction apply(int k, const GridFunction& f) const;
    /// Λ_kf for every scale, sharing work across scales where the variant allows it.
    std::map<int, GridFunction> apply_all(const GridFunction& f) const;

    /// True for the variants with a pointwise kernel (Convolution, Tabulated).
    bool has_kernel() const;
    /// λ_k(x_i, y_j); only for has_kernel().
    double kernel(int k, std::size_t xi, std::size_t yj) const;

private:
    void check_scale(int k) const;
    Grid grid_;
    ScaleRange scales_;
    Variant v_;
    std::string name_;
};

/// (Σ_k |Λ_kf(x)|²)^{1/2}.
GridFunction square_function(const LpsoFamily& fam, const GridFunction& f);

struct Witness {
    int k = 0;
    Position x{0.0, 0.0};
    Position y{0.0, 0.0};
    Position y_prime{0.0, 0.0};
};

struct LpsoCertificate {
    double N = 0.0;
    int L = 0;
    double delta = 1.0;
    double C_size = 0.0;
    double C_deriv = 0.0;
    double C_holder = 0.0;
    Witness w_size, w_deriv, w_holder;
    long evaluations = 0;  ///< kernel points, or operator applications when probing
    int dim = 1;
    std::string csv() const;
};

/**
 * Suprema of the kernel-condition quotients over a deterministic low-discrepancy sample of
 * `sample_budget` points plus every grid-adjacent pair (y − x ∈ {0, ±h} per axis).
 * Operator-only variants are probed column by column with point masses δ_y.
 */
LpsoCertificate certify_lpso(const LpsoFamily& fam, double N, int L, double delta, long sample_budget);

struct CertificateRefinement {
    LpsoCertificate coarse, fine;    ///< budgets B and 4B
    bool stable = false;             ///< every constant within 10%
    bool failed = false;             ///< some constant at least doubled
};
CertificateRefinement certify_with_refinement(const LpsoFamily& fam, double N, int L, double delta, long budget);

/// Centred finite-difference weights of order-h² accuracy for the m-th derivative on offsets −p..p.
std::vector<double> central_difference_weights(int m);

} // namespace lpslab
