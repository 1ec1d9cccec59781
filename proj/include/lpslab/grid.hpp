#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace lpslab {

/// Point of the unit torus; only the first `dim` coordinates are meaningful.
using Position = std::array<double, 2>;

/** Multi-index α ∈ ℕ₀ⁿ. */
class MultiIndex {
public:
    MultiIndex() = default;
    explicit MultiIndex(std::vector<int> components);
    static MultiIndex zero(int dim);
    static MultiIndex unit(int dim, int axis);

    int dim() const { return static_cast<int>(c_.size()); }
    int operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }
    const std::vector<int>& components() const { return c_; }
    int order() const;
    double factorial() const;
    /// Componentwise α ≤ β.
    bool leq(const MultiIndex& other) const;
    MultiIndex operator-(const MultiIndex& other) const;
    MultiIndex operator+(const MultiIndex& other) const;
    bool operator==(const MultiIndex& other) const = default;
    auto operator<=>(const MultiIndex& other) const = default;
    /// x^α with x given by its first dim() coordinates.
    double monomial(const Position& x) const;
    std::string to_string() const;

private:
    std::vector<int> c_;
};

/// All α with |α| ≤ max_order, sorted by order then lexicographically descending.
std::vector<MultiIndex> multi_indices_up_to(int dim, int max_order);
/// All α with |α| = order.
std::vector<MultiIndex> multi_indices_of_order(int dim, int order);
/// Product of binomial coefficients C(α_i, γ_i); 0 unless γ ≤ α.
double binomial(const MultiIndex& alpha, const MultiIndex& gamma);
/// β!/(β−α)! for α ≤ β, else 0.
double falling_factorial(const MultiIndex& beta, const MultiIndex& alpha);

class Grid {
public:
    Grid(int dim, int log2_points);

    int dim() const { return dim_; }
    int log2_points() const { return log2_; }
    std::size_t points_per_axis() const { return n_axis_; }
    std::size_t size() const { return size_; }
    double spacing() const { return h_; }
    /// hⁿ, the quadrature weight.
    double cell_volume() const;

    /// Grid point x_i ∈ [0,1)ⁿ (row-major flat index).
    Position position(std::size_t i) const;
    /// Torus displacement of x_i from the origin, each coordinate in [−1/2, 1/2).
    Position displacement(std::size_t i) const;
    std::array<std::size_t, 2> axis_indices(std::size_t i) const;
    std::size_t flat_index(std::size_t i0, std::size_t i1 = 0) const;
    /// Flat index of x_i translated by the given number of samples per axis.
    std::size_t shifted(std::size_t i, long s0, long s1 = 0) const;

    bool operator==(const Grid& other) const { return dim_ == other.dim_ && log2_ == other.log2_; }

private:
    int dim_;
    int log2_;
    std::size_t n_axis_;
    std::size_t size_;
    double h_;
};

/// Signed torus displacement a − b per coordinate, each in [−1/2, 1/2).
Position torus_delta(const Position& a, const Position& b, int dim);
double norm(const Position& x, int dim);

/** Samples of a function on a Grid; immutable after construction, every sample finite. */
class GridFunction {
public:
    GridFunction(Grid grid, std::vector<double> values);
    static GridFunction zeros(const Grid& grid);
    static GridFunction constant(const Grid& grid, double c);

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    std::span<const double> values() const { return values_; }

    double integral() const;
    double max_abs() const;
    GridFunction translated(long s0, long s1 = 0) const;

private:
    Grid grid_;
    std::vector<double> values_;
};

GridFunction operator+(const GridFunction& a, const GridFunction& b);
GridFunction operator-(const GridFunction& a, const GridFunction& b);
/// Pointwise product.
GridFunction operator*(const GridFunction& a, const GridFunction& b);
GridFunction operator*(double c, const GridFunction& a);
/// a + c·b without an intermediate.
GridFunction axpy(const GridFunction& a, double c, const GridFunction& b);
GridFunction map(const GridFunction& a, const std::function<double(double)>& fn);
double max_abs_diff(const GridFunction& a, const GridFunction& b);
void require_same_grid(const GridFunction& a, const GridFunction& b, const char* where);

/** Finite index set k_min..k_max of dyadic scales. */
struct ScaleRange {
    int k_min = 0;
    int k_max = 0;

    ScaleRange() = default;
    ScaleRange(int lo, int hi);
    int count() const { return k_max - k_min + 1; }
    bool contains(int k) const { return k >= k_min && k <= k_max; }
    std::vector<int> values() const;
    /// Throws unless k_max ≤ G − 4.
    void check_resolvable(const Grid& grid) const;
    bool operator==(const ScaleRange& other) const = default;
};

using Evaluator = std::function<double(const Position&)>;

/// Samples `ev` at the grid points and returns the samples with their rectangle-rule integral.
std::pair<GridFunction, double> sample_and_integrate(const Evaluator& ev, const Grid& grid);
/// Samples a function centred at the origin: `ev` receives the torus displacement of each grid point.
GridFunction sample_centered(const Evaluator& ev, const Grid& grid);

/// (f∗g)(x_i) = hⁿ Σ_j f(x_j) g(x_i − x_j) with periodic wraparound.
GridFunction circular_convolve(const GridFunction& f, const GridFunction& g);

/// (hⁿ Σ|f|^p)^{1/p}.
double lp_quasinorm(const GridFunction& f, double p);

/// hⁿ Σ f_i g_i.
double inner(const GridFunction& f, const GridFunction& g);

} // namespace lpslab
