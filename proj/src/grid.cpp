#include "lpslab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "lpslab/fft.hpp"

namespace lpslab {

MultiIndex::MultiIndex(std::vector<int> components) : c_(std::move(components)) {
    if (c_.empty() || c_.size() > 2) throw std::invalid_argument("MultiIndex: dimension must be 1 or 2");
    for (int a : c_)
        if (a < 0) throw std::invalid_argument("MultiIndex: negative component");
}

MultiIndex MultiIndex::zero(int dim) { return MultiIndex(std::vector<int>(static_cast<std::size_t>(dim), 0)); }

MultiIndex MultiIndex::unit(int dim, int axis) {
    std::vector<int> c(static_cast<std::size_t>(dim), 0);
    c.at(static_cast<std::size_t>(axis)) = 1;
    return MultiIndex(std::move(c));
}

int MultiIndex::order() const { return std::accumulate(c_.begin(), c_.end(), 0); }

double MultiIndex::factorial() const {
    double f = 1.0;
    for (int a : c_)
        for (int i = 2; i <= a; ++i) f *= i;
    return f;
}

bool MultiIndex::leq(const MultiIndex& other) const {
    if (dim() != other.dim()) return false;
    for (int i = 0; i < dim(); ++i)
        if (c_[static_cast<std::size_t>(i)] > other[i]) return false;
    return true;
}

MultiIndex MultiIndex::operator-(const MultiIndex& other) const {
    std::vector<int> c(c_);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] -= other.c_.at(i);
    return MultiIndex(std::move(c));
}

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
    std::vector<int> c(c_);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] += other.c_.at(i);
    return MultiIndex(std::move(c));
}

double MultiIndex::monomial(const Position& x) const {
    double v = 1.0;
    for (std::size_t i = 0; i < c_.size(); ++i)
        for (int p = 0; p < c_[i]; ++p) v *= x[i];
    return v;
}

std::string MultiIndex::to_string() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < c_.size(); ++i) os << (i ? ";" : "") << c_[i];
    return os.str();
}

std::vector<MultiIndex> multi_indices_of_order(int dim, int order) {
    std::vector<MultiIndex> out;
    if (dim == 1) {
        out.emplace_back(std::vector<int>{order});
    } else {
        for (int a = order; a >= 0; --a) out.emplace_back(std::vector<int>{a, order - a});
    }
    return out;
}

std::vector<MultiIndex> multi_indices_up_to(int dim, int max_order) {
    std::vector<MultiIndex> out;
    for (int m = 0; m <= max_order; ++m) {
        auto layer = multi_indices_of_order(dim, m);
        out.insert(out.end(), layer.begin(), layer.end());
    }
    return out;
}

namespace {
double choose(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double c = 1.0;
    for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    return std::round(c);
}
} // namespace

double binomial(const MultiIndex& alpha, const MultiIndex& gamma) {
    double c = 1.0;
    for (int i = 0; i < alpha.dim(); ++i) c *= choose(alpha[i], gamma[i]);
    return c;
}

double falling_factorial(const MultiIndex& beta, const MultiIndex& alpha) {
    if (!alpha.leq(beta)) return 0.0;
    double f = 1.0;
    for (int i = 0; i < beta.dim(); ++i)
        for (int p = 0; p < alpha[i]; ++p) f *= beta[i] - p;
    return f;
}

Grid::Grid(int dim, int log2_points) : dim_(dim), log2_(log2_points) {
    if (dim != 1 && dim != 2) throw std::invalid_argument("Grid: dimension must be 1 or 2");
    if (log2_points < 6 || log2_points > 24) throw std::invalid_argument("Grid: log2_points must lie in [6, 24]");
    n_axis_ = std::size_t{1} << log2_points;
    size_ = dim == 1 ? n_axis_ : n_axis_ * n_axis_;
    h_ = std::ldexp(1.0, -log2_points);
}

double Grid::cell_volume() const { return dim_ == 1 ? h_ : h_ * h_; }

std::array<std::size_t, 2> Grid::axis_indices(std::size_t i) const {
    if (dim_ == 1) return {i, 0};
    return {i / n_axis_, i % n_axis_};
}

std::size_t Grid::flat_index(std::size_t i0, std::size_t i1) const {
    return dim_ == 1 ? i0 : i0 * n_axis_ + i1;
}

std::size_t Grid::shifted(std::size_t i, long s0, long s1) const {
    const long n = static_cast<long>(n_axis_);
    auto wrap = [n](long v) { return static_cast<std::size_t>(((v % n) + n) % n); };
    auto ax = axis_indices(i);
    if (dim_ == 1) return wrap(static_cast<long>(ax[0]) + s0);
    return flat_index(wrap(static_cast<long>(ax[0]) + s0), wrap(static_cast<long>(ax[1]) + s1));
}

Position Grid::position(std::size_t i) const {
    auto ax = axis_indices(i);
    return {static_cast<double>(ax[0]) * h_, dim_ == 2 ? static_cast<double>(ax[1]) * h_ : 0.0};
}

Position Grid::displacement(std::size_t i) const {
    auto ax = axis_indices(i);
    const std::size_t half = n_axis_ / 2;
    auto d = [&](std::size_t a) {
        return a < half ? static_cast<double>(a) * h_ : (static_cast<double>(a) - static_cast<double>(n_axis_)) * h_;
    };
    return {d(ax[0]), dim_ == 2 ? d(ax[1]) : 0.0};
}

Position torus_delta(const Position& a, const Position& b, int dim) {
    Position d{0.0, 0.0};
    for (int i = 0; i < dim; ++i) {
        double v = a[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(i)];
        v -= std::floor(v + 0.5);
        d[static_cast<std::size_t>(i)] = v;
    }
    return d;
}

double norm(const Position& x, int dim) { return dim == 1 ? std::abs(x[0]) : std::hypot(x[0], x[1]); }

GridFunction::GridFunction(Grid grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size())
        throw std::invalid_argument("GridFunction: sample count does not match the grid");
    for (std::size_t i = 0; i < values_.size(); ++i)
        if (!std::isfinite(values_[i])) {
            auto x = grid_.position(i);
            std::ostringstream os;
            os << "GridFunction: non-finite sample at index " << i << " (x = " << x[0];
            if (grid_.dim() == 2) os << ", " << x[1];
            os << ")";
            throw std::domain_error(os.str());
        }
}

GridFunction GridFunction::zeros(const Grid& grid) { return GridFunction(grid, std::vector<double>(grid.size(), 0.0)); }

GridFunction GridFunction::constant(const Grid& grid, double c) {
    return GridFunction(grid, std::vector<double>(grid.size(), c));
}

double GridFunction::integral() const {
    double s = 0.0;
    for (double v : values_) s += v;
    return s * grid_.cell_volume();
}

double GridFunction::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

GridFunction GridFunction::translated(long s0, long s1) const {
    std::vector<double> v(values_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[grid_.shifted(i, s0, s1)] = values_[i];
    return GridFunction(grid_, std::move(v));
}

void require_same_grid(const GridFunction& a, const GridFunction& b, const char* where) {
    if (!(a.grid() == b.grid())) throw std::invalid_argument(std::string(where) + ": grid mismatch");
}

namespace {
template <class Op>
GridFunction zip(const GridFunction& a, const GridFunction& b, Op op, const char* where) {
    require_same_grid(a, b, where);
    std::vector<double> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = op(a[i], b[i]);
    return GridFunction(a.grid(), std::move(v));
}
} // namespace

GridFunction operator+(const GridFunction& a, const GridFunction& b) {
    return zip(a, b, [](double x, double y) { return x + y; }, "operator+");
}
GridFunction operator-(const GridFunction& a, const GridFunction& b) {
    return zip(a, b, [](double x, double y) { return x - y; }, "operator-");
}
GridFunction operator*(const GridFunction& a, const GridFunction& b) {
    return zip(a, b, [](double x, double y) { return x * y; }, "operator*");
}
GridFunction operator*(double c, const GridFunction& a) {
    std::vector<double> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = c * a[i];
    return GridFunction(a.grid(), std::move(v));
}
GridFunction axpy(const GridFunction& a, double c, const GridFunction& b) {
    return zip(a, b, [c](double x, double y) { return x + c * y; }, "axpy");
}
GridFunction map(const GridFunction& a, const std::function<double(double)>& fn) {
    std::vector<double> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(a[i]);
    return GridFunction(a.grid(), std::move(v));
}
double max_abs_diff(const GridFunction& a, const GridFunction& b) {
    require_same_grid(a, b, "max_abs_diff");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

ScaleRange::ScaleRange(int lo, int hi) : k_min(lo), k_max(hi) {
    if (lo > hi) throw std::invalid_argument("ScaleRange: k_min > k_max");
}

std::vector<int> ScaleRange::values() const {
    std::vector<int> v;
    for (int k = k_min; k <= k_max; ++k) v.push_back(k);
    return v;
}

void ScaleRange::check_resolvable(const Grid& grid) const {
    if (k_min > k_max) throw std::invalid_argument("ScaleRange: k_min > k_max");
    if (k_max > grid.log2_points() - 4)
        throw std::invalid_argument("ScaleRange: k_max = " + std::to_string(k_max) + " exceeds G - 4 = " +
                                    std::to_string(grid.log2_points() - 4));
}

std::pair<GridFunction, double> sample_and_integrate(const Evaluator& ev, const Grid& grid) {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = ev(grid.position(i));
    GridFunction f(grid, std::move(v));
    const double integral = f.integral();
    return {std::move(f), integral};
}

GridFunction sample_centered(const Evaluator& ev, const Grid& grid) {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = ev(grid.displacement(i));
    return GridFunction(grid, std::move(v));
}

GridFunction circular_convolve(const GridFunction& f, const GridFunction& g) {
    require_same_grid(f, g, "circular_convolve");
    return convolve_spectrum(forward(g), f);
}

double lp_quasinorm(const GridFunction& f, double p) {
    if (!(p > 0.0)) throw std::invalid_argument("lp_quasinorm: p must be positive");
    double s = 0.0;
    for (double v : f.values()) s += std::pow(std::abs(v), p);
    return std::pow(s * f.grid().cell_volume(), 1.0 / p);
}

double inner(const GridFunction& f, const GridFunction& g) {
    require_same_grid(f, g, "inner");
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * g[i];
    return s * f.grid().cell_volume();
}

} // namespace lpslab
