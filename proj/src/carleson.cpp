#include "lpslab/carleson.hpp"

#include <cmath>
#include <stdexcept>

#include "lpslab/csv.hpp"

namespace lpslab {

Position DyadicCube::corner() const {
    const double s = side();
    return {s * static_cast<double>(index[0]), dim == 2 ? s * static_cast<double>(index[1]) : 0.0};
}

Position DyadicCube::center() const {
    const double s = side();
    const Position c = corner();
    return {c[0] + 0.5 * s, dim == 2 ? c[1] + 0.5 * s : 0.0};
}

bool DyadicCube::contains(const Position& x) const {
    const Position c = corner();
    for (int a = 0; a < dim; ++a)
        if (x[a] < c[a] || x[a] >= c[a] + side()) return false;
    return true;
}

std::size_t DyadicCube::samples_per_side(const Grid& g) const {
    return g.points_per_axis() >> level;
}

std::size_t DyadicCube::first_sample(const Grid& g, int axis) const {
    return index[static_cast<std::size_t>(axis)] * samples_per_side(g);
}

std::string DyadicCube::to_string() const {
    std::string s = "L" + std::to_string(level) + "[" + std::to_string(index[0]);
    if (dim == 2) s += ";" + std::to_string(index[1]);
    return s + "]";
}

DyadicCube cube_of(const Grid& g, std::size_t i, int level) {
    const auto ax = g.axis_indices(i);
    const int shift = g.log2_points() - level;
    return DyadicCube{level, {ax[0] >> shift, g.dim() == 2 ? ax[1] >> shift : 0}, g.dim()};
}

std::string CarlesonReport::csv() const {
    std::string head = "# constant=" + fmt(constant) + " argmax=" + argmax_cube.to_string() +
                       " scale_convention=" + scale_convention + "\n";
    const bool two = argmax_cube.dim == 2;
    CsvWriter out(two ? std::vector<std::string>{"level", "cube_index0", "cube_index1", "normalized_mass"}
                      : std::vector<std::string>{"level", "cube_index0", "normalized_mass"});
    for (const auto& [lv, v] : per_level) {
        const DyadicCube& q = per_level_argmax.at(lv);
        std::vector<std::string> row{fmt(static_cast<long long>(lv)), fmt(static_cast<long long>(q.index[0]))};
        if (two) row.push_back(fmt(static_cast<long long>(q.index[1])));
        row.push_back(fmt(v));
        out.row(row);
    }
    return head + out.text();
}

namespace {

/// Σ over each level-ℓ cube of the samples of a, times hⁿ/|Q| (the cube average).
std::vector<double> cube_averages(const Grid& g, const std::vector<double>& a, int level) {
    const std::size_t per_axis = std::size_t{1} << level;
    const std::size_t ncubes = g.dim() == 2 ? per_axis * per_axis : per_axis;
    std::vector<double> sums(ncubes, 0.0);
    const int shift = g.log2_points() - level;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto ax = g.axis_indices(i);
        const std::size_t c = g.dim() == 2 ? (ax[0] >> shift) * per_axis + (ax[1] >> shift) : ax[0] >> shift;
        sums[c] += a[i];
    }
    const double inv = 1.0 / static_cast<double>(std::size_t{1} << (shift * g.dim()));
    for (double& s : sums) s *= inv;
    return sums;
}

DyadicCube cube_from_flat(int level, std::size_t c, int dim) {
    const std::size_t per_axis = std::size_t{1} << level;
    if (dim == 2) return DyadicCube{level, {c / per_axis, c % per_axis}, 2};
    return DyadicCube{level, {c, 0}, 1};
}

} // namespace

CarlesonReport carleson_constant(const std::map<int, GridFunction>& mu, const ScaleRange& scales, int max_level,
                                 const CubeFilter& filter) {
    if (mu.empty()) throw std::invalid_argument("carleson_constant needs at least one density");
    const Grid g = mu.begin()->second.grid();
    if (max_level < 0 || max_level > g.log2_points())
        throw std::invalid_argument("max_level must lie in [0, G] = [0, " + std::to_string(g.log2_points()) + "]");
    for (int k : scales.values()) {
        auto it = mu.find(k);
        if (it == mu.end()) throw std::invalid_argument("density missing for scale k = " + std::to_string(k));
        if (!(it->second.grid() == g)) throw std::invalid_argument("densities live on different grids");
        for (std::size_t i = 0; i < it->second.size(); ++i)
            if (it->second[i] < 0.0)
                throw std::domain_error("negative density at k = " + std::to_string(k) + ", x_index = " +
                                        std::to_string(i) + " (value " + fmt(it->second[i]) + ")");
    }

    CarlesonReport r;
    r.argmax_cube = DyadicCube{0, {0, 0}, g.dim()};
    // A_ℓ = Σ_{k ≥ ℓ} μ_k, built from the finest level down.
    std::vector<double> acc(g.size(), 0.0);
    for (int k : scales.values())
        if (k > max_level)
            for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += mu.at(k)[i];
    bool any = false;
    for (int lv = max_level; lv >= 0; --lv) {
        if (scales.contains(lv))
            for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += mu.at(lv)[i];
        const std::vector<double> avg = cube_averages(g, acc, lv);
        double best = -1.0;
        std::size_t best_c = 0;
        for (std::size_t c = 0; c < avg.size(); ++c) {
            if (filter && !filter(cube_from_flat(lv, c, g.dim()))) continue;
            if (avg[c] > best) {
                best = avg[c];
                best_c = c;
            }
        }
        if (best < 0.0) continue;
        r.per_level[lv] = best;
        r.per_level_argmax[lv] = cube_from_flat(lv, best_c, g.dim());
        if (!any || best >= r.constant) {
            r.constant = best;
            r.argmax_cube = r.per_level_argmax[lv];
            any = true;
        }
    }
    return r;
}

CarlesonReport bmo_m_constant(const GridFunction& F, int M, const ConvolutionBank& bank, int max_level,
                              const CubeFilter& filter) {
    if (M < 0) throw std::invalid_argument("M must be >= 0");
    if (bank.moments() < M)
        throw std::invalid_argument("bmo_m_constant needs ψ ∈ D_M: bank has M = " + std::to_string(bank.moments()) +
                                    ", requested " + std::to_string(M));
    std::map<int, GridFunction> mu;
    for (int k : bank.scales.values()) {
        const GridFunction q = bank.psi.apply(k, F);
        const double w = std::ldexp(1.0, 2 * M * k);
        mu.emplace(k, map(q, [w](double v) { return w * v * v; }));
    }
    return carleson_constant(mu, bank.scales, max_level, filter);
}

double dyadic_bmo_norm(const GridFunction& F, int max_level) {
    const Grid& g = F.grid();
    if (max_level < 0 || max_level > g.log2_points())
        throw std::invalid_argument("max_level must lie in [0, G]");
    const std::vector<double> f(F.values().begin(), F.values().end());
    double best = 0.0;
    for (int lv = 0; lv <= max_level; ++lv) {
        const std::vector<double> avg = cube_averages(g, f, lv);
        std::vector<double> dev(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) {
            const DyadicCube q = cube_of(g, i, lv);
            const std::size_t c = g.dim() == 2 ? q.index[0] * (std::size_t{1} << lv) + q.index[1] : q.index[0];
            dev[i] = std::abs(f[i] - avg[c]);
        }
        for (double v : cube_averages(g, dev, lv)) best = std::max(best, v);
    }
    return best;
}

} // namespace lpslab
