#include "lpslab/moments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lpslab/csv.hpp"
#include "lpslab/parallel.hpp"
#include "quadrature.hpp"

namespace lpslab {

namespace {

double sign_pow(int e) { return (e % 2 == 0) ? 1.0 : -1.0; }

std::size_t index_of(const std::vector<MultiIndex>& v, const MultiIndex& a) {
    auto it = std::find(v.begin(), v.end(), a);
    if (it == v.end()) throw std::out_of_range("multi-index " + a.to_string() + " outside the moment matrix");
    return static_cast<std::size_t>(it - v.begin());
}

} // namespace

double MomentMatrix::at(const MultiIndex& alpha, const MultiIndex& beta) const {
    return entries[index_of(indices, alpha) * indices.size() + index_of(indices, beta)];
}

std::string MomentMatrix::csv() const {
    CsvWriter out({"alpha", "beta", "value"});
    for (std::size_t i = 0; i < indices.size(); ++i)
        for (std::size_t j = 0; j < indices.size(); ++j)
            out.row({indices[i].to_string(), indices[j].to_string(), fmt(entries[i * indices.size() + j])});
    return out.text();
}

MomentMatrix moment_matrix(const MotherPair& phi, int L) {
    if (L < 0) throw std::invalid_argument("moment matrix order must be >= 0");
    MomentMatrix mm;
    mm.order = L;
    mm.dim = phi.dim();
    mm.indices = multi_indices_up_to(phi.dim(), L);
    const std::size_t n = mm.indices.size();
    mm.entries.assign(n * n, 0.0);
    const double mass = phi.phi_moment(MultiIndex::zero(phi.dim()));
    if (std::abs(mass - 1.0) > 1e-10) throw std::invalid_argument("moment matrix needs a unit-mass φ");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const MultiIndex& a = mm.indices[i];
            const MultiIndex& b = mm.indices[j];
            if (!a.leq(b)) continue;
            const double v = sign_pow(b.order() - a.order()) * falling_factorial(b, a) * phi.phi_moment(b - a);
            if (!std::isfinite(v))
                throw std::domain_error("non-finite moment matrix entry at (" + a.to_string() + ", " + b.to_string() +
                                        ")");
            mm.entries[i * n + j] = v;
        }
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(mm.entries[i * n + i] - mm.indices[i].factorial()) > 1e-9)
            throw std::domain_error("moment matrix diagonal differs from α! at " + mm.indices[i].to_string());
    }
    for (double v : mm.entries) mm.c0 += std::abs(v);
    return mm;
}

double convolution_moment(const GridFunction& K, int k, const MultiIndex& beta) {
    return std::ldexp(kernel_moment(K, beta), k * beta.order());
}

namespace {

MomentTable convolution_table(const LpsoFamily& fam, const KernelBank& bank, int L) {
    const Grid& g = fam.grid();
    MomentTable t(fam.scales(), L, g.dim());
    for (int k : fam.scales().values())
        for (const auto& a : multi_indices_up_to(g.dim(), L))
            t.set(k, a, GridFunction::constant(g, convolution_moment(bank.at(k).values, k, a)));
    return t;
}

MomentTable tabulated_table(const LpsoFamily& fam, int L) {
    const Grid& g = fam.grid();
    const auto alphas = multi_indices_up_to(g.dim(), L);
    MomentTable t(fam.scales(), L, g.dim());
    const std::size_t n = g.size();
    for (int k : fam.scales().values()) {
        std::vector<std::vector<double>> vals(alphas.size(), std::vector<double>(n, 0.0));
        parallel_for(n, [&](std::size_t i) {
            const Position xi = g.position(i);
            std::vector<double> acc(alphas.size(), 0.0);
            for (std::size_t j = 0; j < n; ++j) {
                const double lam = fam.kernel(k, i, j);
                if (lam == 0.0) continue;
                const Position z = torus_delta(xi, g.position(j), g.dim());
                for (std::size_t a = 0; a < alphas.size(); ++a) acc[a] += lam * alphas[a].monomial(z);
            }
            for (std::size_t a = 0; a < alphas.size(); ++a)
                vals[a][i] = std::ldexp(acc[a] * g.cell_volume(), k * alphas[a].order());
        });
        for (std::size_t a = 0; a < alphas.size(); ++a) t.set(k, alphas[a], GridFunction(g, std::move(vals[a])));
    }
    return t;
}

MomentTable block_table(const LpsoFamily& fam, int L, int blocks) {
    const Grid& g = fam.grid();
    const int n = g.dim();
    const std::size_t npa = g.points_per_axis();
    if (blocks < 1 || npa % static_cast<std::size_t>(blocks) != 0)
        throw std::invalid_argument("blocks_per_axis must divide the points per axis");
    const std::size_t w = npa / static_cast<std::size_t>(blocks);
    const auto alphas = multi_indices_up_to(n, L);
    const auto scales = fam.scales().values();
    const std::size_t nblocks = n == 1 ? static_cast<std::size_t>(blocks) : static_cast<std::size_t>(blocks) * blocks;

    std::map<int, std::vector<std::vector<double>>> vals;
    for (int k : scales) vals[k].assign(alphas.size(), std::vector<double>(g.size(), 0.0));

    parallel_for(nblocks, [&](std::size_t b) {
        const std::size_t b0 = n == 1 ? b : b / static_cast<std::size_t>(blocks);
        const std::size_t b1 = n == 1 ? 0 : b % static_cast<std::size_t>(blocks);
        const double half = 0.5 * static_cast<double>(w);
        const Position c{(static_cast<double>(b0 * w) + half) * g.spacing(),
                         n == 2 ? (static_cast<double>(b1 * w) + half) * g.spacing() : 0.0};
        // Λ_k[(c−·)^γ] for every γ.
        std::vector<std::map<int, GridFunction>> outs;
        for (const auto& gam : alphas) {
            std::vector<double> v(g.size());
            for (std::size_t j = 0; j < g.size(); ++j) v[j] = gam.monomial(torus_delta(c, g.position(j), n));
            outs.push_back(fam.apply_all(GridFunction(g, std::move(v))));
        }
        for (std::size_t i0 = b0 * w; i0 < (b0 + 1) * w; ++i0)
            for (std::size_t i1 = (n == 2 ? b1 * w : 0); i1 < (n == 2 ? (b1 + 1) * w : 1); ++i1) {
                const std::size_t i = g.flat_index(i0, i1);
                const Position xc = torus_delta(g.position(i), c, n);
                for (std::size_t a = 0; a < alphas.size(); ++a)
                    for (int k : scales) {
                        double acc = 0.0;
                        for (std::size_t gi = 0; gi < alphas.size(); ++gi) {
                            const MultiIndex& gam = alphas[gi];
                            if (!gam.leq(alphas[a])) continue;
                            acc += binomial(alphas[a], gam) * (alphas[a] - gam).monomial(xc) * outs[gi].at(k)[i];
                        }
                        vals[k][a][i] = std::ldexp(acc, k * alphas[a].order());
                    }
            }
    });
    MomentTable t(fam.scales(), L, n);
    for (int k : scales)
        for (std::size_t a = 0; a < alphas.size(); ++a) t.set(k, alphas[a], GridFunction(g, std::move(vals[k][a])));
    return t;
}

} // namespace

MomentTable moment_table(const LpsoFamily& fam, int L, const MomentOptions& opts) {
    if (L < 0) throw std::invalid_argument("moment order must be >= 0");
    const int n = fam.grid().dim();
    if (static_cast<double>(L) >= opts.decay_N - n)
        throw std::domain_error("moment order " + std::to_string(L) + " exceeds the decay budget N − n = " +
                                fmt(opts.decay_N - n));
    if (const auto* c = std::get_if<ConvolutionVariant>(&fam.variant())) return convolution_table(fam, *c->bank, L);
    if (std::holds_alternative<TabulatedVariant>(fam.variant())) return tabulated_table(fam, L);
    return block_table(fam, L, opts.blocks_per_axis);
}

CascadeResult correction_cascade(const LpsoFamily& fam, int L, const ConvolutionBank& p_bank,
                                 const MomentOptions& opts) {
    const Grid& g = fam.grid();
    const int n = g.dim();
    if (!(p_bank.grid() == g)) throw std::invalid_argument("P_k bank grid differs from family grid");
    for (int k : fam.scales().values())
        if (!p_bank.scales.contains(k))
            throw std::invalid_argument("P_k bank lacks scale " + std::to_string(k) + " of the family");
    const auto alphas = multi_indices_up_to(n, L);
    const auto scales = fam.scales().values();
    const MultiIndex zero = MultiIndex::zero(n);

    CascadeResult res;
    res.base = moment_table(fam, L, opts);

    std::map<MultiIndex, std::shared_ptr<const KernelBank>> dbanks;
    for (int m = 1; m <= L; ++m)
        for (const auto& a : multi_indices_of_order(n, m))
            dbanks.emplace(a, std::make_shared<const KernelBank>(
                                  make_derivative_bank(*p_bank.mother, a, g, fam.scales(), L)));

    auto combine = [&](const GridFunction& cur, const GridFunction& coeff, double factor) {
        // cur − factor·coeff
        return axpy(cur, -factor, coeff);
    };

    MomentTable coeffs(fam.scales(), L, n);
    MomentTable stage(fam.scales(), L, n);
    for (int k : scales) {
        const GridFunction& m0 = res.base.at(k, zero);
        coeffs.set(k, zero, m0);
        for (const auto& b : alphas)
            stage.set(k, b, combine(res.base.at(k, b), m0, convolution_moment(p_bank.phi.at(k).values, k, b)));
    }
    res.staged.push_back(stage);
    for (int m = 1; m <= L; ++m) {
        const MomentTable& prev = res.staged.back();
        MomentTable next(fam.scales(), L, n);
        for (int k : scales) {
            std::vector<GridFunction> cur;
            for (const auto& b : alphas) cur.push_back(prev.at(k, b));
            for (const auto& a : multi_indices_of_order(n, m)) {
                const GridFunction& t = prev.at(k, a);
                coeffs.set(k, a, t);
                const double ca = sign_pow(m) / a.factorial();
                for (std::size_t bi = 0; bi < alphas.size(); ++bi) {
                    const double e = convolution_moment(dbanks.at(a)->at(k).values, k, alphas[bi]);
                    if (e != 0.0) cur[bi] = combine(cur[bi], t, ca * e);
                }
            }
            for (std::size_t bi = 0; bi < alphas.size(); ++bi) next.set(k, alphas[bi], std::move(cur[bi]));
        }
        res.staged.push_back(std::move(next));
    }

    CorrectedVariant cv;
    cv.base = std::make_shared<const LpsoFamily>(fam);
    cv.coefficients = std::move(coeffs);
    cv.p_bank = std::make_shared<const KernelBank>(p_bank.phi);
    cv.derivative_banks = std::move(dbanks);
    cv.order = L;
    res.corrected = std::make_shared<const LpsoFamily>(g, fam.scales(), std::move(cv),
                                                       fam.name() + "^(" + std::to_string(L) + ")");
    return res;
}

std::string GrowthReport::csv() const {
    CsvWriter out({"stage", "max_ratio", "bound", "violations", "points_checked", "c0"});
    for (std::size_t m = 0; m < max_ratio.size(); ++m)
        out.row({fmt(static_cast<long long>(m)), fmt(max_ratio[m]), fmt(bound[m]), fmt(static_cast<long long>(violations)),
                 fmt(static_cast<long long>(points_checked)), fmt(c0)});
    return out.text();
}

GrowthReport growth_bound_check(const MomentTable& base, const std::vector<MomentTable>& staged,
                                const MomentMatrix& mm) {
    GrowthReport r;
    r.c0 = mm.c0;
    const auto alphas = multi_indices_up_to(base.dim(), base.order());
    for (std::size_t m = 0; m < staged.size(); ++m) {
        const MomentTable& s = staged[m];
        if (!(s.scales() == base.scales()) || s.order() != base.order())
            throw std::invalid_argument("staged table " + std::to_string(m) + " does not match the base table");
        const double bound = std::pow(1.0 + mm.c0, static_cast<double>(m + 1));
        double worst = 0.0;
        for (int k : base.scales().values()) {
            const std::size_t npts = base.at(k, alphas.front()).size();
            for (std::size_t i = 0; i < npts; ++i) {
                double lhs = 0.0, rhs = 0.0;
                for (const auto& a : alphas) {
                    lhs += std::abs(s.at(k, a)[i]);
                    rhs += std::abs(base.at(k, a)[i]);
                }
                ++r.points_checked;
                if (lhs > bound * rhs) ++r.violations;
                if (rhs > 0.0) worst = std::max(worst, lhs / rhs);
            }
        }
        r.max_ratio.push_back(worst);
        r.bound.push_back(bound);
    }
    return r;
}

double p_derivative_moment(const MotherPair& mp, const MultiIndex& alpha, const MultiIndex& beta, int k) {
    // 2^{k|β|}∫D^α(φ_k)(z)(−z)^β dz with D^α(φ_k)(z) = 2^{k(n+|α|)}(D^αφ)(2^k z), by composite Gauss–Legendre
    // over the support [−ρ, ρ]ⁿ, ρ = r·2^{−k}.
    const Evaluator d = mp.phi_derivative(alpha);
    const int n = mp.dim();
    const double s = std::ldexp(1.0, k);
    const double rho = mp.support_radius() / s;
    const double pre = sign_pow(beta.order()) * std::pow(s, n + alpha.order() + beta.order());
    const int panels = n == 1 ? 256 : 48;
    if (n == 1)
        return pre * detail::integrate([&](double z) { return d({s * z, 0.0}) * std::pow(z, beta[0]); }, -rho, rho,
                                       panels);
    return pre * detail::integrate(
                     [&](double z0) {
                         return detail::integrate(
                             [&](double z1) { return d({s * z0, s * z1}) * beta.monomial({z0, z1}); }, -rho, rho,
                             panels);
                     },
                     -rho, rho, panels);
}

double p_derivative_moment_sampled(const MotherPair& mp, const MultiIndex& alpha, const MultiIndex& beta, int k,
                                   const Grid& grid) {
    const KernelBank raw = make_derivative_bank(mp, alpha, grid, ScaleRange(k, k), 0, false);
    // P_kD^αf = D^α(φ_k)∗f and D^α(φ_k) = 2^{k|α|}(D^αφ)_k.
    return sign_pow(beta.order()) * std::ldexp(convolution_moment(raw.at(k).values, k, beta), k * alpha.order());
}

} // namespace lpslab
