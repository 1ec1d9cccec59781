#include "lpslab/paraproduct.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "lpslab/csv.hpp"
#include "lpslab/hardy.hpp"
#include "lpslab/moments.hpp"
#include "lpslab/parallel.hpp"

namespace lpslab {

BonyParaproduct::BonyParaproduct(GridFunction beta, std::shared_ptr<const ConvolutionBank> q_bank,
                                 std::shared_ptr<const ConvolutionBank> p_bank, int L)
    : BonyParaproduct(std::move(beta), std::move(q_bank), std::move(p_bank), L, true) {}

BonyParaproduct BonyParaproduct::without_cancellation_check(GridFunction beta,
                                                            std::shared_ptr<const ConvolutionBank> q_bank,
                                                            std::shared_ptr<const ConvolutionBank> p_bank, int L) {
    return BonyParaproduct(std::move(beta), std::move(q_bank), std::move(p_bank), L, false);
}

BonyParaproduct::BonyParaproduct(GridFunction beta, std::shared_ptr<const ConvolutionBank> q_bank,
                                 std::shared_ptr<const ConvolutionBank> p_bank, int L, bool check)
    : beta_(std::move(beta)), q_(std::move(q_bank)), p_(std::move(p_bank)), L_(L) {
    if (!q_ || !p_) throw std::invalid_argument("BonyParaproduct: missing bank");
    if (L_ < 0) throw std::invalid_argument("BonyParaproduct: L must be >= 0");
    if (!(q_->grid() == p_->grid())) throw std::invalid_argument("BonyParaproduct: banks on different grids");
    if (!(q_->scales == p_->scales)) throw std::invalid_argument("BonyParaproduct: banks on different scales");
    require_same_grid(beta_, GridFunction::zeros(q_->grid()), "BonyParaproduct");
    if (check && q_->moments() < L_ + 1)
        throw std::invalid_argument("BonyParaproduct: psi in D_" + std::to_string(q_->moments()) + ", need D_" +
                                    std::to_string(L_ + 1));
    if (p_->phi_fix < L_)
        throw std::invalid_argument("BonyParaproduct: phi_k moments fixed through " + std::to_string(p_->phi_fix) +
                                    ", need >= L = " + std::to_string(L_));
    for (int j : q_->scales.values()) qbeta_.emplace(j, q_->psi.apply(j, beta_));
}

GridFunction apply_bony(const BonyParaproduct& pp, const GridFunction& f) {
    require_same_grid(f, GridFunction::zeros(pp.grid()), "apply_bony");
    GridFunction out = GridFunction::zeros(pp.grid());
    for (int j : pp.scales().values())
        out = out + pp.q_bank().psi.apply(j, pp.q_beta(j) * pp.p_bank().phi.apply(j, f));
    return out;
}

LpsoFamily bony_family(std::shared_ptr<const BonyParaproduct> pp) {
    auto outer = std::shared_ptr<const KernelBank>(pp->q_bank_ptr(), &pp->q_bank().psi);
    return LpsoFamily::composed(outer, [pp](const GridFunction& f) { return apply_bony(*pp, f); }, "Pi_beta");
}

double bony_reach(const BonyParaproduct& pp) {
    const double s = std::ldexp(1.0, -pp.scales().k_min);
    return s * (pp.q_bank().mother->support_radius() + pp.p_bank().mother->support_radius());
}

std::string AdjointMomentReport::csv() const {
    CsvWriter out({"test_fn", "alpha", "normalized"});
    for (std::size_t f = 0; f < values.size(); ++f)
        for (std::size_t a = 0; a < alphas.size(); ++a)
            out.row({fmt(static_cast<long long>(f)), alphas[a].to_string(), fmt(values[f][a])});
    return out.text();
}

AdjointMomentReport adjoint_moment_check(const BonyParaproduct& pp, const std::vector<GridFunction>& test_fns) {
    return adjoint_moment_check(pp, test_fns, pp.L());
}

AdjointMomentReport adjoint_moment_check(const BonyParaproduct& pp, const std::vector<GridFunction>& test_fns,
                                         int max_order) {
    const Grid& g = pp.grid();
    const double margin = bony_reach(pp);
    AdjointMomentReport rep;
    rep.max_order = max_order;
    rep.alphas = multi_indices_up_to(g.dim(), max_order);
    const double nb = std::sqrt(inner(pp.beta(), pp.beta()));
    for (std::size_t t = 0; t < test_fns.size(); ++t) {
        const GridFunction& f = test_fns[t];
        require_same_grid(f, pp.beta(), "adjoint_moment_check");
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (f[i] == 0.0) continue;
            const Position x = g.position(i);
            for (int a = 0; a < g.dim(); ++a)
                if (x[a] < margin || x[a] > 1.0 - margin)
                    throw std::invalid_argument("adjoint_moment_check: test function " + std::to_string(t) +
                                                " is nonzero within " + fmt(margin) + " of the period boundary");
        }
        const GridFunction pf = apply_bony(pp, f);
        const double nf = std::sqrt(inner(f, f));
        std::vector<double> row;
        for (const MultiIndex& al : rep.alphas) {
            double s = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i) s += pf[i] * al.monomial(g.position(i));
            s = std::abs(s * g.cell_volume());
            const double v = nb == 0.0 || nf == 0.0 ? 0.0 : s / (nf * nb);
            row.push_back(v);
            rep.max_normalized = std::max(rep.max_normalized, v);
        }
        rep.values.push_back(std::move(row));
    }
    return rep;
}

std::map<int, GridFunction> bony_moment_reduced(const BonyParaproduct& pp, const MultiIndex& alpha) {
    const Grid& g = pp.grid();
    if (alpha.dim() != g.dim()) throw std::invalid_argument("bony_moment_reduced: alpha has the wrong dimension");
    if (alpha.order() > pp.L())
        throw std::invalid_argument("bony_moment_reduced: |alpha| = " + std::to_string(alpha.order()) + " exceeds L = " +
                                    std::to_string(pp.L()));
    const MotherPair& phi = *pp.p_bank().mother;
    // Inner sum F = Σ_μ C(α,μ)C_{α−μ} Σ_j 2^{−|α|j} Q_j^{(μ)}Q_jβ, then Q_kF for each k.
    GridFunction F = GridFunction::zeros(g);
    for (const MultiIndex& mu : multi_indices_up_to(g.dim(), alpha.order())) {
        if (!mu.leq(alpha)) continue;
        const double c = binomial(alpha, mu) * phi.phi_moment(alpha - mu);
        if (c == 0.0) continue;
        for (int j : pp.scales().values()) {
            // (ψ^{(μ)})_j(z) = (2^j z)^μ ψ_j(z), weighted from the tabulated ψ_j so the reduction is exact on the grid.
            const GridFunction& K = pp.q_bank().psi.at(j).values;
            const double sj = std::ldexp(1.0, j);
            std::vector<double> w(g.size());
            for (std::size_t i = 0; i < g.size(); ++i) {
                Position z = g.displacement(i);
                z = {sj * z[0], sj * z[1]};
                w[i] = mu.monomial(z) * K[i];
            }
            const Kernel wq(GridFunction(g, std::move(w)));
            F = axpy(F, c * std::ldexp(1.0, -alpha.order() * j), wq.apply(pp.q_beta(j)));
        }
    }
    std::map<int, GridFunction> out;
    for (int k : pp.scales().values()) out.emplace(k, pp.q_bank().psi.apply(k, F));
    return out;
}

std::map<int, GridFunction> bony_moment_direct(const BonyParaproduct& pp, const MultiIndex& alpha) {
    const Grid& g = pp.grid();
    if (g.size() > 4096) throw std::invalid_argument("bony_moment_direct: O(N^2) oracle limited to 4096 points");
    std::vector<double> m(g.size(), 0.0);
    std::vector<std::vector<double>> cols(g.size());
    parallel_for(g.size(), [&](std::size_t y) {
        std::vector<double> d(g.size(), 0.0);
        d[y] = 1.0 / g.cell_volume();
        const GridFunction c = apply_bony(pp, GridFunction(g, std::move(d)));
        cols[y].assign(c.values().begin(), c.values().end());
    });
    for (std::size_t x = 0; x < g.size(); ++x) {
        double s = 0.0;
        for (std::size_t y = 0; y < g.size(); ++y)
            s += cols[y][x] * alpha.monomial(torus_delta(g.position(x), g.position(y), g.dim()));
        m[x] = s * g.cell_volume();
    }
    const GridFunction M(g, std::move(m));
    std::map<int, GridFunction> out;
    for (int k : pp.scales().values()) out.emplace(k, pp.q_bank().psi.apply(k, M));
    return out;
}

CarlesonReport bony_moment_carleson(const BonyParaproduct& pp, const MultiIndex& alpha, int max_level) {
    const auto pair = bony_moment_reduced(pp, alpha);
    std::map<int, GridFunction> mu;
    for (const auto& [k, v] : pair) {
        const double w = std::ldexp(1.0, 2 * alpha.order() * k);
        mu.emplace(k, map(v, [w](double t) { return w * t * t; }));
    }
    return carleson_constant(mu, pp.scales(), max_level);
}

std::string MultiplierProfile::csv() const {
    const bool two = grid.dim() == 2;
    CsvWriter out(two ? std::vector<std::string>{"m0", "m1", "value"} : std::vector<std::string>{"m", "value"});
    const double two_pi = 2.0 * std::acos(-1.0);
    for (std::size_t i = 0; i < values.size(); ++i) {
        const Position xi = grid_frequency(grid, i);
        std::vector<std::string> row{fmt(static_cast<long long>(std::lround(xi[0] / two_pi)))};
        if (two) row.push_back(fmt(static_cast<long long>(std::lround(xi[1] / two_pi))));
        row.push_back(fmt(values[i]));
        out.row(row);
    }
    return out.text();
}

MultiplierProfile multiplier_bound(const MotherPair& psi, double s, const ScaleRange& scales, const Grid& grid) {
    if (!(std::abs(s) <= psi.moments()))
        throw std::invalid_argument("multiplier_bound: |s| = " + fmt(std::abs(s)) + " exceeds M = " +
                                    std::to_string(psi.moments()));
    if (grid.dim() != psi.dim()) throw std::invalid_argument("multiplier_bound: dimension mismatch");
    MultiplierProfile prof;
    prof.s = s;
    prof.scales = scales;
    prof.grid = grid;
    prof.values.assign(grid.size(), 0.0);
    const std::size_t n = grid.points_per_axis();
    auto symbol = [&](std::size_t i) {
        const Position xi = grid_frequency(grid, i);
        const double r = norm(xi, grid.dim());
        if (r == 0.0) return 0.0;
        double m = 0.0;
        for (int k : scales.values()) {
            const double t = std::ldexp(1.0, -k);
            const Position z{t * xi[0], t * xi[1]};
            m += std::pow(t * r, s) * std::norm(psi.psi_hat(z));
        }
        return m;
    };
    if (grid.dim() == 1) {
        // |ψ̂|² is even for real ψ: evaluate m ≥ 0 and mirror.
        parallel_for(n / 2 + 1, [&](std::size_t i) { prof.values[i] = symbol(i); });
        for (std::size_t i = n / 2 + 1; i < n; ++i) prof.values[i] = prof.values[n - i];
    } else {
        parallel_for(grid.size(), [&](std::size_t i) { prof.values[i] = symbol(i); });
    }
    for (double v : prof.values) {
        if (!std::isfinite(v)) throw std::runtime_error("multiplier_bound: non-finite symbol value");
        prof.sup_abs = std::max(prof.sup_abs, std::abs(v));
    }
    return prof;
}

double multiplier_min(const MultiplierProfile& m, long lo, long hi) {
    const double two_pi = 2.0 * std::acos(-1.0);
    double best = INFINITY;
    for (std::size_t i = 0; i < m.values.size(); ++i) {
        const Position xi = grid_frequency(m.grid, i);
        long a = std::labs(std::lround(xi[0] / two_pi));
        if (m.grid.dim() == 2) a = std::max(a, std::labs(std::lround(xi[1] / two_pi)));
        if (a == 0 || a < lo || a > hi) continue;
        best = std::min(best, m.values[i]);
    }
    if (best == INFINITY) throw std::invalid_argument("multiplier_min: empty frequency range");
    return best;
}

DecayFit fit_decay(const std::vector<OrthogonalityPoint>& pts) {
    DecayFit fit;
    fit.points = pts.size();
    if (pts.size() < 2) return fit;
    std::vector<double> x, y;
    for (const OrthogonalityPoint& p : pts) {
        if (!(p.a > 0.0)) continue;
        x.push_back(std::abs(p.j - p.k));
        y.push_back(std::log2(p.a));
    }
    fit.points = x.size();
    if (x.size() < 2 || std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); })) return fit;
    const double slope = ls_slope(x, y);
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(x.size());
    fit.exponent = -slope;
    fit.intercept = my - slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (fit.intercept + slope * x[i]);
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / static_cast<double>(x.size()));
    return fit;
}

std::string OrthogonalityReport::csv() const {
    std::string head = "# exponent=" + fmt(all.exponent) + " residual=" + fmt(all.residual) +
                       " exponent_k_above_j=" + fmt(k_above_j.exponent) + " exponent_j_above_k=" +
                       fmt(j_above_k.exponent) + " max_moment=" + fmt(max_moment) +
                       (warning.empty() ? std::string() : " warning=\"" + warning + "\"") + "\n";
    CsvWriter out({"j", "k", "a"});
    for (const OrthogonalityPoint& p : points)
        out.row({fmt(static_cast<long long>(p.j)), fmt(static_cast<long long>(p.k)), fmt(p.a)});
    return head + out.text();
}

OrthogonalityReport orthogonality_probe(const LpsoFamily& fam, const ConvolutionBank& bank, int L, double delta,
                                        const OrthogonalityOptions& opts) {
    const Grid& g = fam.grid();
    if (!(bank.grid() == g)) throw std::invalid_argument("orthogonality_probe: bank and family grids differ");
    if (L < 0 || !(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("orthogonality_probe: need L >= 0, delta in (0,1]");
    OrthogonalityReport rep;
    rep.L = L;
    rep.delta = delta;

    const MomentTable mt = moment_table(fam, L);
    rep.max_moment = mt.sup_abs(0, L);
    if (rep.max_moment > opts.moment_tolerance)
        rep.warning = "moments through order " + std::to_string(L) + " not annihilated (sup " + fmt(rep.max_moment) +
                      "); decay will degrade";

    const std::size_t n = g.points_per_axis();
    const std::size_t c1 = opts.center == std::size_t(-1) ? (n / 2 + 37) % n : opts.center;
    const long c = static_cast<long>(c1 % n);
    const std::size_t centre = g.dim() == 1 ? static_cast<std::size_t>(c) : g.flat_index(c1 % n, c1 % n);
    const Position pc = g.position(centre);
    const double N = g.dim() + L + delta;

    std::vector<int> js;
    for (int j : bank.scales.values())
        if (fam.scales().contains(j)) js.push_back(j);
    if (js.empty()) throw std::invalid_argument("orthogonality_probe: bank and family scales do not overlap");

    for (int j : js) {
        const GridFunction probe = bank.psi.at(j).values.translated(c, g.dim() == 2 ? c : 0);
        const auto out = fam.apply_all(probe);
        for (int k : fam.scales().values()) {
            const GridFunction& v = out.at(k);
            const int m = std::min(j, k);
            double a = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i)
                a = std::max(a, std::abs(v[i]) / eval_phi_kN(m, N, torus_delta(g.position(i), pc, g.dim()), g.dim()));
            rep.points.push_back({j, k, a});
        }
    }
    std::vector<OrthogonalityPoint> kj, jk;
    for (const OrthogonalityPoint& p : rep.points) {
        if (p.k >= p.j) kj.push_back(p);
        if (p.j >= p.k) jk.push_back(p);
    }
    rep.all = fit_decay(rep.points);
    rep.k_above_j = fit_decay(kj);
    rep.j_above_k = fit_decay(jk);
    return rep;
}

BetaKind parse_beta_kind(const std::string& name) {
    if (name == "half") return BetaKind::Half;
    if (name == "dyadic_step") return BetaKind::DyadicStep;
    if (name == "sawtooth") return BetaKind::Sawtooth;
    if (name == "lacunary") return BetaKind::Lacunary;
    throw std::invalid_argument("unknown beta kind '" + name + "' (half, dyadic_step, sawtooth, lacunary)");
}

std::string to_string(BetaKind kind) {
    switch (kind) {
    case BetaKind::Half: return "half";
    case BetaKind::DyadicStep: return "dyadic_step";
    case BetaKind::Sawtooth: return "sawtooth";
    case BetaKind::Lacunary: return "lacunary";
    }
    return "?";
}

GridFunction make_beta(BetaKind kind, const Grid& grid, unsigned long long seed, int level) {
    std::mt19937_64 rng(seed);
    auto u01 = [&rng] { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; };
    const double two_pi = 2.0 * std::acos(-1.0);
    std::vector<double> v(grid.size());
    switch (kind) {
    case BetaKind::Half:
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = grid.position(i)[0] >= 0.5 ? 1.0 : 0.0;
        break;
    case BetaKind::Sawtooth:
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = grid.position(i)[0];
        break;
    case BetaKind::DyadicStep: {
        if (level < 0 || level > grid.log2_points()) throw std::invalid_argument("make_beta: bad step level");
        std::vector<double> c(std::size_t{1} << (level * grid.dim()));
        // Box–Muller on a portable uniform, so the ensemble does not depend on the standard library.
        for (double& x : c) x = std::sqrt(-2.0 * std::log(u01())) * std::cos(two_pi * u01());
        for (std::size_t i = 0; i < v.size(); ++i) {
            const DyadicCube q = cube_of(grid, i, level);
            v[i] = c[grid.dim() == 1 ? q.index[0] : (q.index[0] << level) + q.index[1]];
        }
        break;
    }
    case BetaKind::Lacunary: {
        double th[9];
        for (double& t : th) t = u01();
        for (std::size_t i = 0; i < v.size(); ++i) {
            double s = 0.0;
            for (int j = 1; j <= 8; ++j) s += std::cos(two_pi * (std::ldexp(grid.position(i)[0], j) + th[j]));
            v[i] = s;
        }
        break;
    }
    }
    return GridFunction(grid, std::move(v));
}

double envelope_convolution_ratio(int j, int k, double N, const Grid& grid) {
    const GridFunction a = sample_phi_kN(j, N, grid), b = sample_phi_kN(k, N, grid);
    const GridFunction conv = Kernel(a).apply(b);
    const GridFunction env = sample_phi_kN(std::min(j, k), N, grid);
    double r = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) r = std::max(r, conv[i] / env[i]);
    return r;
}

} // namespace lpslab
