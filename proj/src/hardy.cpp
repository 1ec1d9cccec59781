#include "lpslab/hardy.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <stdexcept>

#include "lpslab/csv.hpp"
#include "lpslab/parallel.hpp"

namespace lpslab {

namespace {

// Normalised indicators of the closed balls of radius 2^{−ℓ}, ℓ = 1..G, one cache per grid.
const std::vector<Kernel>& ball_kernels(const Grid& g) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::vector<Kernel>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::pair{g.dim(), g.log2_points()};
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    std::vector<Kernel> ks;
    for (int l = 1; l <= g.log2_points(); ++l) {
        const double rho = std::ldexp(1.0, -l) * (1.0 + 1e-12);
        std::vector<double> v(g.size(), 0.0);
        std::size_t count = 0;
        for (std::size_t i = 0; i < g.size(); ++i)
            if (norm(g.displacement(i), g.dim()) <= rho) {
                v[i] = 1.0;
                ++count;
            }
        const double w = 1.0 / (static_cast<double>(count) * g.cell_volume());
        for (double& x : v) x *= w;
        ks.emplace_back(GridFunction(g, std::move(v)));
    }
    return cache.emplace(key, std::move(ks)).first->second;
}

// Sliding maximum over the circular window [i−w, i+w] of a length-n sequence.
void window_max_1d(const double* in, double* out, std::size_t n, std::size_t stride, long w) {
    if (2 * w + 1 >= static_cast<long>(n)) {
        double m = -INFINITY;
        for (std::size_t i = 0; i < n; ++i) m = std::max(m, in[i * stride]);
        for (std::size_t i = 0; i < n; ++i) out[i * stride] = m;
        return;
    }
    const long N = static_cast<long>(n);
    auto at = [&](long t) { return in[static_cast<std::size_t>(((t % N) + N) % N) * stride]; };
    std::deque<long> dq;  // indices with decreasing values
    for (long t = -w; t < N + w; ++t) {
        while (!dq.empty() && at(dq.back()) <= at(t)) dq.pop_back();
        dq.push_back(t);
        const long c = t - w;
        if (c < 0) continue;
        while (dq.front() < c - w) dq.pop_front();
        out[static_cast<std::size_t>(c) * stride] = at(dq.front());
    }
}

// max over grid y with |x−y| ≤ R·h.
GridFunction disc_max(const GridFunction& f, long R) {
    const Grid& g = f.grid();
    const std::size_t n = g.points_per_axis();
    std::vector<double> in(f.values().begin(), f.values().end()), out(f.size());
    if (g.dim() == 1) {
        window_max_1d(in.data(), out.data(), n, 1, R);
        return GridFunction(g, std::move(out));
    }
    // Whole torus once the radius reaches the largest torus distance √2/2.
    if (static_cast<double>(R) >= std::sqrt(0.5) * static_cast<double>(n)) {
        const double m = *std::max_element(in.begin(), in.end());
        return GridFunction::constant(g, m);
    }
    // Row maxima along axis 1 for every half-width the disc needs, then a max over row offsets.
    std::map<long, std::vector<double>> rows;
    std::vector<long> width(static_cast<std::size_t>(R + 1));
    for (long d = 0; d <= R; ++d) {
        width[static_cast<std::size_t>(d)] =
            static_cast<long>(std::floor(std::sqrt(static_cast<double>(R * R - d * d)) + 1e-9));
        const long w = width[static_cast<std::size_t>(d)];
        if (rows.count(w)) continue;
        std::vector<double> r(f.size());
        for (std::size_t i0 = 0; i0 < n; ++i0) window_max_1d(in.data() + i0 * n, r.data() + i0 * n, n, 1, w);
        rows.emplace(w, std::move(r));
    }
    const long N = static_cast<long>(n);
    std::fill(out.begin(), out.end(), -INFINITY);
    for (long d = -R; d <= R; ++d) {
        const std::vector<double>& r = rows.at(width[static_cast<std::size_t>(std::labs(d))]);
        for (long i0 = 0; i0 < N; ++i0) {
            const std::size_t src = static_cast<std::size_t>((((i0 + d) % N) + N) % N) * n;
            double* o = out.data() + static_cast<std::size_t>(i0) * n;
            for (std::size_t i1 = 0; i1 < n; ++i1) o[i1] = std::max(o[i1], r[src + i1]);
        }
    }
    return GridFunction(g, std::move(out));
}

std::size_t cube_count(const Grid& g, int level) {
    return std::size_t{1} << (level * g.dim());
}

DyadicCube cube_from_flat(const Grid& g, int level, std::size_t q) {
    if (g.dim() == 1) return DyadicCube{level, {q, 0}, 1};
    const std::size_t per = std::size_t{1} << level;
    return DyadicCube{level, {q / per, q % per}, 2};
}

std::size_t flat_cube(const DyadicCube& q) {
    return q.dim == 1 ? q.index[0] : (q.index[0] << q.level) + q.index[1];
}

void check_cube_level(const Grid& g, int level, const char* where) {
    if (level < 0 || level > g.log2_points())
        throw std::invalid_argument(std::string(where) + ": cube level " + std::to_string(level) +
                                    " not resolved by a 2^" + std::to_string(g.log2_points()) + " grid");
}

// Portable uniform on [0,1) from a 64-bit engine.
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double bump(double t2) {
    return t2 < 1.0 ? std::exp(-1.0 / (1.0 - t2)) : 0.0;
}

GridFunction reflected(const GridFunction& K) {
    const Grid& g = K.grid();
    const std::size_t n = g.points_per_axis();
    std::vector<double> v(K.size());
    for (std::size_t i = 0; i < K.size(); ++i) {
        const auto ax = g.axis_indices(i);
        v[i] = K[g.flat_index((n - ax[0]) % n, g.dim() == 2 ? (n - ax[1]) % n : 0)];
    }
    return GridFunction(g, std::move(v));
}

} // namespace

GridFunction hl_maximal(const GridFunction& f) {
    const GridFunction a = map(f, [](double v) { return std::abs(v); });
    std::vector<double> m(a.values().begin(), a.values().end());
    for (const Kernel& K : ball_kernels(f.grid())) {
        const GridFunction avg = K.apply(a);
        for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::max(m[i], avg[i]);
    }
    return GridFunction(f.grid(), std::move(m));
}

std::size_t cube_center_index(const Grid& g, const DyadicCube& q) {
    const std::size_t half = q.samples_per_side(g) / 2;
    return g.flat_index(q.first_sample(g, 0) + half, g.dim() == 2 ? q.first_sample(g, 1) + half : 0);
}

GridFunction mjr_maximal(const std::vector<double>& center_values, int j, double r, const Grid& grid,
                         int cube_offset) {
    if (!(r > 0.0 && r <= 1.0)) throw std::invalid_argument("mjr_maximal: r must lie in (0, 1]");
    const int level = j + cube_offset;
    check_cube_level(grid, level, "mjr_maximal");
    if (center_values.size() != cube_count(grid, level))
        throw std::invalid_argument("mjr_maximal: expected one value per level-" + std::to_string(level) + " cube");
    std::vector<double> step(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        step[i] = std::pow(std::abs(center_values[flat_cube(cube_of(grid, i, level))]), r);
    const GridFunction m = hl_maximal(GridFunction(grid, std::move(step)));
    return map(m, [r](double v) { return std::pow(std::max(v, 0.0), 1.0 / r); });
}

GridFunction nontangential_maximal(const GridFunction& f, const KernelBank& phi_bank) {
    require_same_grid(f, GridFunction::zeros(phi_bank.grid()), "nontangential_maximal");
    const Grid& g = f.grid();
    std::vector<double> out(f.size(), 0.0);
    for (int k : phi_bank.scales().values()) {
        const GridFunction pk = map(phi_bank.apply(k, f), [](double v) { return std::abs(v); });
        const long R = static_cast<long>(std::ldexp(1.0, g.log2_points() - k));
        const GridFunction w = disc_max(pk, R);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::max(out[i], w[i]);
    }
    return GridFunction(g, std::move(out));
}

GridFunction nontangential_maximal(const GridFunction& f, const MotherPair& phi, const ScaleRange& scales) {
    auto mp = std::make_shared<const MotherPair>(phi);
    return nontangential_maximal(f, make_bank(mp, scales).phi);
}

int required_moments(double p, int dim) {
    const double t = dim * (1.0 / p - 1.0);
    return std::max(0, static_cast<int>(std::floor(t + 1e-12)) + 1);
}

HardyNormEstimate hp_norm(const GridFunction& f, double p, const ConvolutionBank& bank) {
    if (!(p > 0.0)) throw std::invalid_argument("hp_norm: p must be positive");
    const Grid& g = bank.grid();
    require_same_grid(f, GridFunction::zeros(g), "hp_norm");
    const int need = required_moments(p, g.dim());
    if (bank.moments() < need) {
        std::ostringstream os;
        os << "hp_norm: p = " << p << " needs M > n(1/p - 1) = " << g.dim() * (1.0 / p - 1.0) << ", bank has M = "
           << bank.moments() << "; required M >= " << need;
        throw std::domain_error(os.str());
    }
    HardyNormEstimate est;
    est.p = p;
    std::vector<double> sq(f.size(), 0.0), disc(f.size(), 0.0);
    for (int j : bank.scales.values()) {
        const GridFunction q = bank.psi.apply(j, f);
        for (std::size_t i = 0; i < sq.size(); ++i) sq[i] += q[i] * q[i];
        const int level = j + kCubeOffset;
        check_cube_level(g, level, "hp_norm");
        const std::size_t nq = cube_count(g, level);
        std::vector<double> c(nq);
        for (std::size_t t = 0; t < nq; ++t) {
            const double v = q[cube_center_index(g, cube_from_flat(g, level, t))];
            c[t] = v * v;
        }
        for (std::size_t i = 0; i < disc.size(); ++i) disc[i] += c[flat_cube(cube_of(g, i, level))];
    }
    auto root = [&](std::vector<double> v) {
        for (double& x : v) x = std::sqrt(x);
        return GridFunction(g, std::move(v));
    };
    est.via_square = lp_quasinorm(root(std::move(sq)), p);
    est.via_discrete = lp_quasinorm(root(std::move(disc)), p);
    est.via_maximal = lp_quasinorm(nontangential_maximal(f, bank.phi), p);
    return est;
}

std::vector<double> frame_symbol(const KernelBank& psi) {
    std::vector<double> s(psi.grid().size(), 0.0);
    for (int k : psi.scales().values()) {
        const auto hat = fourier_symbol(psi.at(k).values);
        for (std::size_t i = 0; i < s.size(); ++i) s[i] += std::norm(hat[i]);
    }
    return s;
}

FrameBounds frame_bounds(const KernelBank& psi, const std::function<bool(const std::array<long, 2>&)>& in_band) {
    const Grid& g = psi.grid();
    const std::vector<double> s = frame_symbol(psi);
    FrameBounds b{INFINITY, 0.0};
    const double two_pi = 2.0 * std::acos(-1.0);
    for (std::size_t i = 0; i < s.size(); ++i) {
        const Position xi = grid_frequency(g, i);
        const std::array<long, 2> m{std::lround(xi[0] / two_pi), g.dim() == 2 ? std::lround(xi[1] / two_pi) : 0};
        if (!in_band(m)) continue;
        b.lower = std::min(b.lower, s[i]);
        b.upper = std::max(b.upper, s[i]);
    }
    if (b.upper == 0.0 && b.lower == INFINITY) throw std::invalid_argument("frame_bounds: empty band");
    return b;
}

double reconstruction_defect(const KernelBank& psi, const GridFunction& f, double c) {
    require_same_grid(f, GridFunction::zeros(psi.grid()), "reconstruction_defect");
    GridFunction sum = GridFunction::zeros(f.grid());
    for (int k : psi.scales().values()) {
        const Kernel adj(reflected(psi.at(k).values));
        sum = sum + adj.apply(psi.apply(k, f));
    }
    const GridFunction d = axpy(sum, -c, f);
    const double nf = std::sqrt(inner(f, f));
    if (nf == 0.0) throw std::invalid_argument("reconstruction_defect: f = 0");
    return std::sqrt(inner(d, d)) / nf;
}

Atom make_atom(double p, const DyadicCube& cube, unsigned long long seed, const Grid& grid) {
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("make_atom: p must lie in (0, 1]");
    if (cube.dim != grid.dim()) throw std::invalid_argument("make_atom: cube and grid dimensions differ");
    check_cube_level(grid, cube.level, "make_atom");
    const std::size_t spp = cube.samples_per_side(grid);
    if (spp < 16)
        throw std::invalid_argument("make_atom: cube " + cube.to_string() + " has " + std::to_string(spp) +
                                    " samples per side, need >= 16");
    const int dim = grid.dim();
    const int order = std::max(0, static_cast<int>(std::floor(dim * (1.0 / p - 1.0) + 1e-12)));

    std::mt19937_64 rng(seed);
    struct B {
        double c[2], rho, amp;
    };
    std::vector<B> bumps(4);
    for (B& b : bumps) {
        b.c[0] = 0.3 + 0.4 * uniform01(rng);
        b.c[1] = 0.3 + 0.4 * uniform01(rng);
        b.rho = 0.2 + 0.1 * uniform01(rng);
        b.amp = 2.0 * uniform01(rng) - 1.0;
    }

    // Cube samples in local coordinates u ∈ (0,1)ⁿ.
    const std::size_t count = dim == 1 ? spp : spp * spp;
    std::vector<std::size_t> idx(count);
    std::vector<Position> u(count);
    for (std::size_t t = 0; t < count; ++t) {
        const std::size_t a0 = dim == 1 ? t : t / spp, a1 = dim == 1 ? 0 : t % spp;
        idx[t] = grid.flat_index(cube.first_sample(grid, 0) + a0, dim == 2 ? cube.first_sample(grid, 1) + a1 : 0);
        u[t] = {(static_cast<double>(a0) + 0.5) / static_cast<double>(spp),
                dim == 2 ? (static_cast<double>(a1) + 0.5) / static_cast<double>(spp) : 0.0};
    }
    auto r2 = [dim](const Position& x, const double* c, double rho) {
        double s = 0.0;
        for (int a = 0; a < dim; ++a) s += (x[a] - c[a]) * (x[a] - c[a]);
        return s / (rho * rho);
    };
    std::vector<double> raw(count), weight(count);
    const double mid[2] = {0.5, 0.5};
    for (std::size_t t = 0; t < count; ++t) {
        double v = 0.0;
        for (const B& b : bumps) v += b.amp * bump(r2(u[t], b.c, b.rho));
        raw[t] = v;
        weight[t] = bump(r2(u[t], mid, 0.5));
    }

    // Remove discrete moments through `order`: raw − weight·Σ c_γ u^γ with Σ_t (·)u^β = 0.
    const auto gam = multi_indices_up_to(dim, order);
    const Eigen::Index m = static_cast<Eigen::Index>(gam.size());
    Eigen::MatrixXd A(m, m);
    Eigen::VectorXd rhs(m);
    for (Eigen::Index b = 0; b < m; ++b) {
        double s = 0.0;
        for (std::size_t t = 0; t < count; ++t) s += raw[t] * gam[static_cast<std::size_t>(b)].monomial(u[t]);
        rhs(b) = s;
        for (Eigen::Index c = 0; c < m; ++c) {
            double a = 0.0;
            for (std::size_t t = 0; t < count; ++t)
                a += weight[t] * gam[static_cast<std::size_t>(b)].monomial(u[t]) *
                     gam[static_cast<std::size_t>(c)].monomial(u[t]);
            A(b, c) = a;
        }
    }
    const Eigen::VectorXd coef = A.fullPivLu().solve(rhs);
    double sup = 0.0;
    for (std::size_t t = 0; t < count; ++t) {
        double poly = 0.0;
        for (Eigen::Index c = 0; c < m; ++c) poly += coef(c) * gam[static_cast<std::size_t>(c)].monomial(u[t]);
        raw[t] -= weight[t] * poly;
        sup = std::max(sup, std::abs(raw[t]));
    }
    if (!(sup > 0.0)) throw std::runtime_error("make_atom: degenerate atom for seed " + std::to_string(seed));
    const double scale = std::pow(cube.volume(), -1.0 / p) / sup;
    std::vector<double> v(grid.size(), 0.0);
    for (std::size_t t = 0; t < count; ++t) v[idx[t]] = raw[t] * scale;
    return Atom{p, cube, GridFunction(grid, std::move(v)), order};
}

std::string ExperimentReport::csv() const {
    CsvWriter out({"atom_level", "seed", "p", "ratio", "hp_square", "hp_maximal", "hp_discrete", "sqfn_lp"});
    for (const ExperimentRow& r : rows)
        out.row({fmt(static_cast<long long>(r.level)), fmt(static_cast<long long>(r.seed)), fmt(r.p), fmt(r.ratio),
                 fmt(r.hp.via_square), fmt(r.hp.via_maximal), fmt(r.hp.via_discrete), fmt(r.sqfn_lp)});
    return out.text();
}

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("ls_slope: need >= 2 paired points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    if (sxx == 0.0) throw std::invalid_argument("ls_slope: x values are all equal");
    return sxy / sxx;
}

ExperimentReport boundedness_experiment(const LpsoFamily& fam, double p, const std::vector<AtomSpec>& atoms,
                                        const ConvolutionBank& bank, const ExperimentOptions& opts) {
    const Grid& g = bank.grid();
    if (!(fam.grid() == g)) throw std::invalid_argument("boundedness_experiment: family and bank grids differ");
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("boundedness_experiment: p must lie in (0, 1]");
    if (opts.smoothness) {
        const double lo = g.dim() / (g.dim() + *opts.smoothness);
        if (!(p > lo))
            throw std::invalid_argument("boundedness_experiment: p = " + fmt(p) + " is outside (n/(n+L+delta), 1] = (" +
                                        fmt(lo) + ", 1]");
    }
    if (atoms.empty()) throw std::invalid_argument("boundedness_experiment: no atoms");

    std::vector<ExperimentRow> rows(atoms.size());
    parallel_for(atoms.size(), [&](std::size_t t) {
        const AtomSpec& s = atoms[t];
        check_cube_level(g, s.level, "boundedness_experiment");
        DyadicCube q;
        if (opts.placement == AtomPlacement::Anchored) {
            q = cube_of(g, 0, s.level);
            const std::size_t per = std::size_t{1} << s.level;
            q.index[0] = static_cast<std::size_t>(std::floor(opts.anchor[0] * static_cast<double>(per))) % per;
            if (g.dim() == 2)
                q.index[1] = static_cast<std::size_t>(std::floor(opts.anchor[1] * static_cast<double>(per))) % per;
        } else {
            std::mt19937_64 rng(s.seed ^ 0x9e3779b97f4a7c15ULL);
            q = cube_from_flat(g, s.level,
                               static_cast<std::size_t>(uniform01(rng) * static_cast<double>(cube_count(g, s.level))));
        }
        const Atom a = make_atom(p, q, s.seed, g);
        ExperimentRow& r = rows[t];
        r.level = s.level;
        r.seed = s.seed;
        r.cube = q;
        r.p = p;
        r.hp = hp_norm(a.values, p, bank);
        r.sqfn_lp = lp_quasinorm(square_function(fam, a.values), p);
        r.ratio = r.sqfn_lp / r.hp.via_square;
    });
    std::sort(rows.begin(), rows.end(),
              [](const ExperimentRow& a, const ExperimentRow& b) { return std::pair{a.level, a.seed} < std::pair{b.level, b.seed}; });

    ExperimentReport rep;
    rep.max_ratio = 0.0;
    rep.min_ratio = INFINITY;
    std::vector<double> x, y;
    bool positive = true;
    for (const ExperimentRow& r : rows) {
        rep.max_ratio = std::max(rep.max_ratio, r.ratio);
        rep.min_ratio = std::min(rep.min_ratio, r.ratio);
        positive = positive && r.ratio > 0.0;
        x.push_back(r.level);
        y.push_back(r.ratio > 0.0 ? std::log(r.ratio) : 0.0);
    }
    // A zero family has no log-ratios; its slope is reported as 0.
    const bool spread = std::any_of(x.begin(), x.end(), [&](double v) { return v != x.front(); });
    rep.slope = positive && spread ? ls_slope(x, y) : 0.0;
    rep.rows = std::move(rows);
    return rep;
}

std::string gnuplot_script(const std::string& csv_path) {
    std::ostringstream os;
    os << "set datafile separator ','\n"
       << "set key top left\n"
       << "set xlabel 'atom level'\n"
       << "set ylabel 'ratio ||S a||_p / ||a||_{H^p}'\n"
       << "set logscale y\n"
       << "plot '" << csv_path << "' using 1:4 skip 1 with points pt 7 title 'ratio'\n";
    return os.str();
}

GridFunction phi_cube_sum(const std::vector<double>& center_values, int j, int k, double nu, const Grid& grid,
                          int cube_offset) {
    const int level = j + cube_offset;
    check_cube_level(grid, level, "phi_cube_sum");
    const std::size_t nq = cube_count(grid, level);
    if (center_values.size() != nq) throw std::invalid_argument("phi_cube_sum: expected one value per cube");
    const double vol = std::pow(std::ldexp(1.0, -level), grid.dim());
    std::vector<double> spikes(grid.size(), 0.0);
    for (std::size_t t = 0; t < nq; ++t)
        spikes[cube_center_index(grid, cube_from_flat(grid, level, t))] = vol * center_values[t] / grid.cell_volume();
    const Kernel env(sample_phi_kN(std::min(j, k), grid.dim() + nu, grid));
    return env.apply(GridFunction(grid, std::move(spikes)));
}

double phi_cube_sum_at(const std::vector<double>& center_values, int j, int k, double nu, const Grid& grid,
                       std::size_t x, int cube_offset) {
    const int level = j + cube_offset;
    check_cube_level(grid, level, "phi_cube_sum_at");
    const std::size_t nq = cube_count(grid, level);
    if (center_values.size() != nq) throw std::invalid_argument("phi_cube_sum_at: expected one value per cube");
    const double vol = std::pow(std::ldexp(1.0, -level), grid.dim());
    const Position px = grid.position(x);
    double s = 0.0;
    for (std::size_t t = 0; t < nq; ++t) {
        const Position c = grid.position(cube_center_index(grid, cube_from_flat(grid, level, t)));
        s += vol * eval_phi_kN(std::min(j, k), grid.dim() + nu, torus_delta(px, c, grid.dim()), grid.dim()) *
             center_values[t];
    }
    return s;
}

PhiSumCalibration calibrate_phi_sum(const Grid& grid, const ScaleRange& scales, double r, double nu,
                                    const std::vector<std::pair<std::string, std::function<std::vector<double>(int)>>>& inputs,
                                    int cube_offset) {
    PhiSumCalibration cal;
    for (const auto& [name, gen] : inputs) {
        for (int j : scales.values()) {
            const std::vector<double> f = gen(j + cube_offset);
            const GridFunction M = mjr_maximal(f, j, r, grid, cube_offset);
            for (int k : scales.values()) {
                const GridFunction lhs = phi_cube_sum(f, j, k, nu, grid, cube_offset);
                const double w = std::pow(2.0, std::max(0, j - k) * nu);
                for (std::size_t i = 0; i < grid.size(); ++i) {
                    const double rhs = w * M[i];
                    if (!(rhs > 0.0)) continue;
                    const double q = lhs[i] / rhs;
                    if (q > cal.C) cal = {q, j, k, i, name};
                }
            }
        }
    }
    return cal;
}

double maximal_square_norm(const GridFunction& a, const ConvolutionBank& bank, double r, double p, int cube_offset) {
    const Grid& g = bank.grid();
    require_same_grid(a, GridFunction::zeros(g), "maximal_square_norm");
    std::vector<double> acc(g.size(), 0.0);
    for (int j : bank.scales.values()) {
        const int level = j + cube_offset;
        check_cube_level(g, level, "maximal_square_norm");
        const GridFunction q = bank.psi.apply(j, a);
        std::vector<double> c(cube_count(g, level));
        for (std::size_t t = 0; t < c.size(); ++t) c[t] = std::abs(q[cube_center_index(g, cube_from_flat(g, level, t))]);
        const GridFunction M = mjr_maximal(c, j, r, g, cube_offset);
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += M[i] * M[i];
    }
    for (double& v : acc) v = std::sqrt(v);
    return lp_quasinorm(GridFunction(g, std::move(acc)), p);
}

} // namespace lpslab
