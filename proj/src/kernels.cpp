#include "lpslab/kernels.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "lpslab/csv.hpp"
#include "quadrature.hpp"

namespace lpslab {
namespace {

// Truncated bivariate power series c[i][j] ε0^i ε1^j, i ≤ n0, j ≤ n1.
struct Series {
    int n0, n1;
    std::vector<double> c;
    Series(int a, int b) : n0(a), n1(b), c(static_cast<std::size_t>((a + 1) * (b + 1)), 0.0) {}
    double& at(int i, int j) { return c[static_cast<std::size_t>(i * (n1 + 1) + j)]; }
    double at(int i, int j) const { return c[static_cast<std::size_t>(i * (n1 + 1) + j)]; }
};

Series mul(const Series& a, const Series& b) {
    Series r(a.n0, a.n1);
    for (int i = 0; i <= a.n0; ++i)
        for (int j = 0; j <= a.n1; ++j) {
            const double av = a.at(i, j);
            if (av == 0.0) continue;
            for (int p = 0; p + i <= a.n0; ++p)
                for (int q = 0; q + j <= a.n1; ++q) r.at(i + p, j + q) += av * b.at(p, q);
        }
    return r;
}

// Σ_{n≤deg} w_n y^n for y without constant term.
Series power_sum(const Series& y, const std::vector<double>& w) {
    Series acc(y.n0, y.n1);
    Series pw(y.n0, y.n1);
    pw.at(0, 0) = 1.0;
    for (std::size_t n = 0; n < w.size(); ++n) {
        if (n > 0) pw = mul(pw, y);
        for (std::size_t i = 0; i < acc.c.size(); ++i) acc.c[i] += w[n] * pw.c[i];
    }
    return acc;
}

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

// ∫_0^1 b(ρ) ρ^p dρ for the radial profile b(ρ) = exp(−s/(1−ρ²)).
double radial_moment(double s, int p) {
    auto f = [s, p](double rho) { return rho < 1.0 ? std::exp(-s / (1.0 - rho * rho)) * std::pow(rho, p) : 0.0; };
    return detail::integrate(f, 0.0, 1.0, 256);
}

// ∫_0^{2π} cos^a θ sin^c θ dθ.
double angular_moment(int a, int c) {
    if (a % 2 || c % 2) return 0.0;
    return 2.0 * std::tgamma((a + 1) / 2.0) * std::tgamma((c + 1) / 2.0) / std::tgamma((a + c + 2) / 2.0);
}

// The ψ profile g on the unit ball, ψ(x) = A r^{−n} g(x/r) for M ≥ 1.
double psi_shape(const MotherSpec& s, const Position& u) {
    const double sh = MotherSpec::psi_sharpness;
    if (s.dim == 1) return bump_derivative(MultiIndex({s.moments + 1}), u, sh);
    double v = 0.0;
    const int m = s.moments + 1;
    v += bump_derivative(MultiIndex({m, 0}), u, sh) + bump_derivative(MultiIndex({0, m}), u, sh);
    if (s.moments % 2 == 0)
        v += bump_derivative(MultiIndex({m + 1, 0}), u, sh) + bump_derivative(MultiIndex({0, m + 1}), u, sh);
    return v;
}

// ∫_{−1}^{1}|g| with the sign changes of g located first, so each piece is smooth.
double abs_integral_1d(const std::function<double(double)>& g) {
    const int n = 20000;
    std::vector<double> cuts{-1.0};
    double prev = g(-1.0 + 1e-12);
    for (int i = 1; i <= n; ++i) {
        const double x = -1.0 + 2.0 * i / n;
        const double v = i == n ? g(1.0 - 1e-12) : g(x);
        if ((prev < 0.0 && v > 0.0) || (prev > 0.0 && v < 0.0)) {
            double lo = x - 2.0 / n, hi = x;
            const double slo = prev;
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (lo + hi);
                ((g(mid) < 0.0) == (slo < 0.0) ? lo : hi) = mid;
            }
            cuts.push_back(0.5 * (lo + hi));
        }
        if (v != 0.0) prev = v;
    }
    cuts.push_back(1.0);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        total += std::abs(detail::integrate(g, cuts[i], cuts[i + 1], 64));
    return total;
}

Position scaled(const Position& x, double c) { return {x[0] * c, x[1] * c}; }

} // namespace

// Dense node table of the 1D ψ profile for off-grid transforms.
struct PsiProfile {
    std::vector<double> u, w, g;
};

namespace {

std::shared_ptr<const PsiProfile> make_profile_table(const Evaluator& psi, double r) {
    auto t = std::make_shared<PsiProfile>();
    detail::QuadRule rule = detail::composite_gauss(-1.0, 1.0, 512);
    t->u = rule.nodes;
    t->w = rule.weights;
    t->g.resize(t->u.size());
    for (std::size_t i = 0; i < t->u.size(); ++i) t->g[i] = r * psi({t->u[i] * r, 0.0});
    return t;
}

} // namespace

double bump_derivative(const MultiIndex& alpha, const Position& u, double sharpness) {
    const int dim = alpha.dim();
    const double u2 = dim == 1 ? u[0] * u[0] : u[0] * u[0] + u[1] * u[1];
    if (u2 >= 1.0) return 0.0;
    const int n0 = alpha[0];
    const int n1 = dim == 2 ? alpha[1] : 0;
    const int deg = n0 + n1;
    const double q0 = 1.0 - u2;
    const double g0 = -sharpness / q0;
    if (deg == 0) return std::exp(g0);

    // z = (q − q0)/q0 with q(ε) = 1 − |u + ε|².
    Series z(n0, n1);
    if (n0 >= 1) z.at(1, 0) = -2.0 * u[0] / q0;
    if (n0 >= 2) z.at(2, 0) = -1.0 / q0;
    if (dim == 2) {
        if (n1 >= 1) z.at(0, 1) = -2.0 * u[1] / q0;
        if (n1 >= 2) z.at(0, 2) = -1.0 / q0;
    }
    // 1/q − 1/q0 = (1/q0)Σ_{n≥1}(−z)^n, then y = −s(1/q − 1/q0).
    std::vector<double> w(static_cast<std::size_t>(deg + 1));
    for (int n = 1; n <= deg; ++n) w[static_cast<std::size_t>(n)] = (n % 2 ? -1.0 : 1.0) * (-sharpness / q0);
    Series y = power_sum(z, w);
    std::vector<double> e(static_cast<std::size_t>(deg + 1));
    for (int n = 0; n <= deg; ++n) e[static_cast<std::size_t>(n)] = 1.0 / factorial(n);
    Series ex = power_sum(y, e);
    return std::exp(g0) * ex.at(n0, n1) * factorial(n0) * factorial(n1);
}

Evaluator MotherPair::phi_derivative(const MultiIndex& alpha) const {
    const double r = spec.support_radius;
    const int n = spec.dim;
    const double c = phi_norm * std::pow(r, -(n + alpha.order()));
    return [alpha, r, c](const Position& x) {
        return c * bump_derivative(alpha, scaled(x, 1.0 / r), MotherSpec::phi_sharpness);
    };
}

double MotherPair::phi_moment(const MultiIndex& beta) const {
    const double r = spec.support_radius;
    const double s = MotherSpec::phi_sharpness;
    if (spec.dim == 1) {
        if (beta[0] % 2) return 0.0;
        return phi_norm * std::pow(r, beta[0]) * 2.0 * radial_moment(s, beta[0]);
    }
    const int p = beta.order();
    return phi_norm * std::pow(r, p) * radial_moment(s, 1 + p) * angular_moment(beta[0], beta[1]);
}

std::complex<double> MotherPair::psi_hat(const Position& xi) const {
    const double r = spec.support_radius;
    const double omega = r * norm(xi, spec.dim);
    const double cutoff = 1500.0;
    if (omega > cutoff) return 0.0;
    if (spec.dim == 1) {
        const PsiProfile& t = *psi_profile;
        double re = 0.0, im = 0.0;
        const double w = r * xi[0];
        for (std::size_t i = 0; i < t.u.size(); ++i) {
            const double a = t.u[i] * w;
            re += t.w[i] * t.g[i] * std::cos(a);
            im += t.w[i] * t.g[i] * std::sin(a);
        }
        return {re, im};
    }
    // 2D: radial transform of the generating bump times the derivative symbol.
    auto hankel = [](double s, double om) {
        auto f = [s, om](double rho) {
            return rho < 1.0 ? std::exp(-s / (1.0 - rho * rho)) * std::cyl_bessel_j(0.0, rho * om) * rho : 0.0;
        };
        return 2.0 * std::numbers::pi * detail::integrate(f, 0.0, 1.0, 64 + static_cast<int>(om / 2.0));
    };
    if (spec.moments == 0) {
        const double s = MotherSpec::phi_sharpness;
        return phi_norm * (hankel(s, omega / 2.0) - hankel(s, omega));
    }
    const std::complex<double> I(0.0, 1.0);
    const int m = spec.moments + 1;
    std::complex<double> sym = std::pow(-I * r * xi[0], m) + std::pow(-I * r * xi[1], m);
    if (spec.moments % 2 == 0) sym += std::pow(-I * r * xi[0], m + 1) + std::pow(-I * r * xi[1], m + 1);
    const double F = hankel(MotherSpec::psi_sharpness, omega);
    if (std::abs(F) < 1e-15) return 0.0;
    return psi_norm * sym * F;
}

namespace {

GridFunction sample_dilate(const Evaluator& mother, int k, const Grid& grid) {
    const double s = std::ldexp(1.0, k);
    const double amp = std::pow(s, grid.dim());
    return sample_centered([&](const Position& x) { return amp * mother({s * x[0], s * x[1]}); }, grid);
}

GridFunction project(const GridFunction& K, const GridFunction& w, const MomentTargets& t, int k, double r) {
    const Grid& g = K.grid();
    const std::size_t F = t.orders.size();
    const double s = std::ldexp(1.0, k) / r;
    std::vector<std::size_t> support;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (w[i] != 0.0) support.push_back(i);
    if (support.size() < F)
        throw std::invalid_argument("moment projection: scale " + std::to_string(k) + " has too few samples");
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<long>(F), static_cast<long>(F));
    Eigen::VectorXd rhs(static_cast<long>(F));
    std::vector<std::vector<double>> mono(support.size(), std::vector<double>(F));
    for (std::size_t p = 0; p < support.size(); ++p) {
        Position d = g.displacement(support[p]);
        Position tt{d[0] * s, d[1] * s};
        for (std::size_t b = 0; b < F; ++b) mono[p][b] = t.orders[b].monomial(tt);
    }
    const double hv = g.cell_volume();
    for (std::size_t a = 0; a < F; ++a) {
        double cur = 0.0;
        for (std::size_t p = 0; p < support.size(); ++p) {
            const double wa = w[support[p]] * mono[p][a] * hv;
            cur += K[support[p]] * mono[p][a] * hv;
            for (std::size_t b = 0; b < F; ++b) A(static_cast<long>(a), static_cast<long>(b)) += wa * mono[p][b];
        }
        rhs(static_cast<long>(a)) = t.values[a] * std::pow(s, t.orders[a].order()) - cur;
    }
    Eigen::VectorXd c = A.fullPivLu().solve(rhs);
    std::vector<double> v(K.values().begin(), K.values().end());
    for (std::size_t p = 0; p < support.size(); ++p) {
        double add = 0.0;
        for (std::size_t b = 0; b < F; ++b) add += c(static_cast<long>(b)) * mono[p][b];
        v[support[p]] += w[support[p]] * add;
    }
    return GridFunction(g, std::move(v));
}

} // namespace

MotherPair build_mothers(int M, double support_radius, const Grid& grid) {
    if (M < 0) throw std::invalid_argument("build_mothers: M must be non-negative");
    if (!(support_radius > 0.0) || support_radius > 0.25)
        throw std::invalid_argument("build_mothers: support radius must lie in (0, 1/4]");
    const double samples = 2.0 * support_radius / grid.spacing();
    if (samples < 32.0) {
        const int need = static_cast<int>(std::ceil(std::log2(16.0 / support_radius)));
        throw std::invalid_argument("build_mothers: support is under-resolved; need G >= " + std::to_string(need));
    }
    MotherSpec spec;
    spec.dim = grid.dim();
    spec.moments = M;
    spec.support_radius = support_radius;
    Evaluator phi_eval, psi_eval;
    double psi_norm = 1.0;
    const int n = grid.dim();
    const double r = support_radius;
    const double mass =
        n == 1 ? 2.0 * radial_moment(MotherSpec::phi_sharpness, 0)
               : 2.0 * std::numbers::pi * radial_moment(MotherSpec::phi_sharpness, 1);
    const double phi_norm = 1.0 / mass;
    const double cphi = phi_norm * std::pow(r, -n);
    if (n == 1) {
        phi_eval = [cphi, r](const Position& x) {
            return cphi * bump_derivative(MultiIndex({0}), {x[0] / r, 0.0}, MotherSpec::phi_sharpness);
        };
    } else {
        phi_eval = [cphi, r](const Position& x) {
            return cphi * bump_derivative(MultiIndex({0, 0}), {x[0] / r, x[1] / r}, MotherSpec::phi_sharpness);
        };
    }

    if (M == 0) {
        const double scale = std::pow(2.0, n);
        Evaluator phi = phi_eval;
        psi_eval = [phi, scale](const Position& x) { return scale * phi({2.0 * x[0], 2.0 * x[1]}) - phi(x); };
        psi_norm = 1.0;
    } else {
        double l1 = 0.0;
        if (n == 1) {
            l1 = abs_integral_1d([&](double u) { return psi_shape(spec, {u, 0.0}); });
        } else {
            detail::QuadRule q = detail::composite_gauss(-1.0, 1.0, 96, 8);
            for (std::size_t i = 0; i < q.nodes.size(); ++i)
                for (std::size_t j = 0; j < q.nodes.size(); ++j)
                    l1 += q.weights[i] * q.weights[j] * std::abs(psi_shape(spec, {q.nodes[i], q.nodes[j]}));
        }
        psi_norm = 1.0 / l1;
        const double c = psi_norm * std::pow(r, -n);
        psi_eval = [spec, c, r](const Position& x) { return c * psi_shape(spec, {x[0] / r, x[1] / r}); };
    }
    std::shared_ptr<const PsiProfile> profile;
    if (n == 1) profile = make_profile_table(psi_eval, r);
    // Samples carry exact discrete moments; the evaluators stay analytic.
    GridFunction phi_raw = sample_centered(phi_eval, grid);
    MomentTargets unit_mass{{MultiIndex::zero(n)}, {1.0}};
    GridFunction phi_s = project(phi_raw, phi_raw, unit_mass, 0, r);
    MomentTargets vanish{multi_indices_up_to(n, M), std::vector<double>(multi_indices_up_to(n, M).size(), 0.0)};
    GridFunction psi_s = project(sample_centered(psi_eval, grid), phi_raw, vanish, 0, r);
    return MotherPair{spec, phi_eval, psi_eval, std::move(phi_s), std::move(psi_s), phi_norm, psi_norm, profile};
}

double eval_phi_kN(int k, double N, const Position& x, int dim) {
    if (!(N > 0.0)) throw std::invalid_argument("eval_phi_kN: N must be positive");
    Position d = torus_delta(x, {0.0, 0.0}, dim);
    const double s = std::ldexp(1.0, k);
    return std::pow(s, dim) * std::pow(1.0 + s * norm(d, dim), -N);
}

GridFunction sample_phi_kN(int k, double N, const Grid& grid) {
    return sample_centered([&](const Position& x) { return eval_phi_kN(k, N, x, grid.dim()); }, grid);
}

Position grid_frequency(const Grid& grid, std::size_t i) {
    const auto ax = grid.axis_indices(i);
    const long n = static_cast<long>(grid.points_per_axis());
    auto m = [n](std::size_t a) {
        const long v = static_cast<long>(a);
        return static_cast<double>(v < n / 2 ? v : v - n);
    };
    const double tau = 2.0 * std::numbers::pi;
    return {tau * m(ax[0]), grid.dim() == 2 ? tau * m(ax[1]) : 0.0};
}

std::vector<std::complex<double>> fourier_symbol(const GridFunction& f) {
    const Grid& g = f.grid();
    Spectrum s = forward(f);
    const std::size_t n = g.points_per_axis();
    const double w = g.cell_volume();
    std::vector<std::complex<double>> out(g.size());
    if (g.dim() == 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = i <= n / 2 ? std::conj(s.data[i]) * w : s.data[n - i] * w;
    } else {
        const std::size_t hn = n / 2 + 1;
        for (std::size_t i0 = 0; i0 < n; ++i0)
            for (std::size_t i1 = 0; i1 < n; ++i1) {
                std::complex<double> v = i1 <= n / 2 ? std::conj(s.data[i0 * hn + i1])
                                                     : s.data[((n - i0) % n) * hn + (n - i1)];
                out[i0 * n + i1] = v * w;
            }
    }
    return out;
}

Kernel::Kernel(GridFunction v) : values(std::move(v)), spectrum(forward(values)) {}

KernelBank::KernelBank(std::string name, const Grid& grid, ScaleRange scales, std::map<int, Kernel> kernels)
    : name_(std::move(name)), grid_(grid), scales_(scales), kernels_(std::move(kernels)) {}

const Kernel& KernelBank::at(int k) const {
    auto it = kernels_.find(k);
    if (it == kernels_.end())
        throw std::out_of_range("KernelBank " + name_ + ": scale " + std::to_string(k) + " not tabulated");
    return it->second;
}

double kernel_moment(const GridFunction& K, const MultiIndex& beta) {
    const Grid& g = K.grid();
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (K[i] != 0.0) s += K[i] * beta.monomial(g.displacement(i));
    return s * g.cell_volume();
}


KernelBank make_dilate_bank(std::string name, const MotherPair& mp, const Evaluator& mother, const Grid& grid,
                            ScaleRange scales, const std::function<MomentTargets(int)>& targets_for_scale) {
    scales.check_resolvable(grid);
    std::map<int, Kernel> ks;
    for (int k : scales.values()) {
        GridFunction K = sample_dilate(mother, k, grid);
        if (targets_for_scale) {
            MomentTargets t = targets_for_scale(k);
            if (!t.orders.empty()) {
                GridFunction w = sample_dilate(mp.phi_eval, k, grid);
                K = project(K, w, t, k, mp.support_radius());
            }
        }
        ks.emplace(k, Kernel(std::move(K)));
    }
    return KernelBank(std::move(name), grid, scales, std::move(ks));
}

ConvolutionBank make_bank(std::shared_ptr<const MotherPair> mother, ScaleRange scales, BankOptions opts) {
    const MotherPair& mp = *mother;
    const Grid& grid = mp.phi.grid();
    const int n = mp.dim();
    auto psi_targets = [&](int) {
        MomentTargets t;
        if (!opts.project) return t;
        t.orders = multi_indices_up_to(n, mp.moments());
        t.values.assign(t.orders.size(), 0.0);
        return t;
    };
    auto phi_targets = [&](int k) {
        MomentTargets t;
        if (!opts.project) return t;
        t.orders = multi_indices_up_to(n, opts.phi_fix);
        for (const auto& b : t.orders) t.values.push_back(mp.phi_moment(b) * std::ldexp(1.0, -k * b.order()));
        return t;
    };
    ConvolutionBank bank;
    bank.mother = mother;
    bank.scales = scales;
    bank.phi_fix = opts.phi_fix;
    bank.psi = make_dilate_bank("psi", mp, mp.psi_eval, grid, scales, psi_targets);
    bank.phi = make_dilate_bank("phi", mp, mp.phi_eval, grid, scales, phi_targets);
    return bank;
}

KernelBank make_derivative_bank(const MotherPair& mp, const MultiIndex& alpha, const Grid& grid, ScaleRange scales,
                                int fix, bool project_moments) {
    auto targets = [&](int k) {
        MomentTargets t;
        if (!project_moments) return t;
        t.orders = multi_indices_up_to(grid.dim(), std::max(alpha.order(), fix));
        const double sign = alpha.order() % 2 ? -1.0 : 1.0;
        for (const auto& b : t.orders) {
            double v = 0.0;
            if (alpha.leq(b)) v = sign * falling_factorial(b, alpha) * mp.phi_moment(b - alpha);
            t.values.push_back(v * std::ldexp(1.0, -k * b.order()));
        }
        return t;
    };
    return make_dilate_bank("dphi" + alpha.to_string(), mp, mp.phi_derivative(alpha), grid, scales, targets);
}

KernelBank make_weighted_psi_bank(const MotherPair& mp, const MultiIndex& mu, const Grid& grid, ScaleRange scales) {
    Evaluator psi = mp.psi_eval;
    Evaluator weighted = [psi, mu](const Position& x) { return mu.monomial(x) * psi(x); };
    auto targets = [&](int) {
        MomentTargets t;
        const int top = mp.moments() - mu.order();
        if (top < 0) return t;
        t.orders = multi_indices_up_to(grid.dim(), top);
        t.values.assign(t.orders.size(), 0.0);
        return t;
    };
    return make_dilate_bank("psi_mu" + mu.to_string(), mp, weighted, grid, scales, targets);
}

std::string mother_csv(const GridFunction& f) {
    const Grid& g = f.grid();
    if (g.dim() == 1) {
        CsvWriter w({"position", "value"});
        const std::size_t n = g.points_per_axis();
        for (std::size_t s = 0; s < n; ++s) {
            const std::size_t i = (s + n / 2) % n;
            w.row({fmt(g.displacement(i)[0]), fmt(f[i])});
        }
        return w.text();
    }
    CsvWriter w({"x0", "x1", "value"});
    for (std::size_t i = 0; i < g.size(); ++i) {
        Position d = g.displacement(i);
        w.row({fmt(d[0]), fmt(d[1]), fmt(f[i])});
    }
    return w.text();
}

} // namespace lpslab
