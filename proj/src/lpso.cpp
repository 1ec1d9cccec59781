#include "lpslab/lpso.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "lpslab/csv.hpp"
#include "lpslab/parallel.hpp"

namespace lpslab {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string scale_error(int k, const ScaleRange& s) {
    return "scale k = " + std::to_string(k) + " outside [" + std::to_string(s.k_min) + ", " +
           std::to_string(s.k_max) + "]";
}

} // namespace

LpsoFamily::LpsoFamily(Grid grid, ScaleRange scales, Variant v, std::string name)
    : grid_(grid), scales_(scales), v_(std::move(v)), name_(std::move(name)) {
    std::visit(Overloaded{
                   [&](const ConvolutionVariant& c) {
                       if (!c.bank) throw std::invalid_argument("convolution family without a bank");
                       if (!(c.bank->grid() == grid_)) throw std::invalid_argument("bank grid differs from family grid");
                       for (int k : scales_.values()) (void)c.bank->at(k);
                   },
                   [&](const TabulatedVariant& t) {
                       const std::size_t entries = grid_.size() * grid_.size();
                       for (int k : scales_.values()) {
                           auto it = t.matrices.find(k);
                           if (it == t.matrices.end())
                               throw std::invalid_argument("tabulated family missing scale " + std::to_string(k));
                           if (it->second.size() != entries)
                               throw std::invalid_argument("tabulated matrix at scale " + std::to_string(k) +
                                                           " has " + std::to_string(it->second.size()) +
                                                           " entries, want " + std::to_string(entries));
                           for (double v : it->second)
                               if (!std::isfinite(v))
                                   throw std::domain_error("non-finite kernel entry at scale " + std::to_string(k));
                       }
                   },
                   [&](const ComposedVariant& c) {
                       if (!c.outer || !c.inner) throw std::invalid_argument("composed family is incomplete");
                       for (int k : scales_.values()) (void)c.outer->at(k);
                   },
                   [&](const CorrectedVariant& c) {
                       if (!c.base || !c.p_bank) throw std::invalid_argument("corrected family is incomplete");
                       const int n = grid_.dim();
                       for (int k : scales_.values()) {
                           (void)c.p_bank->at(k);
                           if (!c.coefficients.contains(k, MultiIndex::zero(n)))
                               throw std::invalid_argument("corrected family lacks [[Λ_k]]_0 at k = " + std::to_string(k));
                           for (int m = 1; m <= c.order; ++m)
                               for (const auto& a : multi_indices_of_order(n, m)) {
                                   if (!c.coefficients.contains(k, a))
                                       throw std::invalid_argument("corrected family lacks coefficient " +
                                                                   a.to_string() + " at k = " + std::to_string(k));
                                   auto it = c.derivative_banks.find(a);
                                   if (it == c.derivative_banks.end() || !it->second)
                                       throw std::invalid_argument("corrected family lacks (D^αφ)_k for α = " +
                                                                   a.to_string());
                                   (void)it->second->at(k);
                               }
                       }
                   },
               },
               v_);
}

LpsoFamily LpsoFamily::convolution(std::shared_ptr<const KernelBank> bank, std::string name) {
    const Grid g = bank->grid();
    const ScaleRange s = bank->scales();
    return LpsoFamily(g, s, ConvolutionVariant{std::move(bank)}, std::move(name));
}

LpsoFamily LpsoFamily::tabulated(const Grid& grid, ScaleRange scales, std::map<int, std::vector<double>> matrices,
                                 std::string name) {
    return LpsoFamily(grid, scales, TabulatedVariant{std::move(matrices)}, std::move(name));
}

LpsoFamily LpsoFamily::tabulate(const Grid& grid, ScaleRange scales,
                                const std::function<double(int, std::size_t, std::size_t)>& kernel,
                                std::string name) {
    std::map<int, std::vector<double>> mats;
    const std::size_t n = grid.size();
    for (int k : scales.values()) {
        std::vector<double> m(n * n);
        parallel_for(n, [&](std::size_t i) {
            for (std::size_t j = 0; j < n; ++j) m[i * n + j] = kernel(k, i, j);
        });
        mats.emplace(k, std::move(m));
    }
    return tabulated(grid, scales, std::move(mats), std::move(name));
}

LpsoFamily LpsoFamily::composed(std::shared_ptr<const KernelBank> outer, Operator inner, std::string inner_name) {
    const Grid g = outer->grid();
    const ScaleRange s = outer->scales();
    std::string name = "Q_k∘" + inner_name;
    return LpsoFamily(g, s, ComposedVariant{std::move(outer), std::move(inner), std::move(inner_name)},
                      std::move(name));
}

void LpsoFamily::check_scale(int k) const {
    if (!scales_.contains(k)) throw std::out_of_range(scale_error(k, scales_));
}

namespace {

GridFunction corrected_terms(const CorrectedVariant& c, int k, const GridFunction& f, GridFunction base) {
    const int n = f.grid().dim();
    const Grid& g = f.grid();
    std::vector<double> out(base.values().begin(), base.values().end());
    auto subtract = [&](const GridFunction& coeff, double scale, const GridFunction& term) {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] -= scale * coeff[i] * term[i];
    };
    subtract(c.coefficients.at(k, MultiIndex::zero(n)), 1.0, c.p_bank->apply(k, f));
    for (int m = 1; m <= c.order; ++m)
        for (const auto& a : multi_indices_of_order(n, m)) {
            const double sign = (m % 2 == 0) ? 1.0 : -1.0;
            subtract(c.coefficients.at(k, a), sign / a.factorial(), c.derivative_banks.at(a)->apply(k, f));
        }
    return GridFunction(g, std::move(out));
}

} // namespace

GridFunction LpsoFamily::apply(int k, const GridFunction& f) const {
    check_scale(k);
    if (!(f.grid() == grid_)) throw std::invalid_argument("apply_family: input grid differs from family grid");
    return std::visit(Overloaded{
                          [&](const ConvolutionVariant& c) { return c.bank->apply(k, f); },
                          [&](const TabulatedVariant& t) {
                              const auto& m = t.matrices.at(k);
                              const std::size_t n = grid_.size();
                              const double w = grid_.cell_volume();
                              std::vector<double> out(n);
                              for (std::size_t i = 0; i < n; ++i) {
                                  const double* row = m.data() + i * n;
                                  double acc = 0.0;
                                  for (std::size_t j = 0; j < n; ++j) acc += row[j] * f[j];
                                  out[i] = w * acc;
                              }
                              return GridFunction(grid_, std::move(out));
                          },
                          [&](const ComposedVariant& c) { return c.outer->apply(k, c.inner(f)); },
                          [&](const CorrectedVariant& c) { return corrected_terms(c, k, f, c.base->apply(k, f)); },
                      },
                      v_);
}

std::map<int, GridFunction> LpsoFamily::apply_all(const GridFunction& f) const {
    if (!(f.grid() == grid_)) throw std::invalid_argument("apply_family: input grid differs from family grid");
    std::map<int, GridFunction> out;
    if (const auto* c = std::get_if<ComposedVariant>(&v_)) {
        const GridFunction tf = c->inner(f);
        for (int k : scales_.values()) out.emplace(k, c->outer->apply(k, tf));
        return out;
    }
    if (const auto* c = std::get_if<CorrectedVariant>(&v_)) {
        auto base = c->base->apply_all(f);
        for (int k : scales_.values()) out.emplace(k, corrected_terms(*c, k, f, base.at(k)));
        return out;
    }
    for (int k : scales_.values()) out.emplace(k, apply(k, f));
    return out;
}

bool LpsoFamily::has_kernel() const {
    return std::holds_alternative<ConvolutionVariant>(v_) || std::holds_alternative<TabulatedVariant>(v_);
}

double LpsoFamily::kernel(int k, std::size_t xi, std::size_t yj) const {
    if (const auto* c = std::get_if<ConvolutionVariant>(&v_)) {
        const auto ax = grid_.axis_indices(yj);
        return c->bank->at(k).values[grid_.shifted(xi, -static_cast<long>(ax[0]), -static_cast<long>(ax[1]))];
    }
    if (const auto* t = std::get_if<TabulatedVariant>(&v_)) return t->matrices.at(k)[xi * grid_.size() + yj];
    throw std::logic_error("family '" + name_ + "' has no pointwise kernel");
}

GridFunction square_function(const LpsoFamily& fam, const GridFunction& f) {
    const auto all = fam.apply_all(f);
    std::vector<double> acc(f.size(), 0.0);
    for (const auto& [k, g] : all)
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += g[i] * g[i];
    for (double& v : acc) v = std::sqrt(v);
    return GridFunction(f.grid(), std::move(acc));
}

std::vector<double> central_difference_weights(int m) {
    if (m < 0) throw std::invalid_argument("derivative order must be >= 0");
    const int p = (m + 1) / 2;
    const int npts = 2 * p + 1;
    // Fornberg's recursion on nodes −p..p evaluated at 0.
    std::vector<std::vector<std::vector<double>>> c(
        static_cast<std::size_t>(npts),
        std::vector<std::vector<double>>(static_cast<std::size_t>(npts), std::vector<double>(m + 1, 0.0)));
    auto node = [p](int i) { return static_cast<double>(i - p); };
    c[0][0][0] = 1.0;
    double c1 = 1.0;
    for (int i = 1; i < npts; ++i) {
        double c2 = 1.0;
        for (int j = 0; j < i; ++j) {
            const double c3 = node(i) - node(j);
            c2 *= c3;
            for (int d = 0; d <= std::min(i, m); ++d) {
                const double prev = (d > 0) ? c[i - 1][j][d - 1] : 0.0;
                c[i][j][d] = (node(i) * c[i - 1][j][d] - d * prev) / c3;
            }
        }
        for (int d = 0; d <= std::min(i, m); ++d) {
            const double prev = (d > 0) ? c[i - 1][i - 1][d - 1] : 0.0;
            c[i][i][d] = c1 / c2 * (d * prev - node(i - 1) * c[i - 1][i - 1][d]);
        }
        c1 = c2;
    }
    std::vector<double> w(static_cast<std::size_t>(npts));
    for (int j = 0; j < npts; ++j) w[j] = c[npts - 1][j][m];
    return w;
}

namespace {

/// Additive-recurrence sequence with the generalised golden ratio; point s has d coordinates in [0,1).
class LowDiscrepancy {
public:
    explicit LowDiscrepancy(int d) : a_(static_cast<std::size_t>(d)) {
        double phi = 2.0;
        for (int it = 0; it < 64; ++it) phi = std::pow(1.0 + phi, 1.0 / (d + 1));
        for (int j = 0; j < d; ++j) a_[j] = std::fmod(std::pow(1.0 / phi, j + 1), 1.0);
    }
    double at(long s, int j) const {
        const double v = 0.5 + static_cast<double>(s) * a_[static_cast<std::size_t>(j)];
        return v - std::floor(v);
    }

private:
    std::vector<double> a_;
};

struct Stencil {
    std::vector<std::array<long, 2>> offsets;
    std::vector<double> weights;  ///< divided by h^{|α|}
};

Stencil stencil_for(const MultiIndex& a, double h) {
    const auto w0 = central_difference_weights(a[0]);
    const std::vector<double> w1 = a.dim() == 2 ? central_difference_weights(a[1]) : std::vector<double>{1.0};
    const long p0 = static_cast<long>(w0.size() / 2), p1 = static_cast<long>(w1.size() / 2);
    Stencil s;
    const double scale = std::pow(h, -a.order());
    for (std::size_t i = 0; i < w0.size(); ++i)
        for (std::size_t j = 0; j < w1.size(); ++j) {
            const double w = w0[i] * w1[j];
            if (w == 0.0) continue;
            s.offsets.push_back({static_cast<long>(i) - p0, static_cast<long>(j) - p1});
            s.weights.push_back(w * scale);
        }
    return s;
}

struct Best {
    double value = 0.0;
    Witness w;
    void offer(double v, const Witness& cand) {
        if (v > value) {
            value = v;
            w = cand;
        }
    }
    void merge(const Best& o) { offer(o.value, o.w); }
};

struct Partial {
    Best size, deriv, holder;
    long evaluations = 0;
    void merge(const Partial& o) {
        size.merge(o.size);
        deriv.merge(o.deriv);
        holder.merge(o.holder);
        evaluations += o.evaluations;
    }
};

struct Setup {
    const LpsoFamily& fam;
    const Grid& grid;
    double N;
    int L;
    double delta;
    std::vector<MultiIndex> all_alpha;   ///< |α| ≤ L
    std::vector<MultiIndex> top_alpha;   ///< |α| = L
    std::map<MultiIndex, Stencil> stencils;

    double phi(int k, std::size_t x, std::size_t y) const {
        return eval_phi_kN(k, N, torus_delta(grid.position(x), grid.position(y), grid.dim()), grid.dim());
    }
    double separation(std::size_t y, std::size_t yp) const {
        return norm(torus_delta(grid.position(y), grid.position(yp), grid.dim()), grid.dim());
    }
};

void check_resolution(const Grid& grid, const ScaleRange& scales, int L) {
    const long p = std::max(1, (L + 1) / 2);
    for (int k : scales.values()) {
        const long per_width = 1L << std::max(0, grid.log2_points() - k);
        if (grid.log2_points() < k || per_width < 8 * p)
            throw std::domain_error("finite-difference step h = 2^-" + std::to_string(grid.log2_points()) +
                                    " under-resolves scale k = " + std::to_string(k) + " for L = " +
                                    std::to_string(L) + " (need G >= " +
                                    std::to_string(k + 3 + static_cast<int>(std::ceil(std::log2(p)))) + ")");
    }
}

/// Kernel-path evaluation of all three quotients at (k, x, y) and, when hp is set, the pair (y, y′).
void evaluate_kernel(const Setup& s, int k, std::size_t x, std::size_t y, const std::size_t* hp, Partial& out) {
    const Grid& g = s.grid;
    auto D = [&](const MultiIndex& a, std::size_t yy) {
        const auto& st = s.stencils.at(a);
        double acc = 0.0;
        for (std::size_t i = 0; i < st.offsets.size(); ++i)
            acc += st.weights[i] * s.fam.kernel(k, x, g.shifted(yy, st.offsets[i][0], st.offsets[i][1]));
        return acc;
    };
    const double ph = s.phi(k, x, y);
    const Witness w{k, g.position(x), g.position(y), g.position(y)};
    out.size.offer(std::abs(s.fam.kernel(k, x, y)) / ph, w);
    for (const auto& a : s.all_alpha)
        out.deriv.offer(std::abs(D(a, y)) / (std::pow(2.0, k * a.order()) * ph), w);
    out.evaluations += 1;
    if (!hp) return;
    const std::size_t yp = *hp;
    const double sep = s.separation(y, yp);
    const double denom = std::pow(sep, s.delta) * std::pow(2.0, k * (s.L + s.delta)) * (ph + s.phi(k, x, yp));
    const Witness wp{k, g.position(x), g.position(y), g.position(yp)};
    for (const auto& a : s.top_alpha) out.holder.offer(std::abs(D(a, y) - D(a, yp)) / denom, wp);
}

Partial certify_kernel_path(const Setup& s, long budget) {
    const Grid& g = s.grid;
    const int n = g.dim();
    const auto scales = s.fam.scales().values();
    const double spp = static_cast<double>(g.points_per_axis());
    const long npa = static_cast<long>(g.points_per_axis());

    // Low-discrepancy part: coordinates (scale, x, near/far, z, offset).
    const LowDiscrepancy seq(2 + 3 * n);
    const std::size_t chunks = 64;
    std::vector<Partial> parts(chunks);
    parallel_for(chunks, [&](std::size_t c) {
        for (long i = static_cast<long>(c); i < budget; i += static_cast<long>(chunks)) {
            int col = 0;
            const int k = scales[std::min(scales.size() - 1, static_cast<std::size_t>(seq.at(i, col++) * scales.size()))];
            std::array<long, 2> xa{0, 0}, za{0, 0}, oa{0, 0};
            for (int d = 0; d < n; ++d) xa[d] = std::min(npa - 1, static_cast<long>(seq.at(i, col++) * spp));
            const bool near = seq.at(i, col++) < 0.75;
            const double width = std::ldexp(1.0, -k) * spp;  // samples per 2^{-k}
            for (int d = 0; d < n; ++d) {
                const double u = seq.at(i, col++);
                za[d] = near ? std::lround((2.0 * u - 1.0) * 2.0 * width) : static_cast<long>(u * spp);
            }
            const double reach = width / std::sqrt(static_cast<double>(n));
            for (int d = 0; d < n; ++d) oa[d] = std::lround((2.0 * seq.at(i, col++) - 1.0) * reach);
            if (oa[0] == 0 && oa[1] == 0) oa[0] = 1;
            const std::size_t x = n == 1 ? static_cast<std::size_t>(xa[0]) : g.flat_index(xa[0], xa[1]);
            const std::size_t y = g.shifted(x, -za[0], -za[1]);
            const std::size_t yp = g.shifted(y, oa[0], oa[1]);
            evaluate_kernel(s, k, x, y, &yp, parts[c]);
        }
    });
    // Diagonal band |x − y|_∞ ≤ h at every scale.
    std::vector<Partial> band(g.size());
    parallel_for(g.size(), [&](std::size_t x) {
        for (int k : scales)
            for (long e0 = -1; e0 <= 1; ++e0)
                for (long e1 = (n == 2 ? -1 : 0); e1 <= (n == 2 ? 1 : 0); ++e1)
                    evaluate_kernel(s, k, x, g.shifted(x, e0, e1), nullptr, band[x]);
    });
    Partial total;
    for (const auto& p : parts) total.merge(p);
    for (const auto& p : band) total.merge(p);
    return total;
}

/// Operator path: probe columns λ_k(·, y) = Λ_k(δ_y) with point masses, dense in x.
Partial certify_probe_path(const Setup& s, long budget) {
    const Grid& g = s.grid;
    const int n = g.dim();
    const auto scales = s.fam.scales().values();
    const double spp = static_cast<double>(g.points_per_axis());
    const long npa = static_cast<long>(g.points_per_axis());
    const double mass = 1.0 / g.cell_volume();
    const LowDiscrepancy seq(1 + 2 * n);

    auto column_derivatives = [&](std::size_t y, const std::vector<MultiIndex>& alphas) {
        // D^α_y λ_k(·, y) for each α, assembled from the union of stencil columns.
        std::map<std::array<long, 2>, std::vector<std::pair<std::size_t, double>>> uses;
        for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
            const auto& st = s.stencils.at(alphas[ai]);
            for (std::size_t j = 0; j < st.offsets.size(); ++j) uses[st.offsets[j]].push_back({ai, st.weights[j]});
        }
        std::vector<std::map<int, std::vector<double>>> d(alphas.size());
        for (auto& m : d)
            for (int k : scales) m[k].assign(g.size(), 0.0);
        long applications = 0;
        for (const auto& [off, list] : uses) {
            std::vector<double> delta(g.size(), 0.0);
            delta[g.shifted(y, off[0], off[1])] = mass;
            const auto cols = s.fam.apply_all(GridFunction(g, std::move(delta)));
            ++applications;
            for (const auto& [ai, w] : list)
                for (int k : scales) {
                    auto& dst = d[ai][k];
                    const auto& src = cols.at(k);
                    for (std::size_t x = 0; x < g.size(); ++x) dst[x] += w * src[x];
                }
        }
        return std::make_pair(std::move(d), applications);
    };

    std::vector<Partial> parts(static_cast<std::size_t>(budget));
    parallel_for(static_cast<std::size_t>(budget), [&](std::size_t idx) {
        const long i = static_cast<long>(idx);
        Partial& out = parts[idx];
        int col = 0;
        std::array<long, 2> ya{0, 0}, oa{0, 0};
        for (int d = 0; d < n; ++d) ya[d] = std::min(npa - 1, static_cast<long>(seq.at(i, col++) * spp));
        const int hk = scales[std::min(scales.size() - 1, static_cast<std::size_t>(seq.at(i, col++) * scales.size()))];
        const double reach = std::ldexp(1.0, -hk) * spp / std::sqrt(static_cast<double>(n));
        for (int d = 0; d < n; ++d) oa[d] = std::lround((2.0 * seq.at(i, col++) - 1.0) * reach);
        if (oa[0] == 0 && oa[1] == 0) oa[0] = 1;
        const std::size_t y = n == 1 ? static_cast<std::size_t>(ya[0]) : g.flat_index(ya[0], ya[1]);
        const std::size_t yp = g.shifted(y, oa[0], oa[1]);

        auto [dy, apps] = column_derivatives(y, s.all_alpha);
        auto [dyp, apps2] = column_derivatives(yp, s.top_alpha);
        out.evaluations += apps + apps2;
        const MultiIndex zero = MultiIndex::zero(n);
        for (int k : scales)
            for (std::size_t x = 0; x < g.size(); ++x) {
                const double ph = s.phi(k, x, y);
                const Witness w{k, g.position(x), g.position(y), g.position(y)};
                for (std::size_t ai = 0; ai < s.all_alpha.size(); ++ai) {
                    const double q = std::abs(dy[ai][k][x]) / (std::pow(2.0, k * s.all_alpha[ai].order()) * ph);
                    if (s.all_alpha[ai] == zero) out.size.offer(q, w);
                    out.deriv.offer(q, w);
                }
            }
        // Hölder pair at its own scale only: |y − y′| ≤ 2^{−hk}.
        const double sep = s.separation(y, yp);
        for (std::size_t x = 0; x < g.size(); ++x) {
            const double denom = std::pow(sep, s.delta) * std::pow(2.0, hk * (s.L + s.delta)) *
                                 (s.phi(hk, x, y) + s.phi(hk, x, yp));
            const Witness w{hk, g.position(x), g.position(y), g.position(yp)};
            for (std::size_t ti = 0; ti < s.top_alpha.size(); ++ti) {
                std::size_t ai = 0;
                while (!(s.all_alpha[ai] == s.top_alpha[ti])) ++ai;
                out.holder.offer(std::abs(dy[ai][hk][x] - dyp[ti][hk][x]) / denom, w);
            }
        }
    });
    Partial total;
    for (const auto& p : parts) total.merge(p);
    return total;
}

std::string position_cell(const Position& p, int dim) {
    return dim == 1 ? fmt(p[0]) : fmt(p[0]) + " " + fmt(p[1]);
}

} // namespace

LpsoCertificate certify_lpso(const LpsoFamily& fam, double N, int L, double delta, long sample_budget) {
    if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must lie in (0, 1]");
    if (!(N > 0.0)) throw std::invalid_argument("N must be positive");
    if (L < 0) throw std::invalid_argument("L must be >= 0");
    if (sample_budget < 1) throw std::invalid_argument("sample_budget must be >= 1");
    const Grid& g = fam.grid();
    check_resolution(g, fam.scales(), L);

    Setup s{fam, g, N, L, delta, multi_indices_up_to(g.dim(), L), multi_indices_of_order(g.dim(), L), {}};
    for (const auto& a : s.all_alpha) s.stencils.emplace(a, stencil_for(a, g.spacing()));

    const Partial p = fam.has_kernel() ? certify_kernel_path(s, sample_budget) : certify_probe_path(s, sample_budget);
    LpsoCertificate c;
    c.N = N;
    c.L = L;
    c.delta = delta;
    c.C_size = p.size.value;
    c.C_deriv = p.deriv.value;
    c.C_holder = p.holder.value;
    c.w_size = p.size.w;
    c.w_deriv = p.deriv.w;
    c.w_holder = p.holder.w;
    c.evaluations = p.evaluations;
    c.dim = g.dim();
    return c;
}

std::string LpsoCertificate::csv() const {
    CsvWriter out({"condition", "constant", "witness_k", "witness_x", "witness_y", "witness_yprime"});
    auto row = [&](const char* cond, double v, const Witness& w, bool pair) {
        out.row({cond, fmt(v), fmt(static_cast<long long>(w.k)), position_cell(w.x, dim), position_cell(w.y, dim),
                 pair ? position_cell(w.y_prime, dim) : std::string()});
    };
    row("size", C_size, w_size, false);
    row("derivative", C_deriv, w_deriv, false);
    row("holder", C_holder, w_holder, true);
    return out.text();
}

CertificateRefinement certify_with_refinement(const LpsoFamily& fam, double N, int L, double delta, long budget) {
    CertificateRefinement r;
    r.coarse = certify_lpso(fam, N, L, delta, budget);
    r.fine = certify_lpso(fam, N, L, delta, 4 * budget);
    const double pairs[3][2] = {{r.coarse.C_size, r.fine.C_size},
                                {r.coarse.C_deriv, r.fine.C_deriv},
                                {r.coarse.C_holder, r.fine.C_holder}};
    r.stable = true;
    for (const auto& p : pairs) {
        const double ref = std::max(std::abs(p[0]), 1e-300);
        if (std::abs(p[1] - p[0]) > 0.1 * ref) r.stable = false;
        if (p[1] >= 2.0 * p[0] && p[1] > 0.0) r.failed = true;
    }
    return r;
}

} // namespace lpslab
