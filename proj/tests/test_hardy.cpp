#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

#include "lpslab/hardy.hpp"
#include "support.hpp"

using namespace lpslab;

namespace {

// Brute-force oracle: average of |f| over every closed dyadic-radius ball, by direct summation.
GridFunction hl_oracle(const GridFunction& f) {
    const Grid& g = f.grid();
    std::vector<double> out(g.size());
    for (std::size_t x = 0; x < g.size(); ++x) {
        double m = std::abs(f[x]);
        for (int l = 1; l <= g.log2_points(); ++l) {
            const double rho = std::ldexp(1.0, -l) * (1.0 + 1e-12);
            double s = 0.0;
            std::size_t c = 0;
            for (std::size_t y = 0; y < g.size(); ++y)
                if (norm(torus_delta(g.position(x), g.position(y), g.dim()), g.dim()) <= rho) {
                    s += std::abs(f[y]);
                    ++c;
                }
            m = std::max(m, s / static_cast<double>(c));
        }
        out[x] = m;
    }
    return GridFunction(g, std::move(out));
}

GridFunction nontangential_oracle(const GridFunction& f, const KernelBank& phi) {
    const Grid& g = f.grid();
    std::vector<double> out(g.size(), 0.0);
    for (int k : phi.scales().values()) {
        const GridFunction pk = phi.apply(k, f);
        const double rho = std::ldexp(1.0, -k) * (1.0 + 1e-12);
        for (std::size_t x = 0; x < g.size(); ++x)
            for (std::size_t y = 0; y < g.size(); ++y)
                if (norm(torus_delta(g.position(x), g.position(y), g.dim()), g.dim()) <= rho)
                    out[x] = std::max(out[x], std::abs(pk[y]));
    }
    return GridFunction(g, std::move(out));
}

std::vector<double> random_centers(std::size_t n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::lognormal_distribution<double> ln(0.0, 1.0);
    std::vector<double> v(n);
    for (double& x : v) x = ln(rng);
    return v;
}

std::size_t cubes(const Grid& g, int level) { return std::size_t{1} << (level * g.dim()); }

} // namespace

TEST_CASE("hl_maximal") {
    for (const Grid& g : {Grid(1, 7), Grid(2, 6)}) {
        const GridFunction f = testsupport::random_function(g, 3);
        const GridFunction m = hl_maximal(f), o = hl_oracle(f);
        CHECK(max_abs_diff(m, o) <= 1e-12 * o.max_abs());
        for (std::size_t i = 0; i < f.size(); ++i) CHECK(m[i] >= std::abs(f[i]) - 1e-15);
        CHECK(max_abs_diff(hl_maximal(GridFunction::constant(g, -2.0)), GridFunction::constant(g, 2.0)) <= 1e-12);
        CHECK(max_abs_diff(hl_maximal(f.translated(5, 3)), m.translated(5, 3)) <= 1e-12 * m.max_abs());
    }
}

TEST_CASE("mjr_maximal") {
    Grid g(1, 9);
    const int j = 3, level = j + kCubeOffset;
    const auto c = random_centers(cubes(g, level), 4);
    CHECK_THROWS_AS(mjr_maximal(c, j, 0.0, g), std::invalid_argument);
    CHECK_THROWS_AS(mjr_maximal(c, j, 1.5, g), std::invalid_argument);
    CHECK_THROWS_AS(mjr_maximal(std::vector<double>(3, 1.0), j, 0.5, g), std::invalid_argument);

    // r = 1 is the maximal function of the step function; r < 1 lies below it (Hölder).
    std::vector<double> step(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) step[i] = c[cube_of(g, i, level).index[0]];
    const GridFunction m1 = mjr_maximal(c, j, 1.0, g);
    CHECK(max_abs_diff(m1, hl_maximal(GridFunction(g, step))) <= 1e-12 * m1.max_abs());
    const GridFunction m7 = mjr_maximal(c, j, 0.7, g);
    const GridFunction m3 = mjr_maximal(c, j, 0.3, g);
    CHECK(max_abs_diff(mjr_maximal(std::vector<double>(c.size(), 2.5), j, 0.4, g), GridFunction::constant(g, 2.5)) <=
          1e-12);
    for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(m7[i] <= m1[i] * (1 + 1e-12));
        CHECK(m3[i] <= m7[i] * (1 + 1e-12));
        CHECK(m7[i] >= step[i] * (1 - 1e-12));
    }
}

TEST_CASE("nontangential_maximal") {
    for (const Grid& g : {Grid(1, 8), Grid(2, 6)}) {
        auto mp = std::make_shared<const MotherPair>(build_mothers(1, 0.25, g));
        const ConvolutionBank b = make_bank(mp, ScaleRange(0, g.log2_points() - 4));
        const GridFunction f = testsupport::random_function(g, 8);
        const GridFunction n = nontangential_maximal(f, b.phi), o = nontangential_oracle(f, b.phi);
        CHECK(max_abs_diff(n, o) <= 1e-13 * o.max_abs());
        CHECK(max_abs_diff(nontangential_maximal(f.translated(3, 1), b.phi), n.translated(3, 1)) <= 1e-12 * n.max_abs());
        CHECK(max_abs_diff(nontangential_maximal(GridFunction::constant(g, 1.0), b.phi), GridFunction::constant(g, 1.0)) <=
              1e-10);
        for (int k : b.scales.values()) {
            const GridFunction pk = b.phi.apply(k, f);
            for (std::size_t i = 0; i < g.size(); ++i) CHECK(n[i] >= std::abs(pk[i]));
        }
    }
}

TEST_CASE("hp_norm") {
    Grid g(1, 12);
    auto mp = std::make_shared<const MotherPair>(build_mothers(1, 0.25, g));
    const ConvolutionBank b = make_bank(mp, ScaleRange(0, 8));
    const Atom a = make_atom(0.8, DyadicCube{5, {9, 0}, 1}, 2, g);

    SUBCASE("rejects banks without enough moments and names the requirement") {
        try {
            hp_norm(a.values, 0.45, b);
            FAIL("expected domain_error");
        } catch (const std::domain_error& e) {
            CHECK(std::string(e.what()).find("required M >= 2") != std::string::npos);
        }
        CHECK(required_moments(1.0, 1) == 1);
        CHECK(required_moments(0.5, 1) == 2);
        CHECK(required_moments(0.8, 2) == 1);
        CHECK_THROWS_AS(hp_norm(a.values, 0.0, b), std::invalid_argument);
    }
    SUBCASE("homogeneous of degree one and zero on zero") {
        const HardyNormEstimate e1 = hp_norm(a.values, 0.8, b), e3 = hp_norm(-3.0 * a.values, 0.8, b);
        CHECK(testsupport::rel_err(e3.via_square, 3 * e1.via_square) <= 1e-12);
        CHECK(testsupport::rel_err(e3.via_maximal, 3 * e1.via_maximal) <= 1e-12);
        CHECK(testsupport::rel_err(e3.via_discrete, 3 * e1.via_discrete) <= 1e-12);
        const HardyNormEstimate z = hp_norm(GridFunction::zeros(g), 0.8, b);
        CHECK(z.via_square == 0.0);
        CHECK(z.via_maximal == 0.0);
        CHECK(z.via_discrete == 0.0);
    }
    SUBCASE("translation invariant") {
        const HardyNormEstimate e = hp_norm(a.values, 0.8, b), t = hp_norm(a.values.translated(-40), 0.8, b);
        CHECK(testsupport::rel_err(t.via_square, e.via_square) <= 1e-10);
        CHECK(testsupport::rel_err(t.via_maximal, e.via_maximal) <= 1e-10);
        // Sampling at fixed cube centres makes the discrete estimate invariant under shifts that preserve
        // every cube lattice in use, i.e. multiples of the coarsest cube side 2^{−N_0}.
        const HardyNormEstimate d = hp_norm(a.values.translated(3 << (12 - kCubeOffset)), 0.8, b);
        CHECK(testsupport::rel_err(d.via_discrete, e.via_discrete) <= 1e-10);
    }
    SUBCASE("the three estimates are comparable on atoms") {
        // Pairwise ratios (max/square, discrete/square, max/discrete) over an ensemble and its doubling.
        auto interval = [&](unsigned n) {
            std::array<std::pair<double, double>, 3> iv;
            iv.fill({INFINITY, 0.0});
            for (unsigned s = 0; s < n; ++s) {
                const int lvl = 3 + static_cast<int>(s % 6);
                const Atom t = make_atom(0.8, DyadicCube{lvl, {(7u * s + 1u) % (1u << lvl), 0}, 1}, s, g);
                const HardyNormEstimate e = hp_norm(t.values, 0.8, b);
                const double r[3] = {e.via_maximal / e.via_square, e.via_discrete / e.via_square,
                                     e.via_maximal / e.via_discrete};
                for (int q = 0; q < 3; ++q) iv[q] = {std::min(iv[q].first, r[q]), std::max(iv[q].second, r[q])};
            }
            return iv;
        };
        const auto a30 = interval(30), a60 = interval(60);
        for (int q = 0; q < 3; ++q) {
            MESSAGE("pair " << q << ": [" << a30[q].first << ", " << a30[q].second << "] -> [" << a60[q].first << ", "
                            << a60[q].second << "]");
            CHECK(a60[q].second / a60[q].first <= 25.0);
            CHECK(a60[q].second <= 1.25 * a30[q].second);
            CHECK(a60[q].first >= a30[q].first / 1.25);
        }
    }
}

namespace {

// White band-limited input: random amplitudes and phases on frequencies lo..hi.
GridFunction band_limited(const Grid& g, int lo, int hi, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    std::vector<double> v(g.size(), 0.0);
    const double two_pi = 2 * std::acos(-1.0);
    for (int m = lo; m <= hi; ++m) {
        const double a = nd(rng), ph = two_pi * nd(rng);
        for (std::size_t i = 0; i < g.size(); ++i) v[i] += a * std::cos(two_pi * m * g.position(i)[0] + ph);
    }
    return GridFunction(g, std::move(v));
}

bool in_16_128(const std::array<long, 2>& m) {
    const long a = std::labs(m[0]);
    return a >= 16 && a <= 128;
}

} // namespace

TEST_CASE("frame constants") {
    Grid g(1, 12);
    auto mp = std::make_shared<const MotherPair>(build_mothers(1, 0.25, g));
    const ConvolutionBank b = make_bank(mp, ScaleRange(0, 8));
    const FrameBounds fb = frame_bounds(b.psi, in_16_128);
    MESSAGE("frame bounds on 16..128: [" << fb.lower << ", " << fb.upper << "]");
    CHECK(fb.lower > 0.0);
    CHECK(std::isfinite(fb.upper));

    // p = 2: Σ_k‖Q_kf‖₂² / ‖f‖₂² lies in the frame bounds of f's spectrum.
    for (unsigned s = 0; s < 50; ++s) {
        const GridFunction f = band_limited(g, 16, 128, 300 + s);
        const double r = std::pow(hp_norm(f, 2.0, b).via_square, 2) / inner(f, f);
        CHECK(r >= fb.lower * (1 - 1e-9));
        CHECK(r <= fb.upper * (1 + 1e-9));
    }

    // The operator defect matches its Plancherel prediction on broadband input.
    const double c = 0.5 * (fb.lower + fb.upper);
    const GridFunction r = testsupport::random_function(g, 23);
    const auto S = frame_symbol(b.psi);
    const auto rh = fourier_symbol(r);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < S.size(); ++i) {
        num += (S[i] - c) * (S[i] - c) * std::norm(rh[i]);
        den += std::norm(rh[i]);
    }
    CHECK(testsupport::rel_err(reconstruction_defect(b.psi, r, c), std::sqrt(num / den)) <= 1e-9);
}

double worst_band_defect(int M) {
    Grid g(1, 12);
    auto mp = std::make_shared<const MotherPair>(build_mothers(M, 0.25, g));
    const ConvolutionBank b = make_bank(mp, ScaleRange(0, 8));
    const FrameBounds fb = frame_bounds(b.psi, in_16_128);
    const double c = 0.5 * (fb.lower + fb.upper);
    double worst = 0.0;
    for (unsigned s = 0; s < 5; ++s) worst = std::max(worst, reconstruction_defect(b.psi, band_limited(g, 16, 128, s), c));
    MESSAGE("M=" << M << " frame [" << fb.lower << ", " << fb.upper << "] c_bank " << c << " defect " << worst);
    return worst;
}

TEST_CASE("reconstruction defect inside the covered band, M = 0") {
    CHECK(worst_band_defect(0) <= 0.05);
}

// Registered as its own ctest entry: the octave ripple of the M >= 1 banks keeps this above 0.05.
TEST_CASE("[known-red] reconstruction defect inside the covered band, M >= 1") {
    for (int M : {1, 2, 3}) CHECK(worst_band_defect(M) <= 0.05);
}

TEST_CASE("make_atom") {
    for (const Grid& g : {Grid(1, 12), Grid(2, 7)}) {
        for (double p : {1.0, 0.8, 0.45}) {
            const DyadicCube q = g.dim() == 1 ? DyadicCube{6, {37, 0}, 1} : DyadicCube{3, {5, 2}, 2};
            const Atom a = make_atom(p, q, 99, g);
            CHECK(a.moment_order == static_cast<int>(std::floor(g.dim() * (1 / p - 1) + 1e-12)));
            CHECK(testsupport::rel_err(a.values.max_abs(), std::pow(q.volume(), -1 / p)) <= 1e-14);
            double l1 = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i) {
                l1 += std::abs(a.values[i]) * g.cell_volume();
                if (!q.contains(g.position(i))) CHECK(a.values[i] == 0.0);
            }
            for (const MultiIndex& al : multi_indices_up_to(g.dim(), a.moment_order)) {
                double s = 0.0;
                for (std::size_t i = 0; i < g.size(); ++i) s += a.values[i] * al.monomial(g.position(i));
                CHECK(std::abs(s * g.cell_volume()) <= 1e-9 * l1);
            }
            const Atom b = make_atom(p, q, 99, g);
            CHECK(max_abs_diff(a.values, b.values) == 0.0);
        }
        CHECK_THROWS_AS(make_atom(0.8, DyadicCube{g.log2_points() - 3, {0, 0}, g.dim()}, 1, g), std::invalid_argument);
    }
}

TEST_CASE("boundedness_experiment") {
    Grid g(1, 12);
    auto mp = std::make_shared<const MotherPair>(build_mothers(1, 0.25, g));
    auto b = std::make_shared<const ConvolutionBank>(make_bank(mp, ScaleRange(0, 8)));
    const LpsoFamily psi = LpsoFamily::convolution(std::make_shared<const KernelBank>(b->psi));
    std::vector<AtomSpec> atoms;
    for (int l = 3; l <= 6; ++l)
        for (unsigned long long s = 0; s < 3; ++s) atoms.push_back({l, s});

    SUBCASE("the bank's own family reproduces the square-function estimate") {
        const ExperimentReport r = boundedness_experiment(psi, 0.8, atoms, *b);
        REQUIRE(r.rows.size() == atoms.size());
        for (const ExperimentRow& row : r.rows) CHECK(std::abs(row.ratio - 1.0) <= 1e-12);
        CHECK(std::abs(r.slope) <= 1e-12);
    }
    SUBCASE("zero family gives zero ratios") {
        std::map<int, Kernel> zk;
        for (int k = 0; k <= 8; ++k) zk.emplace(k, Kernel(GridFunction::zeros(g)));
        const LpsoFamily zero =
            LpsoFamily::convolution(std::make_shared<const KernelBank>("zero", g, ScaleRange(0, 8), std::move(zk)));
        const ExperimentReport r = boundedness_experiment(zero, 0.8, atoms, *b);
        CHECK(r.max_ratio == 0.0);
        CHECK(r.slope == 0.0);
    }
    SUBCASE("admissible range, anchoring and CSV") {
        ExperimentOptions o;
        o.smoothness = 0.2;
        CHECK_THROWS_AS(boundedness_experiment(psi, 0.8, atoms, *b, o), std::invalid_argument);
        o.smoothness = 1.0;
        o.placement = AtomPlacement::Anchored;
        const ExperimentReport r = boundedness_experiment(psi, 0.8, atoms, *b, o);
        for (const ExperimentRow& row : r.rows) CHECK(row.cube.corner()[0] == 0.5);
        const std::string csv = r.csv();
        CHECK(csv.rfind("atom_level,seed,p,ratio,hp_square,hp_maximal,hp_discrete,sqfn_lp\n3,0,0.8,", 0) == 0);
        CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(atoms.size()) + 1);
        CHECK(gnuplot_script("x.csv").find("'x.csv' using 1:4") != std::string::npos);
    }
    CHECK(ls_slope({0, 1, 2}, {1, 3, 5}) == doctest::Approx(2.0));
}

TEST_CASE("Phi cube sums") {
    Grid g(1, 12);
    const double nu = 1.0, r = 0.7;
    SUBCASE("FFT and direct summation agree") {
        for (auto [j, k] : {std::pair{2, 5}, std::pair{6, 1}, std::pair{8, 8}}) {
            const auto c = random_centers(cubes(g, j + kCubeOffset), 31 + j);
            const GridFunction s = phi_cube_sum(c, j, k, nu, g);
            for (std::size_t x : {std::size_t{0}, std::size_t{777}, std::size_t{4095}})
                CHECK(testsupport::rel_err(s[x], phi_cube_sum_at(c, j, k, nu, g, x)) <= 1e-10);
        }
    }
    SUBCASE("calibrated constant holds on fresh inputs") {
        const ScaleRange sc(0, 8);
        std::vector<std::pair<std::string, std::function<std::vector<double>(int)>>> inputs;
        inputs.emplace_back("one", [&](int lv) { return std::vector<double>(cubes(g, lv), 1.0); });
        inputs.emplace_back("delta", [&](int lv) {
            std::vector<double> v(cubes(g, lv), 0.0);
            v[v.size() / 3] = 1.0;
            return v;
        });
        for (unsigned s = 0; s < 3; ++s)
            inputs.emplace_back("random" + std::to_string(s), [&, s](int lv) { return random_centers(cubes(g, lv), 100 + s); });
        const PhiSumCalibration cal = calibrate_phi_sum(g, sc, r, nu, inputs);
        MESSAGE("C = " << cal.C << " at j=" << cal.worst_j << " k=" << cal.worst_k << " (" << cal.worst_input << ")");
        CHECK(std::isfinite(cal.C));
        CHECK(cal.C > 0.0);

        std::mt19937_64 rng(2024);
        int violations = 0;
        for (int t = 0; t < 1000; ++t) {
            const int j = static_cast<int>(rng() % 9), k = static_cast<int>(rng() % 9);
            const std::size_t x = rng() % g.size();
            const auto c = random_centers(cubes(g, j + kCubeOffset), 5000 + t);
            const double lhs = phi_cube_sum_at(c, j, k, nu, g, x);
            const double rhs = cal.C * std::pow(2.0, std::max(0, j - k) * nu) * mjr_maximal(c, j, r, g)[x];
            violations += lhs > rhs;
        }
        CHECK(violations == 0);
    }
}

TEST_CASE("maximal square norm of atoms") {
    Grid g(1, 12);
    auto mp = std::make_shared<const MotherPair>(build_mothers(3, 0.25, g));
    const ConvolutionBank b = make_bank(mp, ScaleRange(0, 8));
    auto ratio_max = [&](unsigned first, unsigned count) {
        double m = 0.0;
        for (unsigned s = first; s < first + count; ++s) {
            const int lvl = 3 + static_cast<int>(s % 6);
            const Atom a = make_atom(0.8, DyadicCube{lvl, {(13u * s) % (1u << lvl), 0}, 1}, s, g);
            m = std::max(m, maximal_square_norm(a.values, b, 0.7, 0.8) / hp_norm(a.values, 0.8, b).via_square);
        }
        return m;
    };
    const double c30 = ratio_max(0, 30), c60 = ratio_max(0, 60);
    MESSAGE("C over 30 atoms " << c30 << ", over 60 atoms " << c60);
    CHECK(std::isfinite(c30));
    CHECK(c60 <= 1.25 * c30);
}
