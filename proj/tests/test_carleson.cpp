#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

#include "lpslab/carleson.hpp"
#include "support.hpp"

using namespace lpslab;

namespace {

/// Brute force over every grid-aligned interval [a, a + 2^{−ℓ}) (any start a), ℓ ≤ max_level.
double shifted_cube_constant(const std::map<int, GridFunction>& mu, const ScaleRange& s, int max_level) {
    const Grid g = mu.begin()->second.grid();
    const std::size_t n = g.size();
    double best = 0.0;
    for (int lv = 0; lv <= max_level; ++lv) {
        const std::size_t w = n >> lv;
        for (std::size_t a = 0; a < n; ++a) {
            double m = 0.0;
            for (int k : s.values()) {
                if (k < lv) continue;
                for (std::size_t t = 0; t < w; ++t) m += mu.at(k)[(a + t) % n];
            }
            best = std::max(best, m / static_cast<double>(w));
        }
    }
    return best;
}

GridFunction step_function(const Grid& g, int level, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    std::vector<double> vals(std::size_t{1} << level);
    for (double& v : vals) v = nd(rng);
    std::vector<double> f(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) f[i] = vals[i >> (g.log2_points() - level)];
    return GridFunction(g, std::move(f));
}

} // namespace

TEST_CASE("dyadic cubes") {
    Grid g(2, 8);
    const DyadicCube q = cube_of(g, g.flat_index(200, 17), 3);
    CHECK(q.level == 3);
    CHECK(q.index == std::array<std::size_t, 2>{6, 0});
    CHECK(q.side() == 0.125);
    CHECK(q.volume() == 0.015625);
    CHECK(q.contains(g.position(g.flat_index(200, 17))));
    CHECK_FALSE(q.contains({0.5, 0.0}));
    CHECK(q.samples_per_side(g) == 32);
    CHECK(q.first_sample(g, 0) == 192);
    CHECK(q.to_string() == "L3[6;0]");
}

TEST_CASE("carleson_constant") {
    Grid g(1, 10);
    const ScaleRange s(0, 6);
    SUBCASE("K unit densities give K") {
        std::map<int, GridFunction> mu;
        for (int k : s.values()) mu.emplace(k, GridFunction::constant(g, 1.0));
        const CarlesonReport r = carleson_constant(mu, s, 8);
        CHECK(r.constant == doctest::Approx(7.0).epsilon(1e-14));
        CHECK(r.argmax_cube.level == 0);
        for (const auto& [lv, v] : r.per_level) CHECK(v <= r.constant);
        CHECK(r.per_level.at(3) == doctest::Approx(4.0).epsilon(1e-14));
        CHECK(r.per_level.at(8) == 0.0);
    }
    SUBCASE("single cube and scale") {
        std::map<int, GridFunction> mu;
        for (int k : s.values()) mu.emplace(k, GridFunction::zeros(g));
        const DyadicCube q0{3, {5, 0}, 1};
        std::vector<double> v(g.size(), 0.0);
        const double m = 0.37;
        for (std::size_t i = q0.first_sample(g, 0); i < q0.first_sample(g, 0) + q0.samples_per_side(g); ++i)
            v[i] = m / q0.volume();
        mu.insert_or_assign(5, GridFunction(g, v));
        const CarlesonReport r = carleson_constant(mu, s, 10);
        CHECK(r.constant == doctest::Approx(m / q0.volume()).epsilon(1e-13));
        CHECK(r.per_level.at(6) == 0.0);
    }
    SUBCASE("shifted-cube oracle for a two-level step function") {
        auto mp = std::make_shared<const MotherPair>(build_mothers(1, 0.25, g));
        const ConvolutionBank bank = make_bank(mp, s);
        const GridFunction b = step_function(g, 2, 99);
        std::map<int, GridFunction> mu;
        for (int k : s.values()) {
            const GridFunction q = bank.psi.apply(k, b);
            mu.emplace(k, q * q);
        }
        const double dyadic = carleson_constant(mu, s, 4).constant;
        const double shifted = shifted_cube_constant(mu, s, 4);
        MESSAGE("dyadic " << dyadic << " shifted " << shifted);
        CHECK(std::isfinite(dyadic));
        CHECK(shifted >= dyadic * (1 - 1e-12));
        CHECK(shifted <= 4.0 * dyadic);
    }
    SUBCASE("monotonicity and scaling") {
        std::map<int, GridFunction> mu;
        for (int k : s.values()) mu.emplace(k, map(testsupport::random_function(g, 40 + k), [](double v) { return v * v; }));
        const double base = carleson_constant(mu, ScaleRange(1, 5), 6).constant;
        CHECK(carleson_constant(mu, ScaleRange(0, 5), 6).constant >= base);
        CHECK(carleson_constant(mu, ScaleRange(1, 6), 6).constant >= base);
        CHECK(carleson_constant(mu, ScaleRange(1, 5), 9).constant >= base);
        std::map<int, GridFunction> mu3;
        for (const auto& [k, v] : mu) mu3.emplace(k, 3.0 * v);
        CHECK(carleson_constant(mu3, ScaleRange(1, 5), 6).constant == doctest::Approx(3.0 * base).epsilon(1e-15));
    }
    SUBCASE("rejections and CSV") {
        std::map<int, GridFunction> mu;
        for (int k : s.values()) mu.emplace(k, GridFunction::constant(g, 1.0));
        std::vector<double> v(g.size(), 1.0);
        v[77] = -1e-3;
        mu.insert_or_assign(4, GridFunction(g, v));
        try {
            carleson_constant(mu, s, 4);
            FAIL("negative density accepted");
        } catch (const std::domain_error& e) {
            CHECK(std::string(e.what()).find("k = 4, x_index = 77") != std::string::npos);
        }
        mu.insert_or_assign(4, GridFunction::constant(g, 1.0));
        CHECK_THROWS_AS(carleson_constant(mu, s, 11), std::invalid_argument);
        const std::string csv = carleson_constant(mu, s, 2).csv();
        CHECK(csv.rfind("# constant=7 argmax=L0[0] scale_convention=closed: 2^-k <= l(Q)\nlevel,cube_index0,normalized_mass\n", 0) == 0);
    }
}

TEST_CASE("BMO_M constants") {
    Grid g(1, 12);
    const ScaleRange s(0, 8);
    auto mp = std::make_shared<const MotherPair>(build_mothers(2, 0.25, g));
    const ConvolutionBank bank = make_bank(mp, s);

    SUBCASE("constants are annihilated") {
        CHECK(bmo_m_constant(GridFunction::constant(g, 3.0), 0, bank, 8).constant <= 1e-12);
        CHECK(dyadic_bmo_norm(GridFunction::constant(g, 3.0), 12) == 0.0);
    }
    SUBCASE("windowed polynomials vanish on interior cubes") {
        // p(x) = 1 − 3x + 2x² on [0.2, 0.8], tapered smoothly to 0 outside.
        auto [F, unused] = sample_and_integrate(
            [](const Position& x) {
                const double t = x[0];
                auto ramp = [](double u) {
                    if (u <= 0) return 0.0;
                    if (u >= 1) return 1.0;
                    const double a = std::exp(-1 / u), b = std::exp(-1 / (1 - u));
                    return a / (a + b);
                };
                const double w = ramp((t - 0.1) / 0.1) * ramp((0.9 - t) / 0.1);
                return w * (1 - 3 * t + 2 * t * t);
            },
            g);
        (void)unused;
        const CubeFilter interior = [](const DyadicCube& q) {
            const double reach = 0.25 * q.side();
            return q.corner()[0] - reach >= 0.2 && q.corner()[0] + q.side() + reach <= 0.8;
        };
        const CarlesonReport r = bmo_m_constant(F, 2, bank, 8, interior);
        MESSAGE("interior BMO_2 constant " << r.constant);
        CHECK(r.constant <= 1e-9);
        CHECK(bmo_m_constant(F, 2, bank, 8).constant > 1e-3);  // the taper is seen once edge cubes count
        CHECK_THROWS_AS(bmo_m_constant(F, 3, bank, 8), std::invalid_argument);
    }
    SUBCASE("dyadic BMO norm") {
        std::vector<double> v(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) v[i] = i < g.size() / 2 ? 1.0 : 0.0;
        CHECK(dyadic_bmo_norm(GridFunction(g, v), 12) == doctest::Approx(0.5).epsilon(1e-15));
        const GridFunction f = testsupport::random_function(g, 8);
        CHECK(dyadic_bmo_norm(f, 6) <= dyadic_bmo_norm(f, 9));
    }
    SUBCASE("M = 0 comparability with the classical dyadic BMO norm") {
        auto mp0 = std::make_shared<const MotherPair>(build_mothers(1, 0.25, g));
        const ConvolutionBank b1 = make_bank(mp0, s);
        double lo = INFINITY, hi = 0.0;
        for (unsigned seed = 0; seed < 20; ++seed) {
            const GridFunction f = step_function(g, 2 + static_cast<int>(seed % 5), 500 + seed);
            const double ratio = bmo_m_constant(f, 0, b1, 8).constant / std::pow(dyadic_bmo_norm(f, 12), 2);
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
        std::vector<double> saw(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) saw[i] = g.position(i)[0];
        const GridFunction sw(g, saw);
        const double rs = bmo_m_constant(sw, 0, b1, 8).constant / std::pow(dyadic_bmo_norm(sw, 12), 2);
        MESSAGE("step ensemble c=" << lo << " C=" << hi << "; sawtooth " << rs);
        CHECK(hi / lo <= 16.0);
        CHECK(rs >= lo / 2);
        CHECK(rs <= 2 * hi);
    }
}
