#include <doctest.h>

#include <cmath>
#include <memory>

#include "lpslab/moments.hpp"
#include "support.hpp"

using namespace lpslab;

namespace {

// tests/oracles/moments_oracle.out
constexpr double kC2 = 0.009882102266487389389253152;
constexpr double kC4 = 0.0002069602266487389389253152;
constexpr double kC20_2d = 0.008165975106892457695337402;
constexpr double kC22_2d = 0.00004989518507532441914941152;

GridFunction modulation(const Grid& g) {
    return sample_and_integrate([](const Position& x) { return 1.0 + 0.5 * std::sin(2 * M_PI * x[0]); }, g).first;
}

/// Q_k ∘ (multiplication by 1 + sin(2πx)/2): a family with x-dependent moments.
LpsoFamily modulated_family(std::shared_ptr<const KernelBank> bank) {
    return LpsoFamily::composed(bank, [a = modulation(bank->grid())](const GridFunction& f) { return a * f; }, "a");
}

} // namespace

TEST_CASE("moment matrix") {
    Grid g(1, 12);
    const MotherPair mp = build_mothers(1, 0.25, g);
    SUBCASE("phi moments against the quadrature oracle") {
        CHECK(std::abs(mp.phi_moment(MultiIndex({2})) - kC2) <= 1e-14);
        CHECK(std::abs(mp.phi_moment(MultiIndex({4})) - kC4) <= 1e-14);
        const MotherPair m2 = build_mothers(1, 0.25, Grid(2, 8));
        CHECK(std::abs(m2.phi_moment(MultiIndex({2, 0})) - kC20_2d) <= 1e-14);
        CHECK(std::abs(m2.phi_moment(MultiIndex({2, 2})) - kC22_2d) <= 1e-15);
        CHECK(std::abs(m2.phi_moment(MultiIndex({1, 1}))) <= 1e-16);
    }
    for (int dim : {1, 2}) {
        const MotherPair m = build_mothers(1, 0.25, Grid(dim, dim == 1 ? 12 : 8));
        const MomentMatrix mm = moment_matrix(m, 3);
        CAPTURE(dim);
        for (const auto& a : mm.indices)
            for (const auto& b : mm.indices) {
                if (a == b) CHECK(std::abs(mm.at(a, b) - a.factorial()) <= 1e-9);
                else if (!a.leq(b)) CHECK(mm.at(a, b) == 0.0);
            }
        CHECK(std::isfinite(mm.c0));
    }
    const MomentMatrix mm = moment_matrix(mp, 3);
    CHECK(std::abs(mm.at(MultiIndex({0}), MultiIndex({1}))) <= 1e-10);
    // M_{0,2} = C_2, M_{1,3} = 3C_2; odd moments of the even φ vanish.
    CHECK(std::abs(mm.at(MultiIndex({0}), MultiIndex({2})) - kC2) <= 1e-13);
    CHECK(std::abs(mm.at(MultiIndex({1}), MultiIndex({3})) - 3 * kC2) <= 1e-13);
    CHECK(std::abs(mm.c0 - (1 + 1 + 2 + 6 + 4 * kC2)) <= 1e-12);
    CHECK_THROWS_AS(moment_matrix(mp, -1), std::invalid_argument);
}

TEST_CASE("moment tables") {
    Grid g(1, 12);
    auto mp = std::make_shared<const MotherPair>(build_mothers(2, 0.25, g));
    const ConvolutionBank bank = make_bank(mp, ScaleRange(0, 8));
    SUBCASE("Q_k with psi in D_M annihilates through M") {
        const MomentTable t = moment_table(LpsoFamily::convolution(std::make_shared<const KernelBank>(bank.psi)), 2);
        CHECK(t.sup_abs(0, 2) <= 1e-9);
    }
    SUBCASE("P_k has unit mass") {
        const MomentTable t = moment_table(LpsoFamily::convolution(std::make_shared<const KernelBank>(bank.phi)), 2);
        for (int k = 0; k <= 8; ++k) {
            CHECK(std::abs(t.at(k, MultiIndex({0}))[17] - 1.0) <= 1e-10);
            // φ_k fixed through order 2: [[P_k]]_2 = 2^{2k}·C_2·2^{−2k} = C_2.
            CHECK(std::abs(t.at(k, MultiIndex({2}))[0] - kC2) <= 1e-12);
        }
    }
    SUBCASE("closed form [[P_k D^alpha]]_beta = 2^{k|alpha|} M_{alpha,beta}") {
        const MomentMatrix mm = moment_matrix(*mp, 2);
        for (int k : {0, 2, 4})
            for (int a = 0; a <= 2; ++a)
                for (int b = 0; b <= 2; ++b) {
                    const double q = p_derivative_moment(*mp, MultiIndex({a}), MultiIndex({b}), k);
                    const double closed = std::ldexp(mm.at(MultiIndex({a}), MultiIndex({b})), k * a);
                    CAPTURE(k);
                    CAPTURE(a);
                    CAPTURE(b);
                    CHECK(std::abs(q - closed) <= 1e-8 * std::max(1.0, std::abs(closed)));
                    // Grid samples resolve the kernel at k ≤ 2 only (64 samples per radius at k = 4).
                    if (k <= 2)
                        CHECK(std::abs(p_derivative_moment_sampled(*mp, MultiIndex({a}), MultiIndex({b}), k, g) -
                                       closed) <= 1e-8 * std::max(1.0, std::abs(closed)));
                }
        const MotherPair m2 = build_mothers(1, 0.25, Grid(2, 8));
        const MomentMatrix mm2 = moment_matrix(m2, 2);
        for (const auto& a : mm2.indices)
            for (const auto& b : mm2.indices) {
                const double closed = std::ldexp(mm2.at(a, b), 2 * a.order());
                CHECK(std::abs(p_derivative_moment(m2, a, b, 2) - closed) <= 1e-8 * std::max(1.0, std::abs(closed)));
            }
    }
    SUBCASE("decay budget") {
        const LpsoFamily fam = LpsoFamily::convolution(std::make_shared<const KernelBank>(bank.psi));
        MomentOptions o;
        o.decay_N = 3.0;
        CHECK_NOTHROW(moment_table(fam, 1, o));
        CHECK_THROWS_AS(moment_table(fam, 2, o), std::domain_error);
    }
    SUBCASE("CSV layout") {
        const ScaleRange s(2, 3);
        Grid small(1, 8);
        auto m8 = std::make_shared<const MotherPair>(build_mothers(1, 0.25, small));
        const MomentTable t = moment_table(LpsoFamily::convolution(std::make_shared<const KernelBank>(make_bank(m8, s).psi)), 1);
        const std::string csv = t.csv();
        CHECK(csv.rfind("k,alpha,x_index,value\n2,0,0,", 0) == 0);
        CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 2 * 2 * 256);
    }
}

TEST_CASE("three evaluation paths for moments agree") {
    Grid g(1, 8);
    const ScaleRange s(0, 4);
    auto mp = std::make_shared<const MotherPair>(build_mothers(1, 0.25, g));
    auto psi = std::make_shared<const KernelBank>(make_bank(mp, s).psi);
    const LpsoFamily conv = LpsoFamily::convolution(psi);
    const LpsoFamily tab =
        LpsoFamily::tabulate(g, s, [&](int k, std::size_t i, std::size_t j) { return conv.kernel(k, i, j); });
    const LpsoFamily comp = LpsoFamily::composed(psi, [](const GridFunction& f) { return f; }, "I");
    const MomentTable a = moment_table(conv, 3), b = moment_table(tab, 3), c = moment_table(comp, 3);
    for (const auto& [key, v] : a.entries()) {
        const double scale = std::max(1.0, v.max_abs());
        CHECK(max_abs_diff(v, b.at(key.first, key.second)) <= 1e-11 * scale);
        CHECK(max_abs_diff(v, c.at(key.first, key.second)) <= 1e-11 * scale);
    }

    // x-dependent moments: block trick against row quadrature of the tabulated kernel ψ_k(x−y)a(y).
    const LpsoFamily mod = modulated_family(psi);
    const GridFunction aa = modulation(g);
    const LpsoFamily mod_tab = LpsoFamily::tabulate(
        g, s, [&](int k, std::size_t i, std::size_t j) { return conv.kernel(k, i, j) * aa[j]; });
    for (int blocks : {16, 32}) {
        MomentOptions o;
        o.blocks_per_axis = blocks;
        const MomentTable m1 = moment_table(mod, 2, o), m2 = moment_table(mod_tab, 2);
        for (const auto& [key, v] : m2.entries())
            CHECK(max_abs_diff(v, m1.at(key.first, key.second)) <= 1e-12 * std::max(1.0, v.max_abs()));
    }
}

TEST_CASE("correction cascade") {
    Grid g(1, 12);
    const ScaleRange s(0, 8);
    auto mp = std::make_shared<const MotherPair>(build_mothers(1, 0.25, g));
    const ConvolutionBank bank = make_bank(mp, s);
    auto psi = std::make_shared<const KernelBank>(bank.psi);
    const int L = 2;
    const LpsoFamily fam = modulated_family(psi);
    const CascadeResult res = correction_cascade(fam, L, bank);
    const MomentMatrix mm = moment_matrix(*mp, L);
    REQUIRE(res.staged.size() == L + 1);
    const double base_scale = res.base.sup_abs(0, L);
    MESSAGE("base moment scale " << base_scale);
    CHECK(base_scale > 1e-3);

    SUBCASE("stage 0 removes the mass") { CHECK(res.staged[0].sup_abs(0, 0) <= 1e-8); }
    SUBCASE("stage m annihilates every |alpha| <= m") {
        for (int m = 0; m <= L; ++m) CHECK(res.staged[m].sup_abs(0, m) <= 1e-7 * base_scale);
    }
    SUBCASE("recomputed moments of the corrected family match the staged table") {
        const MomentTable direct = moment_table(*res.corrected, L);
        for (const auto& [key, v] : res.staged.back().entries())
            CHECK(max_abs_diff(v, direct.at(key.first, key.second)) <= 1e-8 * std::max(1.0, base_scale));
    }
    SUBCASE("growth bound holds pointwise") {
        const GrowthReport gr = growth_bound_check(res.base, res.staged, mm);
        MESSAGE("growth ratios " << gr.max_ratio[0] << " " << gr.max_ratio[1] << " " << gr.max_ratio[2] << " c0 "
                                 << gr.c0);
        CHECK(gr.violations == 0);
        CHECK(gr.points_checked == 3L * 9 * 4096);
        CHECK(gr.max_ratio[0] <= 1.0 + gr.c0);
        const std::string csv = gr.csv();
        CHECK(csv.rfind("stage,max_ratio,bound,violations,points_checked,c0\n0,", 0) == 0);
    }
    SUBCASE("zero base table gives ratio 0") {
        MomentTable zero(s, L, 1);
        for (int k : s.values())
            for (const auto& a : multi_indices_up_to(1, L)) zero.set(k, a, GridFunction::zeros(g));
        const GrowthReport gr = growth_bound_check(zero, {zero, zero}, mm);
        CHECK(gr.violations == 0);
        CHECK(gr.max_ratio[0] == 0.0);
    }
    SUBCASE("already annihilating base family is returned unchanged") {
        auto mp3 = std::make_shared<const MotherPair>(build_mothers(3, 0.25, g));
        const ConvolutionBank b3 = make_bank(mp3, s);
        const LpsoFamily q = LpsoFamily::convolution(std::make_shared<const KernelBank>(b3.psi));
        const CascadeResult r3 = correction_cascade(q, L, b3);
        const auto& cv = std::get<CorrectedVariant>(r3.corrected->variant());
        CHECK(cv.coefficients.sup_abs(0, L) <= 1e-9);
        const GridFunction f = testsupport::random_function(g, 3);
        for (int k : {0, 4, 8}) CHECK(max_abs_diff(r3.corrected->apply(k, f), q.apply(k, f)) <= 1e-9 * q.apply(k, f).max_abs());
    }
    SUBCASE("the corrected family keeps its kernel bounds") {
        const CascadeResult r1 = correction_cascade(fam, 1, bank);
        const double N = 1 + 2 * 1 + 2 * 0.5;
        const CertificateRefinement base = certify_with_refinement(
            LpsoFamily::composed(psi, std::get<ComposedVariant>(fam.variant()).inner, "a"), N, 1, 0.5, 6);
        const CertificateRefinement corr = certify_with_refinement(*r1.corrected, N, 1, 0.5, 6);
        MESSAGE("base size " << base.fine.C_size << " corrected size " << corr.fine.C_size << " holder "
                             << corr.coarse.C_holder << "/" << corr.fine.C_holder);
        CHECK(std::isfinite(corr.fine.C_size));
        CHECK(std::isfinite(corr.fine.C_deriv));
        CHECK(std::isfinite(corr.fine.C_holder));
        CHECK_FALSE(corr.failed);
    }
}
