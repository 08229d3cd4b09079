#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "besovkit/analysis.hpp"
#include "besovkit/convolution.hpp"
#include "besovkit/mollifier.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace besov;
using besov::testutil::fill;

namespace {

WeightSequence two_ks_weights(double s, int dim, int grid_level, int num_levels) {
    WeightParams p;
    p.dim = dim;
    p.grid_level = grid_level;
    p.num_levels = num_levels;
    p.s = s;
    return make_weights(WeightGenerator::Kind::two_ks, p);
}

}  // namespace

TEST_SUITE_BEGIN("conv");

TEST_CASE("mollifier grid moments vanish through the requested order") {
    for (int M : {0, 1, 2, 3}) {
        auto mol = build_mollifier(1, M, 0.5, 10);
        CHECK(std::abs(integral(mol.phi0) - 1.0) <= 1e-8);
        auto phi = mol.phi_grid();
        CHECK(std::abs(integral(phi)) <= 1e-8);
        double h = phi.spacing();
        for (int s = 1; s <= M; ++s) {
            double acc = 0.0;
            for (std::int64_t i = 0; i < phi.extent(0); ++i)
                acc += std::pow(phi.coord(0, i), s) * phi.at(i);
            CHECK(std::abs(acc * h) <= 1e-8);
        }
        CHECK(mol.vanishing_order >= M);
    }
    auto mol2 = build_mollifier(2, 2, 0.5, 7);
    CHECK(std::abs(integral(mol2.phi0) - 1.0) <= 1e-8);
    CHECK(mol2.vanishing_order >= 2);
}

TEST_CASE("symmetric profiles kill odd moments outright") {
    auto mol = build_mollifier(1, 0, 0.5, 9);
    double h = mol.phi0.spacing();
    double m1 = 0.0, m3 = 0.0;
    for (std::int64_t i = 0; i < mol.phi0.extent(0); ++i) {
        double x = mol.phi0.coord(0, i);
        m1 += x * mol.phi0.at(i);
        m3 += x * x * x * mol.phi0.at(i);
    }
    CHECK(std::abs(m1 * h) <= 1e-15);
    CHECK(std::abs(m3 * h) <= 1e-15);
    CHECK(mol.vanishing_order >= 1);  // odd moment beyond M comes free
}

TEST_CASE("ill-conditioned moment systems are rejected") {
    CHECK_THROWS_AS(build_mollifier(1, 20, 0.5, 10, 0.999), std::runtime_error);
    CHECK_THROWS_AS(build_mollifier(1, 0, 0.5, 3), std::invalid_argument);
}

TEST_CASE("mollifier serialization round-trip") {
    auto mol = build_mollifier(1, 2, 0.5, 8);
    write_mollifier(mol, "mol_test");
    auto back = read_mollifier("mol_test");
    CHECK(back.support_radius == mol.support_radius);
    CHECK(back.vanishing_order == mol.vanishing_order);
    REQUIRE(back.phi0.same_grid(mol.phi0));
    for (std::int64_t i = 0; i < mol.phi0.size(); ++i)
        CHECK(back.phi0.values()[i] == mol.phi0.values()[i]);
    std::remove("mol_test.csv");
    std::remove("mol_test.json");
}

TEST_CASE("conv_field annihilates low-degree polynomials in the interior") {
    const int J = 10;
    const int M = 2;
    auto mol = build_mollifier(1, M, 0.5, J);
    auto f = GridFunction::box(1, 2.0, J);
    fill(f, [](const auto& x) {
        return std::abs(x[0]) <= 1.5 ? 0.25 + x[0] - 0.5 * x[0] * x[0] : 0.0;
    });
    auto cf = conv_field(f, mol, 3);

    // layer 0 of a smooth region reproduces the function values closely
    for (double xq : {-0.5, 0.0, 0.7}) {
        std::int64_t i = static_cast<std::int64_t>((xq + 2.0) / f.spacing());
        double expect = 0.25 + f.coord(0, i) - 0.5 * f.coord(0, i) * f.coord(0, i);
        CHECK(cf.layers[0].at(i) == doctest::Approx(expect).epsilon(5e-3));
    }
    for (int k = 1; k <= 3; ++k) {
        double worst = 0.0;
        for (std::int64_t i = 0; i < f.extent(0); ++i)
            if (std::abs(f.coord(0, i)) < 0.4)
                worst = std::max(worst, std::abs(cf.layers[k].at(i)));
        CHECK(worst <= 1e-6);
    }

    auto zero = GridFunction::box(1, 2.0, J);
    auto zf = conv_field(zero, mol, 2);
    for (const auto& layer : zf.layers) CHECK(lp_norm(layer, kInf) == 0.0);

    auto ones = GridFunction::box(1, 2.0, J);
    fill(ones, [](const auto&) { return 1.0; });
    auto of = conv_field(ones, mol, 1);
    std::int64_t mid = ones.extent(0) / 2;
    CHECK(of.layers[0].at(mid) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("conv_norm basics: zero function, homogeneity, refinement stability") {
    const int J = 9;
    auto mol = build_mollifier(1, 2, 0.5, J);
    auto t = two_ks_weights(1.0, 1, J, 6);
    NormParams np;
    np.levels = 4;

    auto zero = GridFunction::box(1, 1.0, J);
    CHECK(conv_norm(zero, t, mol, np).value == 0.0);

    auto f = GridFunction::box(1, 1.0, J);
    fill(f, [](const auto& x) { return testutil::radial_bump(x, 1, 0.1, 0.3); });
    auto nf = conv_norm(f, t, mol, np);
    auto f2 = f;
    for (auto& v : f2.values()) v *= 3.5;
    auto nf2 = conv_norm(f2, t, mol, np);
    CHECK(nf2.value == doctest::Approx(3.5 * nf.value).epsilon(1e-12));
    CHECK(nf.tail_fraction < 1.0);

    // refinement stability within 5%
    auto molf = build_mollifier(1, 2, 0.5, J + 2);
    auto ff = GridFunction::box(1, 1.0, J + 2);
    fill(ff, [](const auto& x) { return testutil::radial_bump(x, 1, 0.1, 0.3); });
    auto tf = t.regenerated(J + 2);
    auto nref = conv_norm(ff, tf, molf, np);
    CHECK(std::abs(nref.value - nf.value) / nref.value < 0.05);
}

TEST_CASE("maximal field on synthetic geometric layers") {
    const int J = 6;
    ConvField cf;
    for (int k = 0; k <= 4; ++k) {
        auto layer = GridFunction::box(1, 1.0, J);
        fill(layer, [&](const auto&) { return std::exp2(-1.5 * k); });  // B = 3/2
        cf.layers.push_back(layer);
    }
    auto mf = maximal_field(cf, 2.0, 1.0, 3);  // A = 2 > -B
    for (int j = 0; j <= 3; ++j)
        for (double v : mf.values[j])
            CHECK(v == doctest::Approx(std::exp2(-1.5 * j)).epsilon(1e-12));

    ConvField zf;
    for (int k = 0; k <= 3; ++k) zf.layers.push_back(GridFunction::box(1, 1.0, J));
    auto mz = maximal_field(zf, 2.0, 1.0, 2);
    for (const auto& row : mz.values)
        for (double v : row) CHECK(v == 0.0);

    // monotone in c, and the serial route agrees bitwise
    auto f = GridFunction::box(1, 1.0, J);
    fill(f, [](const auto& x) { return testutil::radial_bump(x, 1, 0.2, 0.4); });
    ConvField rf;
    for (int k = 0; k <= 3; ++k) {
        auto layer = f;
        for (auto& v : layer.values()) v *= std::exp2(-k) * std::cos(0.1 * k);
        rf.layers.push_back(layer);
    }
    auto m1 = maximal_field(rf, 2.0, 1.0, 3);
    auto m2 = maximal_field(rf, 2.0, 2.0, 3);
    auto m1s = maximal_field_serial(rf, 2.0, 1.0, 3);
    for (int j = 0; j <= 3; ++j)
        for (std::size_t mi = 0; mi < m1.values[j].size(); ++mi) {
            CHECK(m2.values[j][mi] >= m1.values[j][mi]);
            CHECK(m1s.values[j][mi] == m1.values[j][mi]);
            CHECK(m1.values[j][mi] >=
                  local_lp_norm(rf.layers[j], kInf, m1.cubes[j][mi], 1.0) - 1e-15);
        }
}

TEST_CASE("Lemma 3.1: fitted constant is finite and refinement-stable") {
    auto run = [](int J, double r, double A) {
        auto mol = build_mollifier(1, 2, 0.5, J);
        auto f = GridFunction::box(1, 1.0, J);
        fill(f, [](const auto& x) { return testutil::radial_bump(x, 1, 0.15, 0.3); });
        return verify_lemma31(f, mol, r, 1.0, A, 3, J - 4);
    };
    auto zero_rep = [&]() {
        auto mol = build_mollifier(1, 2, 0.5, 8);
        auto z = GridFunction::box(1, 1.0, 8);
        return verify_lemma31(z, mol, 2.0, 1.0, 3.0, 2, 4);
    }();
    CHECK(zero_rep.C == 0.0);

    for (double r : {0.5, 1.0, 2.0}) {
        auto lo = run(9, r, 3.0);
        auto hi = run(10, r, 3.0);
        CHECK(std::isfinite(lo.C));
        CHECK(lo.C > 0.0);
        CHECK(std::abs(hi.C - lo.C) / lo.C < 0.2);
    }
}

TEST_CASE("Lemma 3.3: weighted maximal sums are controlled by the norm") {
    const int J = 9;
    auto mol = build_mollifier(1, 2, 0.5, J);
    auto f = GridFunction::box(1, 1.0, J);
    fill(f, [](const auto& x) { return testutil::radial_bump(x, 1, -0.1, 0.35); });
    NormParams np;
    np.p = 2;
    np.q = 2;
    np.r = 1;
    np.levels = 4;

    // sigma1 = r (p/r)' = 2
    WeightParams wp;
    wp.grid_level = J;
    wp.num_levels = 5;
    wp.s = 1.0;
    wp.sigma1 = 2.0;
    auto t = make_weights(WeightGenerator::Kind::two_ks, wp);
    auto rep = verify_lemma33(f, t, mol, 2.0, 1.0, 0.5, np);
    REQUIRE(rep.hypotheses_ok);
    CHECK(std::isfinite(rep.ratio));
    CHECK(rep.ratio > 0.0);

    auto zero = GridFunction::box(1, 1.0, J);
    auto zrep = verify_lemma33(zero, t, mol, 2.0, 1.0, 0.5, np);
    CHECK(zrep.ratio == 0.0);

    // power weight in class X
    WeightParams pp = wp;
    pp.beta = 0.25;
    pp.alpha3 = 1.0;
    auto tp = make_weights(WeightGenerator::Kind::power_times_2ks, pp);
    auto prep = verify_lemma33(f, tp, mol, 2.0, 1.0, 0.5, np);
    REQUIRE(prep.hypotheses_ok);
    CHECK(std::isfinite(prep.ratio));

    // wrong sigma1 wiring is refused, not guessed around
    WeightParams bad = wp;
    bad.sigma1 = 3.0;
    auto tb = make_weights(WeightGenerator::Kind::two_ks, bad);
    auto brep = verify_lemma33(f, tb, mol, 2.0, 1.0, 0.5, np);
    CHECK_FALSE(brep.hypotheses_ok);
}

TEST_CASE("fourier layers respect multiplier supports") {
    const int J = 8;
    auto f = GridFunction::box(1, 1.0, J);

    // single mode strictly inside one annulus: only layers j0, j0+1 respond
    double xi = M_PI * 12.0;  // v = 12: 2^5 < xi < 2^6 => j0 = 5
    fill(f, [&](const auto& x) { return std::cos(xi * x[0]); });
    int j0 = 5;
    for (int j = 0; j <= 7; ++j) {
        double amp = lp_norm(fourier_layer(f, j), kInf);
        if (j == j0 || j == j0 + 1)
            CHECK(amp > 1e-3);
        else
            CHECK(amp <= 1e-10);
    }

    // constants live in layer 0 alone
    fill(f, [](const auto&) { return 2.5; });
    CHECK(lp_norm(fourier_layer(f, 0), kInf) == doctest::Approx(2.5).epsilon(1e-12));
    for (int j = 1; j <= 6; ++j) CHECK(lp_norm(fourier_layer(f, j), kInf) <= 1e-10);

    auto t = two_ks_weights(0.5, 1, J, 7);
    fill(f, [](const auto& x) { return testutil::radial_bump(x, 1, 0.0, 0.4); });
    auto nv = fourier_lp_norm(f, t, 2.0, 2.0, 6);
    CHECK(nv.value > 0.0);
    CHECK_THROWS_AS(fourier_lp_norm(f, t, 2.0, 2.0, 40), std::invalid_argument);
}

TEST_CASE("fourier norm cross-checks the convolution norm") {
    const int J = 9;
    const double s = 1.0;
    auto mol = build_mollifier(1, 2, 0.5, J);
    NormParams np;
    np.levels = 5;
    auto t = two_ks_weights(s, 1, J, 6);
    auto f = GridFunction::box(1, 1.0, J);
    fill(f, [](const auto& x) { return testutil::radial_bump(x, 1, 0.05, 0.35); });
    double cv = conv_norm(f, t, mol, np).value;
    double fv = fourier_lp_norm(f, t, 2.0, 2.0, np.levels).value;
    double ratio = fv / cv;
    CHECK(ratio > 0.1);
    CHECK(ratio < 10.0);

    const int J2 = J + 1;
    auto mol2 = build_mollifier(1, 2, 0.5, J2);
    auto t2 = t.regenerated(J2);
    auto f2 = GridFunction::box(1, 1.0, J2);
    fill(f2, [](const auto& x) { return testutil::radial_bump(x, 1, 0.05, 0.35); });
    double ratio2 =
        fourier_lp_norm(f2, t2, 2.0, 2.0, np.levels).value / conv_norm(f2, t2, mol2, np).value;
    CHECK(std::abs(ratio2 - ratio) / ratio < 0.1);
}

TEST_SUITE_END();
