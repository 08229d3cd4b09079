#include <cmath>
#include <cstdio>
#include <random>

#include <stdexcept>
#include "besovkit/convolution.hpp"
#include "besovkit/grid.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace besov;
using besov::testutil::fill;

TEST_SUITE_BEGIN("grid");

TEST_CASE("cubes_in_box enumerates the tiling cubes") {
    Box b1{1, {-1, 0, 0}, {1, 0, 0}};
    auto cubes = cubes_in_box(0, b1);
    REQUIRE(cubes.size() == 2);
    CHECK(cubes[0].m[0] == -1);
    CHECK(cubes[1].m[0] == 0);

    Box b2{1, {0, 0, 0}, {1, 0, 0}};
    cubes = cubes_in_box(2, b2);
    REQUIRE(cubes.size() == 4);
    for (int i = 0; i < 4; ++i) CHECK(cubes[i].m[0] == i);

    Box b3{2, {0, 0, 0}, {1, 1, 0}};
    CHECK(cubes_in_box(1, b3).size() == 4);
}

TEST_CASE("local_lp_norm on constants and monomials") {
    auto f = GridFunction::box(1, 1.0, 10);
    fill(f, [](const auto&) { return 1.0; });
    for (int k = 0; k <= 4; ++k) {
        DyadicCube q{1, k, {0, 0, 0}};
        CHECK(local_lp_norm(f, 2.0, q) == doctest::Approx(std::pow(2.0, -0.5 * k)).epsilon(1e-12));
        CHECK(local_lp_norm(f, kInf, q) == 1.0);
    }
    fill(f, [](const auto& x) { return x[0]; });
    DyadicCube unit{1, 0, {0, 0, 0}};
    CHECK(local_lp_norm(f, 2.0, unit) ==
          doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-6));
}

TEST_CASE("midpoint quadrature converges at order >= 2") {
    double exact = 0.25;  // int_0^1 x^3
    double errs[2];
    for (int pass = 0; pass < 2; ++pass) {
        auto f = GridFunction::box(1, 1.0, 8 + 2 * pass);
        fill(f, [](const auto& x) { return x[0] > 0 ? x[0] * x[0] * x[0] : 0.0; });
        DyadicCube unit{1, 0, {0, 0, 0}};
        errs[pass] = std::abs(local_power_integral(f, 1.0, unit) - exact);
    }
    CHECK(errs[0] / errs[1] > 8.0);
}

TEST_CASE("rank-k cubes tile the box exactly") {
    std::mt19937_64 rng(7);
    auto f = GridFunction::box(1, 1.0, 8);
    for (auto& v : f.values()) v = std::uniform_real_distribution<double>(-1, 1)(rng);
    for (double p : {1.0, 2.0}) {
        double whole = std::pow(lp_norm(f, p), p);
        for (int k = 0; k <= 3; ++k) {
            double acc = 0.0;
            for (const auto& q : cubes_in_box(k, domain_box(f)))
                acc += std::pow(local_lp_norm(f, p, q), p);
            CHECK(acc == doctest::Approx(whole).epsilon(1e-13));
        }
    }

    auto g = GridFunction::box(2, 1.0, 5);
    for (auto& v : g.values()) v = std::uniform_real_distribution<double>(-1, 1)(rng);
    double whole = std::pow(lp_norm(g, 2.0), 2.0);
    double acc = 0.0;
    for (const auto& q : cubes_in_box(2, domain_box(g)))
        acc += std::pow(local_lp_norm(g, 2.0, q), 2.0);
    CHECK(acc == doctest::Approx(whole).epsilon(1e-13));
}

TEST_CASE("cube outside the domain raises") {
    auto f = GridFunction::box(1, 1.0, 6);
    DyadicCube q{1, 2, {17, 0, 0}};
    CHECK_THROWS_WITH_AS(local_lp_norm(f, 2.0, q), "cube outside domain", std::domain_error);
}

TEST_CASE("convolution with a unit-mass cell reproduces the kernel") {
    const int J = 8;
    auto f = GridFunction::box(1, 1.0, J);
    double h = f.spacing();
    std::int64_t j0 = 77;
    f.at(j0) = 1.0 / h;
    auto g = GridFunction::kernel(1, 40, J);
    fill(g, [&](const auto& x) { return testutil::bump1(x[0] / (40 * h)); });

    for (auto* route : {&convolve_direct_serial, &convolve_direct, &convolve_fft}) {
        auto out = (*route)(f, g);
        REQUIRE(out.same_grid(f));
        double worst = 0.0;
        for (std::int64_t i = 0; i < out.extent(0); ++i) {
            // g evaluated at x_i - x_{j0} = (i - j0) h, its sample i - j0 + 40
            double expect = g.value_or_zero(i - j0 + 40);
            worst = std::max(worst, std::abs(out.at(i) - expect));
        }
        CHECK(worst <= 1e-10);
    }
}

TEST_CASE("convolving a constant with a unit-mass kernel averages to one") {
    const int J = 7;
    auto f = GridFunction::box(1, 2.0, J);
    fill(f, [](const auto&) { return 1.0; });
    auto g = GridFunction::kernel(1, 32, J);
    fill(g, [&](const auto& x) { return testutil::bump1(x[0] * 4.0); });
    double mass = integral(g);
    for (auto& v : g.values()) v /= mass;
    auto out = convolve(f, g);
    for (std::int64_t i = 0; i < out.extent(0); ++i) {
        if (std::abs(out.coord(0, i)) < 1.5) CHECK(out.at(i) == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("box kernels convolve to the closed-form triangle") {
    const int J = 8;
    const double w = 0.5;
    std::int64_t W = static_cast<std::int64_t>(std::llround(0.5 * w * (1 << J)));
    auto box_profile = [&](const auto& x) { return std::abs(x[0]) <= 0.5 * w ? 1.0 / w : 0.0; };
    // embed one factor in a wider kernel grid so the output box holds the triangle
    auto bw = GridFunction::kernel(1, 3 * W, J);
    fill(bw, box_profile);
    auto b = GridFunction::kernel(1, W, J);
    fill(b, box_profile);
    for (auto* k : {&bw, &b}) {
        double mass = integral(*k);
        for (auto& v : k->values()) v /= mass;
    }
    auto tri = convolve_direct(bw, b);
    // triangle (w - |x|) / w^2, height 1/w at the center
    std::int64_t c = (tri.extent(0) - 1) / 2;
    CHECK(tri.at(c) == doctest::Approx(1.0 / w).epsilon(2e-2));
    for (double xq : {0.1, 0.25, -0.3}) {
        std::int64_t i = c + static_cast<std::int64_t>(std::llround(xq * (1 << J)));
        double expect = (w - std::abs(tri.coord(0, i))) / (w * w);
        CHECK(tri.at(i) == doctest::Approx(expect).epsilon(3e-2));
    }
}

TEST_CASE("convolution is symmetric and the routes agree") {
    const int J = 7;
    auto a = GridFunction::kernel(1, 30, J);
    auto b = GridFunction::kernel(1, 50, J);
    fill(a, [&](const auto& x) { return testutil::bump1(x[0] / (30 * a.spacing())) * 1.7; });
    fill(b, [&](const auto& x) { return x[0] * testutil::bump1(x[0] / (50 * b.spacing())); });
    auto ab = convolve_direct(a, b);
    auto ba = convolve_direct(b, a);
    auto fft = convolve_fft(a, b);
    auto ser = convolve_direct_serial(a, b);
    std::int64_t ca = (ab.extent(0) - 1) / 2, cb = (ba.extent(0) - 1) / 2;
    for (std::int64_t off = -ca; off <= ca; ++off) {
        CHECK(std::abs(ab.at(ca + off) - ba.at(cb + off)) <= 1e-10);
        CHECK(std::abs(ab.at(ca + off) - fft.at(ca + off)) <= 1e-10);
        CHECK(std::abs(ab.at(ca + off) - ser.at(ca + off)) <= 1e-10);
    }

    auto f2 = GridFunction::box(2, 1.0, 5);
    auto g2 = GridFunction::kernel(2, 10, 5);
    fill(f2, [](const auto& x) { return std::cos(3 * x[0]) * x[1]; });
    fill(g2, [&](const auto& x) {
        return testutil::bump1(x[0] / (10 * g2.spacing())) * testutil::bump1(x[1] / (10 * g2.spacing()));
    });
    auto d2 = convolve_direct(f2, g2);
    auto s2 = convolve_direct_serial(f2, g2);
    auto x2 = convolve_fft(f2, g2);
    REQUIRE(d2.same_grid(f2));
    for (std::int64_t i = 0; i < d2.size(); ++i) {
        CHECK(std::abs(d2.values()[i] - s2.values()[i]) <= 1e-10);
        CHECK(std::abs(d2.values()[i] - x2.values()[i]) <= 1e-10);
    }
}

TEST_CASE("rescale_kernel preserves mass and shrinks support") {
    const int J = 9;
    auto g = GridFunction::kernel(1, 128, J);
    const double sigma = 128.0 / 6.0 * g.spacing();
    fill(g, [&](const auto& x) {
        return std::abs(x[0]) <= 128 * g.spacing() ? std::exp(-0.5 * x[0] * x[0] / (sigma * sigma))
                                                   : 0.0;
    });
    double mass = integral(g);
    for (auto& v : g.values()) v /= mass;
    for (int j = 1; j <= 4; ++j) {
        auto gj = rescale_kernel(g, j);
        CHECK(integral(gj) == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(gj.extent(0) == 2 * (128 >> j) + 1);
        double sup = lp_norm(gj, kInf);
        CHECK(sup == doctest::Approx(std::ldexp(lp_norm(g, kInf), j)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(rescale_kernel(g, 7), std::invalid_argument);
    CHECK(rescale_kernel(g, 0).same_grid(g));
}

TEST_CASE("CSV round-trip is exact") {
    std::mt19937_64 rng(99);
    auto f = GridFunction::box(2, 1.0, 4);
    for (auto& v : f.values()) v = std::uniform_real_distribution<double>(-3, 3)(rng);
    std::string path = "grid_roundtrip_test.csv";
    write_csv(f, path);
    auto g = read_csv(path);
    REQUIRE(g.same_grid(f));
    for (std::int64_t i = 0; i < f.size(); ++i) CHECK(f.values()[i] == g.values()[i]);
    std::remove(path.c_str());

    auto k = GridFunction::kernel(1, 9, 5);
    fill(k, [](const auto& x) { return x[0] + 0.125; });
    write_csv(k, path);
    auto k2 = read_csv(path);
    REQUIRE(k2.same_grid(k));
    CHECK(k2.node_centered());
    for (std::int64_t i = 0; i < k.size(); ++i) CHECK(k.values()[i] == k2.values()[i]);
    std::remove(path.c_str());
}

TEST_SUITE_END();
