#include <cmath>
#include <random>
#include <stdexcept>

#include "besovkit/sequences.hpp"
#include "doctest.h"

using namespace besov;

TEST_SUITE_BEGIN("sequences");

TEST_CASE("conjugate exponents") {
    CHECK(conjugate_exponent(2.0) == 2.0);
    CHECK(conjugate_exponent(1.0) == kInf);
    CHECK(conjugate_exponent(kInf) == 1.0);
    CHECK(conjugate_exponent(4.0) == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
    CHECK_THROWS_AS(conjugate_exponent(0.5), std::invalid_argument);

    // involution over a spread of exponents
    for (double s : {1.5, 2.0, 3.0, 7.0})
        CHECK(conjugate_exponent(conjugate_exponent(s)) == doctest::Approx(s));
    CHECK(conjugate_exponent(conjugate_exponent(1.0)) == 1.0);
    CHECK(conjugate_exponent(conjugate_exponent(kInf)) == kInf);
}

TEST_CASE("exponent pack") {
    ExponentPack e;
    e.p = 2;
    e.q = 2;
    e.r = 1;
    e.mu = 0.5;
    CHECK(e.q_mu() == 4.0);
    CHECK(e.q_mu_conj() == doctest::Approx(4.0 / 3.0));
    CHECK(e.sigma1_from(1.0) == doctest::Approx(2.0));  // r * (p/r)' = 1 * 2
    CHECK(e.sigma1_from(2.0) == kInf);                  // r = p
}

TEST_CASE("lq norms with geometric tails") {
    auto a = PositiveSequence::geometric(1.0, 0.5, 8);
    CHECK(lq_norm(a, 1.0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(lq_norm(a, 2.0) == doctest::Approx(std::sqrt(4.0 / 3.0)).epsilon(1e-15));

    PositiveSequence ones;
    ones.terms.assign(16, 1.0);
    CHECK(lq_norm(ones, kInf) == 1.0);
}

TEST_CASE("lq norm is monotone nonincreasing in q") {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        PositiveSequence a;
        for (int k = 0; k < 24; ++k)
            a.terms.push_back(std::uniform_real_distribution<double>(0.05, 2.0)(rng));
        double prev = kInf;
        bool first = true;
        for (double q : {0.5, 1.0, 1.5, 2.0, 4.0, kInf}) {
            double v = lq_norm(a, q);
            if (!first) CHECK(v <= prev * (1.0 + 1e-12));
            prev = v;
            first = false;
        }
    }
}

TEST_CASE("hardy_condition on the worked examples") {
    // beta_k = 2^k, s = 1 (s' = inf), tail direction: sup_n (2^{n+1}-1) 2^{-n} -> 2
    auto beta = PositiveSequence::geometric(1.0, 2.0, 64);
    double v = hardy_condition(beta, 1.0, HardyDirection::tail_2_12, 60);
    CHECK(v == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(v <= 2.0 * (1.0 + 1e-12));

    // beta_k = 2^{-k}, s = 1, head direction: sup_n 2^{-n+1} * 2^n = 2
    auto beta2 = PositiveSequence::geometric(1.0, 0.5, 64);
    double v2 = hardy_condition(beta2, 1.0, HardyDirection::head_2_13, 60);
    CHECK(v2 == doctest::Approx(2.0).epsilon(1e-12));

    // beta_k = 1, s = 2: grows without bound
    PositiveSequence flat;
    flat.terms.assign(600, 1.0);
    double v128 = hardy_condition(flat, 2.0, HardyDirection::tail_2_12, 128);
    double v256 = hardy_condition(flat, 2.0, HardyDirection::tail_2_12, 256);
    CHECK(v256 > v128 * 1.1);
}

TEST_CASE("hardy_condition_probe flags stability") {
    auto good = PositiveSequence::geometric(1.0, 2.0, 600);
    auto probe = hardy_condition_probe(good, 1.0, HardyDirection::tail_2_12);
    CHECK(probe.stable);

    PositiveSequence flat;
    flat.terms.assign(600, 1.0);
    auto bad = hardy_condition_probe(flat, 2.0, HardyDirection::tail_2_12);
    CHECK_FALSE(bad.stable);
}

TEST_CASE("hardy_verify closed-form ratio") {
    // a_k = 2^{-k}, beta_k = 2^{k/2}, s = 2, tail case: b_k = 2 a_k so the ratio is 2
    auto a = PositiveSequence::geometric(1.0, 0.5, 48);
    auto beta = PositiveSequence::geometric(1.0, std::sqrt(2.0), 48);
    double ratio = hardy_verify(a, beta, 2.0, HardyDirection::tail_2_12);
    CHECK(std::abs(ratio - 2.0) <= 1e-9);
}

TEST_CASE("hardy_verify single-term identity") {
    PositiveSequence a;
    a.terms = {3.0};
    PositiveSequence beta;
    beta.terms = {1.0};
    CHECK(hardy_verify(a, beta, 2.0, HardyDirection::tail_2_12) == doctest::Approx(1.0));
}

TEST_CASE("hardy_verify stable under truncation doubling") {
    for (std::size_t n : {64, 128}) {
        (void)n;
    }
    auto make = [](std::size_t n) {
        PositiveSequence a, beta;
        for (std::size_t k = 0; k < n; ++k) {
            a.terms.push_back(1.0 / ((k + 1.0) * (k + 1.0)));
            beta.terms.push_back(std::pow(2.0, 0.25 * static_cast<double>(k)));
        }
        return std::pair{a, beta};
    };
    auto [a64, b64] = make(64);
    auto [a128, b128] = make(128);
    double r64 = hardy_verify(a64, b64, 2.0, HardyDirection::tail_2_12);
    double r128 = hardy_verify(a128, b128, 2.0, HardyDirection::tail_2_12);
    CHECK(std::abs(r128 - r64) / r64 < 0.05);
    CHECK(r128 < 2.0 * r64);
}

TEST_SUITE_END();
