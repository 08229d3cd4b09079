#pragma once

#include <optional>
#include <vector>

#include "besovkit/grid.hpp"

namespace besov {

/// A positive sequence truncated at N terms, optionally continued by an
/// analytic geometric tail a_k = a_{N-1} * ratio^{k-N+1} for k >= N.
struct PositiveSequence {
    std::vector<double> terms;
    std::optional<double> tail_ratio;

    static PositiveSequence geometric(double first, double ratio, std::size_t n,
                                      bool with_tail = true);

    /// Extend the stored terms to at least len entries via the tail model.
    PositiveSequence materialized(std::size_t len) const;

    double term(std::size_t k) const;
    void check_positive() const;
};

/// Exponent bookkeeping: q_mu = q/mu, p_r = p/r and their Hoelder conjugates.
struct ExponentPack {
    double p = 2, q = 2, r = 1, theta = 1, mu = 1;

    double q_mu() const { return q / mu; }
    double p_r() const { return p / r; }
    double p_theta() const { return p / theta; }
    double q_mu_conj() const;
    double p_r_conj() const;
    double p_theta_conj() const;
    /// sigma_1 = r * (p/r)' with the conventions of the theta-form.
    double sigma1_from(double rr) const;
};

/// Conjugate Hoelder exponent: 1/s + 1/s' = 1, with 1 <-> inf.
double conjugate_exponent(double s);

/// (sum_k |a_k|^q)^{1/q}, using the closed-form geometric tail when modeled;
/// q = inf takes the supremum.
double lq_norm(const PositiveSequence& a, double q);

enum class HardyDirection { tail_2_12, head_2_13 };

/// sup over n <= n_max of (sum_{k<=n} b^s)^{1/s} (sum_{k>=n} b^{-s'})^{1/s'}
/// for the tail direction, and the mirrored product for the head direction.
double hardy_condition(const PositiveSequence& beta, double s, HardyDirection direction,
                       std::size_t n_max);

/// Builds b from a by exact tail (or head) summation and returns the ratio
/// (sum beta^s b^s)^{1/s} / (sum beta^s a^s)^{1/s}.
double hardy_verify(const PositiveSequence& a, const PositiveSequence& beta, double s,
                    HardyDirection direction);

/// Stability probe used to operationalize "finite sup": value at 2*n_max is
/// within rel_tol of the value at n_max.
struct HardyProbe {
    double value_half = 0;
    double value_full = 0;
    bool stable = false;
};
HardyProbe hardy_condition_probe(const PositiveSequence& beta, double s,
                                 HardyDirection direction, std::size_t n_max = 256,
                                 double rel_tol = 0.01);

}  // namespace besov
