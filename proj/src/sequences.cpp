#include "besovkit/sequences.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace besov {

PositiveSequence PositiveSequence::geometric(double first, double ratio, std::size_t n,
                                             bool with_tail) {
    if (first <= 0 || ratio <= 0)
        throw std::invalid_argument("geometric sequence needs positive data");
    PositiveSequence s;
    s.terms.resize(n);
    double v = first;
    for (std::size_t k = 0; k < n; ++k, v *= ratio) s.terms[k] = v;
    if (with_tail) s.tail_ratio = ratio;
    return s;
}

PositiveSequence PositiveSequence::materialized(std::size_t len) const {
    PositiveSequence out = *this;
    if (out.terms.size() >= len) return out;
    if (!tail_ratio) throw std::invalid_argument("sequence too short and no tail model");
    double v = terms.empty() ? 0.0 : terms.back();
    while (out.terms.size() < len) {
        v *= *tail_ratio;
        out.terms.push_back(v);
    }
    return out;
}

double PositiveSequence::term(std::size_t k) const {
    if (k < terms.size()) return terms[k];
    if (!tail_ratio || terms.empty()) return 0.0;
    return terms.back() * std::pow(*tail_ratio, static_cast<double>(k - terms.size() + 1));
}

void PositiveSequence::check_positive() const {
    for (double t : terms)
        if (!(t > 0)) throw std::invalid_argument("sequence terms must be positive");
}

double conjugate_exponent(double s) {
    if (!(s >= 1)) throw std::invalid_argument("conjugate exponent needs s >= 1");
    if (s == 1.0) return kInf;
    if (s == kInf) return 1.0;
    return s / (s - 1.0);
}

double ExponentPack::q_mu_conj() const { return conjugate_exponent(q_mu()); }
double ExponentPack::p_r_conj() const { return conjugate_exponent(p_r()); }
double ExponentPack::p_theta_conj() const { return conjugate_exponent(p_theta()); }

double ExponentPack::sigma1_from(double rr) const {
    double pr = p / rr;
    if (pr == 1.0) return kInf;  // theta = p
    return rr * conjugate_exponent(pr);
}

namespace {


// sum_{k=from}^{infty} a_k^{power}; geometric tail in closed form, otherwise
// truncated at the stored terms.
double power_sum_from(const PositiveSequence& a, std::size_t from, double power) {
    double s = 0.0;
    for (std::size_t k = from; k < a.terms.size(); ++k) s += std::pow(a.terms[k], power);
    if (a.tail_ratio && !a.terms.empty()) {
        double rho = std::pow(*a.tail_ratio, power);
        if (rho >= 1.0) return kInf;
        if (from >= a.terms.size()) {
            double first = std::pow(a.term(from), power);
            s = first / (1.0 - rho);
        } else {
            double base = std::pow(a.terms.back(), power);
            s += base * rho / (1.0 - rho);
        }
    }
    return s;
}

// sum_{k=0}^{n} a_k^{power}; n may run past the stored terms via the tail.

double sup_from(const PositiveSequence& a, std::size_t from) {
    double m = 0.0;
    for (std::size_t k = from; k < a.terms.size(); ++k) m = std::max(m, a.terms[k]);
    if (a.tail_ratio && !a.terms.empty()) {
        if (*a.tail_ratio > 1.0) return kInf;
        m = std::max(m, a.term(std::max(from, a.terms.size())));
    }
    return m;
}



}  // namespace

double lq_norm(const PositiveSequence& a, double q) {
    if (!(q > 0)) throw std::invalid_argument("q must lie in (0, inf]");
    if (q == kInf) return sup_from(a, 0);
    double s = power_sum_from(a, 0, q);
    return std::pow(s, 1.0 / q);
}

namespace {

double log_term(const PositiveSequence& a, std::size_t k) {
    if (k < a.terms.size()) return std::log(a.terms[k]);
    if (!a.tail_ratio || a.terms.empty()) return -kInf;
    return std::log(a.terms.back()) +
           static_cast<double>(k - a.terms.size() + 1) * std::log(*a.tail_ratio);
}

// sum_{k=from}^{infty} exp(e * (log beta_k - pivot)); the geometric tail is
// summed in closed form.  Normalizing by the pivot keeps growing families
// representable for any n.
double shifted_exp_sum(const PositiveSequence& a, std::size_t from, double e, double pivot) {
    double s = 0.0;
    for (std::size_t k = from; k < a.terms.size(); ++k)
        s += std::exp(e * (log_term(a, k) - pivot));
    if (a.tail_ratio && !a.terms.empty()) {
        double step = e * std::log(*a.tail_ratio);
        if (step >= 0.0) return kInf;
        double rho = std::exp(step);
        std::size_t first = std::max(from, a.terms.size());
        double lead = std::exp(e * (log_term(a, first) - pivot));
        s += lead / (1.0 - rho);
    }
    return s;
}

double shifted_exp_sum_to(const PositiveSequence& a, std::size_t n, double e, double pivot) {
    double s = 0.0;
    for (std::size_t k = 0; k <= n; ++k) s += std::exp(e * (log_term(a, k) - pivot));
    return s;
}

double shifted_sup(const PositiveSequence& a, std::size_t from, double sign, double pivot) {
    // sup_{k>=from} exp(sign * (log beta_k - pivot))
    double m = -kInf;
    for (std::size_t k = from; k < a.terms.size(); ++k)
        m = std::max(m, sign * (log_term(a, k) - pivot));
    if (a.tail_ratio && !a.terms.empty()) {
        if (sign * std::log(*a.tail_ratio) > 0.0) return kInf;
        std::size_t first = std::max(from, a.terms.size());
        m = std::max(m, sign * (log_term(a, first) - pivot));
    }
    return std::exp(m);
}

double shifted_sup_to(const PositiveSequence& a, std::size_t n, double sign, double pivot) {
    double m = -kInf;
    for (std::size_t k = 0; k <= n; ++k) m = std::max(m, sign * (log_term(a, k) - pivot));
    return std::exp(m);
}

}  // namespace

double hardy_condition(const PositiveSequence& beta, double s, HardyDirection direction,
                       std::size_t n_max) {
    if (!(s >= 1)) throw std::invalid_argument("hardy_condition needs s >= 1");
    beta.check_positive();
    double sp = conjugate_exponent(s);
    double best = 0.0;
    for (std::size_t n = 0; n <= n_max; ++n) {
        double pivot = log_term(beta, n);
        double head, tail;
        if (direction == HardyDirection::tail_2_12) {
            head = (s == kInf) ? shifted_sup_to(beta, n, 1.0, pivot)
                               : std::pow(shifted_exp_sum_to(beta, n, s, pivot), 1.0 / s);
            tail = (sp == kInf) ? shifted_sup(beta, n, -1.0, pivot)
                                : std::pow(shifted_exp_sum(beta, n, -sp, pivot), 1.0 / sp);
        } else {
            head = (s == kInf) ? shifted_sup(beta, n, 1.0, pivot)
                               : std::pow(shifted_exp_sum(beta, n, s, pivot), 1.0 / s);
            tail = (sp == kInf) ? shifted_sup_to(beta, n, -1.0, pivot)
                                : std::pow(shifted_exp_sum_to(beta, n, -sp, pivot), 1.0 / sp);
        }
        best = std::max(best, head * tail);
        if (!std::isfinite(best)) return kInf;
    }
    return best;
}

double hardy_verify(const PositiveSequence& a, const PositiveSequence& beta, double s,
                    HardyDirection direction) {
    if (!(s >= 1)) throw std::invalid_argument("hardy_verify needs s >= 1");
    a.check_positive();
    beta.check_positive();
    std::size_t want = std::max(a.terms.size(), beta.terms.size());
    PositiveSequence aa = a.tail_ratio ? a.materialized(want) : a;
    PositiveSequence bb = beta.tail_ratio ? beta.materialized(want) : beta;
    std::size_t n = std::min(aa.terms.size(), bb.terms.size());

    PositiveSequence b;
    b.terms.resize(n);
    if (direction == HardyDirection::tail_2_12) {
        for (std::size_t k = 0; k < n; ++k) b.terms[k] = power_sum_from(aa, k, 1.0);
        if (aa.tail_ratio && *aa.tail_ratio < 1.0) b.tail_ratio = *aa.tail_ratio;
    } else {
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            acc += aa.terms[k];
            b.terms[k] = acc;
        }
        // head sums have no exact geometric tail in general; leave unmodeled
    }

    PositiveSequence lhs, rhs;
    lhs.terms.resize(n);
    rhs.terms.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        lhs.terms[k] = bb.terms[k] * b.terms[k];
        rhs.terms[k] = bb.terms[k] * aa.terms[k];
    }
    if (bb.tail_ratio && b.tail_ratio) lhs.tail_ratio = *bb.tail_ratio * *b.tail_ratio;
    if (bb.tail_ratio && aa.tail_ratio) rhs.tail_ratio = *bb.tail_ratio * *aa.tail_ratio;

    double num = lq_norm(lhs, s);
    double den = lq_norm(rhs, s);
    if (den == 0.0) return 0.0;
    return num / den;
}

HardyProbe hardy_condition_probe(const PositiveSequence& beta, double s,
                                 HardyDirection direction, std::size_t n_max, double rel_tol) {
    HardyProbe p;
    p.value_half = hardy_condition(beta, s, direction, n_max / 2);
    p.value_full = hardy_condition(beta, s, direction, n_max);
    p.stable =
        std::isfinite(p.value_full) && p.value_full <= p.value_half * (1.0 + rel_tol) + 1e-300;
    return p;
}

}  // namespace besov
