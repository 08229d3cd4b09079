#include "besovkit/differences.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace besov {

namespace {

constexpr int kMaxOrder = 12;

std::array<double, kMaxOrder + 1> binomials(int l) {
    std::array<double, kMaxOrder + 1> c{};
    c[0] = 1.0;
    for (int i = 1; i <= l; ++i) c[i] = c[i - 1] * (l - i + 1) / i;
    return c;
}

struct Extents {
    std::int64_t n0, n1, n2;
    int dim;
};

Extents ext_of(const GridFunction& f) {
    return {f.extent(0), (f.dim() > 1) ? f.extent(1) : 1, (f.dim() > 2) ? f.extent(2) : 1,
            f.dim()};
}

// Delta^l along an arbitrary cell-step vector, evaluated at one cell.
double delta_at(const GridFunction& f, int l, const std::array<double, kMaxOrder + 1>& binom,
                std::int64_t i0, std::int64_t i1, std::int64_t i2, std::int64_t s0,
                std::int64_t s1, std::int64_t s2) {
    double acc = 0.0;
    double sign = (l % 2 == 0) ? 1.0 : -1.0;  // (-1)^{l+i} at i = 0
    for (int i = 0; i <= l; ++i, sign = -sign)
        acc += sign * binom[i] * f.value_or_zero(i0 + i * s0, i1 + i * s1, i2 + i * s2);
    return acc;
}

struct HLattice {
    std::int64_t stride = 1;  // in cells
    std::int64_t count = 1;   // nodes per half axis
    double node_weight;       // (stride * h)^dim
};

HLattice h_lattice(const GridFunction& f, int k, int h_samples) {
    if (k < 0) throw std::invalid_argument("difference level must be >= 0");
    if (f.level() < k + 3)
        throw std::invalid_argument("difference window unresolved: need J >= k + 3");
    HLattice hl;
    std::int64_t w_cells = std::int64_t{1} << (f.level() - k);
    std::int64_t cap =
        static_cast<std::int64_t>(std::bit_floor(static_cast<std::uint64_t>(std::max(1, h_samples))));
    hl.stride = std::max<std::int64_t>(1, w_cells / cap);
    hl.count = w_cells / hl.stride;
    hl.node_weight = 1.0;
    for (int d = 0; d < f.dim(); ++d) hl.node_weight *= hl.stride * f.spacing();
    return hl;
}

// A(y) = sum over the trapezoid h-lattice of wt(h) |Delta^l(h) f(y)|^r
// (r = inf: the plain sup over h).  Computed at a single cell.
double h_average_at(const GridFunction& f, const HLattice& hl, int l,
                    const std::array<double, kMaxOrder + 1>& binom, double r, std::int64_t i0,
                    std::int64_t i1, std::int64_t i2) {
    Extents e = ext_of(f);
    std::int64_t c = hl.count;
    double acc = 0.0, sup = 0.0;
    for (std::int64_t w0 = -c; w0 <= c; ++w0) {
        double wt0 = (std::abs(w0) == c) ? 0.5 : 1.0;
        std::int64_t lo1 = (e.dim > 1) ? -c : 0, hi1 = (e.dim > 1) ? c : 0;
        for (std::int64_t w1 = lo1; w1 <= hi1; ++w1) {
            double wt1 = (e.dim > 1 && std::abs(w1) == c) ? 0.5 : 1.0;
            std::int64_t lo2 = (e.dim > 2) ? -c : 0, hi2 = (e.dim > 2) ? c : 0;
            for (std::int64_t w2 = lo2; w2 <= hi2; ++w2) {
                double wt2 = (e.dim > 2 && std::abs(w2) == c) ? 0.5 : 1.0;
                double d = delta_at(f, l, binom, i0, i1, i2, w0 * hl.stride, w1 * hl.stride,
                                    w2 * hl.stride);
                if (r == kInf)
                    sup = std::max(sup, std::abs(d));
                else
                    acc += wt0 * wt1 * wt2 * std::pow(std::abs(d), r);
            }
        }
    }
    return (r == kInf) ? sup : acc * hl.node_weight;
}

GridFunction h_average_field(const GridFunction& f, int k, int l, double r, int h_samples,
                             bool parallel) {
    HLattice hl = h_lattice(f, k, h_samples);
    auto binom = binomials(l);
    GridFunction out = f;
    Extents e = ext_of(f);
    std::int64_t total = f.size();
#pragma omp parallel for schedule(static) if (parallel)
    for (std::int64_t idx = 0; idx < total; ++idx) {
        std::int64_t i2 = idx % e.n2;
        std::int64_t i1 = (idx / e.n2) % e.n1;
        std::int64_t i0 = idx / (e.n1 * e.n2);
        out.values()[static_cast<std::size_t>(idx)] =
            h_average_at(f, hl, l, binom, r, i0, i1, i2);
    }
    return out;
}

// Inclusive prefix sums with zero extension; query of a half-open index box.
struct PrefixSum {
    std::int64_t n0, n1, n2;
    std::vector<double> p;

    explicit PrefixSum(const GridFunction& a) {
        Extents e = ext_of(a);
        n0 = e.n0;
        n1 = e.n1;
        n2 = e.n2;
        p.assign(static_cast<std::size_t>((n0 + 1) * (n1 + 1) * (n2 + 1)), 0.0);
        auto at = [&](std::int64_t a0, std::int64_t a1, std::int64_t a2) -> double& {
            return p[static_cast<std::size_t>((a0 * (n1 + 1) + a1) * (n2 + 1) + a2)];
        };
        for (std::int64_t i0 = 1; i0 <= n0; ++i0)
            for (std::int64_t i1 = 1; i1 <= n1; ++i1)
                for (std::int64_t i2 = 1; i2 <= n2; ++i2)
                    at(i0, i1, i2) = a.at(i0 - 1, i1 - 1, i2 - 1) + at(i0 - 1, i1, i2) +
                                     at(i0, i1 - 1, i2) - at(i0 - 1, i1 - 1, i2) +
                                     at(i0, i1, i2 - 1) - at(i0 - 1, i1, i2 - 1) -
                                     at(i0, i1 - 1, i2 - 1) + at(i0 - 1, i1 - 1, i2 - 1);
    }

    double box(std::int64_t a0, std::int64_t b0, std::int64_t a1, std::int64_t b1,
               std::int64_t a2, std::int64_t b2) const {
        a0 = std::clamp<std::int64_t>(a0, 0, n0);
        b0 = std::clamp<std::int64_t>(b0, 0, n0);
        a1 = std::clamp<std::int64_t>(a1, 0, n1);
        b1 = std::clamp<std::int64_t>(b1, 0, n1);
        a2 = std::clamp<std::int64_t>(a2, 0, n2);
        b2 = std::clamp<std::int64_t>(b2, 0, n2);
        if (b0 <= a0 || b1 <= a1 || b2 <= a2) return 0.0;
        auto at = [&](std::int64_t i0, std::int64_t i1, std::int64_t i2) {
            return p[static_cast<std::size_t>((i0 * (n1 + 1) + i1) * (n2 + 1) + i2)];
        };
        return at(b0, b1, b2) - at(a0, b1, b2) - at(b0, a1, b2) - at(b0, b1, a2) +
               at(a0, a1, b2) + at(a0, b1, a2) + at(b0, a1, a2) - at(a0, a1, a2);
    }
};

// Moving window max with half width w per axis, done as separable passes.
GridFunction window_max(const GridFunction& a, std::int64_t w) {
    GridFunction cur = a;
    Extents e = ext_of(a);
    for (int d = 0; d < a.dim(); ++d) {
        GridFunction next = cur;
        std::int64_t total = a.size();
#pragma omp parallel for schedule(static)
        for (std::int64_t idx = 0; idx < total; ++idx) {
            std::int64_t i2 = idx % e.n2;
            std::int64_t i1 = (idx / e.n2) % e.n1;
            std::int64_t i0 = idx / (e.n1 * e.n2);
            std::int64_t pos = (d == 0) ? i0 : (d == 1) ? i1 : i2;
            std::int64_t len = (d == 0) ? e.n0 : (d == 1) ? e.n1 : e.n2;
            std::int64_t lo = std::max<std::int64_t>(0, pos - w);
            std::int64_t hi = std::min<std::int64_t>(len - 1, pos + w);
            double m = 0.0;
            for (std::int64_t s = lo; s <= hi; ++s) {
                double v = (d == 0) ? cur.at(s, i1, i2)
                                    : (d == 1) ? cur.at(i0, s, i2) : cur.at(i0, i1, s);
                m = std::max(m, v);
            }
            next.values()[static_cast<std::size_t>(idx)] = m;
        }
        cur = next;
    }
    return cur;
}

GridFunction abs_power(const GridFunction& f, double r) {
    GridFunction g = f;
    for (auto& v : g.values()) v = std::pow(std::abs(v), r);
    return g;
}

// (prefactor * h^n * window sum of A)^{1/r} with window half width w-1 cells.
GridFunction windowed_root(const GridFunction& a, std::int64_t w_cells, double prefactor,
                           double r) {
    Extents e = ext_of(a);
    double hv = 1.0;
    for (int d = 0; d < a.dim(); ++d) hv *= a.spacing();
    GridFunction out = a;
    if (r == kInf) {
        out = window_max(a, w_cells - 1);
        return out;
    }
    PrefixSum ps(a);
    std::int64_t total = a.size();
    std::int64_t w = w_cells - 1;
#pragma omp parallel for schedule(static)
    for (std::int64_t idx = 0; idx < total; ++idx) {
        std::int64_t i2 = idx % e.n2;
        std::int64_t i1 = (idx / e.n2) % e.n1;
        std::int64_t i0 = idx / (e.n1 * e.n2);
        double s = ps.box(i0 - w, i0 + w + 1, (e.dim > 1) ? i1 - w : 0,
                          (e.dim > 1) ? i1 + w + 1 : 1, (e.dim > 2) ? i2 - w : 0,
                          (e.dim > 2) ? i2 + w + 1 : 1);
        out.values()[static_cast<std::size_t>(idx)] = std::pow(prefactor * hv * s, 1.0 / r);
    }
    return out;
}

}  // namespace

GridFunction finite_difference(const GridFunction& f, const std::array<std::int64_t, 3>& step_cells,
                               int l) {
    if (l < 1 || l > kMaxOrder) throw std::invalid_argument("difference order out of range");
    for (int d = 0; d < f.dim(); ++d)
        if (std::abs(static_cast<double>(l * step_cells[d])) * f.spacing() > 2.0 * f.radius(d))
            throw std::invalid_argument("difference step exceeds the box");
    auto binom = binomials(l);
    GridFunction out = f;
    Extents e = ext_of(f);
    std::int64_t total = f.size();
#pragma omp parallel for schedule(static)
    for (std::int64_t idx = 0; idx < total; ++idx) {
        std::int64_t i2 = idx % e.n2;
        std::int64_t i1 = (idx / e.n2) % e.n1;
        std::int64_t i0 = idx / (e.n1 * e.n2);
        out.values()[static_cast<std::size_t>(idx)] =
            delta_at(f, l, binom, i0, i1, i2, step_cells[0], (e.dim > 1) ? step_cells[1] : 0,
                     (e.dim > 2) ? step_cells[2] : 0);
    }
    return out;
}

double delta_lr(const GridFunction& f, const std::array<double, 3>& x, int k, int l, double r,
                int h_samples) {
    HLattice hl = h_lattice(f, k, h_samples);
    auto binom = binomials(l);
    std::array<double, 3> a{0, 0, 0}, b{0, 0, 0};
    double half = std::ldexp(1.0, -k);
    for (int d = 0; d < f.dim(); ++d) {
        a[d] = x[d] - half;
        b[d] = x[d] + half;
    }
    CellRange cr = cells_in_interval(f, a, b);
    if (cr.empty) return 0.0;
    int n = f.dim();
    double hv = 1.0;
    for (int d = 0; d < n; ++d) hv *= f.spacing();
    double acc = 0.0, sup = 0.0;
    for (std::int64_t i0 = cr.lo[0]; i0 < cr.hi[0]; ++i0)
        for (std::int64_t i1 = (n > 1) ? cr.lo[1] : 0; i1 < ((n > 1) ? cr.hi[1] : 1); ++i1)
            for (std::int64_t i2 = (n > 2) ? cr.lo[2] : 0; i2 < ((n > 2) ? cr.hi[2] : 1); ++i2) {
                double v = h_average_at(f, hl, l, binom, r, i0, i1, i2);
                if (r == kInf)
                    sup = std::max(sup, v);
                else
                    acc += v;
            }
    if (r == kInf) return sup;
    double prefactor = std::exp2(2.0 * k * n);
    return std::pow(prefactor * hv * acc, 1.0 / r);
}

double sliding_lr(const GridFunction& f, const std::array<double, 3>& x, double r) {
    std::array<double, 3> a{0, 0, 0}, b{0, 0, 0};
    for (int d = 0; d < f.dim(); ++d) {
        a[d] = x[d] - 1.0;
        b[d] = x[d] + 1.0;
    }
    CellRange cr = cells_in_interval(f, a, b);
    if (cr.empty) return 0.0;
    int n = f.dim();
    double hv = 1.0;
    for (int d = 0; d < n; ++d) hv *= f.spacing();
    double acc = 0.0, sup = 0.0;
    for (std::int64_t i0 = cr.lo[0]; i0 < cr.hi[0]; ++i0)
        for (std::int64_t i1 = (n > 1) ? cr.lo[1] : 0; i1 < ((n > 1) ? cr.hi[1] : 1); ++i1)
            for (std::int64_t i2 = (n > 2) ? cr.lo[2] : 0; i2 < ((n > 2) ? cr.hi[2] : 1); ++i2) {
                double v = std::abs(f.at(i0, i1, i2));
                if (r == kInf)
                    sup = std::max(sup, v);
                else
                    acc += std::pow(v, r);
            }
    return (r == kInf) ? sup : std::pow(hv * acc, 1.0 / r);
}

GridFunction averaged_diff(const GridFunction& f, int k, int l, double r, int h_samples) {
    if (!(r > 0) || r == kInf)
        throw std::invalid_argument("averaged_diff needs r in (0, inf)");
    GridFunction a = h_average_field(f, k, l, r, h_samples, true);
    double prefactor = std::exp2(static_cast<double>(k) * f.dim());
    for (auto& v : a.values()) v = std::pow(prefactor * v, 1.0 / r);
    return a;
}

GridFunction averaged_diff_serial(const GridFunction& f, int k, int l, double r, int h_samples) {
    GridFunction a = h_average_field(f, k, l, r, h_samples, false);
    double prefactor = std::exp2(static_cast<double>(k) * f.dim());
    for (auto& v : a.values()) v = std::pow(prefactor * v, 1.0 / r);
    return a;
}

NormValue diff_norm(const GridFunction& f, const WeightSequence& t, const NormParams& np) {
    if (t.max_level() < np.levels)
        throw std::invalid_argument("diff_norm: weight sequence has too few levels");
    if (!t.levels[0].same_grid(f)) throw std::invalid_argument("diff_norm: grid mismatch");
    int n = f.dim();
    std::vector<double> terms(np.levels + 1);
    for (int k = 0; k <= np.levels; ++k) {
        GridFunction a = h_average_field(f, k, np.l, np.r, np.h_samples, true);
        std::int64_t w_cells = std::int64_t{1} << (f.level() - k);
        GridFunction delta_field =
            windowed_root(a, w_cells, std::exp2(2.0 * k * n), np.r);
        terms[k] = weighted_lp_norm(t.levels[k], delta_field, np.p);
    }
    NormValue nv;
    nv.level_terms = terms;
    double level_sum = lq_aggregate(terms, np.q);
    if (level_sum > 0.0) {
        if (np.q == kInf)
            nv.tail_fraction = terms.back() / level_sum;
        else
            nv.tail_fraction = std::pow(terms.back(), np.q) / std::pow(level_sum, np.q);
    }

    // zero-order term ||t_0 ||f | L_r(. + I^n)|| | L_p||
    GridFunction fr = abs_power(f, (np.r == kInf) ? 1.0 : np.r);
    GridFunction s0 = windowed_root(fr, std::int64_t{1} << f.level(), 1.0, np.r);
    nv.zero_order_term = weighted_lp_norm(t.levels[0], s0, np.p);
    nv.value = level_sum + nv.zero_order_term;
    return nv;
}

NormValue averaged_diff_norm(const GridFunction& f, const WeightSequence& t,
                             const NormParams& np) {
    if (t.max_level() < np.levels)
        throw std::invalid_argument("averaged_diff_norm: weight sequence has too few levels");
    std::vector<double> terms;
    for (int k = 1; k <= np.levels; ++k) {
        GridFunction field = averaged_diff(f, k, np.l, np.r, np.h_samples);
        terms.push_back(weighted_lp_norm(t.levels[k], field, np.p));
    }
    NormValue nv;
    nv.level_terms = terms;
    double level_sum = lq_aggregate(terms, np.q);
    GridFunction fr = abs_power(f, np.r);
    GridFunction s0 = windowed_root(fr, std::int64_t{1} << f.level(), 1.0, np.r);
    nv.zero_order_term = weighted_lp_norm(t.levels[0], s0, np.p);
    nv.value = level_sum + nv.zero_order_term;
    if (level_sum > 0.0 && np.q != kInf)
        nv.tail_fraction = std::pow(terms.back(), np.q) / std::pow(level_sum, np.q);
    return nv;
}

}  // namespace besov
