#include "besovkit/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace besov {

namespace {

void check_dim(int dim) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("grid dimension must be 1, 2 or 3");
}

}  // namespace

GridFunction make_grid_raw(int dim, int level, const std::array<std::int64_t, 3>& n) {
    check_dim(dim);
    GridFunction f;
    f.dim_ = dim;
    f.level_ = level;
    f.h_ = std::ldexp(1.0, -level);
    f.n_ = n;
    for (int d = dim; d < 3; ++d) f.n_[d] = 1;
    std::int64_t total = f.n_[0] * f.n_[1] * f.n_[2];
    f.values_.assign(static_cast<std::size_t>(total), 0.0);
    return f;
}

GridFunction GridFunction::box(int dim, double box_radius, int level) {
    check_dim(dim);
    if (box_radius <= 0) throw std::invalid_argument("box radius must be positive");
    double np = box_radius * std::ldexp(2.0, level);  // 2R * 2^J
    std::int64_t n = static_cast<std::int64_t>(std::llround(np));
    if (n < 2 || std::abs(np - static_cast<double>(n)) > 1e-9)
        throw std::invalid_argument("box radius must be an integer multiple of the spacing");
    return make_grid_raw(dim, level, {n, n, n});
}

GridFunction GridFunction::kernel(int dim, std::int64_t half_width, int level) {
    check_dim(dim);
    if (half_width < 1) throw std::invalid_argument("kernel half width must be >= 1");
    std::int64_t n = 2 * half_width + 1;
    return make_grid_raw(dim, level, {n, n, n});
}

void GridFunction::check_finite(const std::string& what) const {
    for (double v : values_)
        if (!std::isfinite(v)) throw std::runtime_error(what + ": non-finite sample");
}

Box domain_box(const GridFunction& f) {
    Box b;
    b.dim = f.dim();
    for (int d = 0; d < f.dim(); ++d) {
        b.lo[d] = -f.radius(d);
        b.hi[d] = f.radius(d);
    }
    return b;
}

double DyadicCube::side() const { return std::ldexp(1.0, -k); }
double DyadicCube::lower(int d) const { return static_cast<double>(m[d]) * side(); }
double DyadicCube::upper(int d) const { return static_cast<double>(m[d] + 1) * side(); }
double DyadicCube::center(int d) const { return (static_cast<double>(m[d]) + 0.5) * side(); }

std::vector<DyadicCube> cubes_in_box(int k, const Box& box) {
    if (k < 0) throw std::invalid_argument("cube rank must be >= 0");
    double s = std::ldexp(1.0, k);
    std::array<std::int64_t, 3> lo{0, 0, 0}, hi{0, 0, 0};
    for (int d = 0; d < box.dim; ++d) {
        lo[d] = static_cast<std::int64_t>(std::floor(box.lo[d] * s));
        hi[d] = static_cast<std::int64_t>(std::ceil(box.hi[d] * s)) - 1;
        if (hi[d] < lo[d]) return {};
    }
    std::vector<DyadicCube> out;
    std::int64_t c1 = (box.dim > 1) ? (hi[1] - lo[1] + 1) : 1;
    std::int64_t c2 = (box.dim > 2) ? (hi[2] - lo[2] + 1) : 1;
    out.reserve(static_cast<std::size_t>((hi[0] - lo[0] + 1) * c1 * c2));
    DyadicCube q;
    q.dim = box.dim;
    q.k = k;
    for (std::int64_t m0 = lo[0]; m0 <= hi[0]; ++m0)
        for (std::int64_t m1 = lo[1]; m1 <= hi[1]; ++m1)
            for (std::int64_t m2 = lo[2]; m2 <= hi[2]; ++m2) {
                q.m = {m0, m1, m2};
                out.push_back(q);
            }
    return out;
}

CellRange cells_in_interval(const GridFunction& f, const std::array<double, 3>& a,
                            const std::array<double, 3>& b) {
    CellRange r;
    double inv = 2.0 / f.spacing();  // coordinates in units of h/2
    for (int d = 0; d < f.dim(); ++d) {
        double n = static_cast<double>(f.extent(d));
        // centers u_i = 2i + 1 - n; keep a <= x < b
        std::int64_t lo = static_cast<std::int64_t>(std::ceil((a[d] * inv + n - 1.0) * 0.5));
        std::int64_t hi = static_cast<std::int64_t>(std::ceil((b[d] * inv + n - 1.0) * 0.5));
        lo = std::max<std::int64_t>(lo, 0);
        hi = std::min<std::int64_t>(hi, f.extent(d));
        if (hi <= lo) r.empty = true;
        r.lo[d] = lo;
        r.hi[d] = hi;
    }
    return r;
}

CellRange cells_in_cube(const GridFunction& f, const DyadicCube& q, double scale) {
    std::array<double, 3> a{0, 0, 0}, b{0, 0, 0};
    for (int d = 0; d < f.dim(); ++d) {
        double half = 0.5 * scale * q.side();
        a[d] = q.center(d) - half;
        b[d] = q.center(d) + half;
    }
    return cells_in_interval(f, a, b);
}

namespace {

template <class F>
void for_cells(const GridFunction& f, const CellRange& r, F&& body) {
    std::int64_t lo1 = (f.dim() > 1) ? r.lo[1] : 0, hi1 = (f.dim() > 1) ? r.hi[1] : 1;
    std::int64_t lo2 = (f.dim() > 2) ? r.lo[2] : 0, hi2 = (f.dim() > 2) ? r.hi[2] : 1;
    for (std::int64_t i0 = r.lo[0]; i0 < r.hi[0]; ++i0)
        for (std::int64_t i1 = lo1; i1 < hi1; ++i1)
            for (std::int64_t i2 = lo2; i2 < hi2; ++i2) body(f.at(i0, i1, i2));
}

double cell_volume(const GridFunction& f) {
    double v = 1.0;
    for (int d = 0; d < f.dim(); ++d) v *= f.spacing();
    return v;
}

CellRange checked_range(const GridFunction& f, const DyadicCube& q, double scale) {
    if (scale < 1.0) throw std::invalid_argument("cube scale must be >= 1");
    CellRange r = cells_in_cube(f, q, scale);
    if (r.empty) throw std::domain_error("cube outside domain");
    return r;
}

}  // namespace

double local_lp_norm(const GridFunction& f, double p, const DyadicCube& q, double scale) {
    if (!(p > 0)) throw std::invalid_argument("p must lie in (0, inf]");
    CellRange r = checked_range(f, q, scale);
    if (p == kInf) {
        double m = 0.0;
        for_cells(f, r, [&](double v) { m = std::max(m, std::abs(v)); });
        return m;
    }
    double s = 0.0;
    for_cells(f, r, [&](double v) { s += std::pow(std::abs(v), p); });
    return std::pow(cell_volume(f) * s, 1.0 / p);
}

double local_power_integral(const GridFunction& f, double p, const DyadicCube& q, double scale) {
    CellRange r = checked_range(f, q, scale);
    double s = 0.0;
    for_cells(f, r, [&](double v) { s += std::pow(std::abs(v), p); });
    return cell_volume(f) * s;
}

double local_min(const GridFunction& f, const DyadicCube& q, double scale) {
    CellRange r = checked_range(f, q, scale);
    double m = kInf;
    for_cells(f, r, [&](double v) { m = std::min(m, v); });
    return m;
}

double local_max(const GridFunction& f, const DyadicCube& q, double scale) {
    CellRange r = checked_range(f, q, scale);
    double m = -kInf;
    for_cells(f, r, [&](double v) { m = std::max(m, v); });
    return m;
}

double integral(const GridFunction& f) {
    double s = 0.0;
    for (double v : f.values()) s += v;
    return cell_volume(f) * s;
}

double lp_norm(const GridFunction& f, double p) {
    if (!(p > 0)) throw std::invalid_argument("p must lie in (0, inf]");
    if (p == kInf) {
        double m = 0.0;
        for (double v : f.values()) m = std::max(m, std::abs(v));
        return m;
    }
    double s = 0.0;
    for (double v : f.values()) s += std::pow(std::abs(v), p);
    return std::pow(cell_volume(f) * s, 1.0 / p);
}

double weighted_lp_norm(const GridFunction& w, const GridFunction& g, double p) {
    if (!w.same_grid(g)) throw std::invalid_argument("weighted_lp_norm: grid mismatch");
    if (p == kInf) {
        double m = 0.0;
        for (std::size_t i = 0; i < w.values().size(); ++i)
            m = std::max(m, std::abs(w.values()[i] * g.values()[i]));
        return m;
    }
    double s = 0.0;
    for (std::size_t i = 0; i < w.values().size(); ++i)
        s += std::pow(std::abs(w.values()[i] * g.values()[i]), p);
    return std::pow(cell_volume(w) * s, 1.0 / p);
}

double lq_aggregate(const std::vector<double>& terms, double q) {
    if (!(q > 0)) throw std::invalid_argument("q must lie in (0, inf]");
    if (q == kInf) {
        double m = 0.0;
        for (double t : terms) m = std::max(m, t);
        return m;
    }
    double s = 0.0;
    for (double t : terms) s += std::pow(t, q);
    return std::pow(s, 1.0 / q);
}

void write_csv(const GridFunction& f, const std::string& path) {
    for (int d = 1; d < f.dim(); ++d)
        if (f.extent(d) != f.extent(0))
            throw std::invalid_argument("CSV format requires equal extents per axis");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    char buf[64];
    out << "dim,J,R\n";
    std::snprintf(buf, sizeof buf, "%d,%d,%.17g\n", f.dim(), f.level(), f.radius(0));
    out << buf;
    for (double v : f.values()) {
        std::snprintf(buf, sizeof buf, "%.17g\n", v);
        out << buf;
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

GridFunction read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("dim,J,R", 0) != 0)
        throw std::runtime_error(path + ": missing dim,J,R header");
    if (!std::getline(in, line)) throw std::runtime_error(path + ": missing metadata line");
    int dim = 0, level = 0;
    double radius = 0;
    {
        std::istringstream ss(line);
        char c;
        if (!(ss >> dim >> c >> level >> c >> radius))
            throw std::runtime_error(path + ": bad metadata line");
    }
    double np = radius * std::ldexp(2.0, level);
    std::int64_t n = static_cast<std::int64_t>(std::llround(np));
    if (n < 1 || std::abs(np - static_cast<double>(n)) > 1e-9)
        throw std::runtime_error(path + ": inconsistent radius/level");
    GridFunction f = make_grid_raw(dim, level, {n, n, n});
    for (std::size_t i = 0; i < f.values().size(); ++i) {
        if (!std::getline(in, line)) throw std::runtime_error(path + ": too few values");
        f.values()[i] = std::strtod(line.c_str(), nullptr);
    }
    return f;
}

}  // namespace besov
