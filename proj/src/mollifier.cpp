#include "besovkit/mollifier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace besov {

namespace {

double gauss_profile(double x, double sigma, double cutoff) {
    if (std::abs(x) > cutoff) return 0.0;
    double t = x / sigma;
    return std::exp(-0.5 * t * t);
}

// 1D grid moment h * sum (u h)^s g((u h)/sigma) with exact odd-moment
// cancellation via symmetric pairing.
double grid_moment(double sigma, double cutoff, int s, int grid_level,
                   std::int64_t half_width) {
    double h = std::ldexp(1.0, -grid_level);
    double acc = (s == 0) ? gauss_profile(0.0, sigma, cutoff) : 0.0;
    for (std::int64_t u = 1; u <= half_width; ++u) {
        double x = static_cast<double>(u) * h;
        double pair = std::pow(x, s) + std::pow(-x, s);  // zero for odd s
        if (pair != 0.0) acc += pair * gauss_profile(x, sigma, cutoff);
    }
    return h * acc;
}

// Sorted all-even compositions (beta_1 >= ... >= beta_n) with |beta| <= M.
void even_compositions(int n, int budget, std::vector<int>& cur,
                       std::vector<std::vector<int>>& out) {
    if (static_cast<int>(cur.size()) == n) {
        out.push_back(cur);
        return;
    }
    int cap = cur.empty() ? budget : std::min(budget, cur.back());
    for (int b = 0; b <= cap; b += 2) {
        cur.push_back(b);
        even_compositions(n, budget - b, cur, out);
        cur.pop_back();
    }
}

// Gaussian elimination with partial pivoting; returns the pivot-ratio
// condition estimate.
double solve_dense(std::vector<std::vector<double>>& a, std::vector<double>& b) {
    std::size_t n = b.size();
    double max_piv = 0.0, min_piv = kInf;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        std::swap(a[col], a[piv]);
        std::swap(b[col], b[piv]);
        double d = a[col][col];
        if (d == 0.0) return kInf;
        max_piv = std::max(max_piv, std::abs(d));
        min_piv = std::min(min_piv, std::abs(d));
        for (std::size_t r = col + 1; r < n; ++r) {
            double f = a[r][col] / d;
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    for (std::size_t col = n; col-- > 0;) {
        for (std::size_t c = col + 1; c < n; ++c) b[col] -= a[col][c] * b[c];
        b[col] /= a[col][col];
    }
    return max_piv / min_piv;
}

void sample_combination(GridFunction& g, const Mollifier& mol, double arg_scale,
                        double amplitude) {
    std::int64_t n1 = (g.dim() > 1) ? g.extent(1) : 1;
    std::int64_t n2 = (g.dim() > 2) ? g.extent(2) : 1;
    for (std::int64_t i0 = 0; i0 < g.extent(0); ++i0)
        for (std::int64_t i1 = 0; i1 < n1; ++i1)
            for (std::int64_t i2 = 0; i2 < n2; ++i2) {
                std::array<double, 3> x{g.coord(0, i0) * arg_scale,
                                        (g.dim() > 1) ? g.coord(1, i1) * arg_scale : 0.0,
                                        (g.dim() > 2) ? g.coord(2, i2) * arg_scale : 0.0};
                g.at(i0, i1, i2) += amplitude * mol.eval_phi0(x);
            }
}

// Largest L such that all grid moments of order <= L vanish (relative 1e-8).
int measure_vanishing_order(const GridFunction& phi, double reach, int cap) {
    double h = phi.spacing();
    double hv = 1.0;
    for (int d = 0; d < phi.dim(); ++d) hv *= h;
    double mass_abs = 0.0;
    for (double v : phi.values()) mass_abs += std::abs(v);
    mass_abs *= hv;

    for (int order = 0; order <= cap; ++order) {
        // all compositions of `order` into dim parts
        std::vector<std::array<int, 3>> betas;
        if (phi.dim() == 1) {
            betas.push_back({order, 0, 0});
        } else if (phi.dim() == 2) {
            for (int b0 = 0; b0 <= order; ++b0) betas.push_back({b0, order - b0, 0});
        } else {
            for (int b0 = 0; b0 <= order; ++b0)
                for (int b1 = 0; b1 <= order - b0; ++b1)
                    betas.push_back({b0, b1, order - b0 - b1});
        }
        double scale = std::max(1.0, mass_abs * std::pow(reach, order));
        for (const auto& beta : betas) {
            double acc = 0.0;
            std::int64_t n1 = (phi.dim() > 1) ? phi.extent(1) : 1;
            std::int64_t n2 = (phi.dim() > 2) ? phi.extent(2) : 1;
            for (std::int64_t i0 = 0; i0 < phi.extent(0); ++i0)
                for (std::int64_t i1 = 0; i1 < n1; ++i1)
                    for (std::int64_t i2 = 0; i2 < n2; ++i2) {
                        double m = std::pow(phi.coord(0, i0), beta[0]);
                        if (phi.dim() > 1) m *= std::pow(phi.coord(1, i1), beta[1]);
                        if (phi.dim() > 2) m *= std::pow(phi.coord(2, i2), beta[2]);
                        acc += m * phi.at(i0, i1, i2);
                    }
            if (std::abs(hv * acc) > 1e-8 * scale) return order - 1;
        }
    }
    return cap;
}

}  // namespace

double Mollifier::eval_phi0(const std::array<double, 3>& x) const {
    double acc = 0.0;
    for (std::size_t a = 0; a < scales.size(); ++a) {
        double prod = coeffs[a];
        for (int d = 0; d < dim; ++d) prod *= gauss_profile(x[d], scales[a], support_radius);
        acc += prod;
    }
    return acc;
}

GridFunction Mollifier::phi_grid() const {
    std::int64_t w2 = 2 * ((phi0.extent(0) - 1) / 2);
    GridFunction phi = GridFunction::kernel(dim, w2, grid_level);
    double down = -std::ldexp(1.0, -dim);  // -2^{-n}
    sample_combination(phi, *this, 1.0, 1.0);
    sample_combination(phi, *this, 0.5, down);
    return phi;
}

Mollifier build_mollifier(int dim, int M, double support_radius, int grid_level,
                          double scale_decay) {
    if (M < 0) throw std::invalid_argument("moment order must be >= 0");
    if (!(support_radius > 0)) throw std::invalid_argument("support radius must be positive");
    if (!(scale_decay > 0) || scale_decay >= 1)
        throw std::invalid_argument("scale decay must lie in (0, 1)");

    Mollifier mol;
    mol.dim = dim;
    mol.grid_level = grid_level;
    mol.support_radius = support_radius;
    mol.moments_requested = M;

    std::int64_t w = static_cast<std::int64_t>(std::llround(support_radius *
                                                            std::ldexp(1.0, grid_level)));
    if (w < 8) throw std::invalid_argument("grid too coarse for the requested support radius");

    std::vector<std::vector<int>> rows;
    std::vector<int> cur;
    even_compositions(dim, M, cur, rows);
    std::sort(rows.begin(), rows.end());
    std::size_t na = rows.size();

    mol.scales.resize(na);
    for (std::size_t a = 0; a < na; ++a)
        mol.scales[a] = support_radius / 6.0 * std::pow(scale_decay, static_cast<double>(a));

    // moment table per component and even order
    std::vector<std::vector<double>> m(na, std::vector<double>(M + 1, 0.0));
    for (std::size_t a = 0; a < na; ++a)
        for (int s = 0; s <= M; s += 2)
            m[a][s] = grid_moment(mol.scales[a], support_radius, s, grid_level, w);

    std::vector<std::vector<double>> G(na, std::vector<double>(na, 0.0));
    std::vector<double> rhs(na, 0.0);
    for (std::size_t r = 0; r < na; ++r) {
        for (std::size_t a = 0; a < na; ++a) {
            double prod = 1.0;
            for (int v : rows[r]) prod *= m[a][v];
            G[r][a] = prod;
        }
        bool zero_row = true;
        for (int v : rows[r])
            if (v != 0) zero_row = false;
        rhs[r] = zero_row ? 1.0 : 0.0;
    }
    double cond = solve_dense(G, rhs);
    if (!std::isfinite(cond) || cond > 1e12)
        throw std::runtime_error("moment system ill-conditioned (pivot ratio " +
                                 std::to_string(cond) + "); reduce M or enlarge the support");
    mol.coeffs = rhs;

    mol.phi0 = GridFunction::kernel(dim, w, grid_level);
    sample_combination(mol.phi0, mol, 1.0, 1.0);

    double mass = integral(mol.phi0);
    if (std::abs(mass - 1.0) > 1e-8)
        throw std::runtime_error("mollifier mass deviates from 1 beyond tolerance");

    GridFunction phi = mol.phi_grid();
    mol.vanishing_order = measure_vanishing_order(phi, 2.0 * support_radius, M + 4);
    return mol;
}

void write_mollifier(const Mollifier& mol, const std::string& base_path) {
    write_csv(mol.phi0, base_path + ".csv");
    nlohmann::json j;
    j["schema"] = 1;
    j["support_radius"] = mol.support_radius;
    j["L_phi"] = mol.vanishing_order;
    j["M_requested"] = mol.moments_requested;
    j["dim"] = mol.dim;
    j["grid_level"] = mol.grid_level;
    j["scales"] = mol.scales;
    j["coeffs"] = mol.coeffs;
    std::ofstream out(base_path + ".json");
    if (!out) throw std::runtime_error("cannot open " + base_path + ".json");
    out << j.dump(2) << "\n";
}

Mollifier read_mollifier(const std::string& base_path) {
    std::ifstream in(base_path + ".json");
    if (!in) throw std::runtime_error("cannot open " + base_path + ".json");
    nlohmann::json j;
    in >> j;
    Mollifier mol;
    mol.dim = j.at("dim").get<int>();
    mol.grid_level = j.at("grid_level").get<int>();
    mol.support_radius = j.at("support_radius").get<double>();
    mol.moments_requested = j.at("M_requested").get<int>();
    mol.vanishing_order = j.at("L_phi").get<int>();
    mol.scales = j.at("scales").get<std::vector<double>>();
    mol.coeffs = j.at("coeffs").get<std::vector<double>>();
    mol.phi0 = read_csv(base_path + ".csv");
    return mol;
}

}  // namespace besov
