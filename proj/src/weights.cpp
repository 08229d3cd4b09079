#include "besovkit/weights.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace besov {

namespace {

double two_pow(double e) { return std::exp2(e); }

GridFunction sample_weight_level(const WeightGenerator& g, int k, int grid_level) {
    GridFunction w = GridFunction::box(g.dim, g.box_radius, grid_level);
    double amp = two_pow(static_cast<double>(k) * g.s);
    std::int64_t n1 = (g.dim > 1) ? w.extent(1) : 1;
    std::int64_t n2 = (g.dim > 2) ? w.extent(2) : 1;
    for (std::int64_t i0 = 0; i0 < w.extent(0); ++i0)
        for (std::int64_t i1 = 0; i1 < n1; ++i1)
            for (std::int64_t i2 = 0; i2 < n2; ++i2) {
                double v = amp;
                if (g.kind == WeightGenerator::Kind::power_times_2ks) {
                    double r2 = w.coord(0, i0) * w.coord(0, i0);
                    if (g.dim > 1) r2 += w.coord(1, i1) * w.coord(1, i1);
                    if (g.dim > 2) r2 += w.coord(2, i2) * w.coord(2, i2);
                    v *= std::pow(std::sqrt(r2), g.beta);
                }
                w.at(i0, i1, i2) = v;
            }
    return w;
}

}  // namespace

void WeightSequence::validate() const {
    if (levels.empty()) throw std::invalid_argument("weight sequence has no levels");
    if (alpha1.size() < levels.size() || alpha2.size() < levels.size())
        throw std::invalid_argument("alpha sequences shorter than the level list");
    for (std::size_t k = 0; k < levels.size(); ++k) {
        if (!levels[k].same_grid(levels[0]))
            throw std::invalid_argument("weight levels live on different grids");
        for (double v : levels[k].values())
            if (!(v > 0) || !std::isfinite(v))
                throw std::invalid_argument("weights must be positive and finite");
        if (!(alpha1[k] > 0) || !(alpha2[k] > 0))
            throw std::invalid_argument("alpha sequences must be positive");
    }
}

WeightSequence WeightSequence::regenerated(int grid_level) const {
    if (!generator || generator->kind == WeightGenerator::Kind::custom_grid)
        throw std::invalid_argument("cannot regenerate custom weight grids");
    WeightSequence out = *this;
    for (std::size_t k = 0; k < levels.size(); ++k)
        out.levels[k] = sample_weight_level(*generator, static_cast<int>(k), grid_level);
    return out;
}

WeightSequence make_weights(WeightGenerator::Kind kind, const WeightParams& params) {
    WeightSequence t;
    t.p = params.p;
    t.sigma1 = params.sigma1;
    t.sigma2 = params.sigma2;
    t.alpha3 = params.alpha3;
    if (kind == WeightGenerator::Kind::custom_grid) {
        if (params.custom.empty()) throw std::invalid_argument("custom weights need grids");
        t.levels = params.custom;
        WeightGenerator g;
        g.kind = kind;
        t.generator = g;
    } else {
        WeightGenerator g;
        g.kind = kind;
        g.s = params.s;
        g.beta = params.beta;
        g.dim = params.dim;
        g.box_radius = params.box_radius;
        t.generator = g;
        t.levels.reserve(params.num_levels);
        for (int k = 0; k < params.num_levels; ++k)
            t.levels.push_back(sample_weight_level(g, k, params.grid_level));
    }
    int nk = static_cast<int>(t.levels.size());
    t.alpha1.resize(nk);
    t.alpha2.resize(nk);
    for (int k = 0; k < nk; ++k) t.alpha1[k] = t.alpha2[k] = two_pow(k * params.s);
    t.validate();
    return t;
}

double local_weight_coeff(const WeightSequence& t, int k, const DyadicCube& q) {
    if (k < 0 || k > t.max_level()) throw std::invalid_argument("level out of range");
    double v = local_lp_norm(t.levels[k], t.p, q);
    if (!(v > 0)) throw std::runtime_error("weight coefficient is not positive");
    return v;
}

WeightSequence bar_transform(const WeightSequence& t) {
    t.validate();
    const GridFunction& g0 = t.levels.front();
    double r = g0.radius(0);
    if (std::abs(r - std::round(r)) > 1e-12)
        throw std::invalid_argument("bar_transform needs an integer box radius");
    WeightSequence out = t;
    int n = g0.dim();
    for (int k = 0; k <= t.max_level(); ++k) {
        const GridFunction& w = t.levels[k];
        auto cubes = cubes_in_box(k, domain_box(w));
        // fixed point: already piecewise constant on the rank-k cubes
        bool constant = true;
        for (const auto& q : cubes) {
            CellRange cr = cells_in_cube(w, q, 1.0);
            double first = w.at(cr.lo[0], (n > 1) ? cr.lo[1] : 0, (n > 2) ? cr.lo[2] : 0);
            for (std::int64_t i0 = cr.lo[0]; i0 < cr.hi[0] && constant; ++i0)
                for (std::int64_t i1 = (n > 1) ? cr.lo[1] : 0;
                     i1 < ((n > 1) ? cr.hi[1] : 1) && constant; ++i1)
                    for (std::int64_t i2 = (n > 2) ? cr.lo[2] : 0;
                         i2 < ((n > 2) ? cr.hi[2] : 1); ++i2)
                        if (w.at(i0, i1, i2) != first) {
                            constant = false;
                            break;
                        }
            if (!constant) break;
        }
        if (constant) continue;

        GridFunction bar = w;
        double pref = (t.p == kInf) ? 1.0 : two_pow(static_cast<double>(k) * n / t.p);
        for (const auto& q : cubes) {
            double mu = pref * local_lp_norm(w, t.p, q);
            CellRange cr = cells_in_cube(w, q, 1.0);
            for (std::int64_t i0 = cr.lo[0]; i0 < cr.hi[0]; ++i0)
                for (std::int64_t i1 = (n > 1) ? cr.lo[1] : 0; i1 < ((n > 1) ? cr.hi[1] : 1); ++i1)
                    for (std::int64_t i2 = (n > 2) ? cr.lo[2] : 0; i2 < ((n > 2) ? cr.hi[2] : 1);
                         ++i2)
                        bar.at(i0, i1, i2) = mu;
        }
        out.levels[k] = bar;
    }
    return out;
}

namespace {

struct MaxTracker {
    double value = 0.0;
    int k = -1, j = -1;
    DyadicCube cube;

    void offer(double v, int kk, int jj, const DyadicCube& q) {
        if (v > value || !std::isfinite(v)) {
            value = v;
            k = kk;
            j = jj;
            cube = q;
        }
    }
};

ClassWitness to_witness(const MaxTracker& m) {
    ClassWitness w;
    w.k = m.k;
    w.j = m.j;
    w.cube = m.cube;
    w.value = m.value;
    return w;
}

}  // namespace

ClassReport check_class_Y(const WeightSequence& s, int k_max, double a1, double a2, double a3,
                          std::int64_t pair_points) {
    s.validate();
    if (a1 > a2) throw std::invalid_argument("check_class_Y needs alpha1 <= alpha2");
    k_max = std::min(k_max, s.max_level());
    const std::int64_t total = s.levels[0].size();

    ClassReport rep;
    MaxTracker c1, c2;
    // condition 1): (1/C1) 2^{a1(k-l)} <= s_k/s_l <= C1 2^{a2(k-l)} for l <= k
    for (int l = 0; l <= k_max; ++l)
        for (int k = l; k <= k_max; ++k) {
            const auto& sk = s.levels[k].values();
            const auto& sl = s.levels[l].values();
            double lo = two_pow(a1 * (k - l));
            double hi = two_pow(a2 * (k - l));
            double worst = 0.0;
            std::int64_t worst_i = 0;
#ifdef _OPENMP
#pragma omp parallel
            {
                double w = 0.0;
                std::int64_t wi = 0;
#pragma omp for nowait
                for (std::int64_t i = 0; i < total; ++i) {
                    double ratio = sk[i] / sl[i];
                    double v = std::max(lo / ratio, ratio / hi);
                    if (v > w) {
                        w = v;
                        wi = i;
                    }
                }
#pragma omp critical
                if (w > worst || (w == worst && wi < worst_i)) {
                    worst = w;
                    worst_i = wi;
                }
            }
#else
            for (std::int64_t i = 0; i < total; ++i) {
                double ratio = sk[i] / sl[i];
                double v = std::max(lo / ratio, ratio / hi);
                if (v > worst) {
                    worst = v;
                    worst_i = i;
                }
            }
#endif
            DyadicCube marker{s.levels[0].dim(), s.levels[0].level(), {worst_i, 0, 0}};
            c1.offer(worst, k, l, marker);
        }

    // condition 2): s_k(x) <= C2 s_k(y) (1 + 2^k |x-y|)^{a3}
    const GridFunction& g = s.levels[0];
    int dim = g.dim();
    std::int64_t per_dim = std::max<std::int64_t>(
        1, static_cast<std::int64_t>(std::floor(std::pow(double(pair_points), 1.0 / dim))));
    std::array<std::int64_t, 3> stride{1, 1, 1};
    std::vector<std::array<std::int64_t, 3>> pts;
    for (int d = 0; d < dim; ++d) stride[d] = std::max<std::int64_t>(1, g.extent(d) / per_dim);
    for (std::int64_t i0 = 0; i0 < g.extent(0); i0 += stride[0])
        for (std::int64_t i1 = 0; i1 < ((dim > 1) ? g.extent(1) : 1); i1 += stride[1])
            for (std::int64_t i2 = 0; i2 < ((dim > 2) ? g.extent(2) : 1); i2 += stride[2])
                pts.push_back({i0, i1, i2});

    for (int k = 0; k <= k_max; ++k) {
        const GridFunction& sk = s.levels[k];
        double scale = two_pow(k);
        double worst = 0.0;
        std::int64_t wx = 0, wy = 0;
        std::int64_t np = static_cast<std::int64_t>(pts.size());
#ifdef _OPENMP
#pragma omp parallel
        {
            double w = 0.0;
            std::int64_t lx = 0, ly = 0;
#pragma omp for nowait
            for (std::int64_t a = 0; a < np; ++a) {
                double sx = sk.at(pts[a][0], pts[a][1], pts[a][2]);
                for (std::int64_t b = 0; b < np; ++b) {
                    double sy = sk.at(pts[b][0], pts[b][1], pts[b][2]);
                    double d2 = 0.0;
                    for (int d = 0; d < dim; ++d) {
                        double dx = sk.coord(d, pts[a][d]) - sk.coord(d, pts[b][d]);
                        d2 += dx * dx;
                    }
                    double v = sx / (sy * std::pow(1.0 + scale * std::sqrt(d2), a3));
                    if (v > w) {
                        w = v;
                        lx = a;
                        ly = b;
                    }
                }
            }
#pragma omp critical
            if (w > worst) {
                worst = w;
                wx = lx;
                wy = ly;
            }
        }
#else
        for (std::int64_t a = 0; a < np; ++a) {
            double sx = sk.at(pts[a][0], pts[a][1], pts[a][2]);
            for (std::int64_t b = 0; b < np; ++b) {
                double sy = sk.at(pts[b][0], pts[b][1], pts[b][2]);
                double d2 = 0.0;
                for (int d = 0; d < dim; ++d) {
                    double dx = sk.coord(d, pts[a][d]) - sk.coord(d, pts[b][d]);
                    d2 += dx * dx;
                }
                double v = sx / (sy * std::pow(1.0 + scale * std::sqrt(d2), a3));
                if (v > worst) {
                    worst = v;
                    wx = a;
                    wy = b;
                }
            }
        }
#endif
        DyadicCube marker{dim, k, {wx, wy, 0}};
        c2.offer(worst, k, k, marker);
    }

    rep.C1 = c1.value;
    rep.C2 = c2.value;
    rep.worst1 = to_witness(c1);
    rep.worst2 = to_witness(c2);
    rep.member = std::isfinite(rep.C1) && std::isfinite(rep.C2);
    return rep;
}

ClassReport check_class_X(const WeightSequence& t, int k_max, double c1, double c2) {
    t.validate();
    if (c1 < 1.0 || c2 < 1.0) throw std::invalid_argument("cube scales must be >= 1");
    k_max = std::min(k_max, t.max_level());
    int n = t.levels[0].dim();
    Box box = domain_box(t.levels[0]);

    ClassReport rep;
    MaxTracker m1, m2, m3;
    bool overflow = false;

    for (int k = 0; k <= k_max && !overflow; ++k) {
        auto cubes = cubes_in_box(k, box);
        std::int64_t nc = static_cast<std::int64_t>(cubes.size());
        double pref = two_pow(static_cast<double>(k) * n);
        // first factors of (2.3) and (2.4) depend on (k, m) only
        std::vector<double> f1(nc), f1inv(nc);
#pragma omp parallel for schedule(static)
        for (std::int64_t mi = 0; mi < nc; ++mi) {
            double v;
            if (t.p == kInf)
                v = local_max(t.levels[k], cubes[mi], c1);
            else
                v = std::pow(pref * local_power_integral(t.levels[k], t.p, cubes[mi], c1),
                             1.0 / t.p);
            f1[mi] = v;
            f1inv[mi] = 1.0 / v;
        }
        for (int j = k; j <= k_max; ++j) {
            std::vector<double> v1(nc), v2(nc);
#pragma omp parallel for schedule(static)
            for (std::int64_t mi = 0; mi < nc; ++mi) {
                double neg;
                if (t.sigma1 == kInf)
                    neg = 1.0 / local_min(t.levels[j], cubes[mi], c2);
                else
                    neg = std::pow(
                        pref * local_power_integral(t.levels[j], -t.sigma1, cubes[mi], c2),
                        1.0 / t.sigma1);
                double pos;
                if (t.sigma2 == kInf)
                    pos = local_max(t.levels[j], cubes[mi], c2);
                else
                    pos = std::pow(pref * local_power_integral(t.levels[j], t.sigma2, cubes[mi], c2),
                                   1.0 / t.sigma2);
                v1[mi] = f1[mi] * neg * (t.alpha1[j] / t.alpha1[k]);
                v2[mi] = f1inv[mi] * pos * (t.alpha2[k] / t.alpha2[j]);
            }
            for (std::int64_t mi = 0; mi < nc; ++mi) {
                if (!std::isfinite(v1[mi]) || !std::isfinite(v2[mi])) overflow = true;
                m1.offer(v1[mi], k, j, cubes[mi]);
                m2.offer(v2[mi], k, j, cubes[mi]);
            }
        }
        // condition (2.5): neighbor coefficients
        std::vector<double> coeff(nc);
#pragma omp parallel for schedule(static)
        for (std::int64_t mi = 0; mi < nc; ++mi)
            coeff[mi] = local_lp_norm(t.levels[k], t.p, cubes[mi]);
        std::array<std::int64_t, 3> lo = cubes.front().m, hi = cubes.back().m;
        auto idx_of = [&](const std::array<std::int64_t, 3>& m) -> std::int64_t {
            std::int64_t c1n = (n > 1) ? (hi[1] - lo[1] + 1) : 1;
            std::int64_t c2n = (n > 2) ? (hi[2] - lo[2] + 1) : 1;
            return ((m[0] - lo[0]) * c1n + ((n > 1) ? m[1] - lo[1] : 0)) * c2n +
                   ((n > 2) ? m[2] - lo[2] : 0);
        };
        for (std::int64_t mi = 0; mi < nc; ++mi) {
            for (int d0 = -1; d0 <= 1; ++d0)
                for (int d1 = (n > 1) ? -1 : 0; d1 <= ((n > 1) ? 1 : 0); ++d1)
                    for (int d2 = (n > 2) ? -1 : 0; d2 <= ((n > 2) ? 1 : 0); ++d2) {
                        std::array<std::int64_t, 3> mm = cubes[mi].m;
                        mm[0] += d0;
                        mm[1] += d1;
                        mm[2] += d2;
                        if (mm[0] < lo[0] || mm[0] > hi[0]) continue;
                        if (n > 1 && (mm[1] < lo[1] || mm[1] > hi[1])) continue;
                        if (n > 2 && (mm[2] < lo[2] || mm[2] > hi[2])) continue;
                        double a = std::log2(coeff[mi] / coeff[idx_of(mm)]);
                        m3.offer(a, k, k, cubes[mi]);
                    }
        }
    }

    rep.C1 = m1.value;
    rep.C2 = m2.value;
    rep.fitted_alpha3 = std::max(0.0, m3.value);
    rep.worst1 = to_witness(m1);
    rep.worst2 = to_witness(m2);
    rep.worst3 = to_witness(m3);
    rep.member = !overflow && std::isfinite(rep.C1) && std::isfinite(rep.C2) &&
                 rep.fitted_alpha3 <= t.alpha3 + 1e-9;
    return rep;
}

HolderReport verify_holder_identity(const WeightSequence& t, double theta, int k_max) {
    t.validate();
    if (!(theta > 0) || theta > t.p) throw std::invalid_argument("theta must lie in (0, p]");
    k_max = std::min(k_max, t.max_level());
    int n = t.levels[0].dim();
    double p_theta = t.p / theta;  // sigma_1 = theta * p_theta'
    double s1;
    if (p_theta == 1.0)
        s1 = kInf;
    else if (p_theta == kInf)
        s1 = theta;
    else
        s1 = theta * (p_theta / (p_theta - 1.0));

    HolderReport rep;
    MaxTracker worst;
    Box box = domain_box(t.levels[0]);
    for (int k = 0; k <= k_max; ++k) {
        double lhs = two_pow(-static_cast<double>(k) * n / theta);
        for (const auto& q : cubes_in_box(k, box)) {
            double first = (t.p == kInf) ? local_max(t.levels[k], q)
                                         : std::pow(local_power_integral(t.levels[k], t.p, q),
                                                    1.0 / t.p);
            double second = (s1 == kInf)
                                ? 1.0 / local_min(t.levels[k], q)
                                : std::pow(local_power_integral(t.levels[k], -s1, q), 1.0 / s1);
            worst.offer(lhs - first * second, k, k, q);
        }
    }
    rep.max_violation = worst.value;
    rep.worst = to_witness(worst);
    return rep;
}

double check_ap_loc(const GridFunction& w, double u, double side_cap, int k_max) {
    if (!(u > 1)) throw std::invalid_argument("check_ap_loc needs u in (1, inf]");
    w.check_finite("check_ap_loc");
    int k_lo = 0;
    while (std::ldexp(1.0, -k_lo) > side_cap) ++k_lo;
    k_max = std::min(k_max, w.level() - 3);
    double vol_unit = 1.0;
    double best = 0.0;
    Box box = domain_box(w);
    for (int k = k_lo; k <= k_max; ++k) {
        double vol = std::ldexp(vol_unit, -k * w.dim());
        auto cubes = cubes_in_box(k, box);
        std::int64_t nc = static_cast<std::int64_t>(cubes.size());
        std::vector<double> vals(nc);
#pragma omp parallel for schedule(static)
        for (std::int64_t mi = 0; mi < nc; ++mi) {
            double avg = local_power_integral(w, 1.0, cubes[mi]) / vol;
            double dual;
            if (u == kInf)
                dual = 1.0 / local_min(w, cubes[mi]);
            else
                dual = std::pow(local_power_integral(w, -1.0 / (u - 1.0), cubes[mi]) / vol,
                                u - 1.0);
            vals[mi] = avg * dual;
        }
        for (double v : vals) best = std::max(best, v);
    }
    return best;
}

void write_weight_manifest(const WeightSequence& t, const std::string& path) {
    t.validate();
    nlohmann::json j;
    j["schema"] = 1;
    j["p"] = t.p;
    j["sigma1"] = t.sigma1;
    j["sigma2"] = t.sigma2;
    j["alpha3"] = t.alpha3;
    j["alpha1"] = t.alpha1;
    j["alpha2"] = t.alpha2;
    if (t.generator && t.generator->kind != WeightGenerator::Kind::custom_grid) {
        nlohmann::json g;
        g["kind"] = (t.generator->kind == WeightGenerator::Kind::two_ks) ? "two_ks"
                                                                         : "power_times_2ks";
        g["s"] = t.generator->s;
        g["beta"] = t.generator->beta;
        g["dim"] = t.generator->dim;
        g["box_radius"] = t.generator->box_radius;
        g["grid_level"] = t.grid_level();
        g["num_levels"] = t.levels.size();
        j["generator"] = g;
    } else {
        std::filesystem::path base(path);
        std::vector<std::string> files;
        for (std::size_t k = 0; k < t.levels.size(); ++k) {
            std::string name = base.stem().string() + "_t" + std::to_string(k) + ".csv";
            write_csv(t.levels[k], (base.parent_path() / name).string());
            files.push_back(name);
        }
        j["levels"] = files;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << j.dump(2) << "\n";
}

WeightSequence read_weight_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    nlohmann::json j;
    in >> j;
    WeightSequence t;
    t.p = j.at("p").get<double>();
    t.sigma1 = j.value("sigma1", 2.0);
    t.sigma2 = j.value("sigma2", 2.0);
    t.alpha3 = j.value("alpha3", 0.0);
    t.alpha1 = j.at("alpha1").get<std::vector<double>>();
    t.alpha2 = j.at("alpha2").get<std::vector<double>>();
    if (j.contains("generator")) {
        const auto& g = j["generator"];
        WeightParams params;
        params.dim = g.at("dim").get<int>();
        params.box_radius = g.at("box_radius").get<double>();
        params.grid_level = g.at("grid_level").get<int>();
        params.num_levels = g.at("num_levels").get<int>();
        params.s = g.value("s", 0.0);
        params.beta = g.value("beta", 0.0);
        params.p = t.p;
        params.sigma1 = t.sigma1;
        params.sigma2 = t.sigma2;
        params.alpha3 = t.alpha3;
        auto kind = (g.at("kind").get<std::string>() == "two_ks")
                        ? WeightGenerator::Kind::two_ks
                        : WeightGenerator::Kind::power_times_2ks;
        WeightSequence gen = make_weights(kind, params);
        t.levels = std::move(gen.levels);
        t.generator = gen.generator;
    } else {
        std::filesystem::path base(path);
        for (const auto& f : j.at("levels"))
            t.levels.push_back(read_csv((base.parent_path() / f.get<std::string>()).string()));
        WeightGenerator g;
        g.kind = WeightGenerator::Kind::custom_grid;
        t.generator = g;
    }
    t.validate();
    return t;
}

}  // namespace besov
