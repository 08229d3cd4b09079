#include "besovkit/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "besovkit/convolution.hpp"
#include "besovkit/sequences.hpp"

#ifdef BESOVKIT_HAVE_FFTW
#include <fftw3.h>
#endif

namespace besov {

ConvField conv_field(const GridFunction& f, const Mollifier& mol, int level_cap) {
    if (f.dim() != mol.dim || f.level() != mol.grid_level)
        throw std::invalid_argument("conv_field: mollifier was built for a different grid");
    if (level_cap < 0) throw std::invalid_argument("conv_field: level cap must be >= 0");
    ConvField cf;
    cf.layers.reserve(level_cap + 1);
    cf.layers.push_back(convolve(f, mol.phi0));
    GridFunction phi = mol.phi_grid();
    for (int k = 1; k <= level_cap; ++k) cf.layers.push_back(convolve(f, rescale_kernel(phi, k)));
    return cf;
}

namespace {

NormValue aggregate_levels(std::vector<double> terms, double q) {
    NormValue nv;
    nv.level_terms = terms;
    nv.value = lq_aggregate(terms, q);
    if (!terms.empty() && nv.value > 0.0) {
        if (q == kInf)
            nv.tail_fraction = terms.back() / nv.value;
        else
            nv.tail_fraction = std::pow(terms.back(), q) / std::pow(nv.value, q);
    }
    return nv;
}

}  // namespace

NormValue conv_norm(const ConvField& cf, const WeightSequence& t, const NormParams& np) {
    if (t.max_level() < cf.max_level())
        throw std::invalid_argument("conv_norm: weight sequence has too few levels");
    std::vector<double> terms(cf.layers.size());
    for (std::size_t k = 0; k < cf.layers.size(); ++k)
        terms[k] = weighted_lp_norm(t.levels[k], cf.layers[k], np.p);
    return aggregate_levels(std::move(terms), np.q);
}

NormValue conv_norm(const GridFunction& f, const WeightSequence& t, const Mollifier& mol,
                    const NormParams& np) {
    return conv_norm(conv_field(f, mol, np.levels), t, np);
}

namespace {

MaximalField maximal_field_impl(const ConvField& cf, double A, double c, int j_max,
                                bool parallel) {
    if (!(A > 0) || c < 1.0) throw std::invalid_argument("maximal_field: need A > 0, c >= 1");
    const GridFunction& base = cf.layers.front();
    int K = cf.max_level();
    j_max = std::min(j_max, K);
    MaximalField mf;
    mf.A = A;
    mf.c = c;
    mf.level_cap = K;
    mf.cubes.resize(j_max + 1);
    mf.values.resize(j_max + 1);
    mf.argmax_level.resize(j_max + 1);
    Box box = domain_box(base);
    for (int j = 0; j <= j_max; ++j) {
        mf.cubes[j] = cubes_in_box(j, box);
        std::int64_t nc = static_cast<std::int64_t>(mf.cubes[j].size());
        mf.values[j].assign(nc, 0.0);
        mf.argmax_level[j].assign(nc, -1);
#pragma omp parallel for schedule(static) if (parallel)
        for (std::int64_t mi = 0; mi < nc; ++mi) {
            double best = 0.0;
            int best_k = -1;
            for (int k = j; k <= K; ++k) {
                double sup = local_lp_norm(cf.layers[k], kInf, mf.cubes[j][mi], c);
                double v = std::exp2(A * static_cast<double>(j - k)) * sup;
                if (v > best) {
                    best = v;
                    best_k = k;
                }
            }
            mf.values[j][mi] = best;
            mf.argmax_level[j][mi] = best_k;
        }
    }
    return mf;
}

}  // namespace

MaximalField maximal_field(const ConvField& cf, double A, double c, int j_max) {
    return maximal_field_impl(cf, A, c, j_max, true);
}

MaximalField maximal_field_serial(const ConvField& cf, double A, double c, int j_max) {
    return maximal_field_impl(cf, A, c, j_max, false);
}

bool MaximalField::truncation_hit() const {
    for (std::size_t j = 0; j < argmax_level.size(); ++j)
        for (std::size_t mi = 0; mi < argmax_level[j].size(); ++mi)
            if (argmax_level[j][mi] == level_cap && values[j][mi] > 0.0) return true;
    return false;
}

Lemma31Report verify_lemma31(const GridFunction& f, const Mollifier& mol, double r, double c1,
                             double A, int j_max, int level_cap, double c2) {
    if (!(r > 0) || r == kInf) throw std::invalid_argument("verify_lemma31: r must be finite > 0");
    if (c2 <= 0.0) c2 = c1 + 4.0 * mol.support_radius;
    if (c2 < c1) throw std::invalid_argument("verify_lemma31: c2 must be >= c1");
    ConvField cf = conv_field(f, mol, level_cap);
    MaximalField mf = maximal_field(cf, A, c1, j_max);
    int n = f.dim();
    int K = cf.max_level();

    Lemma31Report rep;
    for (int j = 0; j <= std::min(j_max, K); ++j) {
        std::int64_t nc = static_cast<std::int64_t>(mf.cubes[j].size());
        std::vector<double> ratio(nc, 0.0);
#pragma omp parallel for schedule(static)
        for (std::int64_t mi = 0; mi < nc; ++mi) {
            double acc = 0.0;
            for (int k = j; k <= K; ++k) {
                double integ = local_power_integral(cf.layers[k], r, mf.cubes[j][mi], c2);
                acc += std::exp2((j - k) * A * r + k * n) * integ;
            }
            double rhs = std::pow(acc, 1.0 / r);
            double lhs = mf.values[j][mi];
            if (rhs > 0.0)
                ratio[mi] = lhs / rhs;
            else
                ratio[mi] = (lhs > 0.0) ? kInf : 0.0;
        }
        for (std::int64_t mi = 0; mi < nc; ++mi)
            if (ratio[mi] > rep.C) {
                rep.C = ratio[mi];
                rep.worst_j = j;
                rep.worst_cube = mf.cubes[j][mi];
            }
    }
    return rep;
}

Lemma33Report verify_lemma33(const GridFunction& f, const WeightSequence& t,
                             const Mollifier& mol, double A, double c, double mu,
                             const NormParams& np) {
    Lemma33Report rep;
    // hypothesis wiring
    ExponentPack ep;
    ep.p = np.p;
    ep.q = np.q;
    ep.r = np.r;
    ep.mu = mu;
    double sigma1_req = ep.sigma1_from(np.r);
    if (!(mu > 0) || mu > std::min({1.0, np.q, np.r}) + 1e-12) {
        rep.message = "mu must lie in (0, min{1,q,r}]";
        return rep;
    }
    if (std::abs(t.sigma1 - sigma1_req) > 1e-9 * std::max(1.0, sigma1_req) &&
        !(t.sigma1 == kInf && sigma1_req == kInf)) {
        rep.message = "weight class sigma1 does not equal r * (p/r)'";
        return rep;
    }
    double s = ep.q_mu();
    PositiveSequence beta;
    for (int k = 0; k <= t.max_level(); ++k)
        beta.terms.push_back(std::pow(std::exp2(A * k) * t.alpha1[k], mu));
    if (t.max_level() >= 1)
        beta.tail_ratio = beta.terms.back() / beta.terms[beta.terms.size() - 2];
    auto probe = hardy_condition_probe(beta, s, HardyDirection::tail_2_12);
    if (!probe.stable) {
        rep.message = "(2.12) sup diverges for beta_k = (2^{kA} alpha1_k)^mu";
        return rep;
    }
    rep.hypotheses_ok = true;

    ConvField cf = conv_field(f, mol, np.levels);
    MaximalField mf = maximal_field(cf, A, c, np.levels);
    int K = cf.max_level();
    std::vector<double> lhs_terms(K + 1, 0.0);
    for (int j = 0; j <= K; ++j) {
        std::int64_t nc = static_cast<std::int64_t>(mf.cubes[j].size());
        std::vector<double> coeff(nc);
#pragma omp parallel for schedule(static)
        for (std::int64_t mi = 0; mi < nc; ++mi)
            coeff[mi] = local_lp_norm(t.levels[j], t.p, mf.cubes[j][mi]);
        if (np.p == kInf) {
            double sup = 0.0;
            for (std::int64_t mi = 0; mi < nc; ++mi)
                sup = std::max(sup, coeff[mi] * mf.values[j][mi]);
            lhs_terms[j] = sup;
        } else {
            double acc = 0.0;
            for (std::int64_t mi = 0; mi < nc; ++mi)
                acc += std::pow(coeff[mi] * mf.values[j][mi], np.p);
            lhs_terms[j] = std::pow(acc, 1.0 / np.p);
        }
    }
    rep.lhs = lq_aggregate(lhs_terms, np.q);
    rep.rhs = conv_norm(cf, t, np).value;
    rep.ratio = (rep.rhs > 0.0) ? rep.lhs / rep.rhs : 0.0;
    return rep;
}

#ifdef BESOVKIT_HAVE_FFTW

namespace {

double psi0_cutoff(double tmag) {
    if (tmag <= 1.0) return 1.0;
    if (tmag >= 2.0) return 0.0;
    auto sigma = [](double z) { return (z > 0.0) ? std::exp(-1.0 / z) : 0.0; };
    double up = sigma(2.0 - tmag);
    return up / (up + sigma(tmag - 1.0));
}

struct Spectrum {
    int dim;
    int dims[3];
    std::vector<std::complex<double>> hat;
    std::vector<double> freq_mag;
};

Spectrum forward_spectrum(const GridFunction& f) {
    if (f.node_centered())
        throw std::invalid_argument("fourier norms need a cell-centered box grid");
    Spectrum sp;
    sp.dim = f.dim();
    std::int64_t total = 1;
    for (int d = 0; d < f.dim(); ++d) {
        sp.dims[d] = static_cast<int>(f.extent(d));
        total *= f.extent(d);
    }
    sp.hat.assign(f.values().begin(), f.values().end());
    fftw_plan plan =
        fftw_plan_dft(sp.dim, sp.dims, reinterpret_cast<fftw_complex*>(sp.hat.data()),
                      reinterpret_cast<fftw_complex*>(sp.hat.data()), FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);

    sp.freq_mag.resize(static_cast<std::size_t>(total));
    std::array<double, 3> base{0, 0, 0};
    for (int d = 0; d < f.dim(); ++d) base[d] = M_PI / f.radius(d);
    std::int64_t n1 = (f.dim() > 1) ? f.extent(1) : 1, n2 = (f.dim() > 2) ? f.extent(2) : 1;
    std::int64_t idx = 0;
    for (std::int64_t i0 = 0; i0 < f.extent(0); ++i0)
        for (std::int64_t i1 = 0; i1 < n1; ++i1)
            for (std::int64_t i2 = 0; i2 < n2; ++i2, ++idx) {
                auto wrap = [](std::int64_t i, std::int64_t nn) {
                    return (i <= nn / 2) ? static_cast<double>(i) : static_cast<double>(i - nn);
                };
                double x0 = wrap(i0, f.extent(0)) * base[0];
                double x1 = (f.dim() > 1) ? wrap(i1, f.extent(1)) * base[1] : 0.0;
                double x2 = (f.dim() > 2) ? wrap(i2, f.extent(2)) * base[2] : 0.0;
                sp.freq_mag[idx] = std::sqrt(x0 * x0 + x1 * x1 + x2 * x2);
            }
    return sp;
}

GridFunction layer_from_spectrum(const GridFunction& f, const Spectrum& sp, int j) {
    std::vector<std::complex<double>> buf(sp.hat.size());
    double down = std::exp2(-j);
    for (std::size_t i = 0; i < buf.size(); ++i) {
        double m = sp.freq_mag[i];
        double mult = (j == 0) ? psi0_cutoff(m) : psi0_cutoff(m * down) - psi0_cutoff(m * down * 2.0);
        buf[i] = sp.hat[i] * mult;
    }
    int dims[3] = {sp.dims[0], sp.dims[1], sp.dims[2]};
    fftw_plan plan =
        fftw_plan_dft(sp.dim, dims, reinterpret_cast<fftw_complex*>(buf.data()),
                      reinterpret_cast<fftw_complex*>(buf.data()), FFTW_BACKWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    GridFunction out = f;
    double scale = 1.0 / static_cast<double>(buf.size());
    for (std::size_t i = 0; i < buf.size(); ++i) out.values()[i] = buf[i].real() * scale;
    return out;
}

}  // namespace

GridFunction fourier_layer(const GridFunction& f, int j) {
    Spectrum sp = forward_spectrum(f);
    return layer_from_spectrum(f, sp, j);
}

NormValue fourier_lp_norm(const GridFunction& f, const WeightSequence& s_weights, double p,
                          double q, int level_cap) {
    if (s_weights.max_level() < level_cap)
        throw std::invalid_argument("fourier_lp_norm: weight sequence has too few levels");
    // annulus K must fit under the lattice Nyquist frequency pi * 2^J
    if (std::exp2(level_cap + 1) > M_PI * std::exp2(f.level()))
        throw std::invalid_argument("level cap beyond the Nyquist annulus");
    Spectrum sp = forward_spectrum(f);
    std::vector<double> terms(level_cap + 1);
    for (int j = 0; j <= level_cap; ++j) {
        GridFunction layer = layer_from_spectrum(f, sp, j);
        terms[j] = weighted_lp_norm(s_weights.levels[j], layer, p);
    }
    return aggregate_levels(std::move(terms), q);
}

#else

GridFunction fourier_layer(const GridFunction&, int) {
    throw std::runtime_error("besovkit was built without FFTW support");
}

NormValue fourier_lp_norm(const GridFunction&, const WeightSequence&, double, double, int) {
    throw std::runtime_error("besovkit was built without FFTW support");
}

#endif

}  // namespace besov
