#include "besovkit/convolution.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#ifdef BESOVKIT_HAVE_FFTW
#include <fftw3.h>
#endif

namespace besov {

GridFunction rescale_kernel(const GridFunction& g, int j) {
    if (j < 0) throw std::invalid_argument("rescale_kernel: level must be >= 0");
    if (!g.node_centered())
        throw std::invalid_argument("rescale_kernel requires a zero-centered kernel grid");
    if (j == 0) return g;
    std::int64_t w = (g.extent(0) - 1) / 2;
    std::int64_t wj = w >> j;
    if (wj < 2) throw std::invalid_argument("resolution insufficient for level j");
    GridFunction out = GridFunction::kernel(g.dim(), wj, g.level());
    double amp = std::ldexp(1.0, j * g.dim());  // 2^{jn}
    std::int64_t stride = std::int64_t{1} << j;
    std::int64_t n1 = (g.dim() > 1) ? 2 * wj + 1 : 1;
    std::int64_t n2 = (g.dim() > 2) ? 2 * wj + 1 : 1;
    for (std::int64_t i0 = 0; i0 < 2 * wj + 1; ++i0)
        for (std::int64_t i1 = 0; i1 < n1; ++i1)
            for (std::int64_t i2 = 0; i2 < n2; ++i2)
                out.at(i0, i1, i2) = amp * g.at(w + (i0 - wj) * stride,
                                                (g.dim() > 1) ? w + (i1 - wj) * stride : 0,
                                                (g.dim() > 2) ? w + (i2 - wj) * stride : 0);
    return out;
}

namespace {

struct ConvShape {
    std::array<std::int64_t, 3> n_out{1, 1, 1};
    // u_lo[d]: coordinate (in h/2 units) of the first kept output sample.
    std::array<std::int64_t, 3> u_lo{0, 0, 0};
    // o0[d]: offset of the first kept sample within the full linear convolution.
    std::array<std::int64_t, 3> o0{0, 0, 0};
    std::array<std::int64_t, 3> n_full{1, 1, 1};
};

// Output samples live on the lattice u = 2o + 2 - Nf - Ng (h/2 units); we keep
// |u| <= Nf, i.e. the samples inside f's closed box.
ConvShape conv_shape(const GridFunction& f, const GridFunction& g) {
    ConvShape s;
    for (int d = 0; d < f.dim(); ++d) {
        std::int64_t nf = f.extent(d), ng = g.extent(d);
        std::int64_t umin = 2 - nf - ng;
        std::int64_t ulo = umin + 2 * ((ng - 1) / 2);  // smallest lattice u >= -nf
        std::int64_t uhi = ulo + 2 * ((nf - ulo) / 2);  // largest lattice u <= nf
        s.n_full[d] = nf + ng - 1;
        s.u_lo[d] = ulo;
        s.o0[d] = (ulo - umin) / 2;
        s.n_out[d] = (uhi - ulo) / 2 + 1;
    }
    return s;
}

void check_compatible(const GridFunction& f, const GridFunction& g) {
    if (f.dim() != g.dim() || f.level() != g.level())
        throw std::invalid_argument("convolve: mismatched grids");
}

double cell_vol(const GridFunction& f) {
    double v = 1.0;
    for (int d = 0; d < f.dim(); ++d) v *= f.spacing();
    return v;
}

GridFunction direct_impl(const GridFunction& f, const GridFunction& g, bool parallel) {
    check_compatible(f, g);
    ConvShape s = conv_shape(f, g);
    GridFunction out = make_grid_raw(f.dim(), f.level(), s.n_out);
    double hv = cell_vol(f);
    int dim = f.dim();
    std::array<std::int64_t, 3> nf{f.extent(0), f.extent(1), f.extent(2)};
    std::array<std::int64_t, 3> ng{g.extent(0), g.extent(1), g.extent(2)};
    std::int64_t total = out.size();

#pragma omp parallel for schedule(static) if (parallel)
    for (std::int64_t idx = 0; idx < total; ++idx) {
        std::int64_t rem = idx;
        std::array<std::int64_t, 3> o{0, 0, 0};
        o[2] = rem % s.n_out[2];
        rem /= s.n_out[2];
        o[1] = rem % s.n_out[1];
        rem /= s.n_out[1];
        o[0] = rem;
        // f cell j contributes when the g sample index (u - u_f(j) + ng-1)/2 is in range.
        std::array<std::int64_t, 3> jlo{0, 0, 0}, jhi{0, 0, 0};
        std::array<std::int64_t, 3> base{0, 0, 0};
        for (int d = 0; d < dim; ++d) {
            std::int64_t u = s.u_lo[d] + 2 * o[d];
            // u_g = u - (2j + 1 - nf) must satisfy 1-ng <= u_g <= ng-1
            // => j >= (u + nf - ng) / 2 and j <= (u + nf + ng - 2) / 2
            std::int64_t lo = (u + nf[d] - ng[d]) / 2;
            if (2 * lo < u + nf[d] - ng[d]) ++lo;
            std::int64_t hi = (u + nf[d] + ng[d] - 2) / 2;
            if (2 * hi > u + nf[d] + ng[d] - 2) --hi;
            jlo[d] = std::max<std::int64_t>(lo, 0);
            jhi[d] = std::min<std::int64_t>(hi, nf[d] - 1);
            // g index for f cell j: jg = (u - (2j + 1 - nf) + ng - 1) / 2
            base[d] = (u + nf[d] + ng[d]) / 2 - 1;
        }
        double acc = 0.0;
        std::int64_t l1 = (dim > 1) ? jlo[1] : 0, h1 = (dim > 1) ? jhi[1] : 0;
        std::int64_t l2 = (dim > 2) ? jlo[2] : 0, h2 = (dim > 2) ? jhi[2] : 0;
        for (std::int64_t j0 = jlo[0]; j0 <= jhi[0]; ++j0)
            for (std::int64_t j1 = l1; j1 <= h1; ++j1)
                for (std::int64_t j2 = l2; j2 <= h2; ++j2)
                    acc += f.at(j0, j1, j2) * g.at(base[0] - j0, (dim > 1) ? base[1] - j1 : 0,
                                                   (dim > 2) ? base[2] - j2 : 0);
        out.values()[static_cast<std::size_t>(idx)] = hv * acc;
    }
    return out;
}

}  // namespace

GridFunction convolve_direct_serial(const GridFunction& f, const GridFunction& g) {
    return direct_impl(f, g, false);
}

GridFunction convolve_direct(const GridFunction& f, const GridFunction& g) {
    return direct_impl(f, g, true);
}

#ifdef BESOVKIT_HAVE_FFTW

GridFunction convolve_fft(const GridFunction& f, const GridFunction& g) {
    check_compatible(f, g);
    ConvShape s = conv_shape(f, g);
    int dim = f.dim();
    std::int64_t total = 1;
    int dims[3];
    for (int d = 0; d < dim; ++d) {
        dims[d] = static_cast<int>(s.n_full[d]);
        total *= s.n_full[d];
    }
    std::vector<std::complex<double>> fa(static_cast<std::size_t>(total), 0.0);
    std::vector<std::complex<double>> ga(static_cast<std::size_t>(total), 0.0);

    auto full_index = [&](std::int64_t i0, std::int64_t i1, std::int64_t i2) {
        return (i0 * s.n_full[1] + i1) * s.n_full[2] + i2;
    };
    for (std::int64_t i0 = 0; i0 < f.extent(0); ++i0)
        for (std::int64_t i1 = 0; i1 < f.extent(1); ++i1)
            for (std::int64_t i2 = 0; i2 < f.extent(2); ++i2)
                fa[full_index(i0, i1, i2)] = f.at(i0, i1, i2);
    for (std::int64_t i0 = 0; i0 < g.extent(0); ++i0)
        for (std::int64_t i1 = 0; i1 < g.extent(1); ++i1)
            for (std::int64_t i2 = 0; i2 < g.extent(2); ++i2)
                ga[full_index(i0, i1, i2)] = g.at(i0, i1, i2);

    auto run = [&](std::vector<std::complex<double>>& a, int sign) {
        fftw_plan plan = fftw_plan_dft(dim, dims, reinterpret_cast<fftw_complex*>(a.data()),
                                       reinterpret_cast<fftw_complex*>(a.data()), sign,
                                       FFTW_ESTIMATE);
        fftw_execute(plan);
        fftw_destroy_plan(plan);
    };
    run(fa, FFTW_FORWARD);
    run(ga, FFTW_FORWARD);
    for (std::int64_t i = 0; i < total; ++i) fa[i] *= ga[i];
    run(fa, FFTW_BACKWARD);

    GridFunction out = make_grid_raw(dim, f.level(), s.n_out);
    double scale = cell_vol(f) / static_cast<double>(total);
    std::int64_t n1 = (dim > 1) ? s.n_out[1] : 1, n2 = (dim > 2) ? s.n_out[2] : 1;
    for (std::int64_t o0 = 0; o0 < s.n_out[0]; ++o0)
        for (std::int64_t o1 = 0; o1 < n1; ++o1)
            for (std::int64_t o2 = 0; o2 < n2; ++o2)
                out.at(o0, o1, o2) =
                    scale * fa[full_index(s.o0[0] + o0, (dim > 1) ? s.o0[1] + o1 : 0,
                                          (dim > 2) ? s.o0[2] + o2 : 0)]
                                .real();
    return out;
}

#else

GridFunction convolve_fft(const GridFunction& f, const GridFunction& g) {
    return convolve_direct(f, g);
}

#endif

GridFunction convolve(const GridFunction& f, const GridFunction& g) {
    check_compatible(f, g);
    double cost = 1.0;
    for (int d = 0; d < f.dim(); ++d)
        cost *= static_cast<double>(f.extent(d)) * static_cast<double>(g.extent(d));
    if (cost > 2e7) return convolve_fft(f, g);
    return convolve_direct(f, g);
}

}  // namespace besov
