#pragma once

#include <array>
#include <cmath>
#include <functional>

#include "besovkit/grid.hpp"

namespace besov::testutil {

/// Fill every sample from a callable taking the sample coordinates.
inline void fill(GridFunction& f, const std::function<double(const std::array<double, 3>&)>& fn) {
    std::array<double, 3> x{0, 0, 0};
    std::int64_t n1 = (f.dim() > 1) ? f.extent(1) : 1;
    std::int64_t n2 = (f.dim() > 2) ? f.extent(2) : 1;
    for (std::int64_t i0 = 0; i0 < f.extent(0); ++i0) {
        x[0] = f.coord(0, i0);
        for (std::int64_t i1 = 0; i1 < n1; ++i1) {
            if (f.dim() > 1) x[1] = f.coord(1, i1);
            for (std::int64_t i2 = 0; i2 < n2; ++i2) {
                if (f.dim() > 2) x[2] = f.coord(2, i2);
                f.at(i0, i1, i2) = fn(x);
            }
        }
    }
}

/// C-infinity bump exp(-1/(1-t^2)) supported on |t| < 1.
inline double bump1(double t) {
    double s = 1.0 - t * t;
    if (s <= 0.0) return 0.0;
    return std::exp(-1.0 / s);
}

/// Radial bump supported in |x| < rho around c, amplitude a.
inline double radial_bump(const std::array<double, 3>& x, int dim, double c0, double rho,
                          double a = 1.0) {
    double r2 = 0.0;
    for (int d = 0; d < dim; ++d) r2 += (x[d] - c0) * (x[d] - c0);
    return a * bump1(std::sqrt(r2) / rho);
}

}  // namespace besov::testutil
