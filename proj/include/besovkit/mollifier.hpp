#pragma once

#include <string>
#include <vector>

#include "besovkit/grid.hpp"

namespace besov {

/// A smooth compactly supported kernel phi0 with unit mass and prescribed
/// vanishing moments, together with phi = phi0 - 2^{-n} phi0(./2).
///
/// phi0 is a linear combination of dilated (truncated) Gaussian profiles; the
/// combination coefficients solve the moment system on the build grid, so the
/// grid moments int x^beta phi0 vanish for 1 <= |beta| <= moments_requested to
/// solver precision.  Odd moments vanish identically by symmetry.
struct Mollifier {
    int dim = 1;
    int grid_level = 10;
    double support_radius = 0.5;  // phi0 vanishes outside [-rho, rho]^n
    int moments_requested = 0;    // M
    int vanishing_order = 0;      // achieved L_phi of phi, measured on the grid
    std::vector<double> scales;   // Gaussian sigma per component
    std::vector<double> coeffs;   // combination coefficients
    GridFunction phi0;            // node-centered samples, half width rho*2^J

    /// phi0 evaluated analytically at a point.
    double eval_phi0(const std::array<double, 3>& x) const;
    /// Node-centered samples of phi = phi0 - 2^{-n} phi0(./2), half width 2*rho*2^J.
    GridFunction phi_grid() const;
};

/// Builds phi0 with int phi0 = 1 and int x^beta phi0 = 0 for 1 <= |beta| <= M.
/// scale_decay < 1 separates the component dilations (distinct mollifier
/// families come from different support radii or decay factors).  Throws with
/// a condition-number report when the moment system is ill-conditioned.
Mollifier build_mollifier(int dim, int M, double support_radius, int grid_level,
                          double scale_decay = 0.78);

/// Kernel CSV plus JSON metadata {support_radius, L_phi, M_requested, ...}.
void write_mollifier(const Mollifier& mol, const std::string& base_path);
Mollifier read_mollifier(const std::string& base_path);

}  // namespace besov
