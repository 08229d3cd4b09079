#pragma once

#include <string>
#include <vector>

#include "besovkit/grid.hpp"
#include "besovkit/mollifier.hpp"
#include "besovkit/weights.hpp"

namespace besov {

/// Shared parameter block for the quasi-norm evaluations.
struct NormParams {
    double p = 2.0;
    double q = 2.0;
    double r = 1.0;
    int l = 2;        // difference / spline degree
    int levels = 4;   // level cap K (terms k = 0..K)
    int h_samples = 16;  // difference-step quadrature samples per half axis
};

struct NormValue {
    double value = 0.0;
    double tail_fraction = 0.0;  // last level term's share of the level sum
    double zero_order_term = 0.0;  // difference norms only
    std::vector<double> level_terms;
};

/// layers[k] = phi_k * f with phi_0 = phi0 and phi_k = 2^{kn} phi(2^k .).
struct ConvField {
    std::vector<GridFunction> layers;
    int max_level() const { return static_cast<int>(layers.size()) - 1; }
};

ConvField conv_field(const GridFunction& f, const Mollifier& mol, int level_cap);

/// (sum_k ||t_k (phi_k * f) | L_p||^q)^{1/q}, truncated at the level cap.
NormValue conv_norm(const ConvField& cf, const WeightSequence& t, const NormParams& np);
NormValue conv_norm(const GridFunction& f, const WeightSequence& t, const Mollifier& mol,
                    const NormParams& np);

/// M_A(m, j, c)[f] = max_{k in [j, K]} 2^{A(j-k)} sup_{y in cQ_{j,m}} |phi_k * f(y)|.
struct MaximalField {
    double A = 1.0;
    double c = 1.0;
    int level_cap = 0;  // the k-sup is truncated at this level
    std::vector<std::vector<DyadicCube>> cubes;  // per level j
    std::vector<std::vector<double>> values;
    std::vector<std::vector<int>> argmax_level;  // diagnostic: k attaining the sup

    /// True when some nonzero entry attains its sup at the truncation level.
    bool truncation_hit() const;
};

MaximalField maximal_field(const ConvField& cf, double A, double c, int j_max);
MaximalField maximal_field_serial(const ConvField& cf, double A, double c, int j_max);

struct Lemma31Report {
    double C = 0.0;  // smallest constant making (3.3) hold over the probed range
    int worst_j = -1;
    DyadicCube worst_cube;
};

/// Fits C in M_A(m,j,c1) <= C (sum_{k>=j} 2^{(j-k)Ar} 2^{kn}
/// int_{c2 Q_{j,m}} |phi_k*f|^r)^{1/r}; c2 <= 0 picks c1 + 4*support_radius.
Lemma31Report verify_lemma31(const GridFunction& f, const Mollifier& mol, double r, double c1,
                             double A, int j_max, int level_cap, double c2 = 0.0);

struct Lemma33Report {
    double ratio = 0.0;  // LHS / RHS of (3.6)
    double lhs = 0.0;
    double rhs = 0.0;
    bool hypotheses_ok = false;
    std::string message;
};

/// Checks the wiring sigma1 = r p'_r plus condition (2.12) for
/// beta_k = (2^{kA} alpha^1_k)^mu at s = q/mu, then evaluates both sides.
Lemma33Report verify_lemma33(const GridFunction& f, const WeightSequence& t,
                             const Mollifier& mol, double A, double c, double mu,
                             const NormParams& np);

/// Littlewood-Paley style norm: ||s_j F^{-1}(Psi_j F f) | l_q(L_p)|| on the
/// periodic torus reading of f's box, with Psi_0 a fixed radial cutoff equal
/// to 1 on the unit ball and supported in 2B.
NormValue fourier_lp_norm(const GridFunction& f, const WeightSequence& s_weights, double p,
                          double q, int level_cap);

/// The j-th Littlewood-Paley layer by itself (exposed for tests).
GridFunction fourier_layer(const GridFunction& f, int j);

}  // namespace besov
