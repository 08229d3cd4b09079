#pragma once

#include <optional>
#include <string>
#include <vector>

#include "besovkit/grid.hpp"

namespace besov {

/// Closed-form weight families; custom sequences carry explicit grids.
struct WeightGenerator {
    enum class Kind { two_ks, power_times_2ks, custom_grid };
    Kind kind = Kind::two_ks;
    double s = 0.0;     // t_k = 2^{ks} * ...
    double beta = 0.0;  // ... * |x|^beta for power_times_2ks
    int dim = 1;
    double box_radius = 1.0;
};

/// A p-admissible weight sequence {t_k} with its class parameters.
struct WeightSequence {
    std::vector<GridFunction> levels;  // t_k on a common box grid, k = 0..K
    double p = 2.0;
    double sigma1 = 2.0;
    double sigma2 = 2.0;
    std::vector<double> alpha1;  // {alpha^1_k}, positive
    std::vector<double> alpha2;  // {alpha^2_k}, positive
    double alpha3 = 0.0;
    std::optional<WeightGenerator> generator;

    int max_level() const { return static_cast<int>(levels.size()) - 1; }
    int grid_level() const { return levels.empty() ? 0 : levels.front().level(); }
    void validate() const;

    /// Resample a generated family on a finer or coarser grid.
    WeightSequence regenerated(int grid_level) const;
};

struct WeightParams {
    int dim = 1;
    double box_radius = 1.0;
    int grid_level = 10;
    int num_levels = 8;  // K + 1
    double s = 0.0;
    double beta = 0.0;
    double p = 2.0;
    double sigma1 = 2.0;
    double sigma2 = 2.0;
    double alpha3 = 0.0;
    std::vector<GridFunction> custom;
};

WeightSequence make_weights(WeightGenerator::Kind kind, const WeightParams& params);

/// t_{k,m} = ||t_k | L_p(Q^n_{k,m})||.
double local_weight_coeff(const WeightSequence& t, int k, const DyadicCube& q);

/// t_bar_k = 2^{kn/p} sum_m t_{k,m} chi_{Q_{k,m}}.  Exactly idempotent: levels
/// that are already constant on their rank-k cubes are returned unchanged.
WeightSequence bar_transform(const WeightSequence& t);

struct ClassWitness {
    int k = -1;
    int j = -1;
    DyadicCube cube;
    double value = 0.0;
};

struct ClassReport {
    bool member = false;
    double C1 = 0.0;
    double C2 = 0.0;
    double fitted_alpha3 = 0.0;  // smallest a with t_{k,m} <= 2^a t_{k,m~}
    ClassWitness worst1, worst2, worst3;
};

/// Def-1.1-style check with scalar exponents: fits the smallest C1 for the
/// two-sided ratio bound and C2 for the pointwise comparison condition.
ClassReport check_class_Y(const WeightSequence& s, int k_max, double a1, double a2, double a3,
                          std::int64_t pair_points = 4096);

/// Conditions (2.3)-(2.5) with scaled cubes c1 Q, c2 Q (c1 = c2 = 1 gives the
/// plain definition).  Reports fitted C1, C2 and the smallest neighbor
/// exponent; membership needs all of them finite and the exponent <= alpha3.
ClassReport check_class_X(const WeightSequence& t, int k_max, double c1 = 1.0, double c2 = 1.0);

struct HolderReport {
    double max_violation = 0.0;  // positive means the inequality failed
    ClassWitness worst;
};

/// 2^{-kn/theta} <= (int_Q t^p)^{1/p} (int_Q t^{-sigma1})^{1/sigma1} with
/// sigma1 = theta * (p/theta)'; checked on every cube of rank <= k_max.
HolderReport verify_holder_identity(const WeightSequence& t, double theta, int k_max);

/// Fitted local Muckenhoupt functional: sup over dyadic cubes of side <=
/// side_cap of (avg_Q w) (avg_Q w^{-1/(u-1)})^{u-1}; u = inf uses 1/inf_Q w.
double check_ap_loc(const GridFunction& w, double u, double side_cap = 1.0, int k_max = 8);

/// JSON manifest I/O; custom levels are written as CSV files next to the
/// manifest.
void write_weight_manifest(const WeightSequence& t, const std::string& path);
WeightSequence read_weight_manifest(const std::string& path);

}  // namespace besov
