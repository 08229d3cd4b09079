#pragma once

#include "besovkit/analysis.hpp"
#include "besovkit/grid.hpp"
#include "besovkit/weights.hpp"

namespace besov {

/// Delta^l(h) f with a grid-aligned step (given in cells per axis) and zero
/// extension outside the box.  Throws when l * |step| exceeds the box.
GridFunction finite_difference(const GridFunction& f, const std::array<std::int64_t, 3>& step_cells,
                               int l);

/// delta^l_r(x + 2^{-k} I^n) f: the doubly averaged l-th difference with the
/// literal 2^{2kn} prefactor.  The y-average is the midpoint rule over the
/// cells in the window; the h-average is a tensor trapezoid rule on the
/// grid-aligned step lattice thinned to at most h_samples nodes per half axis.
/// r = inf takes the sup over both windows.
double delta_lr(const GridFunction& f, const std::array<double, 3>& x, int k, int l, double r,
                int h_samples = 16);

/// ||f | L_r(x + I^n)|| by the midpoint rule (r = inf: sup over the window).
double sliding_lr(const GridFunction& f, const std::array<double, 3>& x, double r);

/// Averaged difference field (2^{kn} int_{2^{-k}I^n} |Delta^l(h)f|^r dh)^{1/r}
/// for r in (0, inf); k >= 1 per its use in the remark norm.
GridFunction averaged_diff(const GridFunction& f, int k, int l, double r, int h_samples = 16);
GridFunction averaged_diff_serial(const GridFunction& f, int k, int l, double r,
                                  int h_samples = 16);

/// Difference quasi-norm: (sum_k ||t_k delta^l_r(. + 2^{-k}I^n) f|L_p||^q)^{1/q}
/// plus the zero-order term ||t_0 ||f|L_r(. + I^n)|| |L_p||.  The zero-order
/// term is reported separately in NormValue::zero_order_term and included in
/// the value.
NormValue diff_norm(const GridFunction& f, const WeightSequence& t, const NormParams& np);

/// Norm built from the averaged difference (levels k = 1..K) plus the same
/// zero-order term, the closing-remark variant with r = 1.
NormValue averaged_diff_norm(const GridFunction& f, const WeightSequence& t,
                             const NormParams& np);

}  // namespace besov
