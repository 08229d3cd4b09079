#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace besov {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Uniform dyadic grid samples of a real-valued function on a centered box.
///
/// Samples sit at x_d(i) = (2i + 1 - n_d) * 2^{-J-1} along each axis.  An even
/// point count per axis therefore gives a cell-centered grid on [-R, R] with
/// R = n_d * 2^{-J-1} (the natural carrier for functions and weights, with an
/// exactly additive midpoint rule), while an odd count puts the samples on the
/// integer lattice h*Z including the origin (the natural carrier for
/// convolution kernels).  The function is identically zero outside its box.
class GridFunction {
public:
    GridFunction() = default;

    /// Cell-centered grid covering [-box_radius, box_radius]^dim at spacing 2^{-level}.
    static GridFunction box(int dim, double box_radius, int level);

    /// Node-centered kernel grid with samples at w*2^{-level}, |w| <= half_width.
    static GridFunction kernel(int dim, std::int64_t half_width, int level);

    int dim() const { return dim_; }
    int level() const { return level_; }
    double spacing() const { return h_; }
    std::int64_t extent(int d) const { return n_[d]; }
    /// Outer radius of the sample box along axis d (n_d * h / 2).
    double radius(int d) const { return 0.5 * h_ * static_cast<double>(n_[d]); }
    bool node_centered() const { return (n_[0] & 1) != 0; }

    std::int64_t size() const { return static_cast<std::int64_t>(values_.size()); }
    double coord(int d, std::int64_t i) const {
        return (2.0 * static_cast<double>(i) + 1.0 - static_cast<double>(n_[d])) * 0.5 * h_;
    }

    std::int64_t index(std::int64_t i0, std::int64_t i1 = 0, std::int64_t i2 = 0) const {
        return (i0 * n_[1] + i1) * n_[2] + i2;
    }
    double& at(std::int64_t i0, std::int64_t i1 = 0, std::int64_t i2 = 0) {
        return values_[index(i0, i1, i2)];
    }
    double at(std::int64_t i0, std::int64_t i1 = 0, std::int64_t i2 = 0) const {
        return values_[index(i0, i1, i2)];
    }
    /// Value with zero extension outside the index box.
    double value_or_zero(std::int64_t i0, std::int64_t i1 = 0, std::int64_t i2 = 0) const {
        if (i0 < 0 || i0 >= n_[0] || i1 < 0 || i1 >= n_[1] || i2 < 0 || i2 >= n_[2]) return 0.0;
        return values_[index(i0, i1, i2)];
    }

    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    bool same_grid(const GridFunction& other) const {
        return dim_ == other.dim_ && level_ == other.level_ && n_ == other.n_;
    }

    /// Throws if any sample is NaN or infinite.
    void check_finite(const std::string& what) const;

private:
    int dim_ = 0;
    int level_ = 0;
    double h_ = 1.0;
    std::array<std::int64_t, 3> n_{1, 1, 1};
    std::vector<double> values_;

    friend GridFunction make_grid_raw(int dim, int level, const std::array<std::int64_t, 3>& n);
};

/// Internal factory used by kernels that assemble grids index-wise.
GridFunction make_grid_raw(int dim, int level, const std::array<std::int64_t, 3>& n);

struct Box {
    int dim = 1;
    std::array<double, 3> lo{0, 0, 0};
    std::array<double, 3> hi{0, 0, 0};
};

/// The sample box [-R, R]^dim of a grid function.
Box domain_box(const GridFunction& f);

/// Dyadic cube Q^n_{k,m} = prod_d (m_d/2^k, (m_d+1)/2^k), side 2^{-k}.
struct DyadicCube {
    int dim = 1;
    int k = 0;
    std::array<std::int64_t, 3> m{0, 0, 0};

    double side() const;
    double lower(int d) const;
    double upper(int d) const;
    double center(int d) const;
};

/// All rank-k cubes whose half-open version intersects the half-open box,
/// ordered lexicographically in m.
std::vector<DyadicCube> cubes_in_box(int k, const Box& box);

/// Half-open index range [lo, hi) of cells whose centers fall in [a_d, b_d) per axis.
struct CellRange {
    std::array<std::int64_t, 3> lo{0, 0, 0};
    std::array<std::int64_t, 3> hi{1, 1, 1};
    bool empty = false;
};
CellRange cells_in_interval(const GridFunction& f, const std::array<double, 3>& a,
                            const std::array<double, 3>& b);
CellRange cells_in_cube(const GridFunction& f, const DyadicCube& q, double scale);

/// ||f | L_p(scale*Q)|| by the midpoint rule; p = inf takes max |f| over the
/// grid points in the scaled cube.  Throws "cube outside domain" when the
/// scaled cube misses the grid entirely.
double local_lp_norm(const GridFunction& f, double p, const DyadicCube& q, double scale = 1.0);

/// Plain p-th power sum h^n * sum |f|^p over a scaled cube (p < inf), used by
/// verifiers that need the un-rooted integral.
double local_power_integral(const GridFunction& f, double p, const DyadicCube& q,
                            double scale = 1.0);

/// Minimum of f over the grid points in the scaled cube (ess inf on grids).
double local_min(const GridFunction& f, const DyadicCube& q, double scale = 1.0);
/// Maximum of f over the grid points in the scaled cube.
double local_max(const GridFunction& f, const DyadicCube& q, double scale = 1.0);

/// Midpoint-rule integral over the whole box.
double integral(const GridFunction& f);

/// ||f | L_p(box)||; p = inf takes the max of |f|.
double lp_norm(const GridFunction& f, double p);

/// ||w * g | L_p(box)|| for two functions on the same grid.
double weighted_lp_norm(const GridFunction& w, const GridFunction& g, double p);

/// l_q aggregation of nonnegative terms; q = inf takes the max.
double lq_aggregate(const std::vector<double>& terms, double q);

/// CSV serialization: a name header line "dim,J,R", one metadata line, then
/// one value per line in lexicographic grid order.  Exact round-trip.
void write_csv(const GridFunction& f, const std::string& path);
GridFunction read_csv(const std::string& path);

}  // namespace besov
