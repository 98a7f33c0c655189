#ifndef FME_SURFACE_HPP
#define FME_SURFACE_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

namespace fme {

// Rectangular discretization of the domain {(s,y): s + y >= 0} in
// (s, z = s + y) coordinates. A single step h is shared by both axes, so
// constant-age diagonals and semigroup shifts stay grid-aligned.
struct SurfaceGrid {
    double h = 0.0;
    std::size_t n_s = 0;  // horizon nodes, s_i = i*h
    std::size_t n_z = 0;  // terminal-age nodes, z_j = j*h

    SurfaceGrid() = default;
    SurfaceGrid(double step, std::size_t ns, std::size_t nz);

    double s(std::size_t i) const { return h * static_cast<double>(i); }
    double z(std::size_t j) const { return h * static_cast<double>(j); }
    double s_max() const { return h * static_cast<double>(n_s - 1); }
    double z_max() const { return h * static_cast<double>(n_z - 1); }
    std::size_t size() const { return n_s * n_z; }

    bool same_as(const SurfaceGrid& other) const;

    // Snaps v to the nearest grid index; throws if v is not an integer
    // multiple of h within tolerance or (when bounded) outside [0, n).
    std::size_t index_of(double v, std::size_t n) const;
    long signed_index_of(double v) const;
};

// Curve on the z-axis nodes, linearly interpolated.
class Curve {
  public:
    Curve() = default;
    Curve(double step, std::vector<double> values);

    double operator()(double z) const;
    double h() const { return h_; }
    std::size_t size() const { return v_.size(); }
    double node(std::size_t j) const { return v_[j]; }

  private:
    double h_ = 0.0;
    std::vector<double> v_;
};

// One real value per grid node, indexed (i: horizon, j: terminal age).
// Immutable in spirit: transforms return new surfaces. Entries must be
// finite. A per-node staleness mask marks values that were filled by
// boundary extrapolation during shifts.
class Surface {
  public:
    Surface() = default;
    explicit Surface(const SurfaceGrid& grid, double fill = 0.0);
    Surface(const SurfaceGrid& grid, std::vector<double> values);

    const SurfaceGrid& grid() const { return grid_; }

    double at(std::size_t i, std::size_t j) const { return v_[i * grid_.n_z + j]; }
    double& at(std::size_t i, std::size_t j) { return v_[i * grid_.n_z + j]; }
    const std::vector<double>& values() const { return v_; }
    std::vector<double>& values() { return v_; }

    bool stale(std::size_t i, std::size_t j) const;
    void mark_stale(std::size_t i, std::size_t j);
    bool any_stale() const { return !stale_.empty(); }
    const std::vector<std::uint8_t>& stale_mask() const { return stale_; }
    void set_stale_mask(std::vector<std::uint8_t> mask);

    void check_finite() const;

  private:
    SurfaceGrid grid_;
    std::vector<double> v_;
    std::vector<std::uint8_t> stale_;  // empty means all fresh
};

// S_t: g(s,y) = f(s+t, y-t); in the (s,z) chart a pure shift along the
// s-axis. Nodes shifted past s_max are filled by constant extrapolation of
// the last horizon row and marked stale. t must be a nonnegative integer
// multiple of h.
Surface shift(const Surface& f, double t);

// Bilinear interpolation in (s, z); exact at nodes.
double eval(const Surface& f, double s, double y);

// mu0(s,y) = gamma0(s+y) - integral_0^s j0(u, s+y-u) du (trapezoid along
// the constant-z column).
Surface improvements_to_rates(const Surface& j0, const Curve& gamma0);

// j0(s,y) = -[mu0(s+h, y-h) - mu0(s,y)]/h, forward difference along the
// constant-z column; backward difference on the last horizon row.
Surface rates_to_improvements(const Surface& mu0);

// Composite trapezoid of u -> f(u,y) for fixed current age y; the (s,z)
// path is the diagonal z = u + y. Endpoints and y must be grid-aligned.
// Throws if the segment leaves the grid or touches stale nodes.
double line_integral_const_age(const Surface& f, double y, double s_lo, double s_hi);

// F(s,y) = integral_0^s f(u, s+y-u) du: prefix trapezoid along each
// constant-terminal-age column.
Surface integral_to_horizon(const Surface& f);

// F(s,y) = integral_{-y v 0}^s f(u,y) du: prefix trapezoid along each
// constant-current-age diagonal, starting at the birth edge for y < 0.
Surface integral_const_age_from_birth(const Surface& f);

// Discrete version of the weighted Sobolev-type norm with weights
// w1(s) = e^{-beta s}, w2(z) = e^{-beta z}, w3(s,z) = e^{-beta(s+z)},
// derivatives by central differences in the (s,z) chart, truncated to the
// grid extent. Requires n_s >= 3 and n_z >= 3.
double h_norm(const Surface& f, double beta);

struct GompertzParams {
    double theta1, theta2, theta3, theta4, theta5;
    void validate() const;  // theta1 > 1, others > 0
};

struct GompertzSurfaces {
    Surface j0;
    Surface mu0;
    Curve gamma0;
};

// j0(s,y)  = theta2 e^{-theta2 s} (theta3 e^{theta4 (s+y)} + theta5)
// mu0(s,y) = (theta1 + e^{-theta2 s}) (theta3 e^{theta4 (s+y)} + theta5)
// gamma0(z) = (theta1 + 1) (theta3 e^{theta4 z} + theta5)
GompertzSurfaces gompertz_makeham_surfaces(const GompertzParams& p, const SurfaceGrid& grid);

}  // namespace fme

#endif
