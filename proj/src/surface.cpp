#include "fme/surface.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fme {

namespace {

constexpr double kAlignTol = 1e-9;

double align_tolerance(double h) { return kAlignTol * std::max(1.0, h); }

}  // namespace

SurfaceGrid::SurfaceGrid(double step, std::size_t ns, std::size_t nz) : h(step), n_s(ns), n_z(nz) {
    if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("SurfaceGrid: step must be positive");
    if (n_s == 0 || n_z == 0) throw std::invalid_argument("SurfaceGrid: empty axis");
}

bool SurfaceGrid::same_as(const SurfaceGrid& other) const {
    return n_s == other.n_s && n_z == other.n_z && std::abs(h - other.h) <= align_tolerance(h);
}

std::size_t SurfaceGrid::index_of(double v, std::size_t n) const {
    long k = signed_index_of(v);
    if (k < 0 || static_cast<std::size_t>(k) >= n) throw std::domain_error("SurfaceGrid: coordinate outside grid");
    return static_cast<std::size_t>(k);
}

long SurfaceGrid::signed_index_of(double v) const {
    double q = v / h;
    long k = std::lround(q);
    if (std::abs(v - static_cast<double>(k) * h) > align_tolerance(h))
        throw std::invalid_argument("SurfaceGrid: coordinate not aligned to grid step");
    return k;
}

Curve::Curve(double step, std::vector<double> values) : h_(step), v_(std::move(values)) {
    if (!(h_ > 0.0)) throw std::invalid_argument("Curve: step must be positive");
    if (v_.size() < 2) throw std::invalid_argument("Curve: need at least two nodes");
    for (double x : v_)
        if (!std::isfinite(x)) throw std::invalid_argument("Curve: non-finite value");
}

double Curve::operator()(double z) const {
    double q = z / h_;
    double top = static_cast<double>(v_.size() - 1);
    if (q < -kAlignTol || q > top + kAlignTol) throw std::domain_error("Curve: evaluation outside range");
    q = std::clamp(q, 0.0, top);
    std::size_t j = std::min(static_cast<std::size_t>(q), v_.size() - 2);
    double w = q - static_cast<double>(j);
    return (1.0 - w) * v_[j] + w * v_[j + 1];
}

Surface::Surface(const SurfaceGrid& grid, double fill) : grid_(grid), v_(grid.size(), fill) {
    if (!std::isfinite(fill)) throw std::invalid_argument("Surface: non-finite fill");
}

Surface::Surface(const SurfaceGrid& grid, std::vector<double> values) : grid_(grid), v_(std::move(values)) {
    if (v_.size() != grid_.size()) throw std::invalid_argument("Surface: value count does not match grid");
    check_finite();
}

bool Surface::stale(std::size_t i, std::size_t j) const {
    return !stale_.empty() && stale_[i * grid_.n_z + j] != 0;
}

void Surface::mark_stale(std::size_t i, std::size_t j) {
    if (stale_.empty()) stale_.assign(v_.size(), 0);
    stale_[i * grid_.n_z + j] = 1;
}

void Surface::set_stale_mask(std::vector<std::uint8_t> mask) {
    if (!mask.empty() && mask.size() != v_.size()) throw std::invalid_argument("Surface: bad stale mask size");
    stale_ = std::move(mask);
}

void Surface::check_finite() const {
    for (double x : v_)
        if (!std::isfinite(x)) throw std::invalid_argument("Surface: non-finite value");
}

Surface shift(const Surface& f, double t) {
    if (t < 0.0) throw std::invalid_argument("shift: t must be nonnegative");
    const SurfaceGrid& g = f.grid();
    long m = g.signed_index_of(t);
    if (m == 0) return f;
    Surface out(g);
    std::vector<std::uint8_t> mask;
    bool need_mask = static_cast<std::size_t>(m) > 0;
    if (need_mask || f.any_stale()) mask.assign(g.size(), 0);
    for (std::size_t i = 0; i < g.n_s; ++i) {
        std::size_t src = std::min(i + static_cast<std::size_t>(m), g.n_s - 1);
        bool past_edge = i + static_cast<std::size_t>(m) > g.n_s - 1;
        for (std::size_t j = 0; j < g.n_z; ++j) {
            out.at(i, j) = f.at(src, j);
            if (!mask.empty() && (past_edge || f.stale(src, j))) mask[i * g.n_z + j] = 1;
        }
    }
    out.set_stale_mask(std::move(mask));
    return out;
}

double eval(const Surface& f, double s, double y) {
    const SurfaceGrid& g = f.grid();
    double z = s + y;
    double qs = s / g.h;
    double qz = z / g.h;
    double tol = 1e-9 * std::max(1.0, g.h);
    double top_s = static_cast<double>(g.n_s - 1);
    double top_z = static_cast<double>(g.n_z - 1);
    if (qs < -tol || qs > top_s + tol || qz < -tol || qz > top_z + tol)
        throw std::domain_error("eval: point outside grid");
    qs = std::clamp(qs, 0.0, top_s);
    qz = std::clamp(qz, 0.0, top_z);
    std::size_t i = std::min(static_cast<std::size_t>(qs), g.n_s - 2 + (g.n_s == 1 ? 1 : 0));
    std::size_t j = std::min(static_cast<std::size_t>(qz), g.n_z - 2 + (g.n_z == 1 ? 1 : 0));
    if (g.n_s > 1) i = std::min(i, g.n_s - 2);
    if (g.n_z > 1) j = std::min(j, g.n_z - 2);
    double ws = qs - static_cast<double>(i);
    double wz = qz - static_cast<double>(j);
    std::size_t i1 = g.n_s > 1 ? i + 1 : i;
    std::size_t j1 = g.n_z > 1 ? j + 1 : j;
    return (1.0 - ws) * (1.0 - wz) * f.at(i, j) + ws * (1.0 - wz) * f.at(i1, j) +
           (1.0 - ws) * wz * f.at(i, j1) + ws * wz * f.at(i1, j1);
}

Surface integral_to_horizon(const Surface& f) {
    const SurfaceGrid& g = f.grid();
    Surface out(g);
    const double h = g.h;
    for (std::size_t j = 0; j < g.n_z; ++j) {
        double acc = 0.0;
        out.at(0, j) = 0.0;
        for (std::size_t i = 1; i < g.n_s; ++i) {
            acc += 0.5 * h * (f.at(i - 1, j) + f.at(i, j));
            out.at(i, j) = acc;
        }
    }
    return out;
}

Surface integral_const_age_from_birth(const Surface& f) {
    const SurfaceGrid& g = f.grid();
    Surface out(g);
    const double h = g.h;
    // Diagonals have constant offset d = j - i; y = d*h. The lower limit
    // -y v 0 corresponds to the first on-grid node of the diagonal.
    long dmin = -(static_cast<long>(g.n_s) - 1);
    long dmax = static_cast<long>(g.n_z) - 1;
    for (long d = dmin; d <= dmax; ++d) {
        std::size_t i0 = d >= 0 ? 0 : static_cast<std::size_t>(-d);
        double acc = 0.0;
        double prev = 0.0;
        bool first = true;
        for (std::size_t i = i0; i < g.n_s; ++i) {
            long jl = static_cast<long>(i) + d;
            if (jl < 0 || jl >= static_cast<long>(g.n_z)) break;
            std::size_t j = static_cast<std::size_t>(jl);
            double cur = f.at(i, j);
            if (!first) acc += 0.5 * h * (prev + cur);
            out.at(i, j) = acc;
            prev = cur;
            first = false;
        }
    }
    return out;
}

Surface improvements_to_rates(const Surface& j0, const Curve& gamma0) {
    const SurfaceGrid& g = j0.grid();
    if (std::abs(gamma0.h() - g.h) > 1e-9 * std::max(1.0, g.h) || gamma0.size() < g.n_z)
        throw std::invalid_argument("improvements_to_rates: curve grid incompatible with surface grid");
    Surface acc = integral_to_horizon(j0);
    Surface out(g);
    for (std::size_t i = 0; i < g.n_s; ++i)
        for (std::size_t j = 0; j < g.n_z; ++j) out.at(i, j) = gamma0.node(j) - acc.at(i, j);
    return out;
}

Surface rates_to_improvements(const Surface& mu0) {
    const SurfaceGrid& g = mu0.grid();
    if (g.n_s < 2) throw std::invalid_argument("rates_to_improvements: need at least two horizon rows");
    Surface out(g);
    const double h = g.h;
    for (std::size_t j = 0; j < g.n_z; ++j) {
        for (std::size_t i = 0; i + 1 < g.n_s; ++i) out.at(i, j) = -(mu0.at(i + 1, j) - mu0.at(i, j)) / h;
        out.at(g.n_s - 1, j) = -(mu0.at(g.n_s - 1, j) - mu0.at(g.n_s - 2, j)) / h;
    }
    return out;
}

double line_integral_const_age(const Surface& f, double y, double s_lo, double s_hi) {
    if (s_lo > s_hi + 1e-12) throw std::invalid_argument("line_integral_const_age: s_lo > s_hi");
    const SurfaceGrid& g = f.grid();
    long d = g.signed_index_of(y);
    long k_lo = g.signed_index_of(s_lo);
    long k_hi = g.signed_index_of(s_hi);
    if (k_lo < 0 || k_hi >= static_cast<long>(g.n_s)) throw std::domain_error("line_integral_const_age: segment outside grid");
    if (k_lo + d < 0 || k_hi + d >= static_cast<long>(g.n_z))
        throw std::domain_error("line_integral_const_age: segment outside grid");
    double acc = 0.0;
    for (long k = k_lo; k <= k_hi; ++k) {
        std::size_t i = static_cast<std::size_t>(k);
        std::size_t j = static_cast<std::size_t>(k + d);
        if (f.stale(i, j)) throw std::runtime_error("line_integral_const_age: segment touches stale region");
        if (k > k_lo) acc += 0.5 * g.h * (f.at(i - 1, j - 1) + f.at(i, j));
    }
    return acc;
}

double h_norm(const Surface& f, double beta) {
    const SurfaceGrid& g = f.grid();
    if (g.n_s < 3 || g.n_z < 3) throw std::invalid_argument("h_norm: grid too small");
    if (!(beta > 0.0)) throw std::invalid_argument("h_norm: beta must be positive");
    const double h = g.h;
    const std::size_t ns = g.n_s, nz = g.n_z;

    auto d_s = [&](std::size_t i, std::size_t j) {
        if (i == 0) return (f.at(1, j) - f.at(0, j)) / h;
        if (i == ns - 1) return (f.at(ns - 1, j) - f.at(ns - 2, j)) / h;
        return (f.at(i + 1, j) - f.at(i - 1, j)) / (2.0 * h);
    };
    auto d_z = [&](std::size_t i, std::size_t j) {
        if (j == 0) return (f.at(i, 1) - f.at(i, 0)) / h;
        if (j == nz - 1) return (f.at(i, nz - 1) - f.at(i, nz - 2)) / h;
        return (f.at(i, j + 1) - f.at(i, j - 1)) / (2.0 * h);
    };
    auto d_sz = [&](std::size_t i, std::size_t j) {
        if (j == 0) return (d_s(i, 1) - d_s(i, 0)) / h;
        if (j == nz - 1) return (d_s(i, nz - 1) - d_s(i, nz - 2)) / h;
        return (d_s(i, j + 1) - d_s(i, j - 1)) / (2.0 * h);
    };

    double total = f.at(0, 0) * f.at(0, 0);

    // integral over s of |d_s h(s,-s)|^2 w1: the z = 0 column.
    double t1 = 0.0;
    for (std::size_t i = 0; i < ns; ++i) {
        double v = d_s(i, 0);
        double w = std::exp(-beta * g.s(i)) * v * v;
        t1 += (i == 0 || i == ns - 1) ? 0.5 * w : w;
    }
    total += t1 * h;

    // integral over z of |d_z h(0,z)|^2 w2: the s = 0 row.
    double t2 = 0.0;
    for (std::size_t j = 0; j < nz; ++j) {
        double v = d_z(0, j);
        double w = std::exp(-beta * g.z(j)) * v * v;
        t2 += (j == 0 || j == nz - 1) ? 0.5 * w : w;
    }
    total += t2 * h;

    // double integral of the mixed derivative with w3.
    double t3 = 0.0;
    for (std::size_t i = 0; i < ns; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < nz; ++j) {
            double v = d_sz(i, j);
            double w = std::exp(-beta * (g.s(i) + g.z(j))) * v * v;
            row += (j == 0 || j == nz - 1) ? 0.5 * w : w;
        }
        row *= h;
        t3 += (i == 0 || i == ns - 1) ? 0.5 * row : row;
    }
    total += t3 * h;

    return std::sqrt(total);
}

void GompertzParams::validate() const {
    if (!(theta1 > 1.0)) throw std::invalid_argument("GompertzParams: theta1 must exceed 1");
    if (!(theta2 > 0.0) || !(theta3 > 0.0) || !(theta4 > 0.0) || !(theta5 > 0.0))
        throw std::invalid_argument("GompertzParams: theta2..theta5 must be positive");
}

GompertzSurfaces gompertz_makeham_surfaces(const GompertzParams& p, const SurfaceGrid& grid) {
    p.validate();
    Surface j0(grid), mu0(grid);
    for (std::size_t i = 0; i < grid.n_s; ++i) {
        double s = grid.s(i);
        double es = std::exp(-p.theta2 * s);
        for (std::size_t j = 0; j < grid.n_z; ++j) {
            double base = p.theta3 * std::exp(p.theta4 * grid.z(j)) + p.theta5;
            j0.at(i, j) = p.theta2 * es * base;
            mu0.at(i, j) = (p.theta1 + es) * base;
        }
    }
    std::vector<double> gv(grid.n_z);
    for (std::size_t j = 0; j < grid.n_z; ++j)
        gv[j] = (p.theta1 + 1.0) * (p.theta3 * std::exp(p.theta4 * grid.z(j)) + p.theta5);
    return {std::move(j0), std::move(mu0), Curve(grid.h, std::move(gv))};
}

}  // namespace fme
