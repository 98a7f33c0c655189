#include "fme/drift.hpp"

#include <cmath>
#include <stdexcept>

namespace fme {

namespace {

void require_kind(const VolatilityModel& vol, VolKind kind, const char* op) {
    if (vol.kind != kind) throw std::invalid_argument(std::string(op) + ": wrong volatility kind");
}

}  // namespace

Surface drift_mu_general(const VolatilityModel& vol, const LevyDriverSpec& driver) {
    require_kind(vol, VolKind::rate_vol, "drift_mu_general");
    vol.validate(driver);
    const SurfaceGrid& g = vol.grid();
    Surface out(g);
    for (const auto& sigma : vol.wiener_loadings) {
        Surface idiag = integral_const_age_from_birth(sigma);
        for (std::size_t k = 0; k < g.size(); ++k)
            out.values()[k] += sigma.values()[k] * idiag.values()[k];
    }
    for (std::size_t m = 0; m < vol.jump_loadings.size(); ++m) {
        const Surface& delta = vol.jump_loadings[m];
        const double w = driver.jump_marks()[m].weight;
        if (w == 0.0) continue;
        Surface idiag = integral_const_age_from_birth(delta);
        for (std::size_t k = 0; k < g.size(); ++k)
            out.values()[k] -= w * delta.values()[k] * std::expm1(-idiag.values()[k]);
    }
    return out;
}

Surface drift_j_general(const VolatilityModel& vol, const LevyDriverSpec& driver) {
    require_kind(vol, VolKind::improvement_vol, "drift_j_general");
    vol.validate(driver);
    const SurfaceGrid& g = vol.grid();
    Surface out(g);
    for (const auto& b : vol.wiener_loadings) {
        Surface acol = integral_to_horizon(b);
        Surface bdiag = integral_const_age_from_birth(b);
        Surface dd = integral_const_age_from_birth(acol);
        for (std::size_t k = 0; k < g.size(); ++k)
            out.values()[k] -= acol.values()[k] * bdiag.values()[k] + b.values()[k] * dd.values()[k];
    }
    for (std::size_t m = 0; m < vol.jump_loadings.size(); ++m) {
        const Surface& c = vol.jump_loadings[m];
        const double w = driver.jump_marks()[m].weight;
        if (w == 0.0) continue;
        Surface acol = integral_to_horizon(c);
        Surface bdiag = integral_const_age_from_birth(c);
        Surface dd = integral_const_age_from_birth(acol);
        for (std::size_t k = 0; k < g.size(); ++k) {
            double e = std::exp(dd.values()[k]);
            out.values()[k] -=
                w * (acol.values()[k] * bdiag.values()[k] * e + c.values()[k] * (e - 1.0));
        }
    }
    return out;
}

Surface drift_mu_levy(const LevyScalarVol& vol, const LevyDriverSpec& driver) {
    if (vol.kind != VolKind::rate_vol) throw std::invalid_argument("drift_mu_levy: expected rate volatility");
    const SurfaceGrid& g = vol.loading.grid();
    Surface idiag = integral_const_age_from_birth(vol.loading);
    Surface out(g);
    for (std::size_t k = 0; k < g.size(); ++k)
        out.values()[k] = -vol.loading.values()[k] * driver.cumulant_d1(-idiag.values()[k]);
    return out;
}

Surface drift_j_levy(const LevyScalarVol& vol, const LevyDriverSpec& driver) {
    if (vol.kind != VolKind::improvement_vol)
        throw std::invalid_argument("drift_j_levy: expected improvement volatility");
    const SurfaceGrid& g = vol.loading.grid();
    Surface acol = integral_to_horizon(vol.loading);
    Surface bdiag = integral_const_age_from_birth(vol.loading);
    Surface dd = integral_const_age_from_birth(acol);
    Surface out(g);
    for (std::size_t k = 0; k < g.size(); ++k) {
        double d = dd.values()[k];
        out.values()[k] = -acol.values()[k] * bdiag.values()[k] * driver.cumulant_d2(d) -
                          vol.loading.values()[k] * driver.cumulant_d1(d);
    }
    return out;
}

Surface consistency_residual(const Surface& alpha, const VolatilityModel& vol,
                             const LevyDriverSpec& driver) {
    Surface drift = drift_mu_general(vol, driver);
    if (!alpha.grid().same_as(drift.grid()))
        throw std::invalid_argument("consistency_residual: grid mismatch");
    Surface out(alpha.grid());
    for (std::size_t k = 0; k < out.grid().size(); ++k)
        out.values()[k] = alpha.values()[k] - drift.values()[k];
    return out;
}

VolatilityModel vol_j_to_vol_mu(const VolatilityModel& vol_j) {
    if (vol_j.kind != VolKind::improvement_vol)
        throw std::invalid_argument("vol_j_to_vol_mu: expected improvement volatility");
    VolatilityModel out;
    out.kind = VolKind::rate_vol;
    auto negate = [](Surface s) {
        for (double& v : s.values()) v = -v;
        return s;
    };
    for (const auto& b : vol_j.wiener_loadings) out.wiener_loadings.push_back(negate(integral_to_horizon(b)));
    for (const auto& c : vol_j.jump_loadings) out.jump_loadings.push_back(negate(integral_to_horizon(c)));
    return out;
}

LevyScalarVol vol_j_to_vol_mu(const LevyScalarVol& vol_j) {
    if (vol_j.kind != VolKind::improvement_vol)
        throw std::invalid_argument("vol_j_to_vol_mu: expected improvement volatility");
    Surface s = integral_to_horizon(vol_j.loading);
    for (double& v : s.values()) v = -v;
    return {VolKind::rate_vol, std::move(s)};
}

namespace {

// Benchmark closed forms, derived by evaluating the drift conditions on
// the three improvement-volatility choices. The unit tests check each form
// against independent quadrature.
struct Closed {
    double a, b, alpha, sigma;
};

Closed example1(double s, double y, const LevyDriverSpec& drv) {
    double neg = y < 0.0 ? 1.0 : 0.0;
    double arg = 0.5 * s * s - 0.5 * y * y * neg;
    Closed r;
    r.b = 1.0;
    r.sigma = -s;
    r.alpha = s * drv.cumulant_d1(arg);
    r.a = -s * (s + y * neg) * drv.cumulant_d2(arg) - drv.cumulant_d1(arg);
    return r;
}

Closed example2(double s, double y, const LevyDriverSpec& drv) {
    double neg = y < 0.0 ? 1.0 : 0.0;
    double arg = (3.0 * s * s * y + 2.0 * s * s * s) / 6.0 - y * y * y / 6.0 * neg;
    Closed r;
    r.b = s + y;
    r.sigma = -s * (s + y);
    r.alpha = s * (s + y) * drv.cumulant_d1(arg);
    r.a = -s * (s + y) * (0.5 * s * s + s * y + 0.5 * y * y * neg) * drv.cumulant_d2(arg) -
          (s + y) * drv.cumulant_d1(arg);
    return r;
}

Closed example3(double s, double y, const LevyDriverSpec& drv) {
    double es = std::exp(-s);
    // g = integral of b along the constant-age diagonal from the birth edge
    double gg = 0.5 * s * s + s * y + (s + y + 1.0) * es;
    if (y >= 0.0)
        gg -= y + 1.0;
    else
        gg += 0.5 * y * y - std::exp(y);
    // h = the nested double integral of b:
    // [((3s^2-6s)e^s - 6) y + (2s^3-3s^2)e^s - 6s - 6] e^{-s} / 6 + tail
    double hh;
    double hh_core = ((3.0 * s * s - 6.0 * s) * y + 2.0 * s * s * s - 3.0 * s * s) / 6.0 -
                     (6.0 * y + 6.0 * s + 6.0) * es / 6.0;
    if (y >= 0.0)
        hh = hh_core + (y + 1.0);
    else
        hh = hh_core + (6.0 * std::exp(y) - y * y * y - 3.0 * y * y) / 6.0;
    double amort = es + s - 1.0;  // = -sigma / (s+y)
    Closed r;
    r.b = (s + y) * (1.0 - es);
    r.sigma = -(s + y) * amort;
    r.alpha = (s + y) * amort * drv.cumulant_d1(hh);
    r.a = -(s + y) * amort * gg * drv.cumulant_d2(hh) - (s + y) * (1.0 - es) * drv.cumulant_d1(hh);
    return r;
}

Closed eval_example(int which, double s, double y, const LevyDriverSpec& drv) {
    switch (which) {
        case 1: return example1(s, y, drv);
        case 2: return example2(s, y, drv);
        case 3: return example3(s, y, drv);
        default: throw std::invalid_argument("example_closed_form: selector must be 1, 2 or 3");
    }
}

}  // namespace

double example_closed_form(int which, ExampleField field, double s, double y,
                           const LevyDriverSpec& driver) {
    Closed c = eval_example(which, s, y, driver);
    switch (field) {
        case ExampleField::a: return c.a;
        case ExampleField::b: return c.b;
        case ExampleField::alpha: return c.alpha;
        case ExampleField::sigma: return c.sigma;
    }
    throw std::invalid_argument("example_closed_form: bad field");
}

Surface example_loading_surface(int which, ExampleField field, const SurfaceGrid& grid,
                                const LevyDriverSpec& driver) {
    Surface out(grid);
    for (std::size_t i = 0; i < grid.n_s; ++i)
        for (std::size_t j = 0; j < grid.n_z; ++j)
            out.at(i, j) = example_closed_form(which, field, grid.s(i), grid.z(j) - grid.s(i), driver);
    return out;
}

}  // namespace fme
