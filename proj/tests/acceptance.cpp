// Acceptance gate: one check per release criterion, each printing a
// pass/fail line. Exits nonzero if any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "fme/cohort.hpp"
#include "fme/drift.hpp"
#include "fme/simulate.hpp"
#include "fme/surface.hpp"

using namespace fme;

namespace {

int g_failures = 0;

void report(int number, const char* name, bool pass, const std::string& detail) {
    std::printf("criterion %d (%s): %s%s%s\n", number, name, pass ? "pass" : "FAIL",
                detail.empty() ? "" : " -- ", detail.c_str());
    if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, ...) {
    char buf[256];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof(buf), f, ap);
    va_end(ap);
    return buf;
}

// ---- criterion 1: drift oracles on the three benchmark volatilities ----

double oracle_sup_rel(int which, double h, const LevyDriverSpec& drv, bool improvement_route) {
    SurfaceGrid g(h, static_cast<std::size_t>(std::lround(3.0 / h)) + 1,
                  static_cast<std::size_t>(std::lround(6.0 / h)) + 1);
    Surface got, ref;
    if (improvement_route) {
        LevyScalarVol b{VolKind::improvement_vol, example_loading_surface(which, ExampleField::b, g, drv)};
        got = drift_j_levy(b, drv);
        ref = example_loading_surface(which, ExampleField::a, g, drv);
    } else {
        LevyScalarVol s{VolKind::rate_vol, example_loading_surface(which, ExampleField::sigma, g, drv)};
        got = drift_mu_levy(s, drv);
        ref = example_loading_surface(which, ExampleField::alpha, g, drv);
    }
    double sup = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k)
        sup = std::max(sup, std::abs(got.values()[k] - ref.values()[k]) /
                                std::max(1.0, std::abs(ref.values()[k])));
    return sup;
}

void criterion1() {
    auto t0 = std::chrono::steady_clock::now();
    LevyDriverSpec drv = LevyDriverSpec::jump_diffusion();
    bool pass = true;
    double worst = 0.0, worst_ratio = 1e9;
    for (int which : {1, 2, 3})
        for (bool route : {false, true}) {
            double coarse = oracle_sup_rel(which, 0.02, drv, route);
            double fine = oracle_sup_rel(which, 0.01, drv, route);
            worst = std::max(worst, coarse);
            pass = pass && coarse <= 1e-3;
            if (coarse <= 1e-12) continue;  // exact at machine precision; no rate to measure
            double ratio = coarse / std::max(fine, 1e-300);
            worst_ratio = std::min(worst_ratio, ratio);
            pass = pass && ratio >= 3.5;
        }
    double secs = seconds_since(t0);
    pass = pass && secs < 10.0;
    report(1, "drift oracles", pass,
           fmt("sup rel err %.3g, min halving ratio %.2f, %.1fs", worst, worst_ratio, secs));
}

// ---- criterion 2: improvement/rate transform round trip ----

void criterion2() {
    SurfaceGrid g(0.02, 151, 301);
    GompertzParams p{2.0, 0.1, 1e-4, 0.1, 1e-3};
    auto gs = gompertz_makeham_surfaces(p, g);
    Surface rec = rates_to_improvements(improvements_to_rates(gs.j0, gs.gamma0));
    double sup = 0.0, max_slope = 0.0;
    for (std::size_t i = 0; i + 1 < g.n_s; ++i)
        for (std::size_t j = 0; j < g.n_z; ++j) {
            sup = std::max(sup, std::abs(rec.at(i, j) - gs.j0.at(i, j)));
            max_slope = std::max(max_slope, std::abs(gs.j0.at(i + 1, j) - gs.j0.at(i, j)) / g.h);
        }
    double bound = 5.0 * g.h * max_slope;
    report(2, "transform round trip", sup <= bound, fmt("sup err %.3g, bound %.3g", sup, bound));
}

// ---- criterion 3: reconstruction of the Gompertz-Makeham rate surface ----

void criterion3() {
    SurfaceGrid g(0.02, 151, 301);
    GompertzParams p{2.0, 0.1, 1e-4, 0.1, 1e-3};
    auto gs = gompertz_makeham_surfaces(p, g);
    Surface rec = improvements_to_rates(gs.j0, gs.gamma0);
    double sup = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k)
        sup = std::max(sup, std::abs(rec.values()[k] - gs.mu0.values()[k]));
    report(3, "rate-surface identity", sup <= 1e-4, fmt("sup err %.3g", sup));
}

// ---- criterion 4: martingale band and negative control ----

ScenarioConfig martingale_scenario() {
    ScenarioConfig cfg;
    cfg.grid = SurfaceGrid(0.1, 26, 31);
    cfg.driver = LevyDriverSpec::jump_diffusion();
    cfg.vol_scalar = LevyScalarVol{VolKind::improvement_vol, Surface(cfg.grid, 1.0)};
    cfg.mu0 = Surface(cfg.grid, 0.02);
    cfg.dt = 0.1;
    cfg.t_end = 2.0;
    cfg.n_paths = 10000;
    cfg.seed = 20260823;
    cfg.mode = SimMode::rates;
    cfg.triples = {
        {2.0, 2.1, -1.8}, {2.0, 2.2, -1.8}, {1.9, 2.0, -1.8}, {1.9, 2.1, -1.8},
        {1.6, 1.8, -1.5}, {1.6, 2.0, -1.5}, {2.0, 2.1, -1.5}, {2.0, 2.2, -1.5},
        {1.1, 1.3, -1.0}, {1.2, 1.5, -1.0}, {1.5, 1.7, -1.0}, {2.0, 2.1, -1.0},
        {0.6, 0.8, -0.5}, {0.8, 1.0, -0.5}, {1.0, 1.2, -0.5}, {2.0, 2.1, -0.5},
        {0.1, 0.3, 0.0},  {0.2, 0.5, 0.0},  {0.5, 0.8, 0.0},  {1.0, 1.2, 0.0},
    };
    return cfg;
}

void criterion4() {
    auto t0 = std::chrono::steady_clock::now();
    ScenarioConfig cfg = martingale_scenario();
    auto ens = simulate_ensemble(cfg, 4);
    std::size_t within = 0;
    double worst = 0.0;
    for (const auto& ts : ens.triples) {
        auto st = martingale_diagnostic(ens, ts.triple.t, ts.triple.T, ts.triple.x);
        if (std::abs(st.z) <= 3.0) ++within;
        worst = std::max(worst, std::abs(st.z));
    }

    ScenarioConfig control = cfg;
    control.zero_drift = true;
    control.vol_scale = 3.0;
    auto cens = simulate_ensemble(control, 4);
    double control_z = 0.0;
    for (const auto& ts : cens.triples) {
        if (std::abs(ts.triple.t - 2.0) > 1e-9) continue;
        auto st = martingale_diagnostic(cens, ts.triple.t, ts.triple.T, ts.triple.x);
        control_z = std::max(control_z, std::abs(st.z));
    }
    double secs = seconds_since(t0);
    bool pass = within >= 19 && control_z > 5.0 && secs < 120.0;
    report(4, "martingale band", pass,
           fmt("%zu/20 within |z|<=3 (worst %.2f), control z %.1f, %.1fs", within, worst,
               control_z, secs));
}

// ---- criterion 5: identity diagnostic order in the joint evolution ----

double identity_sup_run(double step) {
    ScenarioConfig cfg;
    std::size_t n = static_cast<std::size_t>(std::lround(1.0 / step));
    cfg.grid = SurfaceGrid(step, n + 6, 2 * n + 6);
    cfg.driver = LevyDriverSpec::jump_diffusion();
    cfg.vol_scalar = LevyScalarVol{VolKind::improvement_vol, Surface(cfg.grid, 1.0)};
    cfg.mu0 = Surface(cfg.grid, 0.02);
    cfg.dt = step;
    cfg.t_end = 1.0;
    cfg.n_paths = 8;
    cfg.seed = 31337;
    cfg.mode = SimMode::improvements;
    auto ens = simulate_ensemble(cfg, 2);
    double sup = 0.0;
    for (double v : ens.identity_sup) sup = std::max(sup, v);
    return sup;
}

void criterion5() {
    double sup_full = identity_sup_run(0.1);
    double sup_half = identity_sup_run(0.05);
    double bound_full = 10.0 * (0.1 + 0.1 * 0.1);
    double bound_half = 10.0 * (0.05 + 0.05 * 0.05);
    bool pass = sup_full <= bound_full && sup_half <= bound_half;
    report(5, "identity diagnostic", pass,
           fmt("sup %.3g (bound %.3g), halved sup %.3g (bound %.3g)", sup_full, bound_full,
               sup_half, bound_half));
}

// ---- criterion 6: conditional LLN and compensator identity ----

void criterion6() {
    auto t0 = std::chrono::steady_clock::now();
    ScenarioConfig cfg;
    cfg.grid = SurfaceGrid(0.1, 201, 202);
    cfg.driver = LevyDriverSpec(0.0, 0.0, {}, 1);
    cfg.vol_scalar = LevyScalarVol{VolKind::rate_vol, Surface(cfg.grid, 0.0)};
    cfg.mu0 = Surface(cfg.grid, 0.05);
    cfg.dt = 0.1;
    cfg.t_end = 20.0;
    cfg.cohorts = {0.0};
    auto path = simulate_path(prepare_scenario(cfg), 0);
    auto haz = accumulate_hazard(path, 0.0);

    std::mt19937_64 rng(424242);
    auto sample = sample_death_times(haz.hazard, 0.0, 100000, rng);

    auto lln = lln_diagnostic(sample, 10.0);
    bool lln_ok = lln.abs_error <= lln.ci_halfwidth;

    std::vector<double> checkpoints;
    for (int k = 0; k <= 20; ++k) checkpoints.push_back(double(k));
    auto resid = compensator_residual(sample, checkpoints);
    bool comp_ok = true;
    double worst_z = 0.0;
    for (const auto& r : resid) {
        if (r.std_err == 0.0) {
            comp_ok = comp_ok && r.mean == 0.0;
            continue;
        }
        double z = std::abs(r.mean) / r.std_err;
        worst_z = std::max(worst_z, z);
        comp_ok = comp_ok && z <= 3.0;
    }
    auto bad = compensator_residual(sample, {20.0}, 2.0);
    bool control_ok = std::abs(bad.front().mean) > 5.0 * bad.front().std_err;

    double secs = seconds_since(t0);
    bool pass = lln_ok && comp_ok && control_ok && secs < 30.0;
    report(6, "lln and compensator", pass,
           fmt("lln err %.3g (ci %.3g), worst residual z %.2f, control %s, %.1fs", lln.abs_error,
               lln.ci_halfwidth, worst_z, control_ok ? "detected" : "MISSED", secs));
}

// ---- criterion 7: semigroup exactness and norm axioms ----

void criterion7() {
    SurfaceGrid g(0.1, 12, 18);
    std::mt19937_64 rng(555);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    bool pass = true;

    for (int rep = 0; rep < 100 && pass; ++rep) {
        Surface f(g);
        for (double& v : f.values()) v = u(rng);
        Surface ab = shift(shift(f, 0.2), 0.3);
        Surface once = shift(f, 0.5);
        for (std::size_t i = 0; i < g.n_s; ++i)
            for (std::size_t j = 0; j < g.n_z; ++j)
                if (!once.stale(i, j) && ab.at(i, j) != once.at(i, j)) pass = false;
    }
    bool semigroup_ok = pass;

    SurfaceGrid gn(0.1, 15, 20);
    bool norm_ok = true;
    for (int rep = 0; rep < 100; ++rep) {
        Surface a(gn), b(gn);
        for (double& v : a.values()) v = u(rng);
        for (double& v : b.values()) v = u(rng);
        double na = h_norm(a, 0.8), nb = h_norm(b, 0.8);
        if (!(na >= 0.0 && nb >= 0.0)) norm_ok = false;
        Surface scaled = a;
        for (double& v : scaled.values()) v *= -3.0;
        if (std::abs(h_norm(scaled, 0.8) - 3.0 * na) > 1e-9 * std::max(1.0, na)) norm_ok = false;
        Surface sum = a;
        for (std::size_t k = 0; k < gn.size(); ++k) sum.values()[k] += b.values()[k];
        if (h_norm(sum, 0.8) > na + nb + 1e-12) norm_ok = false;
    }
    double c = -1.75;
    bool const_ok = std::abs(h_norm(Surface(gn, c), 0.8) - std::abs(c)) <= 1e-12;

    report(7, "semigroup and norm", semigroup_ok && norm_ok && const_ok,
           fmt("semigroup %s, axioms %s, |const| %s", semigroup_ok ? "exact" : "BROKEN",
               norm_ok ? "ok" : "BROKEN", const_ok ? "exact" : "BROKEN"));
}

// ---- criterion 8: cumulant sanity and Monte Carlo moment ----

void criterion8() {
    LevyDriverSpec jd = LevyDriverSpec::jump_diffusion();
    bool zero_ok = jd.cumulant(0.0) == 0.0;
    bool convex_ok = true;
    for (int k = 0; k < 100; ++k) {
        double z = -3.0 + 6.0 * k / 99.0;
        if (jd.cumulant_d2(z) < 0.0) convex_ok = false;
    }

    std::mt19937_64 rng(808);
    const int n = 100000;
    const double dt = 0.01;
    bool moment_ok = true;
    double worst = 0.0;
    for (double z : {-0.5, 0.5}) {
        double sum = 0.0, sumsq = 0.0;
        for (int k = 0; k < n; ++k) {
            double e = std::exp(z * sample_scalar_increment(jd, dt, rng, true));
            sum += e;
            sumsq += e * e;
        }
        double mean = sum / n;
        double se = std::sqrt((sumsq / n - mean * mean) / n);
        double target = std::exp(dt * jd.cumulant(z));
        double zs = std::abs(mean - target) / se;
        worst = std::max(worst, zs);
        if (zs > 3.0) moment_ok = false;
    }
    report(8, "cumulant checks", zero_ok && convex_ok && moment_ok,
           fmt("psi(0) %s, convex %s, worst moment z %.2f", zero_ok ? "exact" : "BROKEN",
               convex_ok ? "ok" : "BROKEN", worst));
}

}  // namespace

int main() {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    if (g_failures) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
