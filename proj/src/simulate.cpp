#include "fme/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace fme {

namespace {

constexpr double kTol = 1e-9;

bool close(double a, double b, double tol = 1e-7) { return std::abs(a - b) <= tol; }

void scale_model(VolatilityModel& vol, double scale) {
    if (scale == 1.0) return;
    for (auto& s : vol.wiener_loadings)
        for (double& v : s.values()) v *= scale;
    for (auto& s : vol.jump_loadings)
        for (double& v : s.values()) v *= scale;
}

std::size_t cohort_index(const PathState& state, double x) {
    for (std::size_t c = 0; c < state.cohort_x.size(); ++c)
        if (close(state.cohort_x[c], x)) return c;
    throw std::invalid_argument("survival: cohort not tracked by this scenario");
}

}  // namespace

PreparedScenario prepare_scenario(const ScenarioConfig& cfg) {
    PreparedScenario prep;
    prep.grid = cfg.grid;
    prep.driver = cfg.driver;
    prep.mode = cfg.mode;
    prep.n_paths = cfg.n_paths;
    prep.seed = cfg.seed;
    prep.triples = cfg.triples;

    if (!(cfg.dt > 0.0)) throw std::invalid_argument("scenario: dt must be positive");
    long m = cfg.grid.signed_index_of(cfg.dt);
    if (m < 1) throw std::invalid_argument("scenario: dt must be a positive multiple of the grid step");
    double steps_d = cfg.t_end / cfg.dt;
    long nsteps = std::lround(steps_d);
    if (nsteps < 1 || std::abs(steps_d - static_cast<double>(nsteps)) > 1e-7)
        throw std::invalid_argument("scenario: t_end must be a positive multiple of dt");
    prep.dt = cfg.dt;
    prep.t_end = cfg.t_end;
    prep.steps = static_cast<std::size_t>(nsteps);
    if (static_cast<double>(nsteps * m) > static_cast<double>(cfg.grid.n_s - 1))
        throw std::invalid_argument("scenario: horizon axis too short for t_end (spot row would go stale)");

    // Volatility: everything is converted to rate-volatility factor
    // loadings; improvements mode additionally keeps the improvement-side
    // loadings for the j dynamics.
    if (cfg.vol_factor.has_value() == cfg.vol_scalar.has_value())
        throw std::invalid_argument("scenario: exactly one volatility parametrization required");
    VolatilityModel factor = cfg.vol_factor ? *cfg.vol_factor : to_factor_model(*cfg.vol_scalar, cfg.driver);
    scale_model(factor, cfg.vol_scale);
    factor.validate(cfg.driver);
    if (cfg.mode == SimMode::improvements) {
        if (factor.kind != VolKind::improvement_vol)
            throw std::invalid_argument("scenario: improvements mode needs improvement volatilities");
        prep.vol_j = factor;
        prep.vol_mu = vol_j_to_vol_mu(factor);
    } else {
        prep.vol_mu = factor.kind == VolKind::rate_vol ? std::move(factor) : vol_j_to_vol_mu(factor);
    }

    // Initial surfaces.
    if (cfg.j0 && cfg.gamma0) {
        if (!cfg.j0->grid().same_as(cfg.grid)) throw std::invalid_argument("scenario: j0 grid mismatch");
        prep.mu0 = improvements_to_rates(*cfg.j0, *cfg.gamma0);
        prep.j0 = *cfg.j0;
    } else if (cfg.mu0) {
        if (!cfg.mu0->grid().same_as(cfg.grid)) throw std::invalid_argument("scenario: mu0 grid mismatch");
        prep.mu0 = *cfg.mu0;
        if (cfg.mode == SimMode::improvements) prep.j0 = rates_to_improvements(*cfg.mu0);
    } else {
        throw std::invalid_argument("scenario: initial surfaces missing (mu0, or j0 with gamma0)");
    }
    if (cfg.mode == SimMode::improvements && !prep.j0) prep.j0 = rates_to_improvements(prep.mu0);

    if (cfg.zero_drift) {
        prep.drift_mu = Surface(cfg.grid, 0.0);
        if (cfg.mode == SimMode::improvements) prep.drift_j = Surface(cfg.grid, 0.0);
    } else {
        prep.drift_mu = drift_mu_general(prep.vol_mu, cfg.driver);
        if (cfg.mode == SimMode::improvements) prep.drift_j = drift_j_general(*prep.vol_j, cfg.driver);
    }

    // Cohorts: explicit list plus every diagnostic triple's x.
    std::vector<double> cohorts = cfg.cohorts;
    for (const auto& tr : cfg.triples) cohorts.push_back(tr.x);
    std::sort(cohorts.begin(), cohorts.end());
    for (double x : cohorts) {
        if (prep.cohorts.empty() || !close(prep.cohorts.back(), x)) prep.cohorts.push_back(x);
    }
    for (double x : prep.cohorts) {
        cfg.grid.signed_index_of(x);  // alignment check
        if (x + cfg.t_end > cfg.grid.z_max() + kTol)
            throw std::invalid_argument("scenario: cohort ages off the age axis before t_end");
    }
    for (const auto& tr : cfg.triples) {
        if (tr.T < tr.t - kTol) throw std::invalid_argument("scenario: triple with T < t");
        if (tr.t > cfg.t_end + kTol) throw std::invalid_argument("scenario: triple beyond t_end");
    }
    return prep;
}

PathState initial_state(const PreparedScenario& prep) {
    PathState st;
    st.t = 0.0;
    st.mu_bar = prep.mu0;
    if (prep.mode == SimMode::improvements) st.j_bar = prep.j0;
    st.cohort_x = prep.cohorts;
    st.gamma_accum.assign(prep.cohorts.size(), 0.0);
    return st;
}

PathState step(const PathState& state, const PreparedScenario& prep, std::mt19937_64& rng) {
    if (state.t + prep.dt > prep.t_end + kTol) throw std::invalid_argument("step: time overflow");
    const SurfaceGrid& g = prep.grid;
    const double dt = prep.dt;

    PathState next;
    next.t = state.t + dt;
    next.cohort_x = state.cohort_x;
    next.gamma_accum = state.gamma_accum;

    DriverIncrement inc = sample_increment(prep.driver, dt, rng);

    auto evolve = [&](const Surface& cur, const Surface& drift, const VolatilityModel& vol) {
        Surface tmp = cur;
        const std::size_t n = g.size();
        for (std::size_t k = 0; k < n; ++k) tmp.values()[k] += dt * drift.values()[k];
        for (std::size_t f = 0; f < vol.wiener_loadings.size(); ++f) {
            double dw = inc.wiener[f];
            const auto& load = vol.wiener_loadings[f].values();
            for (std::size_t k = 0; k < n; ++k) tmp.values()[k] += load[k] * dw;
        }
        for (std::size_t mi = 0; mi < vol.jump_loadings.size(); ++mi) {
            double amp = static_cast<double>(inc.jump_counts[mi]) -
                         prep.driver.jump_marks()[mi].weight * dt;  // compensated
            if (amp == 0.0) continue;
            const auto& load = vol.jump_loadings[mi].values();
            for (std::size_t k = 0; k < n; ++k) tmp.values()[k] += load[k] * amp;
        }
        return shift(tmp, dt);
    };

    next.mu_bar = evolve(state.mu_bar, prep.drift_mu, prep.vol_mu);
    if (prep.mode == SimMode::improvements)
        next.j_bar = evolve(*state.j_bar, *prep.drift_j, *prep.vol_j);

    // Trapezoid spot-rate accumulation over the step; with dt = h it
    // telescopes exactly against the tail line integral, so deterministic
    // paths keep G constant in t.
    for (std::size_t c = 0; c < next.cohort_x.size(); ++c) {
        double age0 = next.cohort_x[c] + state.t;
        double age1 = next.cohort_x[c] + next.t;
        if (age1 <= kTol) continue;  // unborn through the whole step
        if (age0 >= -kTol) {
            next.gamma_accum[c] +=
                0.5 * dt * (eval(state.mu_bar, 0.0, std::max(age0, 0.0)) + eval(next.mu_bar, 0.0, age1));
        } else {
            // born inside the step: integrate from birth, taking the age-0
            // rate at the step start as the birth-edge value
            next.gamma_accum[c] += 0.5 * age1 * (eval(state.mu_bar, 0.0, 0.0) + eval(next.mu_bar, 0.0, age1));
        }
    }
    return next;
}

double spot_rate(const PathState& state, double y) { return eval(state.mu_bar, 0.0, y); }

double survival(const PathState& state, double T, double x) {
    if (T < state.t - kTol) throw std::invalid_argument("survival: T must not precede current time");
    if (T <= -x + kTol) return 1.0;  // unborn throughout
    std::size_t c = cohort_index(state, x);
    double y = x + state.t;
    double s_lo = y < 0.0 ? -y : 0.0;
    double s_hi = T - state.t;
    double tail = 0.0;
    if (s_hi > s_lo + kTol) tail = line_integral_const_age(state.mu_bar, y, s_lo, s_hi);
    return std::exp(-(state.gamma_accum[c] + tail));
}

double identity_diagnostic(const PathState& state) {
    if (!state.j_bar) throw std::invalid_argument("identity_diagnostic: requires improvements mode");
    const Surface& mu = state.mu_bar;
    const Surface& j = *state.j_bar;
    Surface acc = integral_to_horizon(j);
    const SurfaceGrid& g = mu.grid();
    double sup = 0.0;
    for (std::size_t i = 0; i < g.n_s; ++i)
        for (std::size_t jj = 0; jj < g.n_z; ++jj) {
            if (mu.stale(i, jj) || j.stale(i, jj)) continue;
            double r = mu.at(i, jj) - mu.at(0, jj) + acc.at(i, jj);
            sup = std::max(sup, std::abs(r));
        }
    return sup;
}

std::mt19937_64 path_rng(std::uint64_t seed, std::uint64_t path_index) {
    // splitmix64 expansion of (seed, path index) into a seed sequence
    std::uint64_t s = seed + 0x9E3779B97F4A7C15ULL * (path_index + 1);
    auto next = [&s]() {
        s += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = s;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    };
    std::seed_seq seq{static_cast<std::uint32_t>(next()), static_cast<std::uint32_t>(next() >> 32),
                      static_cast<std::uint32_t>(next()), static_cast<std::uint32_t>(next() >> 32),
                      static_cast<std::uint32_t>(next()), static_cast<std::uint32_t>(next() >> 32)};
    return std::mt19937_64(seq);
}

std::vector<PathState> simulate_path(const PreparedScenario& prep, std::size_t path_index) {
    std::mt19937_64 rng = path_rng(prep.seed, path_index);
    std::vector<PathState> out;
    out.reserve(prep.steps + 1);
    out.push_back(initial_state(prep));
    for (std::size_t k = 0; k < prep.steps; ++k) out.push_back(step(out.back(), prep, rng));
    return out;
}

PathEnsemble simulate_ensemble(const PreparedScenario& prep, unsigned threads) {
    PathEnsemble ens;
    ens.n_paths = prep.n_paths;
    ens.min_value = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k <= prep.steps; ++k)
        ens.checkpoint_times.push_back(static_cast<double>(k) * prep.dt);
    if (prep.mode == SimMode::improvements) ens.identity_sup.assign(prep.steps, 0.0);

    PathState init = initial_state(prep);
    for (const auto& tr : prep.triples) {
        TripleStat ts;
        ts.triple = tr;
        ts.g0 = survival(init, tr.T, tr.x);
        ts.g_samples.assign(prep.n_paths, 0.0);
        ens.triples.push_back(std::move(ts));
    }

    struct Partial {
        std::uint64_t total = 0, negative = 0, above = 0, nonpos = 0;
        double min_value = std::numeric_limits<double>::infinity();
        std::vector<double> identity_sup;
    };

    std::mutex merge_mutex;
    unsigned nthreads = std::max(1u, threads);

    auto worker = [&](unsigned tid) {
        Partial part;
        if (prep.mode == SimMode::improvements) part.identity_sup.assign(prep.steps, 0.0);
        auto scan_nodes = [&](const Surface& mu) {
            const SurfaceGrid& g = mu.grid();
            for (std::size_t i = 0; i < g.n_s; ++i)
                for (std::size_t j = 0; j < g.n_z; ++j) {
                    if (mu.stale(i, j)) continue;
                    ++part.total;
                    double v = mu.at(i, j);
                    if (v < 0.0) ++part.negative;
                    part.min_value = std::min(part.min_value, v);
                }
        };
        for (std::size_t p = tid; p < prep.n_paths; p += nthreads) {
            std::mt19937_64 rng = path_rng(prep.seed, p);
            PathState state = initial_state(prep);
            scan_nodes(state.mu_bar);
            for (auto& ts : ens.triples)
                if (close(ts.triple.t, 0.0)) ts.g_samples[p] = ts.g0;
            for (std::size_t k = 0; k < prep.steps; ++k) {
                state = step(state, prep, rng);
                scan_nodes(state.mu_bar);
                if (prep.mode == SimMode::improvements)
                    part.identity_sup[k] = std::max(part.identity_sup[k], identity_diagnostic(state));
                for (auto& ts : ens.triples) {
                    if (!close(ts.triple.t, state.t)) continue;
                    double gval = survival(state, ts.triple.T, ts.triple.x);
                    ts.g_samples[p] = gval;
                    if (gval > 1.0 + kTol) ++part.above;
                    if (gval <= 0.0) ++part.nonpos;
                }
            }
        }
        std::lock_guard<std::mutex> lock(merge_mutex);
        ens.total_nodes += part.total;
        ens.negative_nodes += part.negative;
        ens.g_above_one += part.above;
        ens.g_nonpositive += part.nonpos;
        ens.min_value = std::min(ens.min_value, part.min_value);
        for (std::size_t k = 0; k < part.identity_sup.size(); ++k)
            ens.identity_sup[k] = std::max(ens.identity_sup[k], part.identity_sup[k]);
    };

    if (nthreads == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker, t);
        for (auto& th : pool) th.join();
    }
    return ens;
}

PathEnsemble simulate_ensemble(const ScenarioConfig& cfg, unsigned threads) {
    return simulate_ensemble(prepare_scenario(cfg), threads);
}

MartingaleStat martingale_diagnostic(const PathEnsemble& ens, double t, double T, double x) {
    const TripleStat* found = nullptr;
    for (const auto& ts : ens.triples)
        if (close(ts.triple.t, t) && close(ts.triple.T, T) && close(ts.triple.x, x)) {
            found = &ts;
            break;
        }
    if (!found) throw std::invalid_argument("martingale_diagnostic: no matching (t,T,x) checkpoint");
    const auto& v = found->g_samples;
    if (v.size() < 2) throw std::invalid_argument("martingale_diagnostic: insufficient paths");
    double mean = 0.0;
    for (double g : v) mean += g;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double g : v) ss += (g - mean) * (g - mean);
    double se = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
    MartingaleStat stat;
    stat.mean = mean;
    stat.std_err = se;
    if (se == 0.0)
        stat.z = std::abs(mean - found->g0) < 1e-10 * std::max(1.0, std::abs(found->g0))
                     ? 0.0
                     : std::numeric_limits<double>::infinity();
    else
        stat.z = (mean - found->g0) / se;
    return stat;
}

NegativityStat negativity_diagnostic(const PathEnsemble& ens) {
    NegativityStat s;
    s.fraction_negative_nodes =
        ens.total_nodes ? static_cast<double>(ens.negative_nodes) / static_cast<double>(ens.total_nodes) : 0.0;
    s.min_value = ens.total_nodes ? ens.min_value : 0.0;
    return s;
}

}  // namespace fme
