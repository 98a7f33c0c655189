#ifndef FME_SIMULATE_HPP
#define FME_SIMULATE_HPP

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "fme/drift.hpp"
#include "fme/levy_driver.hpp"
#include "fme/surface.hpp"
#include "fme/volatility.hpp"

namespace fme {

enum class SimMode { rates, improvements };

struct DiagnosticTriple {
    double t = 0.0, T = 0.0, x = 0.0;
};

// Scenario description: grid, driver, one volatility parametrization,
// one initial-surface route, and the time-stepping parameters. dt must be
// an integer multiple of the grid step; t_end a multiple of dt.
struct ScenarioConfig {
    SurfaceGrid grid;
    LevyDriverSpec driver;

    std::optional<VolatilityModel> vol_factor;
    std::optional<LevyScalarVol> vol_scalar;

    std::optional<Surface> mu0;
    std::optional<Surface> j0;
    std::optional<Curve> gamma0;

    double dt = 0.0;
    double t_end = 0.0;
    std::size_t n_paths = 1;
    std::uint64_t seed = 0;
    SimMode mode = SimMode::rates;

    std::vector<DiagnosticTriple> triples;
    std::vector<double> cohorts;  // ages at time 0 whose hazard is accumulated

    bool zero_drift = false;       // negative-control switch: drop the consistency drift
    double vol_scale = 1.0;        // multiplies every loading surface
};

// Scenario with initial surfaces completed, volatilities converted to
// rate-volatility factor loadings, and drift surfaces precomputed (the
// loadings are deterministic and time-independent, so one drift surface
// serves every step).
struct PreparedScenario {
    SurfaceGrid grid;
    LevyDriverSpec driver;
    SimMode mode = SimMode::rates;
    double dt = 0.0, t_end = 0.0;
    std::size_t steps = 0;
    std::size_t n_paths = 1;
    std::uint64_t seed = 0;

    VolatilityModel vol_mu;
    std::optional<VolatilityModel> vol_j;
    Surface mu0;
    std::optional<Surface> j0;
    Surface drift_mu;
    std::optional<Surface> drift_j;

    std::vector<DiagnosticTriple> triples;
    std::vector<double> cohorts;
};

PreparedScenario prepare_scenario(const ScenarioConfig& cfg);

struct PathState {
    double t = 0.0;
    Surface mu_bar;
    std::optional<Surface> j_bar;               // improvements mode only
    std::vector<double> cohort_x;               // tracked cohorts
    std::vector<double> gamma_accum;            // integral of the spot rate per cohort
};

PathState initial_state(const PreparedScenario& prep);

// One Euler-plus-exact-shift step: add dt*drift + Wiener and compensated
// jump increments, then shift by dt. In improvements mode the improvement
// surface evolves alongside with the same draws.
PathState step(const PathState& state, const PreparedScenario& prep, std::mt19937_64& rng);

// Spot rate at current age y: the s = 0 edge of the rate surface.
double spot_rate(const PathState& state, double y);

// Forward survival G_t(T,x): exp of minus the accumulated spot-rate
// integral plus the line integral of the current rate surface along the
// cohort diagonal. Unclamped; callers clamp only in reported summaries.
double survival(const PathState& state, double T, double x);

// Sup over fresh nodes of |mu(s,y) - gamma(s+y) + integral_0^s j|.
double identity_diagnostic(const PathState& state);

std::mt19937_64 path_rng(std::uint64_t seed, std::uint64_t path_index);

// Full checkpoint sequence of a single path (state after every step).
std::vector<PathState> simulate_path(const PreparedScenario& prep, std::size_t path_index);

struct TripleStat {
    DiagnosticTriple triple;
    double g0 = 1.0;
    std::vector<double> g_samples;  // one per path
};

struct PathEnsemble {
    std::vector<TripleStat> triples;
    std::size_t n_paths = 0;

    // negativity accounting over all (path, step, fresh node) triples
    std::uint64_t total_nodes = 0;
    std::uint64_t negative_nodes = 0;
    double min_value = 0.0;

    std::uint64_t g_above_one = 0;  // diagnostic flags, not errors
    std::uint64_t g_nonpositive = 0;

    std::vector<double> checkpoint_times;
    std::vector<double> identity_sup;  // per checkpoint, max over paths (improvements mode)
};

PathEnsemble simulate_ensemble(const PreparedScenario& prep, unsigned threads = 1);
PathEnsemble simulate_ensemble(const ScenarioConfig& cfg, unsigned threads = 1);

struct MartingaleStat {
    double mean = 0.0, std_err = 0.0, z = 0.0;
};

// Ensemble mean of G_t(T,x), its standard error, and the z-score against
// the deterministic time-zero value.
MartingaleStat martingale_diagnostic(const PathEnsemble& ens, double t, double T, double x);

struct NegativityStat {
    double fraction_negative_nodes = 0.0;
    double min_value = 0.0;
};

NegativityStat negativity_diagnostic(const PathEnsemble& ens);

}  // namespace fme

#endif
