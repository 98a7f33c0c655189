#ifndef FME_COHORT_HPP
#define FME_COHORT_HPP

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "fme/simulate.hpp"

namespace fme {

// Piecewise-linear nondecreasing cumulative hazard on [times.front(),
// times.back()].
class CumulativeHazard {
  public:
    CumulativeHazard() = default;
    CumulativeHazard(std::vector<double> times, std::vector<double> values);

    double operator()(double t) const;  // linear interpolation, clamped outside the knots
    double t_end() const { return times_.back(); }
    double total() const { return values_.back(); }

    CumulativeHazard scaled(double factor) const;

    // Smallest t with hazard(t) > eps; empty when the hazard never exceeds
    // eps on the covered window.
    std::optional<double> invert(double eps) const;

    const std::vector<double>& times() const { return times_; }
    const std::vector<double>& values() const { return values_; }

  private:
    std::vector<double> times_;
    std::vector<double> values_;
};

struct HazardResult {
    CumulativeHazard hazard;
    std::size_t floored_count = 0;  // checkpoints where a negative spot rate was floored
};

// Trapezoid accumulation of the spot rate along the cohort diagonal over
// the path checkpoints. Negative spot values are floored at zero here (and
// only here) so the hazard is nondecreasing; the flooring count is
// reported.
HazardResult accumulate_hazard(const std::vector<PathState>& path, double x);

struct CohortSample {
    double x = 0.0;
    double t_end = 0.0;
    std::vector<double> death_times;    // censored entries hold t_end
    std::vector<std::uint8_t> censored;
    CumulativeHazard hazard;
};

// Canonical construction: tau = inf{t: hazard(t) > eps} with unit
// exponential eps, censored at t_end.
CohortSample sample_death_times(const CumulativeHazard& hazard, double x, std::size_t n,
                                std::mt19937_64& rng);

struct LlnStat {
    double empirical_fraction = 0.0;
    double model_g = 0.0;
    double abs_error = 0.0;
    double ci_halfwidth = 0.0;  // 3 * sqrt(p(1-p)/N) at p = model_g
};

LlnStat lln_diagnostic(const CohortSample& sample, double t);

struct ResidualStat {
    double t = 0.0;
    double mean = 0.0;
    double std_err = 0.0;
};

// Mean of the compensated death indicator 1{tau <= t} - hazard(t ^ tau)
// over individuals, per checkpoint. hazard_scale != 1 mis-scales the
// compensator (negative control).
std::vector<ResidualStat> compensator_residual(const CohortSample& sample,
                                               const std::vector<double>& checkpoints,
                                               double hazard_scale = 1.0);

}  // namespace fme

#endif
