#include "fme/cohort.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fme {

CumulativeHazard::CumulativeHazard(std::vector<double> times, std::vector<double> values)
    : times_(std::move(times)), values_(std::move(values)) {
    if (times_.size() != values_.size() || times_.size() < 2)
        throw std::invalid_argument("CumulativeHazard: need at least two matching knots");
    for (std::size_t i = 1; i < times_.size(); ++i) {
        if (!(times_[i] > times_[i - 1]))
            throw std::invalid_argument("CumulativeHazard: times must be strictly increasing");
        if (values_[i] < values_[i - 1])
            throw std::invalid_argument("CumulativeHazard: values must be nondecreasing");
    }
}

double CumulativeHazard::operator()(double t) const {
    if (t <= times_.front()) return values_.front();
    if (t >= times_.back()) return values_.back();
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    std::size_t i = static_cast<std::size_t>(it - times_.begin());
    double w = (t - times_[i - 1]) / (times_[i] - times_[i - 1]);
    return values_[i - 1] + w * (values_[i] - values_[i - 1]);
}

CumulativeHazard CumulativeHazard::scaled(double factor) const {
    if (factor < 0.0) throw std::invalid_argument("CumulativeHazard::scaled: negative factor");
    std::vector<double> v = values_;
    for (double& e : v) e *= factor;
    return CumulativeHazard(times_, std::move(v));
}

std::optional<double> CumulativeHazard::invert(double eps) const {
    if (values_.back() <= eps) return std::nullopt;
    // first knot whose value exceeds eps; the crossing lies in the segment
    // just before it
    auto it = std::upper_bound(values_.begin(), values_.end(), eps);
    std::size_t i = static_cast<std::size_t>(it - values_.begin());
    if (i == 0) return times_.front();
    double dv = values_[i] - values_[i - 1];
    double w = dv > 0.0 ? (eps - values_[i - 1]) / dv : 1.0;
    return times_[i - 1] + w * (times_[i] - times_[i - 1]);
}

HazardResult accumulate_hazard(const std::vector<PathState>& path, double x) {
    if (path.size() < 2) throw std::invalid_argument("accumulate_hazard: need at least two checkpoints");
    HazardResult res;
    std::vector<double> times, gamma;
    times.reserve(path.size());
    for (const auto& st : path) {
        times.push_back(st.t);
        double age = x + st.t;
        double g = 0.0;
        if (age >= 0.0) {
            g = spot_rate(st, age);
            if (g < 0.0) {
                g = 0.0;
                ++res.floored_count;
            }
        }
        gamma.push_back(g);
    }
    std::vector<double> values(times.size());
    values[0] = 0.0;
    const double birth = -x;
    for (std::size_t i = 1; i < times.size(); ++i) {
        double dt = times[i] - times[i - 1];
        if (!(dt > 0.0)) throw std::invalid_argument("accumulate_hazard: checkpoints must increase");
        // integrate only past the birth time; a birth strictly inside the
        // segment uses the current age-0 rate as the birth-edge value
        double lo = std::max(times[i - 1], birth);
        if (lo >= times[i]) {
            values[i] = values[i - 1];
            continue;
        }
        double g_lo = lo == times[i - 1] ? gamma[i - 1] : std::max(spot_rate(path[i], 0.0), 0.0);
        values[i] = values[i - 1] + 0.5 * (times[i] - lo) * (g_lo + gamma[i]);
    }
    res.hazard = CumulativeHazard(std::move(times), std::move(values));
    return res;
}

CohortSample sample_death_times(const CumulativeHazard& hazard, double x, std::size_t n,
                                std::mt19937_64& rng) {
    CohortSample out;
    out.x = x;
    out.t_end = hazard.t_end();
    out.hazard = hazard;
    out.death_times.reserve(n);
    out.censored.reserve(n);
    std::exponential_distribution<double> unit_exp(1.0);
    for (std::size_t i = 0; i < n; ++i) {
        double eps = unit_exp(rng);
        auto tau = hazard.invert(eps);
        if (tau) {
            out.death_times.push_back(*tau);
            out.censored.push_back(0);
        } else {
            out.death_times.push_back(out.t_end);
            out.censored.push_back(1);
        }
    }
    return out;
}

LlnStat lln_diagnostic(const CohortSample& sample, double t) {
    if (sample.death_times.empty()) throw std::invalid_argument("lln_diagnostic: empty sample");
    if (t > sample.t_end + 1e-9) throw std::invalid_argument("lln_diagnostic: t beyond the sampled window");
    std::size_t alive = 0;
    for (std::size_t i = 0; i < sample.death_times.size(); ++i)
        if (sample.censored[i] || sample.death_times[i] > t) ++alive;
    LlnStat s;
    s.empirical_fraction = static_cast<double>(alive) / static_cast<double>(sample.death_times.size());
    s.model_g = std::exp(-sample.hazard(t));
    s.abs_error = std::abs(s.empirical_fraction - s.model_g);
    s.ci_halfwidth =
        3.0 * std::sqrt(s.model_g * (1.0 - s.model_g) / static_cast<double>(sample.death_times.size()));
    return s;
}

std::vector<ResidualStat> compensator_residual(const CohortSample& sample,
                                               const std::vector<double>& checkpoints,
                                               double hazard_scale) {
    const std::size_t n = sample.death_times.size();
    if (n == 0) return {};
    std::vector<ResidualStat> out;
    out.reserve(checkpoints.size());
    for (double t : checkpoints) {
        double sum = 0.0, sumsq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            bool dead = !sample.censored[i] && sample.death_times[i] <= t;
            double stop = std::min(t, sample.censored[i] ? sample.t_end : sample.death_times[i]);
            double m = (dead ? 1.0 : 0.0) - hazard_scale * sample.hazard(stop);
            sum += m;
            sumsq += m * m;
        }
        ResidualStat rs;
        rs.t = t;
        rs.mean = sum / static_cast<double>(n);
        double var = n > 1 ? (sumsq - sum * sum / static_cast<double>(n)) / static_cast<double>(n - 1)
                           : 0.0;
        rs.std_err = std::sqrt(std::max(var, 0.0) / static_cast<double>(n));
        out.push_back(rs);
    }
    return out;
}

}  // namespace fme
