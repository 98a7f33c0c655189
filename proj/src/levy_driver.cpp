#include "fme/levy_driver.hpp"

#include <cmath>
#include <stdexcept>

namespace fme {

LevyDriverSpec::LevyDriverSpec(double drift_b, double gaussian_c, std::vector<JumpMark> marks,
                               std::size_t wiener_factors, std::optional<CumulantWindow> window)
    : drift_b_(drift_b),
      gaussian_c_(gaussian_c),
      marks_(std::move(marks)),
      wiener_factors_(wiener_factors),
      window_(std::move(window)) {
    if (!std::isfinite(drift_b_)) throw std::invalid_argument("LevyDriverSpec: non-finite drift");
    if (!(gaussian_c_ >= 0.0)) throw std::invalid_argument("LevyDriverSpec: gaussian_c must be nonnegative");
    for (const auto& m : marks_) {
        if (!std::isfinite(m.xi)) throw std::invalid_argument("LevyDriverSpec: non-finite jump mark");
        if (!(m.weight >= 0.0)) throw std::invalid_argument("LevyDriverSpec: mark intensity must be nonnegative");
    }
    if (window_) {
        if (!(window_->M > 0.0) || !(window_->eps > 0.0))
            throw std::invalid_argument("LevyDriverSpec: window requires M > 0 and eps > 0");
        // Finite mark lists always have finite exponential moments; evaluate
        // the window bound once so a configured overflow surfaces early.
        double zmax = (1.0 + window_->eps) * window_->M;
        double total = 0.0;
        for (const auto& m : marks_) total += m.weight * std::exp(zmax * std::abs(m.xi));
        if (!std::isfinite(total))
            throw std::invalid_argument("LevyDriverSpec: exponential-moment bound overflows at window edge");
    }
}

bool LevyDriverSpec::in_window(double z) const {
    if (!window_) return true;
    if (window_->allow_positive_halfline && z >= 0.0) return true;
    double bound = (1.0 + window_->eps) * window_->M;
    return z >= -bound && z <= bound;
}

void LevyDriverSpec::require_window(double z) const {
    if (!in_window(z)) throw std::domain_error("LevyDriverSpec: cumulant argument outside configured window");
}

double LevyDriverSpec::cumulant(double z) const {
    require_window(z);
    double v = drift_b_ * z + 0.5 * gaussian_c_ * z * z;
    for (const auto& m : marks_) v += m.weight * (std::expm1(z * m.xi) - z * m.xi);
    return v;
}

double LevyDriverSpec::cumulant_d1(double z) const {
    require_window(z);
    double v = drift_b_ + gaussian_c_ * z;
    for (const auto& m : marks_) v += m.weight * m.xi * std::expm1(z * m.xi);
    return v;
}

double LevyDriverSpec::cumulant_d2(double z) const {
    require_window(z);
    double v = gaussian_c_;
    for (const auto& m : marks_) v += m.weight * m.xi * m.xi * std::exp(z * m.xi);
    return v;
}

double LevyDriverSpec::jump_mean_rate() const {
    double v = 0.0;
    for (const auto& m : marks_) v += m.weight * m.xi;
    return v;
}

LevyDriverSpec LevyDriverSpec::jump_diffusion(std::optional<CumulantWindow> window) {
    return LevyDriverSpec(1.0, 1.0, {{1.0, 1.0}}, 1, std::move(window));
}

DriverIncrement sample_increment(const LevyDriverSpec& spec, double dt, std::mt19937_64& rng) {
    if (!(dt > 0.0)) throw std::invalid_argument("sample_increment: dt must be positive");
    DriverIncrement inc;
    inc.wiener.resize(spec.wiener_factors());
    std::normal_distribution<double> normal(0.0, std::sqrt(dt));
    for (auto& w : inc.wiener) w = normal(rng);
    inc.jump_counts.resize(spec.jump_marks().size());
    for (std::size_t i = 0; i < inc.jump_counts.size(); ++i) {
        double lambda = spec.jump_marks()[i].weight * dt;
        if (lambda > 0.0) {
            std::poisson_distribution<long> pois(lambda);
            inc.jump_counts[i] = pois(rng);
        } else {
            inc.jump_counts[i] = 0;
        }
    }
    return inc;
}

double sample_scalar_increment(const LevyDriverSpec& spec, double dt, std::mt19937_64& rng,
                               bool compensated) {
    if (!(dt > 0.0)) throw std::invalid_argument("sample_scalar_increment: dt must be positive");
    std::normal_distribution<double> normal(0.0, std::sqrt(dt));
    double x = spec.drift_b() * dt + std::sqrt(spec.gaussian_c()) * normal(rng);
    for (const auto& m : spec.jump_marks()) {
        double lambda = m.weight * dt;
        if (lambda > 0.0) {
            std::poisson_distribution<long> pois(lambda);
            x += static_cast<double>(pois(rng)) * m.xi;
        }
    }
    if (compensated) x -= dt * spec.jump_mean_rate();
    return x;
}

}  // namespace fme
