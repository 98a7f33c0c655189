#ifndef FME_LEVY_DRIVER_HPP
#define FME_LEVY_DRIVER_HPP

#include <cstddef>
#include <optional>
#include <random>
#include <vector>

namespace fme {

struct JumpMark {
    double xi = 0.0;     // jump size
    double weight = 0.0; // arrival intensity per unit time
};

// Exponential-moment window [-(1+eps)M, (1+eps)M] on which cumulant
// evaluation is permitted. With allow_positive_halfline set, any z >= 0 is
// additionally accepted (required for improvement-volatility drifts, whose
// cumulant arguments are nonnegative but unbounded).
struct CumulantWindow {
    double M = 0.0;
    double eps = 0.0;
    bool allow_positive_halfline = false;
};

// Driving noise: d independent scalar Wiener factors plus a finite-activity
// compound Poisson part, with drift B and Gaussian variance C per unit
// time. The Levy measure is a finite mark list, so all integrals against it
// are finite sums. Immutable after construction and shareable across path
// workers.
class LevyDriverSpec {
  public:
    LevyDriverSpec() : LevyDriverSpec(0.0, 0.0, {}, 0) {}
    LevyDriverSpec(double drift_b, double gaussian_c, std::vector<JumpMark> marks,
                   std::size_t wiener_factors, std::optional<CumulantWindow> window = {});

    double drift_b() const { return drift_b_; }
    double gaussian_c() const { return gaussian_c_; }
    const std::vector<JumpMark>& jump_marks() const { return marks_; }
    std::size_t wiener_factors() const { return wiener_factors_; }
    const std::optional<CumulantWindow>& window() const { return window_; }

    bool in_window(double z) const;

    // Psi(z) = Bz + C z^2 / 2 + sum_i w_i (e^{z xi_i} - 1 - z xi_i)
    double cumulant(double z) const;
    // Psi'(z) = B + Cz + sum_i w_i xi_i (e^{z xi_i} - 1)
    double cumulant_d1(double z) const;
    // Psi''(z) = C + sum_i w_i xi_i^2 e^{z xi_i}
    double cumulant_d2(double z) const;

    // sum_i w_i xi_i: drift offset between raw and compensated jumps.
    double jump_mean_rate() const;

    // The jump diffusion X = W + N: C = 1, one mark xi = 1 with w = 1, and
    // B = 1. The representation of Psi subtracts z*xi inside the jump
    // integral, so Bz + z^2/2 + (e^z - 1 - z) = z^2/2 + e^z - 1 forces
    // B = 1.
    static LevyDriverSpec jump_diffusion(std::optional<CumulantWindow> window = {});

  private:
    void require_window(double z) const;

    double drift_b_;
    double gaussian_c_;
    std::vector<JumpMark> marks_;
    std::size_t wiener_factors_;
    std::optional<CumulantWindow> window_;
};

struct DriverIncrement {
    std::vector<double> wiener;        // one N(0, dt) draw per factor
    std::vector<long> jump_counts;     // raw Poisson(w_i dt) counts per mark
};

// Raw (uncompensated) increment over dt; compensation is applied by the
// consumer.
DriverIncrement sample_increment(const LevyDriverSpec& spec, double dt, std::mt19937_64& rng);

// Scalar increment B dt + sqrt(C) dW + sum_i count_i xi_i, optionally with
// the compensator dt * sum_i w_i xi_i subtracted. In compensated mode
// E[e^{z X_dt}] = e^{dt Psi(z)}.
double sample_scalar_increment(const LevyDriverSpec& spec, double dt, std::mt19937_64& rng,
                               bool compensated);

}  // namespace fme

#endif
