#ifndef FME_DRIFT_HPP
#define FME_DRIFT_HPP

#include "fme/levy_driver.hpp"
#include "fme/surface.hpp"
#include "fme/volatility.hpp"

namespace fme {

// Consistency drift for forward mortality rates, finite-factor form:
// alpha(s,y) = sum_k sigma^k(s,y) * I_k(s,y)
//            - sum_i w_i * delta_i(s,y) * [exp(-Idelta_i(s,y)) - 1],
// with I(s,y) the loading integral from the birth edge along the
// constant-age diagonal.
Surface drift_mu_general(const VolatilityModel& vol, const LevyDriverSpec& driver);

// Consistency drift for forward mortality improvements, finite-factor
// form: four summands (two Wiener, two jump) with single and nested
// trapezoid integrals on the aligned grid. The inner integral is a prefix
// accumulation, so the double integral costs one extra pass.
Surface drift_j_general(const VolatilityModel& vol, const LevyDriverSpec& driver);

// One-dimensional Levy specialization for rates:
// alpha(s,y) = -sigma(s,y) * Psi'( -integral sigma along the diagonal ).
Surface drift_mu_levy(const LevyScalarVol& vol, const LevyDriverSpec& driver);

// One-dimensional Levy specialization for improvements:
// a(s,y) = -A(s,y) B(s,y) Psi''(D(s,y)) - b(s,y) Psi'(D(s,y)),
// A the horizon integral of b, B the diagonal integral, D the nested
// double integral.
Surface drift_j_levy(const LevyScalarVol& vol, const LevyDriverSpec& driver);

// alpha - drift_mu_general(vol, driver); the zero surface means
// consistency at grid resolution.
Surface consistency_residual(const Surface& alpha, const VolatilityModel& vol,
                             const LevyDriverSpec& driver);

// Rate-volatility loadings implied by improvement-volatility loadings:
// sigma^k(s,y) = -integral_0^s b^k(u, s+y-u) du, per factor and per mark.
VolatilityModel vol_j_to_vol_mu(const VolatilityModel& vol_j);
LevyScalarVol vol_j_to_vol_mu(const LevyScalarVol& vol_j);

enum class ExampleField { a, b, alpha, sigma };

// Closed-form volatility and drift surfaces of the three benchmark
// specifications (improvement volatility 1, s+y, and (s+y)(1-e^{-s})),
// evaluated pointwise. Requires a jump-diffusion-compatible driver whose
// cumulant exists on the positive half-line.
double example_closed_form(int which, ExampleField field, double s, double y,
                           const LevyDriverSpec& driver);

// Loading surface of the selected example sampled on a grid (the b field
// for improvement volatilities, the sigma field for rate volatilities).
Surface example_loading_surface(int which, ExampleField field, const SurfaceGrid& grid,
                                const LevyDriverSpec& driver);

}  // namespace fme

#endif
