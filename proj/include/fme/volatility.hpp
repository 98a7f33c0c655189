#ifndef FME_VOLATILITY_HPP
#define FME_VOLATILITY_HPP

#include <vector>

#include "fme/levy_driver.hpp"
#include "fme/surface.hpp"

namespace fme {

enum class VolKind {
    rate_vol,        // loadings parametrize the forward rate surface
    improvement_vol  // loadings parametrize the improvement surface
};

// Deterministic loading surfaces: one per Wiener factor, one per jump mark.
// All surfaces share one grid; the factor count must match the driver's
// configuration wherever the two meet.
struct VolatilityModel {
    VolKind kind = VolKind::rate_vol;
    std::vector<Surface> wiener_loadings;
    std::vector<Surface> jump_loadings;

    const SurfaceGrid& grid() const;
    void validate(const LevyDriverSpec& driver) const;
};

// One-dimensional Levy parametrization: a single loading surface; the
// driver supplies sqrt(C) and the marks xi multiplicatively.
struct LevyScalarVol {
    VolKind kind = VolKind::rate_vol;
    Surface loading;
};

// Expands the scalar parametrization into per-factor loadings:
// wiener loading sqrt(C) * loading, jump loading xi_i * loading per mark.
VolatilityModel to_factor_model(const LevyScalarVol& vol, const LevyDriverSpec& driver);

}  // namespace fme

#endif
