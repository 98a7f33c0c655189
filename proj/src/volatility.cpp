#include "fme/volatility.hpp"

#include <cmath>
#include <stdexcept>

namespace fme {

const SurfaceGrid& VolatilityModel::grid() const {
    if (!wiener_loadings.empty()) return wiener_loadings.front().grid();
    if (!jump_loadings.empty()) return jump_loadings.front().grid();
    throw std::invalid_argument("VolatilityModel: no loading surfaces");
}

void VolatilityModel::validate(const LevyDriverSpec& driver) const {
    const SurfaceGrid& g = grid();
    for (const auto& s : wiener_loadings)
        if (!s.grid().same_as(g)) throw std::invalid_argument("VolatilityModel: loading grids differ");
    for (const auto& s : jump_loadings)
        if (!s.grid().same_as(g)) throw std::invalid_argument("VolatilityModel: loading grids differ");
    if (wiener_loadings.size() != driver.wiener_factors())
        throw std::invalid_argument("VolatilityModel: Wiener factor count does not match driver");
    if (jump_loadings.size() != driver.jump_marks().size())
        throw std::invalid_argument("VolatilityModel: jump loading count does not match driver marks");
}

VolatilityModel to_factor_model(const LevyScalarVol& vol, const LevyDriverSpec& driver) {
    if (driver.wiener_factors() != 1)
        throw std::invalid_argument("to_factor_model: scalar parametrization requires a one-factor driver");
    VolatilityModel out;
    out.kind = vol.kind;
    const SurfaceGrid& g = vol.loading.grid();
    double root_c = std::sqrt(driver.gaussian_c());
    Surface w(g);
    for (std::size_t k = 0; k < g.size(); ++k) w.values()[k] = root_c * vol.loading.values()[k];
    out.wiener_loadings.push_back(std::move(w));
    for (const auto& m : driver.jump_marks()) {
        Surface jl(g);
        for (std::size_t k = 0; k < g.size(); ++k) jl.values()[k] = m.xi * vol.loading.values()[k];
        out.jump_loadings.push_back(std::move(jl));
    }
    return out;
}

}  // namespace fme
