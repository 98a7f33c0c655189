#ifndef FME_IO_HPP
#define FME_IO_HPP

#include <string>

#include "fme/pricing.hpp"
#include "fme/surface.hpp"

namespace fme {

// Canonical numeric formatting for every CSV field: 12 significant digits.
std::string format_sig(double v);

// Surface CSV: header `s\z,z_0,...,z_{n-1}`, then one row per horizon node
// `s_i,v_{i0},...`. Grid metadata goes to a JSON sidecar at path + ".json"
// with fields h, n_s, n_z.
void write_surface_csv(const Surface& f, const std::string& path);
Surface read_surface_csv(const std::string& path);

// Discount curve CSV: header `t,r`, one knot per row.
void write_discount_csv(const DiscountCurve& curve, const std::string& path);
DiscountCurve read_discount_csv(const std::string& path);

}  // namespace fme

#endif
