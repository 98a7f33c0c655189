#ifndef FME_PRICING_HPP
#define FME_PRICING_HPP

#include <vector>

#include "fme/simulate.hpp"

namespace fme {

// Piecewise-constant short rate: r(t) = rates[i] on [times[i], times[i+1]),
// extended flat on both sides. The integral is exact.
class DiscountCurve {
  public:
    explicit DiscountCurve(double flat_rate);
    DiscountCurve(std::vector<double> times, std::vector<double> rates);

    double rate(double t) const;
    double integral(double t0, double t1) const;
    double discount(double t0, double t1) const;  // exp(-integral)

    const std::vector<double>& times() const { return times_; }
    const std::vector<double>& rates() const { return rates_; }

  private:
    std::vector<double> times_;
    std::vector<double> rates_;
};

// exp(-int_t^T r) * G_t(T,x) with t taken from the state.
double survivor_bond_price(const PathState& state, const DiscountCurve& curve, double T, double x);

// Sum of survivor-bond prices over the payment dates.
double annuity_value(const PathState& state, const DiscountCurve& curve,
                     const std::vector<double>& payment_dates, double x);

}  // namespace fme

#endif
