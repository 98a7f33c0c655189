#include "fme/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fme {

DiscountCurve::DiscountCurve(double flat_rate) : times_{0.0}, rates_{flat_rate} {
    if (!std::isfinite(flat_rate)) throw std::invalid_argument("DiscountCurve: non-finite rate");
}

DiscountCurve::DiscountCurve(std::vector<double> times, std::vector<double> rates)
    : times_(std::move(times)), rates_(std::move(rates)) {
    if (times_.empty() || times_.size() != rates_.size())
        throw std::invalid_argument("DiscountCurve: need matching nonempty knots");
    for (std::size_t i = 1; i < times_.size(); ++i)
        if (!(times_[i] > times_[i - 1]))
            throw std::invalid_argument("DiscountCurve: times must be strictly increasing");
    for (double r : rates_)
        if (!std::isfinite(r)) throw std::invalid_argument("DiscountCurve: non-finite rate");
}

double DiscountCurve::rate(double t) const {
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    if (it == times_.begin()) return rates_.front();
    return rates_[static_cast<std::size_t>(it - times_.begin()) - 1];
}

double DiscountCurve::integral(double t0, double t1) const {
    if (t1 < t0) throw std::invalid_argument("DiscountCurve::integral: t1 < t0");
    double acc = 0.0;
    double cur = t0;
    while (cur < t1) {
        auto it = std::upper_bound(times_.begin(), times_.end(), cur);
        double seg_end = it == times_.end() ? t1 : std::min(*it, t1);
        acc += rate(cur) * (seg_end - cur);
        cur = seg_end;
    }
    return acc;
}

double DiscountCurve::discount(double t0, double t1) const { return std::exp(-integral(t0, t1)); }

double survivor_bond_price(const PathState& state, const DiscountCurve& curve, double T, double x) {
    return curve.discount(state.t, T) * survival(state, T, x);
}

double annuity_value(const PathState& state, const DiscountCurve& curve,
                     const std::vector<double>& payment_dates, double x) {
    double acc = 0.0;
    for (double T : payment_dates) acc += survivor_bond_price(state, curve, T, x);
    return acc;
}

}  // namespace fme
