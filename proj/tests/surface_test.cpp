#include <stdexcept>
#include <cmath>
#include <random>

#include "doctest.h"
#include "fme/surface.hpp"

using namespace fme;

namespace {

Surface fill(const SurfaceGrid& g, double (*fn)(double, double)) {
    Surface f(g);
    for (std::size_t i = 0; i < g.n_s; ++i)
        for (std::size_t j = 0; j < g.n_z; ++j) f.at(i, j) = fn(g.s(i), g.z(j) - g.s(i));
    return f;
}

}  // namespace

TEST_CASE("grid alignment and bounds") {
    SurfaceGrid g(0.25, 5, 9);
    CHECK(g.s(4) == doctest::Approx(1.0));
    CHECK(g.z_max() == doctest::Approx(2.0));
    CHECK(g.signed_index_of(-0.5) == -2);
    CHECK_THROWS_AS(g.signed_index_of(0.3), std::invalid_argument);
    CHECK_THROWS_AS(g.index_of(1.5, g.n_s), std::domain_error);
    CHECK_THROWS_AS(SurfaceGrid(0.0, 3, 3), std::invalid_argument);
}

TEST_CASE("surface rejects non-finite values") {
    SurfaceGrid g(0.5, 2, 2);
    std::vector<double> v{1.0, 2.0, std::nan(""), 4.0};
    CHECK_THROWS_AS(Surface(g, v), std::invalid_argument);
}

TEST_CASE("shift is the identity at t = 0 and exact on age-sum functions") {
    SurfaceGrid g(0.25, 8, 12);
    Surface f = fill(g, [](double s, double y) { return std::sin(s) + (s + y) * (s + y); });
    Surface same = shift(f, 0.0);
    for (std::size_t k = 0; k < g.size(); ++k) CHECK(same.values()[k] == f.values()[k]);

    Surface agesum = fill(g, [](double s, double y) { return 3.0 * (s + y) - 1.0; });
    Surface moved = shift(agesum, 0.5);
    for (std::size_t k = 0; k < g.size(); ++k)
        CHECK(moved.values()[k] == doctest::Approx(agesum.values()[k]));
}

TEST_CASE("shift semigroup law and staleness") {
    SurfaceGrid g(0.25, 8, 6);
    Surface f = fill(g, [](double s, double y) { return s * s - 0.3 * y; });
    Surface two_steps = shift(shift(f, 0.25), 0.25);
    Surface one_jump = shift(f, 0.5);
    for (std::size_t i = 0; i < g.n_s; ++i)
        for (std::size_t j = 0; j < g.n_z; ++j) {
            if (one_jump.stale(i, j)) continue;
            CHECK(two_steps.at(i, j) == doctest::Approx(one_jump.at(i, j)));
            CHECK_FALSE(two_steps.stale(i, j));
        }
    // rows shifted past the edge carry the last row's values and are marked
    for (std::size_t j = 0; j < g.n_z; ++j) {
        CHECK(one_jump.stale(g.n_s - 1, j));
        CHECK(one_jump.at(g.n_s - 1, j) == doctest::Approx(f.at(g.n_s - 1, j)));
    }
    CHECK_THROWS_AS(shift(f, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(shift(f, -0.25), std::invalid_argument);
}

TEST_CASE("eval interpolates bilinearly") {
    SurfaceGrid g(0.1, 11, 21);
    Surface f = fill(g, [](double s, double y) { return s + y; });
    CHECK(eval(f, 0.3, 0.4) == doctest::Approx(0.7));
    CHECK(eval(f, g.s(4), g.z(9) - g.s(4)) == doctest::Approx(f.at(4, 9)));
    Surface lin = fill(g, [](double s, double y) { return 2.0 * s + 0.0 * y; });
    CHECK(eval(lin, 0.35, 0.0) == doctest::Approx(0.7));  // mean of the two bracketing nodes
    CHECK_THROWS_AS(eval(f, 5.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(eval(f, 0.0, -0.1), std::domain_error);
}

TEST_CASE("improvements_to_rates basics") {
    SurfaceGrid g(0.1, 11, 21);
    std::vector<double> gv(g.n_z);
    for (std::size_t j = 0; j < g.n_z; ++j) gv[j] = 0.5 + 0.1 * g.z(j);
    Curve gamma0(g.h, gv);
    Surface zero(g, 0.0);
    Surface mu = improvements_to_rates(zero, gamma0);
    for (std::size_t i = 0; i < g.n_s; ++i)
        for (std::size_t j = 0; j < g.n_z; ++j) CHECK(mu.at(i, j) == doctest::Approx(gamma0.node(j)));

    GompertzParams p{2.0, 0.1, 1e-4, 0.1, 1e-3};
    auto gs = gompertz_makeham_surfaces(p, g);
    Surface rec = improvements_to_rates(gs.j0, gs.gamma0);
    for (std::size_t j = 0; j < g.n_z; ++j) CHECK(rec.at(0, j) == doctest::Approx(gs.gamma0.node(j)));
    double sup = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k)
        sup = std::max(sup, std::abs(rec.values()[k] - gs.mu0.values()[k]));
    CHECK(sup < 1e-4);  // trapezoid O(h^2) on the smooth integrand
}

TEST_CASE("rates_to_improvements and round trip") {
    SurfaceGrid g(0.05, 21, 41);
    Surface constant(g, 0.7);
    Surface j = rates_to_improvements(constant);
    for (double v : j.values()) CHECK(v == doctest::Approx(0.0));

    GompertzParams p{2.0, 0.1, 1e-4, 0.1, 1e-3};
    auto gs = gompertz_makeham_surfaces(p, g);
    Surface rec = rates_to_improvements(improvements_to_rates(gs.j0, gs.gamma0));
    double sup = 0.0, max_slope = 0.0;
    for (std::size_t i = 0; i + 1 < g.n_s; ++i)
        for (std::size_t jj = 0; jj < g.n_z; ++jj) {
            sup = std::max(sup, std::abs(rec.at(i, jj) - gs.j0.at(i, jj)));
            max_slope = std::max(max_slope, std::abs(gs.j0.at(i + 1, jj) - gs.j0.at(i, jj)) / g.h);
        }
    CHECK(sup <= 5.0 * g.h * max_slope);
}

TEST_CASE("line_integral_const_age") {
    SurfaceGrid g(0.25, 9, 17);
    Surface c(g, 2.0);
    CHECK(line_integral_const_age(c, 0.5, 0.0, 1.5) == doctest::Approx(3.0));

    SurfaceGrid g2(0.25, 5, 9);
    Surface lin = fill(g2, [](double s, double) { return s; });
    CHECK(line_integral_const_age(lin, 0.5, 0.0, 1.0) == doctest::Approx(0.5));

    SurfaceGrid g3(0.1, 11, 21);
    Surface quad = fill(g3, [](double s, double) { return s * s; });
    double v = line_integral_const_age(quad, 0.5, 0.0, 1.0);
    CHECK(std::abs(v - 1.0 / 3.0) <= g3.h * g3.h / 6.0 * 2.0);

    // negative current age: path starts on the birth edge
    Surface one = fill(g3, [](double, double) { return 1.0; });
    CHECK(line_integral_const_age(one, -0.5, 0.5, 0.9) == doctest::Approx(0.4));

    CHECK_THROWS_AS(line_integral_const_age(c, 0.5, 0.0, 10.0), std::domain_error);
    Surface st = c;
    st.mark_stale(2, 4);
    CHECK_THROWS_AS(line_integral_const_age(st, 0.5, 0.0, 1.5), std::runtime_error);
}

TEST_CASE("integral transforms are exact on their aligned test functions") {
    SurfaceGrid g(0.2, 8, 15);
    // f depending only on s+y integrates to z*s along constant-z columns
    Surface agesum = fill(g, [](double s, double y) { return s + y; });
    Surface F = integral_to_horizon(agesum);
    for (std::size_t i = 0; i < g.n_s; ++i)
        for (std::size_t j = 0; j < g.n_z; ++j) CHECK(F.at(i, j) == doctest::Approx(g.z(j) * g.s(i)));

    // f == 1 integrates to the diagonal arclength from the birth edge
    Surface one(g, 1.0);
    Surface D = integral_const_age_from_birth(one);
    for (std::size_t i = 0; i < g.n_s; ++i)
        for (std::size_t j = 0; j < g.n_z; ++j) {
            double y = g.z(j) - g.s(i);
            CHECK(D.at(i, j) == doctest::Approx(g.s(i) - std::max(0.0, -y)));
        }
}

TEST_CASE("h_norm norm axioms and closed forms") {
    SurfaceGrid g(0.1, 21, 31);
    Surface c(g, -2.5);
    CHECK(h_norm(c, 1.0) == doctest::Approx(2.5).epsilon(1e-12));

    Surface agesum = fill(g, [](double s, double y) { return s + y; });
    double expected = std::sqrt(1.0 - std::exp(-g.z_max()));
    CHECK(h_norm(agesum, 1.0) == doctest::Approx(expected).epsilon(0.02));

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int rep = 0; rep < 20; ++rep) {
        Surface a(g), b(g);
        for (std::size_t k = 0; k < g.size(); ++k) {
            a.values()[k] = u(rng);
            b.values()[k] = u(rng);
        }
        double na = h_norm(a, 0.7), nb = h_norm(b, 0.7);
        CHECK(na >= 0.0);
        Surface two = a;
        for (double& v : two.values()) v *= -2.0;
        CHECK(h_norm(two, 0.7) == doctest::Approx(2.0 * na));
        Surface sum = a;
        for (std::size_t k = 0; k < g.size(); ++k) sum.values()[k] += b.values()[k];
        CHECK(h_norm(sum, 0.7) <= na + nb + 1e-12);
    }
    CHECK_THROWS_AS(h_norm(Surface(SurfaceGrid(0.1, 2, 2)), 1.0), std::invalid_argument);
}

TEST_CASE("gompertz-makeham surfaces") {
    GompertzParams bad{0.5, 0.1, 1e-4, 0.1, 1e-3};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    GompertzParams p{2.0, 0.1, 1e-4, 0.1, 1e-3};
    SurfaceGrid g(1.0, 11, 41);
    auto gs = gompertz_makeham_surfaces(p, g);
    for (std::size_t j = 0; j < g.n_z; ++j)
        CHECK(gs.mu0.at(0, j) == doctest::Approx(gs.gamma0.node(j)));
    double base = 1e-4 * std::exp(0.1 * 40.0) + 1e-3;
    CHECK(gs.mu0.at(10, 40) == doctest::Approx((2.0 + std::exp(-1.0)) * base));
    // large-s limit along fixed z approaches theta1 * base
    CHECK(gs.mu0.at(10, 40) - 2.0 * base == doctest::Approx(std::exp(-1.0) * base));
}
