#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "nlh/errors.hpp"
#include "nlh/semigroup.hpp"
#include "support.hpp"

using namespace nlh;

namespace {

double bump(double r) { return r < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - r * r)) : 0.0; }

// Radial heat equation u_t = u_rr + (d-1)/r u_r on [0, R] by explicit Euler with
// d dt / dr^2 = 0.25, Dirichlet at R, then S0(tau) f(rho) = e^{tau/(p-1)} u(e^tau - 1, e^{tau/2} rho).
std::vector<double> heat_oracle(double tau, const ProblemParams& pp, const RadialGrid& grid) {
    const double dr = 0.005;
    const double R = 12.0;
    const int n = static_cast<int>(std::lround(R / dr));
    const int d = pp.d;
    std::vector<double> u(n + 1), next(n + 1);
    for (int i = 0; i <= n; ++i) u[i] = bump(i * dr);
    const double a = std::expm1(tau);
    const double dt_max = 0.25 * dr * dr / d;
    const long steps = static_cast<long>(std::ceil(a / dt_max));
    const double dt = a / steps;
    const double k = dt / (dr * dr);
    for (long s = 0; s < steps; ++s) {
        next[0] = u[0] + 2.0 * d * k * (u[1] - u[0]);
        for (int i = 1; i < n; ++i) {
            const double drift = (d - 1.0) / (2.0 * i);
            next[i] = u[i] + k * ((1.0 + drift) * u[i + 1] - 2.0 * u[i] + (1.0 - drift) * u[i - 1]);
        }
        next[n] = 0.0;
        std::swap(u, next);
    }
    std::vector<double> out(grid.size(), 0.0);
    const double scale = std::exp(tau * pp.inv_pm1());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double x = std::exp(0.5 * tau) * grid[j] / dr;
        const auto i = static_cast<std::size_t>(x);
        if (i + 3 > static_cast<std::size_t>(n)) break;
        // cubic Lagrange on nodes i-1..i+2 (even extension at the origin)
        const double t = x - i;
        auto at = [&](long m) { return u[static_cast<std::size_t>(std::labs(m))]; };
        const long c = static_cast<long>(i);
        const double v = -t * (t - 1) * (t - 2) / 6 * at(c - 1) + (t + 1) * (t - 1) * (t - 2) / 2 * at(c) -
                         (t + 1) * t * (t - 2) / 2 * at(c + 1) + (t + 1) * t * (t - 1) / 6 * at(c + 2);
        out[j] = scale * v;
    }
    return out;
}

double rel_grid_error(const std::vector<double>& a, const std::vector<double>& b) {
    return test::max_abs_diff(a, b) / test::max_abs(b);
}

}  // namespace

TEST_CASE("unit sphere area") {
    CHECK(unit_sphere_area(3) == doctest::Approx(4.0 * std::numbers::pi));
    CHECK(unit_sphere_area(4) == doctest::Approx(2.0 * std::numbers::pi * std::numbers::pi));
    CHECK(unit_sphere_area(5) == doctest::Approx(8.0 * std::numbers::pi * std::numbers::pi / 3.0));
}

TEST_CASE("lq norms") {
    const RadialGrid g = RadialGrid::uniform();
    const RadialFunction gauss = RadialFunction::sample(g, [](double r) { return std::exp(-r * r); });
    CHECK(lq_norm(gauss, 2.0, 3) == doctest::Approx(std::pow(std::numbers::pi / 2.0, 0.75)).epsilon(1e-10));
    CHECK(lq_norm(GaussianDatum{1.0, 0.5}, 2.0, 3) ==
          doctest::Approx(std::pow(std::numbers::pi / 2.0, 0.75)).epsilon(1e-12));

    // The jump at rho = 1 limits Simpson to first order in the spacing.
    const double ball = 4.0 * std::numbers::pi / 3.0;
    const auto ind = [](double r) { return r <= 1.0 ? 1.0 : 0.0; };
    const double coarse = lq_norm(RadialFunction::sample(g, ind), 1.0, 3);
    const double fine = lq_norm(RadialFunction::sample(RadialGrid::uniform(16.0, 0.0005), ind), 1.0, 3);
    CHECK(std::abs(coarse - ball) <= 0.02 * ball);
    CHECK(std::abs(fine - ball) <= 1e-3 * ball);
    CHECK(std::abs(fine - ball) < std::abs(coarse - ball));

    const RadialFunction zero = RadialFunction::sample(g, [](double) { return 0.0; });
    CHECK(lq_norm(zero, 3.0, 5) == 0.0);
    CHECK_THROWS_AS(lq_norm(gauss, 0.5, 3), DomainError);
}

TEST_CASE("lq norm with a power-law tail") {
    const RadialGrid g = RadialGrid::uniform();
    // f ~ rho^-4; the extrapolated tail should reproduce a much longer grid.
    const auto f = [](double r) { return 1.0 / ((1.0 + r * r) * (1.0 + r * r)); };
    const RadialFunction tail = RadialFunction::sample(g, f, -4.0);
    const RadialFunction longer = RadialFunction::sample(RadialGrid::uniform(400.0, 0.01), f);
    CHECK(lq_norm(tail, 2.0, 3) == doctest::Approx(lq_norm(longer, 2.0, 3)).epsilon(1e-6));
    const RadialFunction slow = RadialFunction::sample(g, [](double r) { return 1.0 / (1.0 + r); }, -1.0);
    CHECK_THROWS_AS(lq_norm(slow, 2.0, 3), DivergenceError);
    CHECK_NOTHROW(lq_norm(slow, 4.0, 3));
}

TEST_CASE("radial function interpolation") {
    const RadialGrid g = RadialGrid::uniform();
    const RadialFunction f = RadialFunction::sample(g, [](double r) { return std::cos(r); });
    for (double r : {0.003, 0.5055, 3.14159, 15.99})
        CHECK(f.value_at(r) == doctest::Approx(std::cos(r)).epsilon(1e-9));
    CHECK(f.value_at(20.0) == 0.0);
    const RadialFunction t = RadialFunction::sample(g, [](double r) { return 1.0 / (r * r + 1e-300); }, -2.0);
    CHECK(t.value_at(32.0) == doctest::Approx(1.0 / 1024.0).epsilon(1e-12));
}

TEST_CASE("gaussian semigroup identity and law") {
    const ProblemParams pp = derived_exponents(5, 3.0);
    const GaussianDatum g{1.7, 0.3};
    const GaussianDatum id = apply_S0_gaussian(0.0, g, pp);
    CHECK(id.amplitude == g.amplitude);
    CHECK(id.variance == g.variance);

    std::mt19937_64 rng(test::kSeed);
    std::uniform_real_distribution<double> amp(-3.0, 3.0);
    std::uniform_real_distribution<double> var(0.01, 10.0);
    std::uniform_real_distribution<double> tt(0.0, 3.0);
    for (int k = 0; k < 50; ++k) {
        const GaussianDatum h{amp(rng), var(rng)};
        const double t1 = tt(rng);
        const double t2 = tt(rng);
        const GaussianDatum two = apply_S0_gaussian(t1, apply_S0_gaussian(t2, h, pp), pp);
        const GaussianDatum one = apply_S0_gaussian(t1 + t2, h, pp);
        CHECK(std::abs(two.amplitude - one.amplitude) <= 1e-12 * std::abs(one.amplitude));
        CHECK(std::abs(two.variance - one.variance) <= 1e-12 * one.variance);
    }
    CHECK_THROWS_AS(apply_S0_gaussian(-1.0, g, pp), DomainError);
    CHECK_THROWS_AS(apply_S0_gaussian(1.0, GaussianDatum{1.0, 0.0}, pp), DomainError);
}

TEST_CASE("growth exponent of the gaussian family") {
    for (const auto& pp : {derived_exponents(5, 3.0), derived_exponents(3, 2.0)}) {
        for (double eta : {1.0, 2.0, pp.q_c, 2.0 * pp.q_c}) {
            const double want = pp.inv_pm1() - pp.d / (2.0 * eta);
            CHECK(std::abs(gaussian_growth_exponent(eta, pp) - want) <= 1e-3);
        }
        CHECK(gaussian_growth_exponent(0.5 * (1.0 + pp.q_c), pp) < 0.0);
        CHECK(gaussian_growth_exponent(2.0 * pp.q_c, pp) > 0.0);
    }
}

TEST_CASE("quadrature semigroup matches the closed form") {
    for (int d : {3, 4, 5}) {
        const ProblemParams pp = derived_exponents(d, 3.0);
        const GaussianDatum g{1.3, 0.7};
        const RadialFunction f = RadialFunction::sample(RadialGrid::uniform(), g);
        const std::vector<double> taus = d == 3 ? std::vector<double>{1e-3, 0.1, 0.5, 2.0}
                                                : std::vector<double>{0.5};
        for (double tau : taus) {
            const RadialFunction out = apply_S0(tau, f, pp);
            const GaussianDatum ex = apply_S0_gaussian(tau, g, pp);
            std::vector<double> want(out.grid.size());
            for (std::size_t i = 0; i < want.size(); ++i) want[i] = ex(out.grid[i]);
            CAPTURE(d);
            CAPTURE(tau);
            CHECK(rel_grid_error(out.values, want) <= 1e-6);
        }
    }
    const ProblemParams pp = derived_exponents(5, 3.0);
    const RadialFunction f = RadialFunction::sample(RadialGrid::uniform(), GaussianDatum{});
    CHECK_THROWS_AS(apply_S0(0.0, f, pp), DomainError);
}

TEST_CASE("quadrature semigroup on a compact bump matches the heat-step oracle") {
    for (int d : {3, 5}) {
        const ProblemParams pp = derived_exponents(d, 3.0);
        const RadialGrid g = RadialGrid::uniform();
        const RadialFunction f = RadialFunction::sample(g, bump);
        const double tau = 0.5;
        const RadialFunction out = apply_S0(tau, f, pp);
        CAPTURE(d);
        CHECK(rel_grid_error(out.values, heat_oracle(tau, pp, g)) <= 1e-4);
    }
}

TEST_CASE("strong continuity at tau = 0") {
    const ProblemParams pp = derived_exponents(3, 3.0);
    const RadialFunction f = RadialFunction::sample(RadialGrid::uniform(), bump);
    // The departure is O(tau) times the generator applied to the bump.
    double prev = INFINITY;
    for (double tau : {1e-2, 1e-3, 1e-4}) {
        const double err = test::max_abs_diff(apply_S0(tau, f, pp).values, f.values);
        CHECK(err < 0.2 * prev);
        prev = err;
    }
    CHECK(prev <= 5e-3);
}

TEST_CASE("smoothing estimates") {
    const ProblemParams pp = derived_exponents(5, 3.0);
    std::mt19937_64 rng(test::kSeed);
    std::uniform_real_distribution<double> amp(0.5, 2.0);
    std::uniform_real_distribution<double> var(0.2, 3.0);
    std::vector<GaussianDatum> samples(8);
    for (auto& s : samples) s = {amp(rng), var(rng)};

    const SmoothingReport r = verify_smoothing(1.0, 2.0, 1.0, 2.0, samples, pp);
    CHECK(r.pass);
    CHECK(r.tau_list.size() == 10);
    CHECK(r.ratios.size() == 10);
    CHECK(r.fitted_M > 0.0);
    for (double x : r.ratios) CHECK(x <= 10.0 * r.fitted_M);

    // eta = eta': the ratio reduces to the growth bound, constant in tau for a fixed datum.
    const SmoothingReport flat = verify_smoothing(2.0, 2.0, 1.0, 1.0, samples, pp);
    CHECK(flat.pass);
    for (double x : flat.ratios) CHECK(x <= 1.0 + 1e-12);

    CHECK_THROWS_AS(verify_smoothing(2.0, 1.0, 1.0, 2.0, samples, pp), DomainError);
    CHECK_THROWS_AS(verify_smoothing(1.0, 2.0, 1.0, 3.0, samples, pp), DomainError);

    std::ostringstream os;
    write_smoothing_json(os, r);
    for (const char* key : {"\"eta\"", "\"eta_prime\"", "\"tau_list\"", "\"ratios\"", "\"fitted_M\"",
                            "\"pass\""})
        CHECK(os.str().find(key) != std::string::npos);
}

TEST_CASE("smoothing estimates on bumps through quadrature") {
    const ProblemParams pp = derived_exponents(3, 3.0);
    const RadialGrid g = RadialGrid::uniform();
    std::vector<RadialFunction> samples;
    for (double w : {0.5, 1.0, 2.0})
        samples.push_back(RadialFunction::sample(g, [w](double r) { return bump(r / w); }));
    const SmoothingReport r =
        verify_smoothing(1.0, 2.0, 1.0, 2.0, samples, pp, {0.5, 0.25, 0.125, 0.0625, 0.03125});
    CHECK(r.pass);
    CHECK(std::isfinite(r.fitted_M));
}
