#include <doctest.h>

#include <cmath>
#include <random>

#include "nlh/errors.hpp"
#include "nlh/exponents.hpp"
#include "support.hpp"

using namespace nlh;

TEST_CASE("derived exponents for d=5, p=3") {
    const ProblemParams pp = derived_exponents(5, 3.0);
    CHECK(pp.q_c == doctest::Approx(5.0));
    CHECK(pp.p_c == doctest::Approx(7.0 / 3.0));
    CHECK(pp.p_fujita == doctest::Approx(1.4));
    CHECK(pp.p_jl.is_infinite());
    CHECK(pp.regime == Regime::EnergySupercritical);
    CHECK(pp.in_nonuniqueness_range());
}

TEST_CASE("derived exponents for d=11, p=7 lie beyond Joseph-Lundgren") {
    const ProblemParams pp = derived_exponents(11, 7.0);
    REQUIRE(pp.p_jl.is_finite());
    // mpmath, 30 digits
    CHECK(std::abs(*pp.p_jl.value() - 6.9220245868163408076) <= 1e-13);
    CHECK(pp.regime == Regime::BeyondJosephLundgren);
    CHECK_FALSE(pp.in_nonuniqueness_range());
    CHECK(to_string(pp.regime) == "beyond-JL");
}

TEST_CASE("energy-critical boundary d=3, p=5") {
    const ProblemParams pp = derived_exponents(3, 5.0);
    CHECK(pp.p_c == 5.0);
    CHECK(pp.q_c == 6.0);
    CHECK(pp.energy_critical());
    CHECK(pp.regime == Regime::EnergySupercritical);
}

TEST_CASE("d=4, p=2 is energy subcritical") {
    const ProblemParams pp = derived_exponents(4, 2.0);
    CHECK(pp.p_fujita == 1.5);
    CHECK(pp.p_c == 3.0);
    CHECK(pp.regime == Regime::EnergySubcritical);
}

TEST_CASE("domain errors") {
    CHECK_THROWS_AS(derived_exponents(2, 3.0), DomainError);
    CHECK_THROWS_AS(derived_exponents(5, 1.0), DomainError);
    CHECK_THROWS_AS(derived_exponents(5, 0.5), DomainError);
    CHECK_THROWS_AS(derived_exponents(5, std::nan("")), DomainError);
}

TEST_CASE("Joseph-Lundgren exponent across dimensions") {
    for (int d = 3; d <= 10; ++d) CHECK(joseph_lundgren_exponent(d).is_infinite());
    // mpmath, 30 digits
    const double ref[] = {6.9220245868163408076, 3.9266499161421597464, 2.9306913006394550436,
                          2.4342585459106649282, 2.1374347552952546181, 1.9402841282102301079,
                          1.8,                   1.6951941016011038421, 1.6139942842938186374,
                          1.5492843974906966853};
    double prev = INFINITY;
    for (int d = 11; d <= 20; ++d) {
        const auto v = joseph_lundgren_exponent(d).value();
        REQUIRE(v.has_value());
        CHECK(std::abs(*v - ref[d - 11]) <= 1e-12 * ref[d - 11]);
        CHECK(*v < prev);
        prev = *v;
        const ProblemParams pp = derived_exponents(d, 1.5);
        CHECK(pp.p_fujita < pp.p_c);
        CHECK(pp.p_c < *pp.p_jl.value());
    }
}

TEST_CASE("regimes are exclusive and exhaustive above Fujita") {
    std::mt19937_64 rng(test::kSeed);
    std::uniform_int_distribution<int> dd(3, 20);
    std::uniform_real_distribution<double> pu(0.0, 1.0);
    for (int k = 0; k < 2000; ++k) {
        const int d = dd(rng);
        const ProblemParams base = derived_exponents(d, 2.0);
        const double p = base.p_fujita + 1e-9 + 8.0 * pu(rng);
        const ProblemParams pp = derived_exponents(d, p);
        const bool sub = p < pp.p_c;
        const bool sup = p >= pp.p_c && pp.p_jl.exceeds(p);
        const bool beyond = !pp.p_jl.exceeds(p);
        CHECK(int(sub) + int(sup) + int(beyond) == 1);
        const Regime want = sub ? Regime::EnergySubcritical
                                : (sup ? Regime::EnergySupercritical
                                       : Regime::BeyondJosephLundgren);
        CHECK(pp.regime == want);
    }
}

TEST_CASE("q_c increases in d and p") {
    for (int d = 3; d < 20; ++d)
        for (double p = 1.1; p < 8.0; p += 0.37) {
            CHECK(derived_exponents(d + 1, p).q_c > derived_exponents(d, p).q_c);
            CHECK(derived_exponents(d, p + 0.01).q_c > derived_exponents(d, p).q_c);
        }
    // q_c = p on the doubly-critical curve p = d/(d-2)
    const ProblemParams pp = derived_exponents(4, 2.0);
    CHECK(pp.q_c == doctest::Approx(pp.p));
}

TEST_CASE("feasibility") {
    const ProblemParams pp = derived_exponents(5, 3.0);
    const FeasibilityCheck ok = check_feasibility(pp, 0.05, 2.0, 10.0);
    CHECK(ok.satisfied);
    CHECK(ok.slack == doctest::Approx(0.20));
    CHECK(ok.bound == doctest::Approx(0.25));
    CHECK_FALSE(check_feasibility(pp, 0.0, 2.0, 10.0).satisfied);
    CHECK_FALSE(check_feasibility(pp, 0.25, 2.0, 10.0).satisfied);
    CHECK_THROWS_AS(check_feasibility(pp, 0.05, 5.0, 10.0), DomainError);
    CHECK_THROWS_AS(check_feasibility(pp, 0.05, 2.0, 5.0), DomainError);
    CHECK_THROWS_AS(check_feasibility(pp, 0.05, 0.5, 10.0), DomainError);
}

TEST_CASE("feasibility is monotone in lambda and r") {
    const ProblemParams pp = derived_exponents(5, 3.0);
    std::mt19937_64 rng(test::kSeed + 1);
    std::uniform_real_distribution<double> lam(-0.1, 0.6);
    std::uniform_real_distribution<double> rr(5.01, 100.0);
    std::uniform_real_distribution<double> shrink(0.0, 1.0);
    for (int k = 0; k < 5000; ++k) {
        const double l = lam(rng);
        const double r = rr(rng);
        if (!check_feasibility(pp, l, 2.0, r).satisfied) continue;
        const double l2 = l * shrink(rng) + 1e-12;
        CHECK(check_feasibility(pp, std::max(l2, 1e-12), 2.0, r).satisfied);
        CHECK(check_feasibility(pp, l, 2.0, r + 10.0 * shrink(rng)).satisfied);
    }
}

TEST_CASE("signed power") {
    CHECK(signed_power(-2.0, 3.0) == -8.0);
    CHECK(signed_power(2.0, 2.5) == doctest::Approx(std::pow(2.0, 2.5)));
    CHECK(signed_power(-2.0, 2.5) == doctest::Approx(-std::pow(2.0, 2.5)));
    CHECK(signed_power(0.0, 1.5) == 0.0);
}

TEST_CASE("remainder gap examples") {
    const GapBound g = taylor_remainder_gap(1.0, 1.0, 2.0);
    CHECK(g.lhs == doctest::Approx(1.0));
    CHECK(g.rhs == doctest::Approx(2.0));
    for (double p : {1.5, 2.0, 3.0, 5.5}) {
        const GapBound z = taylor_remainder_gap(3.7, 0.0, p);
        CHECK(z.lhs == 0.0);
        CHECK(z.rhs == 0.0);
        CHECK(contraction_remainder_gap(0.3, -1.2, -1.2, p).lhs == 0.0);
    }
    const GapBound c = contraction_remainder_gap(0.0, 1.0, -1.0, 2.0);
    CHECK(c.lhs == doctest::Approx(2.0));
    CHECK(c.rhs == doctest::Approx(8.0));
}

namespace {

// Mixture of scales so that both |x| >> |y| and |x| << |y| are sampled.
double sample_real(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> mant(-1.0, 1.0);
    std::uniform_int_distribution<int> expo(-4, 4);
    return mant(rng) * std::pow(10.0, expo(rng));
}

double slack_scale(double a, double b) { return 1e-12 * (1.0 + std::abs(a) + std::abs(b)); }

}  // namespace

TEST_CASE("taylor remainder bound on 1e5 seeded samples") {
    std::mt19937_64 rng(test::kSeed);
    std::uniform_real_distribution<double> pp(1.0, 6.0);
    int violations = 0;
    for (int k = 0; k < 100000; ++k) {
        double p = pp(rng);
        if (p == 1.0) p = 1.5;
        const double x = sample_real(rng);
        const double y = sample_real(rng);
        const GapBound g = taylor_remainder_gap(x, y, p);
        if (!(g.lhs <= g.rhs * (1.0 + 1e-12) + slack_scale(g.lhs, g.rhs))) ++violations;
    }
    CHECK(violations == 0);
}

TEST_CASE("contraction remainder bound on 1e5 seeded samples") {
    std::mt19937_64 rng(test::kSeed + 7);
    std::uniform_real_distribution<double> pp(1.0, 6.0);
    int violations = 0;
    for (int k = 0; k < 100000; ++k) {
        double p = pp(rng);
        if (p == 1.0) p = 1.5;
        const double x = sample_real(rng);
        const double y = sample_real(rng);
        const double z = sample_real(rng);
        const GapBound g = contraction_remainder_gap(x, y, z, p);
        if (!(g.lhs <= g.rhs * (1.0 + 1e-12) + slack_scale(g.lhs, g.rhs))) ++violations;
    }
    CHECK(violations == 0);
}

TEST_CASE("taylor remainder is accurate for small increments") {
    // (1+t)^3 - 1 - 3t = 3t^2 + t^3 exactly
    for (double t : {1e-3, -1e-5, 1e-9, 0.09, 0.5}) {
        const double want = 3.0 * t * t + t * t * t;
        CHECK(taylor_remainder(1.0, t, 3.0) == doctest::Approx(want).epsilon(1e-12));
        CHECK(taylor_remainder(-2.0, -2.0 * t, 3.0) == doctest::Approx(-8.0 * want).epsilon(1e-12));
    }
    CHECK(taylor_remainder(0.0, -1.5, 2.5) == doctest::Approx(signed_power(-1.5, 2.5)));
}
