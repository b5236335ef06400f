#include "nlh/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nlh/errors.hpp"

namespace nlh {

std::string_view to_string(Regime r) {
    switch (r) {
        case Regime::FujitaSubcritical: return "fujita-subcritical";
        case Regime::EnergySubcritical: return "energy-subcritical";
        case Regime::EnergySupercritical: return "energy-supercritical";
        case Regime::BeyondJosephLundgren: return "beyond-JL";
    }
    return "unknown";
}

ExtendedReal joseph_lundgren_exponent(int d) {
    if (d <= 10) return ExtendedReal::infinity();
    const double dd = d;
    return ExtendedReal::finite(1.0 + 4.0 / (dd - 4.0 - 2.0 * std::sqrt(dd - 1.0)));
}

ProblemParams derived_exponents(int d, double p) {
    if (d < 3) throw DomainError("dimension d must be >= 3, got " + std::to_string(d));
    if (!(p > 1.0) || !std::isfinite(p))
        throw DomainError("power p must satisfy p > 1, got " + std::to_string(p));

    ProblemParams out;
    out.d = d;
    out.p = p;
    out.q_c = d * (p - 1.0) / 2.0;
    out.p_fujita = 1.0 + 2.0 / d;
    out.p_c = 1.0 + 4.0 / (d - 2.0);
    out.p_jl = joseph_lundgren_exponent(d);

    if (p <= out.p_fujita)
        out.regime = Regime::FujitaSubcritical;
    else if (p < out.p_c)
        out.regime = Regime::EnergySubcritical;
    else if (out.p_jl.exceeds(p))
        out.regime = Regime::EnergySupercritical;
    else
        out.regime = Regime::BeyondJosephLundgren;
    return out;
}

FeasibilityCheck check_feasibility(const ProblemParams& params, double lambda_bar, double q,
                                   double r) {
    if (!(q >= 1.0)) throw DomainError("q must be >= 1");
    if (!(q < params.q_c)) throw DomainError("q must be below q_c = " + std::to_string(params.q_c));
    if (!(r > params.q_c)) throw DomainError("r must exceed q_c = " + std::to_string(params.q_c));

    FeasibilityCheck out;
    out.lambda_bar = lambda_bar;
    out.q = q;
    out.r = r;
    out.bound = params.inv_pm1() - params.d / (2.0 * r);
    out.slack = out.bound - lambda_bar;
    out.satisfied = lambda_bar > 0.0 && lambda_bar < out.bound;
    return out;
}

double signed_power(double v, double p) {
    if (v == 0.0) return 0.0;
    return std::copysign(std::pow(std::abs(v), p), v);
}

namespace {

constexpr double kSeriesRadius = 0.1;

// sum_{k>=2} C(p,k) (t1^k - t2^k), with t1^k - t2^k carried as a multiple of dt = t1 - t2.
double binomial_tail_difference(double t1, double t2, double dt, double p) {
    double coef = p * (p - 1.0) / 2.0;
    double a = dt * (t1 + t2);  // t1^2 - t2^2
    double t2k = t2 * t2;
    double s = 0.0;
    for (int k = 2; k < 60; ++k) {
        const double term = coef * a;
        s += term;
        if (std::abs(term) <= 1e-18 * std::abs(s)) break;
        coef *= (p - k) / (k + 1.0);
        a = t1 * a + t2k * dt;
        t2k *= t2;
    }
    return s;
}

}  // namespace

double taylor_remainder(double x, double y, double p) {
    if (x == 0.0) return signed_power(y, p);
    const double t = y / x;
    if (std::abs(t) < kSeriesRadius)
        return signed_power(x, p) * binomial_tail_difference(t, 0.0, t, p);
    return signed_power(x + y, p) - signed_power(x, p) - p * std::pow(std::abs(x), p - 1.0) * y;
}

GapBound taylor_remainder_gap(double x, double y, double p) {
    const double ax = std::abs(x);
    const double ay = std::abs(y);
    GapBound g;
    g.lhs = std::abs(taylor_remainder(x, y, p));
    if (p <= 2.0) {
        g.rhs = p * std::pow(ay, p);
    } else {
        const double c = 0.5 * p * (p - 1.0) * std::max(1.0, std::pow(2.0, p - 3.0));
        g.rhs = c * (std::pow(ax, p - 2.0) * ay * ay + std::pow(ay, p));
    }
    return g;
}

GapBound contraction_remainder_gap(double x, double y, double z, double p) {
    const double ax = std::abs(x);
    const double ay = std::abs(y);
    const double az = std::abs(z);
    GapBound g;
    if (x != 0.0 && std::max(ay, az) < kSeriesRadius * ax)
        g.lhs = std::abs(signed_power(x, p) *
                         binomial_tail_difference(y / x, z / x, (y - z) / x, p));
    else
        g.lhs = std::abs(signed_power(x + y, p) - signed_power(x + z, p) -
                         p * std::pow(ax, p - 1.0) * (y - z));
    if (p <= 2.0) {
        g.rhs = p * (std::pow(ay, p - 1.0) + std::pow(az, p - 1.0)) * std::abs(y - z);
    } else {
        const double c = p * (p - 1.0) * std::max(1.0, std::pow(3.0, p - 3.0));
        g.rhs = c * (ay + az) *
                (std::pow(ax, p - 2.0) + std::pow(ay, p - 2.0) + std::pow(az, p - 2.0)) *
                std::abs(y - z);
    }
    return g;
}

}  // namespace nlh
