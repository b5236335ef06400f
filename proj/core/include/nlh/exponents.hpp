#pragma once

#include <optional>
#include <string_view>

namespace nlh {

/// A finite real or +infinity.
class ExtendedReal {
public:
    static ExtendedReal finite(double v) { return ExtendedReal(false, v); }
    static ExtendedReal infinity() { return ExtendedReal(true, 0.0); }

    bool is_infinite() const noexcept { return infinite_; }
    bool is_finite() const noexcept { return !infinite_; }

    /// Throws std::bad_optional_access semantics via std::optional when infinite.
    std::optional<double> value() const {
        if (infinite_) return std::nullopt;
        return value_;
    }

    /// x < *this, exact for the infinite case.
    bool exceeds(double x) const noexcept { return infinite_ || x < value_; }

private:
    ExtendedReal(bool inf, double v) : infinite_(inf), value_(v) {}

    bool infinite_;
    double value_;
};

/// Power regimes relative to the critical exponents. For p > p_fujita the last
/// three are mutually exclusive and exhaustive.
enum class Regime {
    FujitaSubcritical,     ///< p <= 1 + 2/d
    EnergySubcritical,     ///< 1 + 2/d < p < p_c
    EnergySupercritical,   ///< p_c <= p < p_JL (energy-critical p = p_c included)
    BeyondJosephLundgren,  ///< p >= p_JL
};

std::string_view to_string(Regime r);

struct ProblemParams {
    int d = 3;
    double p = 3.0;
    double q_c = 0.0;       ///< d(p-1)/2
    double p_fujita = 0.0;  ///< 1 + 2/d
    double p_c = 0.0;       ///< 1 + 4/(d-2)
    ExtendedReal p_jl = ExtendedReal::infinity();
    Regime regime = Regime::FujitaSubcritical;

    /// 1/(p-1): the constant term of the similarity generator.
    double inv_pm1() const { return 1.0 / (p - 1.0); }
    /// 2/(p-1): the decay exponent of expander tails.
    double tail_power() const { return 2.0 / (p - 1.0); }
    bool energy_critical() const { return p == p_c; }
    /// p inside the non-uniqueness range 1 + 2/d < p < p_JL.
    bool in_nonuniqueness_range() const {
        return p > p_fujita && p_jl.exceeds(p);
    }
};

/// Joseph-Lundgren exponent; infinite for 3 <= d <= 10.
ExtendedReal joseph_lundgren_exponent(int d);

/// Populates every critical exponent and classifies the regime.
/// Throws DomainError unless d >= 3 and p > 1.
ProblemParams derived_exponents(int d, double p);

struct FeasibilityCheck {
    double lambda_bar = 0.0;
    double q = 0.0;
    double r = 0.0;
    /// 1/(p-1) - d/(2r): the upper limit on lambda_bar.
    double bound = 0.0;
    /// bound - lambda_bar
    double slack = 0.0;
    bool satisfied = false;
};

/// Checks 0 < lambda_bar < 1/(p-1) - d/(2r) for 1 <= q < q_c < r.
/// Throws DomainError on an ordering violation of (q, q_c, r).
FeasibilityCheck check_feasibility(const ProblemParams& params, double lambda_bar, double q,
                                   double r);

struct GapBound {
    double lhs = 0.0;
    double rhs = 0.0;
};

/// sign(v)|v|^p, the focusing nonlinearity for real p.
double signed_power(double v, double p);

/// sign(x+y)|x+y|^p - sign(x)|x|^p - p|x|^{p-1} y, by binomial series when |y| << |x|.
double taylor_remainder(double x, double y, double p);

/// Remainder of the first-order Taylor expansion of sign(v)|v|^p at x in the
/// direction y, together with its two-case upper bound.
GapBound taylor_remainder_gap(double x, double y, double p);

/// Difference of two first-order remainders (arguments x+y and x+z), together
/// with its two-case Lipschitz-type bound.
GapBound contraction_remainder_gap(double x, double y, double z, double p);

}  // namespace nlh
