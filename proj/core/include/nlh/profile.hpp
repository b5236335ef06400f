#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nlh/exponents.hpp"
#include "nlh/grid.hpp"

namespace nlh {

/// Taylor start of the regular profile branch away from the rho = 0 singular point.
struct SeriesStart {
    double u = 0.0;
    double du = 0.0;
    double c2 = 0.0;  ///< coefficient of rho^2
    double c4 = 0.0;  ///< coefficient of rho^4
};

/// Fourth-order series U = alpha + c2 rho^2 + c4 rho^4 at rho0.
/// Throws DomainError for alpha < 0 or rho0 <= 0.
SeriesStart series_start(double alpha, const ProblemParams& params, double rho0 = 1e-4);

/// Start radius used by the shooting integrators: 1e-4 unless the profile's
/// intrinsic length (alpha^{p-1})^{-1/2} is shorter.
double default_start_radius(double alpha, const ProblemParams& params);

struct TailEstimate {
    double ell = 0.0;
    double uncertainty = 0.0;
};

/// Expander profile U_alpha sampled on a radial grid.
struct ExpanderProfile {
    double alpha = 0.0;
    ProblemParams params;
    RadialGrid grid = RadialGrid::uniform();
    std::vector<double> u;
    std::vector<double> du;
    double ell = 0.0;
    double ell_uncertainty = 0.0;
    /// Max pointwise ODE defect over interior nodes (see shoot_profile).
    double residual_max = 0.0;
    double max_abs_u = 0.0;
    bool bounded = true;
    /// Sign changes of U on the grid.
    int zero_crossings = 0;

    /// U'' recovered from the profile ODE at node i (limit form at rho = 0).
    double second_derivative(std::size_t i) const;

    /// U at an arbitrary radius via quintic Hermite interpolation of (U, U', U'');
    /// beyond rho_max a third-order Taylor continuation from the last node is used.
    double value_at(double rho) const;
    double derivative_at(double rho) const;
};

/// Right-hand side of the profile ODE written as U'' = F(rho, U, U').
double profile_second_derivative(const ProblemParams& params, double rho, double u, double du);

/// Shoots U_alpha from the series start to rho_max with adaptive Dormand-Prince
/// (rel 1e-10, abs 1e-12), samples it on the grid and fills the tail constant
/// and the ODE defect. alpha = 0 returns the zero profile.
/// Throws DomainError for alpha < 0; IntegrationError on step collapse/overflow.
ExpanderProfile shoot_profile(double alpha, const ProblemParams& params,
                              const RadialGrid& grid = RadialGrid::uniform());

/// Tail constant lim rho^{2/(p-1)} U(rho), extrapolated on the windows
/// [0.7, 0.85] rho_max and [0.85, 1] rho_max; the uncertainty is the
/// disagreement between the two window estimates.
/// Throws TailNotResolvedError when the windows disagree by more than 1%.
TailEstimate estimate_ell(const ExpanderProfile& profile);

/// Log-log decay exponent of U over the tail windows after removing the
/// O(rho^-2) corrections; approaches -2/(p-1) for bounded profiles.
double fitted_tail_exponent(const ExpanderProfile& profile);

/// Max pointwise defect of the profile ODE evaluated with sixth-order
/// central differences, normalised by nothing (absolute).
double ode_defect(const ExpanderProfile& profile);

struct EllSweepRow {
    double alpha = 0.0;
    double ell = 0.0;
    double uncertainty = 0.0;
    double residual = 0.0;
    std::optional<std::string> error;
};

struct EllSweep {
    std::vector<EllSweepRow> rows;
    /// Largest |ell_{i+1} - ell_i| over adjacent successful rows.
    double continuity = 0.0;
};

/// Independent shots for each alpha; failures become row-level error markers.
/// Throws DomainError if any alpha <= 0.
EllSweep sweep_ell(std::span<const double> alphas, const ProblemParams& params,
                   const RadialGrid& grid = RadialGrid::uniform());

/// CSV with header rho,u,du.
void write_profile_csv(std::ostream& os, const ExpanderProfile& profile);

}  // namespace nlh
