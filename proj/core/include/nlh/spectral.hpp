#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nlh/exponents.hpp"
#include "nlh/grid.hpp"
#include "nlh/profile.hpp"

namespace nlh {

/// V = p|U|^{p-1} sampled on the profile grid.
struct PotentialField {
    ExpanderProfile profile;
    std::vector<double> v;
    double sup_norm = 0.0;

    static PotentialField from_profile(ExpanderProfile profile);
    /// V at an arbitrary radius through the profile interpolant.
    double value_at(double rho) const;
};

enum class EigenMethod { Shooting, Matrix };
std::string_view to_string(EigenMethod m);

struct EigenPair {
    double lambda = 0.0;
    RadialGrid grid = RadialGrid::uniform();
    /// Eigenfunction on grid, normalised by f(0) = 1.
    std::vector<double> f;
    /// ||f||_{L^2_omega} with omega = rho^{d-1} e^{rho^2/4} (sphere factor omitted).
    double l2w_norm = 0.0;
    int zero_count = 0;
    EigenMethod method = EigenMethod::Shooting;
};

struct AlphaStarResult {
    std::optional<double> alpha_star;
    double lo = 0.0;
    double hi = 0.0;
    int zero_count_lo = 0;
    int zero_count_hi = 0;
    double tolerance = 0.0;
    /// Number of 0 -> >=1 transitions seen in the coarse scan of the bracket.
    int transitions = 0;
    std::string diagnostic;
};

/// Options shared by the Pruefer-phase integrators.
struct ShootingOptions {
    /// Series start radius; 0 selects default_start_radius.
    double rho0 = 0.0;
};

/// Pruefer angle theta = atan2(f, f') of the regular solution of
/// L_alpha f = lambda f, f(0) = 1, f'(0) = 0, at rho_max. Starts at pi/2.
double prufer_phase_end(double alpha, const ProblemParams& params, double lambda,
                        const RadialGrid& grid = RadialGrid::uniform(), ShootingOptions opt = {});

/// Angle in (0, pi) of the decaying branch at rho_max.
double decaying_branch_angle(const ProblemParams& params, double lambda, double rho_max);

/// Number of eigenvalues of L_alpha strictly above lambda.
int eigenvalues_above(double alpha, const ProblemParams& params, double lambda,
                      const RadialGrid& grid = RadialGrid::uniform(), ShootingOptions opt = {});

/// Sign changes on (0, rho_max] of the neutral solution L_alpha f = 0.
int neutral_zero_count(double alpha, const ProblemParams& params,
                       const RadialGrid& grid = RadialGrid::uniform());

/// Bisection on the 0 -> >=1 transition of the neutral zero count.
/// Throws BracketError if the count at lo is already >= 1.
AlphaStarResult find_alpha_star(const ProblemParams& params, double lo = 0.1, double hi = 50.0,
                                double tol = 1e-6,
                                const RadialGrid& grid = RadialGrid::uniform());

/// The single eigenpair with lambda in (lo, hi).
/// Throws BracketError unless exactly one eigenvalue lies in the bracket.
EigenPair eigenvalue_shoot(double alpha, const ProblemParams& params, double lo, double hi,
                           const RadialGrid& grid = RadialGrid::uniform(),
                           ShootingOptions opt = {});

/// Largest eigenvalue (any sign) by shooting.
EigenPair top_eigenpair(double alpha, const ProblemParams& params,
                        const RadialGrid& grid = RadialGrid::uniform());

/// All positive eigenpairs, descending.
std::vector<EigenPair> positive_spectrum(double alpha, const ProblemParams& params,
                                         const RadialGrid& grid = RadialGrid::uniform());

/// Eigenvalues above `cutoff` (descending) of the symmetrised finite-difference
/// operator, extrapolated from spacings h and h/2.
/// Throws ResolutionError if the grid spacing exceeds 0.05.
std::vector<double> matrix_spectrum(const std::function<double(double)>& potential,
                                    const ProblemParams& params, const RadialGrid& grid,
                                    double cutoff = -1.0);
/// Same for V_alpha; also throws ResolutionError if h > alpha^{-(p-1)/2} / 2.
std::vector<double> matrix_spectrum(double alpha, const ProblemParams& params,
                                    const RadialGrid& grid = RadialGrid::uniform(),
                                    double cutoff = -1.0);

struct UnstableExpander {
    AlphaStarResult alpha_star;
    double alpha_bar = 0.0;
    double lambda_bar = 0.0;
    ExpanderProfile profile;
    EigenPair eigenpair;
    /// sup |V_alpha_bar - V_alpha*| over the grid.
    double potential_gap = 0.0;
    /// Number of positive eigenvalues at alpha_bar.
    int positive_count = 0;
};

/// Expander just above alpha* whose top eigenvalue lies in (0, eps_target).
/// Throws NoUnstableExpanderError for p >= p_JL or when no alpha* exists.
UnstableExpander select_unstable_expander(const ProblemParams& params, double eps_target,
                                          const RadialGrid& grid = RadialGrid::uniform());

/// CSV alpha,lambda,zero_count,method.
void write_spectrum_csv(std::ostream& os, double alpha, std::span<const EigenPair> pairs);
/// CSV rho,f.
void write_eigenfunction_csv(std::ostream& os, const EigenPair& pair);

}  // namespace nlh
