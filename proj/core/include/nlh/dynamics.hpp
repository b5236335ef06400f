#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nlh/exponents.hpp"
#include "nlh/grid.hpp"
#include "nlh/spectral.hpp"

namespace nlh {

/// Similarity-variable radial field v(tau, rho_i).
struct EvolutionState {
    double tau = 0.0;
    RadialGrid grid = RadialGrid::uniform();
    std::vector<double> v;
};

/// Lebesgue exponents of the logged norms: L^1, L^q, L^r and L^{p r}.
struct NormExponents {
    double q = 2.0;
    double r = 10.0;
};

struct NormRecord {
    double tau = 0.0;
    double t = 0.0;
    double l1 = 0.0;
    double lq = 0.0;
    double lr = 0.0;
    double lpr = 0.0;
    /// L^2_omega; loses accuracy once rounding noise meets e^{rho_max^2/8}.
    double l2w = 0.0;
    /// Unweighted L^2 distance to EvolveOptions::reference (or the L^2 norm).
    double dist_ref = 0.0;
};

struct TrajectoryLog {
    std::vector<NormRecord> records;
    std::vector<double> step_sizes;
    std::string scheme = "crank-nicolson/explicit-euler, 4th-order centred differences";
    bool blew_up = false;
    EvolutionState final_state;
};

struct EvolveOptions {
    double dtau = 0.01;
    NormExponents norms;
    /// Log every n-th accepted step (the first and last are always logged).
    int log_every = 1;
    /// Static reference for dist_ref; empty means zero.
    std::vector<double> reference;
    /// Field the outer boundary relaxes to: ghost values satisfy
    /// (v - ref)(rho) ~ rho^{-2/(p-1)}. Empty means ref = 0.
    std::function<double(double)> boundary_reference;
    /// Power-law tail exponent of the evolved field, used in the norms.
    std::optional<double> tail_exponent;
    /// Called after every accepted step.
    std::function<void(const EvolutionState&)> observer;
};

/// Largest admissible step 0.5 / (p max|v|^{p-1}) (infinite for v = 0).
double stability_cap(const std::vector<double>& v, const ProblemParams& params);

/// One IMEX step of the similarity equation (no potential) or of the
/// linearised equation d_tau w = L0 w + V w (frozen potential supplied).
/// Throws StabilityError when dtau exceeds the stability cap.
EvolutionState step_imex(const EvolutionState& state, double dtau, const ProblemParams& params,
                         const PotentialField* frozen_potential = nullptr,
                         const std::function<double(double)>& boundary_reference = {});

/// d_tau v = L0 v + sign(v)|v|^p on [tau0, tau1]; stops early when max|v| > 1e6.
TrajectoryLog evolve_similarity(const std::vector<double>& v0, double tau0, double tau1,
                                const ProblemParams& params, const RadialGrid& grid,
                                const EvolveOptions& opt = {});

/// d_tau w = L_alpha w with the potential frozen at the profile.
TrajectoryLog linearized_evolve(const std::vector<double>& w0, const PotentialField& potential,
                                double tau0, double tau1, const EvolveOptions& opt = {});

/// Full perturbation equation around the profile: L_alpha implicit, the
/// nonlinear remainder explicit.
TrajectoryLog evolve_perturbation(const std::vector<double>& psi0, const PotentialField& potential,
                                  double tau0, double tau1, const EvolveOptions& opt = {});

/// Exponential rate fitted to log ||.||_{L^r} (or dist_ref) over tau in [from, to].
double fitted_growth_rate(const TrajectoryLog& log, double from, double to,
                          bool use_dist_ref = false);

struct AncientBranch {
    TrajectoryLog log;
    double epsilon = 0.0;
    double lambda_bar = 0.0;
    /// ||eigmode||_{L^r}
    double mode_lr = 0.0;
    /// min over the window of ||psi||_{L^r} / (e^{lambda tau} eps ||eigmode||_{L^r} / 2).
    double min_lower_ratio = 0.0;
    bool lower_bound_holds = false;
    /// (tau, ||psi - eps e^{lambda tau} eigmode||_{L^r}) samples.
    std::vector<double> residual_tau;
    std::vector<double> residual;
    double fitted_delta = 0.0;
    double delta_required = 0.0;
    bool delta_ok = false;
};

/// Unstable-manifold branch seeded by eps e^{lambda tau0} eigmode at tau0.
/// Throws AmplitudeError if the lower bound fails before tau1 (seed too large).
AncientBranch ancient_branch(const PotentialField& potential, const EigenPair& eigmode,
                             double lambda_bar, double epsilon, double tau0, double tau1,
                             const EvolveOptions& opt = {});

struct PhysicalNorm {
    double t = 0.0;
    double norm = 0.0;
};

/// t = e^tau and t^{-1/(p-1) + d/(2 gamma)} times the similarity norm.
/// Throws DomainError for gamma < 1.
PhysicalNorm to_physical_norm(double similarity_norm, double tau, double gamma,
                              const ProblemParams& params);

struct DemoOptions {
    /// Seed amplitude; empty selects it from the L^{pr} budget.
    std::optional<double> epsilon;
    double tau0 = -12.0;
    double tau1 = -2.0;
    double dtau = 0.01;
    /// Fraction of the feasibility bound 1/(p-1) - d/(2r) used as the eigenvalue target.
    double eps_fraction = 0.5;
    /// Automatic epsilon aims at ||psi(tau1)||_{L^{pr}} = target * ||U||_{L^{pr}}
    /// and never exceeds budget * ||U||_{L^{pr}}.
    double amplitude_target = 0.001;
    double amplitude_budget = 0.05;
    double slope_tolerance = 0.10;
    double r2_min = 0.99;
    double growth_tolerance = 1e-3;
    double drift_tolerance = 1e-5;
    RadialGrid grid = RadialGrid::uniform();
};

struct DemoReport {
    ProblemParams params;
    double q = 0.0;
    double r = 0.0;
    DemoOptions options;
    AlphaStarResult alpha_star;
    double alpha_bar = 0.0;
    double lambda_bar = 0.0;
    double ell_bar = 0.0;
    double epsilon = 0.0;
    double eps_target = 0.0;
    FeasibilityCheck feasibility;
    double potential_gap = 0.0;
    int positive_eigenvalues = 0;
    /// Eigenvalue check: shooting versus matrix top eigenvalue.
    double matrix_lambda = 0.0;
    double measured_growth_rate = 0.0;
    double static_drift = 0.0;
    double static_drift_bound = 0.0;
    double min_lower_ratio = 0.0;
    double fitted_delta = 0.0;
    double delta_required = 0.0;
    double predicted_slope = 0.0;
    double measured_slope = 0.0;
    double slope_r2 = 0.0;
    double decades = 0.0;
    /// Ancient-branch trajectory psi(tau) over the window.
    TrajectoryLog trajectory;
    /// (t, ||u1 - u2||_{L^r}) samples used for the slope fit.
    std::vector<double> t;
    std::vector<double> distance;
    struct Checks {
        bool feasibility = false;
        bool eigenvalue = false;
        bool growth_rate = false;
        bool static_drift = false;
        bool lower_bound = false;
        bool residual_order = false;
        bool slope = false;
        bool linearity = false;
        bool decades = false;
    } checks;
    bool pass = false;
};

/// Full pipeline from exponents to the fitted divergence slope.
/// Throws DomainError unless 1 <= q < q_c < r and p_fujita < p;
/// NoUnstableExpanderError for p >= p_JL; FeasibilityError for an infeasible lambda_bar.
DemoReport nonuniqueness_demo(const ProblemParams& params, double q, double r,
                              const DemoOptions& options = {});

/// CSV tau,t,l1,lq,lr,lpr,l2w,dist_ref.
void write_trajectory_csv(std::ostream& os, const TrajectoryLog& log);
/// JSON with per-check pass flags and every tolerance.
void write_demo_json(std::ostream& os, const DemoReport& report);

}  // namespace nlh
