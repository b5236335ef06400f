#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "nlh/exponents.hpp"
#include "nlh/grid.hpp"

namespace nlh {

/// Radial samples with optional power-law tail metadata (f ~ rho^tail_exponent).
struct RadialFunction {
    RadialGrid grid = RadialGrid::uniform();
    std::vector<double> values;
    std::optional<double> tail_exponent;

    static RadialFunction sample(const RadialGrid& grid, const std::function<double(double)>& f,
                                 std::optional<double> tail_exponent = std::nullopt);
    /// Degree-5 Lagrange interpolation; tail extrapolation (or 0) beyond rho_max.
    double value_at(double rho) const;
};

/// A exp(-rho^2 / (2 variance)).
struct GaussianDatum {
    double amplitude = 1.0;
    double variance = 1.0;

    double operator()(double rho) const;
};

/// sigma_{d-1} = 2 pi^{d/2} / Gamma(d/2).
double unit_sphere_area(int d);

/// (sigma_{d-1} int |f|^gamma rho^{d-1})^{1/gamma} by composite Simpson plus the
/// power-law tail when present.
/// Throws DomainError for gamma < 1, DivergenceError for a non-integrable tail.
double lq_norm(const RadialFunction& f, double gamma, int d);
double lq_norm(const GaussianDatum& g, double gamma, int d);

/// Closed-form S0(tau) on a Gaussian. Throws DomainError for tau < 0 or variance <= 0.
GaussianDatum apply_S0_gaussian(double tau, const GaussianDatum& g, const ProblemParams& params);

/// S0(tau) f by radial x angular quadrature, sampled on f's grid.
/// Throws DomainError for tau <= 0; AccuracyError if the angular rule fails to converge.
RadialFunction apply_S0(double tau, const RadialFunction& f, const ProblemParams& params);

/// Large-tau log-slope of the L^eta operator norm of S0 restricted to the
/// Gaussian family (sup over variances, approached with a very wide datum).
double gaussian_growth_exponent(double eta, const ProblemParams& params, double tau_lo = 4.0,
                                double tau_hi = 8.0);

struct SmoothingReport {
    double eta = 0.0;
    double eta_prime = 0.0;
    double gamma = 0.0;
    double gamma_prime = 0.0;
    std::vector<double> tau_list;
    /// Max over samples, per tau.
    std::vector<double> ratios;
    double fitted_M = 0.0;
    bool pass = false;
};

/// Default tau samples 2^-k, k = 1..10.
std::vector<double> default_smoothing_taus();

/// Smoothing ratios on Gaussian data (closed-form norms).
/// Throws DomainError unless eta <= eta', gamma <= gamma' and the exponent gaps match.
SmoothingReport verify_smoothing(double eta, double eta_prime, double gamma, double gamma_prime,
                                 std::span<const GaussianDatum> samples,
                                 const ProblemParams& params,
                                 std::vector<double> tau_list = default_smoothing_taus());
/// Same check on general radial data through apply_S0.
SmoothingReport verify_smoothing(double eta, double eta_prime, double gamma, double gamma_prime,
                                 std::span<const RadialFunction> samples,
                                 const ProblemParams& params,
                                 std::vector<double> tau_list = default_smoothing_taus());

/// JSON object {eta, eta_prime, tau_list, ratios, fitted_M, pass}.
void write_smoothing_json(std::ostream& os, const SmoothingReport& report);

}  // namespace nlh
