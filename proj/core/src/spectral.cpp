#include "nlh/spectral.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <ostream>

#include <Eigen/Eigenvalues>

#include "adaptive_ode.hpp"
#include "nlh/errors.hpp"
#include "nlh/io.hpp"
#include "quadrature.hpp"

namespace nlh {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMatchRadius = 4.0;
constexpr int kAlphaScanSamples = 64;

double potential(double u, double p) { return p * std::pow(std::abs(u), p - 1.0); }

struct RegularStart {
    double rho0;
    double u, du;  // profile
    double f, df;  // eigenfunction with f(0) = 1
};

RegularStart regular_start(double alpha, const ProblemParams& params, double lambda,
                           const RadialGrid& grid, ShootingOptions opt) {
    double rho0 = opt.rho0 > 0.0 ? opt.rho0 : default_start_radius(alpha, params);
    rho0 = std::min(rho0, 0.5 * grid[1]);
    const SeriesStart s = series_start(alpha, params, rho0);
    const double p = params.p;
    const double d = params.d;
    const double c0 = params.inv_pm1() + potential(alpha, p) - lambda;
    const double c2 = alpha > 0.0 ? p * (p - 1.0) * std::pow(alpha, p - 2.0) * s.c2 : 0.0;
    const double f2 = -c0 / (2.0 * d);
    const double f4 = -(f2 * (1.0 + c0) + c2) / (4.0 * (d + 2.0));
    const double r2 = rho0 * rho0;
    return {rho0, s.u, s.du, 1.0 + f2 * r2 + f4 * r2 * r2, 2.0 * f2 * rho0 + 4.0 * f4 * r2 * rho0};
}

// Joint (U, U', f, f') system for the eigenvalue equation.
auto linear_system(const ProblemParams& params, double lambda) {
    const double p = params.p;
    const double dm1 = params.d - 1.0;
    const double c0 = params.inv_pm1();
    return [=](const std::array<double, 4>& y, double r) {
        const double b = dm1 / r + 0.5 * r;
        const double c = c0 + potential(y[0], p) - lambda;
        return std::array<double, 4>{y[1], -b * y[1] - c0 * y[0] - signed_power(y[0], p), y[3],
                                     -b * y[3] - c * y[2]};
    };
}

// Isolating bracket (lo, hi) with eigenvalues_above(lo) = k + 1, eigenvalues_above(hi) = k.
std::pair<double, double> isolate(double alpha, const ProblemParams& params, int k,
                                  const RadialGrid& grid, double lo, double hi) {
    int n_lo = eigenvalues_above(alpha, params, lo, grid);
    int n_hi = eigenvalues_above(alpha, params, hi, grid);
    for (int it = 0; it < 200 && !(n_lo == k + 1 && n_hi == k); ++it) {
        const double mid = 0.5 * (lo + hi);
        const int n = eigenvalues_above(alpha, params, mid, grid);
        if (n > k) {
            lo = mid;
            n_lo = n;
        } else {
            hi = mid;
            n_hi = n;
        }
    }
    if (!(n_lo == k + 1 && n_hi == k))
        throw BracketError("could not isolate eigenvalue index " + std::to_string(k));
    return {lo, hi};
}

double upper_spectral_bound(const PotentialField& pot) {
    return pot.profile.params.inv_pm1() + pot.sup_norm - 0.5 * pot.profile.params.d + 1.0;
}

}  // namespace

std::string_view to_string(EigenMethod m) {
    return m == EigenMethod::Shooting ? "shooting" : "matrix";
}

PotentialField PotentialField::from_profile(ExpanderProfile profile) {
    PotentialField out;
    out.v.resize(profile.u.size());
    for (std::size_t i = 0; i < profile.u.size(); ++i) {
        out.v[i] = potential(profile.u[i], profile.params.p);
        out.sup_norm = std::max(out.sup_norm, out.v[i]);
    }
    out.profile = std::move(profile);
    return out;
}

double PotentialField::value_at(double rho) const {
    return potential(profile.value_at(rho), profile.params.p);
}

double decaying_branch_angle(const ProblemParams& params, double lambda, double rho_max) {
    const double kappa =
        -0.5 * rho_max + 2.0 * (params.inv_pm1() - lambda - 0.5 * params.d) / rho_max;
    return std::atan2(1.0, kappa);
}

double prufer_phase_end(double alpha, const ProblemParams& params, double lambda,
                        const RadialGrid& grid, ShootingOptions opt) {
    const RegularStart st = regular_start(alpha, params, lambda, grid, opt);
    const double p = params.p;
    const double dm1 = params.d - 1.0;
    const double c0 = params.inv_pm1();
    auto rhs = [=](const std::array<double, 3>& y, double r) {
        const double b = dm1 / r + 0.5 * r;
        const double c = c0 + potential(y[0], p) - lambda;
        const double s = std::sin(y[2]);
        const double co = std::cos(y[2]);
        return std::array<double, 3>{y[1], -b * y[1] - c0 * y[0] - signed_power(y[0], p),
                                     co * co + b * s * co + c * s * s};
    };
    std::array<double, 3> y{st.u, st.du, std::atan2(st.f, st.df)};
    const double target[] = {grid.rho_max()};
    detail::integrate_through(rhs, y, st.rho0, target, [](std::size_t, const auto&, double) {});
    return y[2];
}

int eigenvalues_above(double alpha, const ProblemParams& params, double lambda,
                      const RadialGrid& grid, ShootingOptions opt) {
    const double theta = prufer_phase_end(alpha, params, lambda, grid, opt);
    const double theta_b = decaying_branch_angle(params, lambda, grid.rho_max());
    if (theta <= theta_b) return 0;
    return static_cast<int>(std::floor((theta - theta_b) / kPi)) + 1;
}

int neutral_zero_count(double alpha, const ProblemParams& params, const RadialGrid& grid) {
    if (!(alpha >= 0.0)) throw DomainError("shooting value alpha must be >= 0");
    const double theta = prufer_phase_end(alpha, params, 0.0, grid);
    return std::max(0, static_cast<int>(std::floor(theta / kPi)));
}

AlphaStarResult find_alpha_star(const ProblemParams& params, double lo, double hi, double tol,
                                const RadialGrid& grid) {
    if (!(lo > 0.0) || !(hi > lo) || !(tol > 0.0))
        throw DomainError("alpha* search needs 0 < lo < hi and tol > 0");
    AlphaStarResult res;
    res.tolerance = tol;
    res.zero_count_lo = neutral_zero_count(lo, params, grid);
    if (res.zero_count_lo != 0)
        throw BracketError("neutral zero count at the lower end is already " +
                           std::to_string(res.zero_count_lo));

    std::vector<double> alphas(kAlphaScanSamples);
    std::vector<int> counts(kAlphaScanSamples);
    const double ratio = std::log(hi / lo);
    for (int i = 0; i < kAlphaScanSamples; ++i) {
        alphas[i] = i == kAlphaScanSamples - 1
                        ? hi
                        : lo * std::exp(ratio * i / (kAlphaScanSamples - 1.0));
        counts[i] = i == 0 ? res.zero_count_lo : neutral_zero_count(alphas[i], params, grid);
    }
    int first = -1;
    for (int i = 1; i < kAlphaScanSamples; ++i) {
        if (counts[i - 1] == 0 && counts[i] >= 1) {
            ++res.transitions;
            if (first < 0) first = i;
        }
    }
    if (first < 0) {
        res.lo = lo;
        res.hi = hi;
        res.zero_count_hi = counts.back();
        res.diagnostic = "no alpha* in bracket: neutral zero count is 0 at all " +
                         std::to_string(kAlphaScanSamples) + " scan points";
        return res;
    }
    double a = alphas[first - 1];
    double b = alphas[first];
    int nb = counts[first];
    while (b - a > tol) {
        const double mid = 0.5 * (a + b);
        const int n = neutral_zero_count(mid, params, grid);
        if (n == 0) {
            a = mid;
        } else {
            b = mid;
            nb = n;
        }
    }
    res.lo = a;
    res.hi = b;
    res.zero_count_hi = nb;
    res.alpha_star = 0.5 * (a + b);
    if (res.transitions > 1)
        res.diagnostic = "multiple zero-count transitions detected; first one reported";
    return res;
}

EigenPair eigenvalue_shoot(double alpha, const ProblemParams& params, double lo, double hi,
                           const RadialGrid& grid, ShootingOptions opt) {
    if (!(hi > lo)) throw DomainError("eigenvalue bracket must satisfy lo < hi");
    const int n_lo = eigenvalues_above(alpha, params, lo, grid, opt);
    const int n_hi = eigenvalues_above(alpha, params, hi, grid, opt);
    if (n_lo - n_hi != 1)
        throw BracketError("bracket holds " + std::to_string(n_lo - n_hi) +
                           " eigenvalues, expected exactly one");
    const int k = n_hi;
    const double rmax = grid.rho_max();
    auto miss = [&](double lam) {
        return prufer_phase_end(alpha, params, lam, grid, opt) -
               decaying_branch_angle(params, lam, rmax) - k * kPi;
    };
    double a = lo;
    double b = hi;
    double fa = miss(a);
    double fb = miss(b);
    for (int it = 0; it < 200; ++it) {
        const double w = b - a;
        if (w <= 1e-13 * std::max(1.0, std::abs(a))) break;
        double x = (fa != fb) ? a - fa * w / (fb - fa) : 0.5 * (a + b);
        if (!(x > a + 0.05 * w && x < b - 0.05 * w)) x = 0.5 * (a + b);
        const double fx = miss(x);
        if (fx > 0.0) {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
    }

    EigenPair pair;
    pair.lambda = 0.5 * (a + b);
    pair.grid = grid;
    pair.method = EigenMethod::Shooting;
    pair.f.assign(grid.size(), 0.0);

    const auto nodes = grid.nodes();
    const std::size_t n = nodes.size() - 1;
    const PotentialField pot = PotentialField::from_profile(shoot_profile(alpha, params, grid));
    const double c0 = params.inv_pm1();
    // Outermost turning point of c0 + V - lambda; past it both sweeps are stable.
    double r_turn = 0.0;
    for (std::size_t i = n + 1; i-- > 0;)
        if (c0 + pot.v[i] - pair.lambda > 0.0) {
            r_turn = nodes[i];
            break;
        }
    const double r_match =
        std::min({kMatchRadius, 0.5 * rmax, std::max(r_turn + 0.5, 20.0 * grid.spacing())});
    const auto m = static_cast<std::size_t>(
        std::lower_bound(nodes.begin(), nodes.end(), r_match) - nodes.begin());

    const RegularStart st = regular_start(alpha, params, pair.lambda, grid, opt);
    std::array<double, 4> y{st.u, st.du, st.f, st.df};
    pair.f[0] = 1.0;
    double df_fwd = 0.0;
    detail::integrate_through(linear_system(params, pair.lambda), y, st.rho0,
                              nodes.subspan(1, m),
                              [&](std::size_t i, const std::array<double, 4>& s, double) {
                                  pair.f[i + 1] = s[2];
                                  df_fwd = s[3];
                              });

    const double dm1 = params.d - 1.0;
    const double lam = pair.lambda;
    auto back_rhs = [&](const std::array<double, 2>& s, double r) {
        const double b = dm1 / r + 0.5 * r;
        const double c = c0 + pot.value_at(r) - lam;
        return std::array<double, 2>{s[1], -b * s[1] - c * s[0]};
    };
    const double kappa = -0.5 * rmax + 2.0 * (c0 - lam - 0.5 * params.d) / rmax;
    std::array<double, 2> z{1.0, kappa};
    std::vector<double> back(n + 1, 0.0);
    back[n] = 1.0;
    std::vector<double> targets;
    for (std::size_t i = n; i-- > m;) targets.push_back(nodes[i]);
    double df_bwd = kappa;
    detail::integrate_through(back_rhs, z, rmax, targets,
                              [&](std::size_t j, const std::array<double, 2>& s, double) {
                                  back[n - 1 - j] = s[0];
                                  df_bwd = s[1];
                              });
    const double fm = pair.f[m];
    const double scale =
        (fm * back[m] + df_fwd * df_bwd) / (back[m] * back[m] + df_bwd * df_bwd);
    for (std::size_t i = m + 1; i <= n; ++i) pair.f[i] = scale * back[i];

    std::vector<double> integrand(grid.size());
    double log_max = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        const double r = nodes[i];
        integrand[i] = (dm1 * std::log(r) + 0.25 * r * r);
        log_max = std::max(log_max, integrand[i] + 2.0 * std::log(std::abs(pair.f[i]) + 1e-300));
    }
    for (std::size_t i = 1; i <= n; ++i)
        integrand[i] = std::exp(integrand[i] - log_max) * pair.f[i] * pair.f[i];
    integrand[0] = 0.0;
    pair.l2w_norm = std::sqrt(detail::simpson(integrand, grid.spacing()) * std::exp(log_max));

    for (std::size_t i = 1; i <= n; ++i)
        if ((pair.f[i - 1] > 0.0 && pair.f[i] < 0.0) || (pair.f[i - 1] < 0.0 && pair.f[i] > 0.0))
            ++pair.zero_count;
    return pair;
}

EigenPair top_eigenpair(double alpha, const ProblemParams& params, const RadialGrid& grid) {
    const PotentialField pot = PotentialField::from_profile(shoot_profile(alpha, params, grid));
    const double hi = upper_spectral_bound(pot);
    double lo = hi - 1.0;
    for (double step = 1.0; eigenvalues_above(alpha, params, lo, grid) == 0; step *= 2.0) {
        lo -= step;
        if (step > 1e6) throw BracketError("no eigenvalue found below the spectral bound");
    }
    const auto [a, b] = isolate(alpha, params, 0, grid, lo, hi);
    return eigenvalue_shoot(alpha, params, a, b, grid);
}

std::vector<EigenPair> positive_spectrum(double alpha, const ProblemParams& params,
                                         const RadialGrid& grid) {
    if (!(alpha > 0.0)) throw DomainError("positive_spectrum requires alpha > 0");
    const int count = eigenvalues_above(alpha, params, 0.0, grid);
    std::vector<EigenPair> out;
    if (count == 0) return out;
    const PotentialField pot = PotentialField::from_profile(shoot_profile(alpha, params, grid));
    const double hi = upper_spectral_bound(pot);
    for (int k = 0; k < count; ++k) {
        const auto [a, b] = isolate(alpha, params, k, grid, 0.0, hi);
        out.push_back(eigenvalue_shoot(alpha, params, a, b, grid));
    }
    return out;
}

namespace {

std::vector<double> tridiagonal_spectrum(const std::function<double(double)>& potential_fn,
                                         const ProblemParams& params, double rho_max, double h,
                                         double cutoff) {
    const auto n = static_cast<std::size_t>(std::llround(rho_max / h));
    const double dm1 = params.d - 1.0;
    auto log_w = [dm1](double r) { return dm1 * std::log(r) + 0.25 * r * r; };
    Eigen::VectorXd diag(static_cast<Eigen::Index>(n));
    Eigen::VectorXd off(static_cast<Eigen::Index>(n - 1));
    const double h2 = h * h;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = (static_cast<double>(i) + 0.5) * h;
        const double lw = log_w(r);
        const double right = std::exp(log_w(r + 0.5 * h) - lw);
        const double left = i == 0 ? 0.0 : std::exp(log_w(r - 0.5 * h) - lw);
        diag(static_cast<Eigen::Index>(i)) =
            -(left + right) / h2 + params.inv_pm1() + potential_fn(r);
        if (i + 1 < n)
            off(static_cast<Eigen::Index>(i)) =
                std::exp(log_w(r + 0.5 * h) - 0.5 * (lw + log_w(r + h))) / h2;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd& ev = solver.eigenvalues();
    std::vector<double> out;
    for (Eigen::Index i = ev.size(); i-- > 0;) {
        if (ev(i) <= cutoff) break;
        out.push_back(ev(i));
    }
    return out;
}

}  // namespace

std::vector<double> matrix_spectrum(const std::function<double(double)>& potential_fn,
                                    const ProblemParams& params, const RadialGrid& grid,
                                    double cutoff) {
    const double h = grid.spacing();
    if (h > 0.05) throw ResolutionError("matrix spectrum needs grid spacing <= 0.05");
    // Margin keeps eigenvalues near the cutoff from dropping out of one level only.
    const double margin = 0.5;
    const auto coarse = tridiagonal_spectrum(potential_fn, params, grid.rho_max(), h, cutoff - margin);
    const auto fine =
        tridiagonal_spectrum(potential_fn, params, grid.rho_max(), 0.5 * h, cutoff - margin);
    std::vector<double> out;
    const std::size_t k = std::min(coarse.size(), fine.size());
    for (std::size_t i = 0; i < k; ++i) {
        const double lam = (4.0 * fine[i] - coarse[i]) / 3.0;
        if (lam > cutoff) out.push_back(lam);
    }
    return out;
}

std::vector<double> matrix_spectrum(double alpha, const ProblemParams& params,
                                    const RadialGrid& grid, double cutoff) {
    if (grid.spacing() > 0.05) throw ResolutionError("matrix spectrum needs grid spacing <= 0.05");
    // core width of U_alpha
    if (alpha > 0.0 && grid.spacing() > 0.5 * std::pow(alpha, -0.5 * (params.p - 1.0)))
        throw ResolutionError("grid spacing does not resolve the profile core");
    const PotentialField pot = PotentialField::from_profile(shoot_profile(alpha, params, grid));
    return matrix_spectrum([&pot](double r) { return pot.value_at(r); }, params, grid, cutoff);
}

UnstableExpander select_unstable_expander(const ProblemParams& params, double eps_target,
                                          const RadialGrid& grid) {
    if (!(eps_target > 0.0)) throw DomainError("eps_target must be positive");
    if (!params.p_jl.exceeds(params.p))
        throw NoUnstableExpanderError("p >= p_JL: no radial expander is linearly unstable");
    UnstableExpander out;
    out.alpha_star = find_alpha_star(params, 0.1, 50.0, 1e-9, grid);
    if (!out.alpha_star.alpha_star)
        throw NoUnstableExpanderError(out.alpha_star.diagnostic);
    const double a_star = out.alpha_star.hi;
    double lo = a_star;
    double hi = a_star + 0.1 * a_star;

    EigenPair best = top_eigenpair(hi, params, grid);
    double alpha = hi;
    if (!(best.lambda > 0.0 && best.lambda < eps_target)) {
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (lo + hi);
            EigenPair e = top_eigenpair(mid, params, grid);
            if (e.lambda >= eps_target) {
                hi = mid;
                continue;
            }
            lo = mid;
            if (e.lambda > 0.0) {
                best = std::move(e);
                alpha = mid;
                if (best.lambda >= 0.8 * eps_target) break;
            }
        }
    }
    if (!(best.lambda > 0.0 && best.lambda < eps_target))
        throw NoUnstableExpanderError("no expander with top eigenvalue in (0, eps) near alpha*");

    out.alpha_bar = alpha;
    out.lambda_bar = best.lambda;
    out.eigenpair = std::move(best);
    out.profile = shoot_profile(alpha, params, grid);
    out.positive_count = eigenvalues_above(alpha, params, 0.0, grid);
    const ExpanderProfile star = shoot_profile(a_star, params, grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
        out.potential_gap = std::max(out.potential_gap, std::abs(potential(out.profile.u[i], params.p) -
                                                                 potential(star.u[i], params.p)));
    return out;
}

void write_spectrum_csv(std::ostream& os, double alpha, std::span<const EigenPair> pairs) {
    constexpr std::string_view header[] = {"alpha", "lambda", "zero_count", "method"};
    io::CsvWriter w(os, header);
    for (const auto& e : pairs) {
        const std::string cells[] = {io::format_double(alpha), io::format_double(e.lambda),
                                     std::to_string(e.zero_count), std::string(to_string(e.method))};
        w.raw_row(cells);
    }
}

void write_eigenfunction_csv(std::ostream& os, const EigenPair& pair) {
    constexpr std::string_view header[] = {"rho", "f"};
    io::CsvWriter w(os, header);
    for (std::size_t i = 0; i < pair.f.size(); ++i) {
        const double row[] = {pair.grid[i], pair.f[i]};
        w.row(row);
    }
}

}  // namespace nlh
