#include "nlh/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <ostream>

#include <lapacke.h>
#include <nlohmann/json.hpp>

#include "nlh/errors.hpp"
#include "nlh/fit.hpp"
#include "nlh/io.hpp"
#include "nlh/semigroup.hpp"
#include "quadrature.hpp"

namespace nlh {

namespace {

constexpr double kBlowUp = 1e6;
constexpr double kCapFactor = 0.5;
constexpr int kHalf = 3;  // stencil half-width

enum class Mode { Similarity, Linearized, Perturbation };

bool same_grid(const RadialGrid& a, const RadialGrid& b) {
    return a.size() == b.size() && a.spacing() == b.spacing();
}

// Crank-Nicolson for L v = A v + b with a seven-band A, explicit nonlinearity.
class ImexStepper {
public:
    ImexStepper(const RadialGrid& grid, const ProblemParams& params, Mode mode,
                std::vector<double> potential, std::vector<double> base,
                const std::function<double(double)>& boundary_reference)
        : n_(grid.size()), params_(params), mode_(mode), base_(std::move(base)) {
        for (auto& band : a_) band.assign(n_, 0.0);
        b_.assign(n_, 0.0);
        assemble(grid, potential, boundary_reference);
    }

    void step(std::vector<double>& v, double dt) {
        if (dt != factored_dt_) factor(dt);
        std::vector<double> rhs(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            double av = 0.0;
            for (int o = -kHalf; o <= kHalf; ++o) {
                const long j = static_cast<long>(i) + o;
                if (j < 0 || j >= static_cast<long>(n_)) continue;
                av += a_[o + kHalf][i] * v[static_cast<std::size_t>(j)];
            }
            rhs[i] = v[i] + 0.5 * dt * av + dt * (b_[i] + nonlinear(i, v[i]));
        }
        const int info = LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', static_cast<lapack_int>(n_), kHalf, kHalf,
                                        1, ab_.data(), 3 * kHalf + 1, ipiv_.data(), rhs.data(),
                                        static_cast<lapack_int>(n_));
        if (info != 0) throw Error("banded solve failed");
        v.swap(rhs);
    }

private:
    double nonlinear(std::size_t i, double v) const {
        switch (mode_) {
            case Mode::Similarity: return signed_power(v, params_.p);
            case Mode::Linearized: return 0.0;
            case Mode::Perturbation: return taylor_remainder(base_[i], v, params_.p);
        }
        return 0.0;
    }

    void add(std::size_t row, long col, double coef, const std::array<double, kHalf + 1>& ghost_c,
             const std::array<double, kHalf + 1>& ghost_g) {
        const long last = static_cast<long>(n_) - 1;
        if (col < 0) col = -col;
        if (col > last) {
            const auto m = static_cast<std::size_t>(col - last);
            b_[row] += coef * ghost_g[m];
            coef *= ghost_c[m];
            col = last;
        }
        a_[static_cast<std::size_t>(col - static_cast<long>(row) + kHalf)][row] += coef;
    }

    void assemble(const RadialGrid& grid, const std::vector<double>& potential,
                  const std::function<double(double)>& ref) {
        const double h = grid.spacing();
        const double d = params_.d;
        const double c0 = params_.inv_pm1();
        const double k = params_.tail_power();
        const std::size_t last = n_ - 1;
        const double r_last = grid[last];
        std::array<double, kHalf + 1> gc{1.0};
        std::array<double, kHalf + 1> gg{};
        for (int m = 1; m <= kHalf; ++m) {
            const double rm = r_last + m * h;
            gc[m] = std::pow(r_last / rm, k);
            gg[m] = ref ? ref(rm) - gc[m] * ref(r_last) : 0.0;
        }
        // sixth-order centred weights, scaled by 180 h^2 and 60 h
        constexpr std::array<double, 7> w2{2.0, -27.0, 270.0, -490.0, 270.0, -27.0, 2.0};
        constexpr std::array<double, 7> w1{-1.0, 9.0, -45.0, 0.0, 45.0, -9.0, 1.0};
        for (std::size_t i = 0; i < n_; ++i) {
            const double vi = potential.empty() ? 0.0 : potential[i];
            if (i == 0) {
                for (int o = -kHalf; o <= kHalf; ++o)
                    add(0, o, d * w2[o + kHalf] / (180.0 * h * h), gc, gg);
                add(0, 0, c0 + vi, gc, gg);
                continue;
            }
            const double r = grid[i];
            const double drift = (d - 1.0) / r + 0.5 * r;
            for (int o = -kHalf; o <= kHalf; ++o) {
                const double coef =
                    w2[o + kHalf] / (180.0 * h * h) + drift * w1[o + kHalf] / (60.0 * h);
                add(i, static_cast<long>(i) + o, coef, gc, gg);
            }
            add(i, static_cast<long>(i), c0 + vi, gc, gg);
        }
    }

    void factor(double dt) {
        constexpr int kl = kHalf, ku = kHalf, ldab = 2 * kl + ku + 1;
        ab_.assign(static_cast<std::size_t>(ldab) * n_, 0.0);
        for (std::size_t i = 0; i < n_; ++i) {
            for (int o = -kHalf; o <= kHalf; ++o) {
                const long j = static_cast<long>(i) + o;
                if (j < 0 || j >= static_cast<long>(n_)) continue;
                const double m = (o == 0 ? 1.0 : 0.0) - 0.5 * dt * a_[o + kHalf][i];
                const auto row = static_cast<std::size_t>(kl + ku + static_cast<long>(i) - j);
                ab_[row + static_cast<std::size_t>(j) * ldab] = m;
            }
        }
        ipiv_.assign(n_, 0);
        const int info = LAPACKE_dgbtrf(LAPACK_COL_MAJOR, static_cast<lapack_int>(n_),
                                        static_cast<lapack_int>(n_), kl, ku, ab_.data(), ldab,
                                        ipiv_.data());
        if (info != 0) throw Error("banded factorisation failed");
        factored_dt_ = dt;
    }

    std::size_t n_;
    ProblemParams params_;
    Mode mode_;
    std::vector<double> base_;
    std::array<std::vector<double>, 2 * kHalf + 1> a_;  // a_[o + kHalf][i] multiplies v_{i + o}
    std::vector<double> b_;
    std::vector<double> ab_;
    std::vector<lapack_int> ipiv_;
    double factored_dt_ = std::numeric_limits<double>::quiet_NaN();
};

double l2w_norm(const RadialGrid& grid, const std::vector<double>& v, int d) {
    std::vector<double> logs(grid.size(), -std::numeric_limits<double>::infinity());
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (v[i] == 0.0) continue;
        const double r = grid[i];
        logs[i] = 2.0 * std::log(std::abs(v[i])) + (d - 1.0) * std::log(r) + 0.25 * r * r;
        top = std::max(top, logs[i]);
    }
    if (!std::isfinite(top)) return 0.0;
    std::vector<double> integrand(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) integrand[i] = std::exp(logs[i] - top);
    return std::sqrt(unit_sphere_area(d) * detail::simpson(integrand, grid.spacing())) *
           std::exp(0.5 * top);
}

NormRecord make_record(const EvolutionState& s, const ProblemParams& params,
                       const EvolveOptions& opt) {
    NormRecord rec;
    rec.tau = s.tau;
    rec.t = std::exp(s.tau);
    const RadialFunction f{s.grid, s.v, opt.tail_exponent};
    const int d = params.d;
    auto norm = [&](double gamma) {
        try {
            return lq_norm(f, gamma, d);
        } catch (const DivergenceError&) {
            return std::numeric_limits<double>::infinity();
        }
    };
    rec.l1 = norm(1.0);
    rec.lq = norm(opt.norms.q);
    rec.lr = norm(opt.norms.r);
    rec.lpr = norm(params.p * opt.norms.r);
    rec.l2w = l2w_norm(s.grid, s.v, d);
    RadialFunction diff{s.grid, s.v, std::nullopt};
    if (!opt.reference.empty())
        for (std::size_t i = 0; i < diff.values.size(); ++i) diff.values[i] -= opt.reference[i];
    rec.dist_ref = lq_norm(diff, 2.0, d);
    return rec;
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

TrajectoryLog run(ImexStepper& stepper, Mode mode, std::vector<double> v0, double tau0,
                  double tau1, const ProblemParams& params, const RadialGrid& grid,
                  const EvolveOptions& opt) {
    if (!(tau1 > tau0)) throw DomainError("evolution needs tau1 > tau0");
    if (v0.size() != grid.size()) throw DomainError("initial data does not match the grid");
    if (!(opt.dtau > 0.0)) throw DomainError("dtau must be positive");
    for (double x : v0)
        if (!std::isfinite(x)) throw DomainError("initial data must be finite");
    TrajectoryLog log;
    EvolutionState s{tau0, grid, std::move(v0)};
    log.records.push_back(make_record(s, params, opt));
    const int every = std::max(1, opt.log_every);
    for (long step = 1; s.tau < tau1 - 1e-12; ++step) {
        double dt = std::min(opt.dtau, tau1 - s.tau);
        if (mode != Mode::Linearized) dt = std::min(dt, stability_cap(s.v, params));
        stepper.step(s.v, dt);
        s.tau = (tau1 - s.tau - dt) < 1e-12 ? tau1 : s.tau + dt;
        log.step_sizes.push_back(dt);
        const bool done = s.tau >= tau1;
        const double peak = max_abs(s.v);
        if (!std::isfinite(peak) || peak > kBlowUp) {
            log.blew_up = true;
            if (std::isfinite(peak)) log.records.push_back(make_record(s, params, opt));
            break;
        }
        if (opt.observer) opt.observer(s);
        if (done || step % every == 0) log.records.push_back(make_record(s, params, opt));
    }
    log.final_state = std::move(s);
    return log;
}

std::vector<double> on_grid(const PotentialField& pot, const RadialGrid& grid, bool profile) {
    if (same_grid(pot.profile.grid, grid)) return profile ? pot.profile.u : pot.v;
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        out[i] = profile ? pot.profile.value_at(grid[i]) : pot.value_at(grid[i]);
    return out;
}

}  // namespace

double stability_cap(const std::vector<double>& v, const ProblemParams& params) {
    const double m = max_abs(v);
    if (m == 0.0) return std::numeric_limits<double>::infinity();
    return kCapFactor / (params.p * std::pow(m, params.p - 1.0));
}

EvolutionState step_imex(const EvolutionState& state, double dtau, const ProblemParams& params,
                         const PotentialField* frozen,
                         const std::function<double(double)>& boundary_reference) {
    if (!(dtau > 0.0)) throw DomainError("dtau must be positive");
    if (!frozen) {
        const double cap = stability_cap(state.v, params);
        if (dtau > cap)
            throw StabilityError("dtau exceeds the stability cap", cap);
    }
    const Mode mode = frozen ? Mode::Linearized : Mode::Similarity;
    ImexStepper stepper(state.grid, params, mode,
                        frozen ? on_grid(*frozen, state.grid, false) : std::vector<double>{}, {},
                        boundary_reference);
    EvolutionState out = state;
    stepper.step(out.v, dtau);
    out.tau += dtau;
    return out;
}

TrajectoryLog evolve_similarity(const std::vector<double>& v0, double tau0, double tau1,
                                const ProblemParams& params, const RadialGrid& grid,
                                const EvolveOptions& opt) {
    ImexStepper stepper(grid, params, Mode::Similarity, {}, {}, opt.boundary_reference);
    return run(stepper, Mode::Similarity, v0, tau0, tau1, params, grid, opt);
}

TrajectoryLog linearized_evolve(const std::vector<double>& w0, const PotentialField& potential,
                                double tau0, double tau1, const EvolveOptions& opt) {
    const RadialGrid& grid = potential.profile.grid;
    const ProblemParams& params = potential.profile.params;
    ImexStepper stepper(grid, params, Mode::Linearized, on_grid(potential, grid, false), {},
                        opt.boundary_reference);
    return run(stepper, Mode::Linearized, w0, tau0, tau1, params, grid, opt);
}

TrajectoryLog evolve_perturbation(const std::vector<double>& psi0, const PotentialField& potential,
                                  double tau0, double tau1, const EvolveOptions& opt) {
    const RadialGrid& grid = potential.profile.grid;
    const ProblemParams& params = potential.profile.params;
    ImexStepper stepper(grid, params, Mode::Perturbation, on_grid(potential, grid, false),
                        on_grid(potential, grid, true), opt.boundary_reference);
    return run(stepper, Mode::Perturbation, psi0, tau0, tau1, params, grid, opt);
}

double fitted_growth_rate(const TrajectoryLog& log, double from, double to, bool use_dist_ref) {
    std::vector<double> x, y;
    for (const auto& r : log.records) {
        const double val = use_dist_ref ? r.dist_ref : r.lr;
        if (r.tau < from - 1e-12 || r.tau > to + 1e-12 || !(val > 0.0)) continue;
        x.push_back(r.tau);
        y.push_back(std::log(val));
    }
    return fit_line(x, y).slope;
}

AncientBranch ancient_branch(const PotentialField& potential, const EigenPair& eigmode,
                             double lambda_bar, double epsilon, double tau0, double tau1,
                             const EvolveOptions& opt) {
    const RadialGrid& grid = potential.profile.grid;
    const ProblemParams& params = potential.profile.params;
    if (eigmode.f.size() != grid.size()) throw DomainError("eigenmode does not match the grid");
    if (!(lambda_bar > 0.0)) throw DomainError("ancient branch needs lambda_bar > 0");
    if (!(epsilon >= 0.0)) throw DomainError("epsilon must be >= 0");
    AncientBranch out;
    out.epsilon = epsilon;
    out.lambda_bar = lambda_bar;
    out.mode_lr = lq_norm(RadialFunction{grid, eigmode.f, std::nullopt}, opt.norms.r, params.d);
    out.delta_required = 0.5 * std::min(params.p - 1.0, 1.0) * lambda_bar;

    std::vector<double> psi0(grid.size());
    const double seed = epsilon * std::exp(lambda_bar * tau0);
    for (std::size_t i = 0; i < psi0.size(); ++i) psi0[i] = seed * eigmode.f[i];

    EvolveOptions o = opt;
    std::vector<double> diff(grid.size());
    o.observer = [&](const EvolutionState& s) {
        if (opt.observer) opt.observer(s);
        const double amp = epsilon * std::exp(lambda_bar * s.tau);
        for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = s.v[i] - amp * eigmode.f[i];
        out.residual_tau.push_back(s.tau);
        out.residual.push_back(lq_norm(RadialFunction{grid, diff, std::nullopt}, opt.norms.r, params.d));
    };
    out.log = evolve_perturbation(psi0, potential, tau0, tau1, o);
    if (epsilon == 0.0) {
        out.lower_bound_holds = false;
        return out;
    }

    out.min_lower_ratio = std::numeric_limits<double>::infinity();
    for (const auto& r : out.log.records) {
        const double bound = 0.5 * epsilon * std::exp(lambda_bar * r.tau) * out.mode_lr;
        out.min_lower_ratio = std::min(out.min_lower_ratio, r.lr / bound);
    }
    out.lower_bound_holds = out.min_lower_ratio > 1.0 && !out.log.blew_up;
    if (!out.lower_bound_holds)
        throw AmplitudeError("lower bound on ||psi||_{L^r} fails inside the window; use a smaller epsilon");

    std::vector<double> x, y;
    const double mid = 0.5 * (tau0 + tau1);
    for (std::size_t i = 0; i < out.residual.size(); ++i) {
        if (out.residual_tau[i] < mid || !(out.residual[i] > 0.0)) continue;
        x.push_back(out.residual_tau[i]);
        y.push_back(std::log(out.residual[i]));
    }
    if (x.size() >= 2) {
        out.fitted_delta = fit_line(x, y).slope - lambda_bar;
        out.delta_ok = out.fitted_delta >= out.delta_required;
    }
    return out;
}

PhysicalNorm to_physical_norm(double similarity_norm, double tau, double gamma,
                              const ProblemParams& params) {
    if (!(gamma >= 1.0)) throw DomainError("to_physical_norm needs gamma >= 1");
    const double t = std::exp(tau);
    const double exponent = -params.inv_pm1() + params.d / (2.0 * gamma);
    return {t, std::exp(exponent * tau) * similarity_norm};
}

DemoReport nonuniqueness_demo(const ProblemParams& params, double q, double r,
                              const DemoOptions& opt) {
    if (!(params.p > params.p_fujita))
        throw DomainError("demo needs p > 1 + 2/d");
    if (!params.p_jl.exceeds(params.p))
        throw NoUnstableExpanderError("p >= p_JL: no radial expander is linearly unstable");
    if (!(q >= 1.0 && q < params.q_c && params.q_c < r))
        throw DomainError("demo needs 1 <= q < q_c < r");
    if (!(opt.tau1 > opt.tau0)) throw DomainError("demo needs tau1 > tau0");
    const double bound = params.inv_pm1() - params.d / (2.0 * r);
    if (!(bound > 0.0))
        throw FeasibilityError("1/(p-1) - d/(2r) <= 0: no admissible eigenvalue");

    DemoReport rep;
    rep.params = params;
    rep.q = q;
    rep.r = r;
    rep.options = opt;
    rep.eps_target = opt.eps_fraction * bound;

    const UnstableExpander sel = select_unstable_expander(params, rep.eps_target, opt.grid);
    rep.alpha_star = sel.alpha_star;
    rep.alpha_bar = sel.alpha_bar;
    rep.lambda_bar = sel.lambda_bar;
    rep.ell_bar = sel.profile.ell;
    rep.potential_gap = sel.potential_gap;
    rep.positive_eigenvalues = sel.positive_count;
    rep.feasibility = check_feasibility(params, rep.lambda_bar, q, r);
    rep.checks.feasibility = rep.feasibility.satisfied;
    if (!rep.feasibility.satisfied)
        throw FeasibilityError("lambda_bar violates 0 < lambda_bar < 1/(p-1) - d/(2r)");

    const auto matrix = matrix_spectrum(sel.alpha_bar, params, opt.grid);
    rep.matrix_lambda = matrix.empty() ? std::nan("") : matrix.front();
    const double gap = std::abs(rep.matrix_lambda - rep.lambda_bar);
    rep.checks.eigenvalue = gap <= std::max(1e-4 * std::abs(rep.lambda_bar), 1e-6);

    const PotentialField pot = PotentialField::from_profile(sel.profile);
    const std::vector<double>& ubar = pot.profile.u;
    NormExponents norms{q, r};

    EvolveOptions lin;
    lin.dtau = opt.dtau;
    lin.norms = norms;
    const TrajectoryLog lin_log = linearized_evolve(sel.eigenpair.f, pot, 0.0, 5.0, lin);
    rep.measured_growth_rate = fitted_growth_rate(lin_log, 1.0, 5.0);
    rep.checks.growth_rate = std::abs(rep.measured_growth_rate - rep.lambda_bar) <= opt.growth_tolerance;

    EvolveOptions stat;
    stat.dtau = opt.dtau;
    stat.norms = norms;
    stat.log_every = 100;
    stat.tail_exponent = -params.tail_power();
    stat.reference = ubar;
    stat.boundary_reference = [&pot](double rho) { return pot.profile.value_at(rho); };
    const TrajectoryLog static_log =
        evolve_similarity(ubar, opt.tau0, opt.tau1, params, opt.grid, stat);
    for (std::size_t i = 0; i < ubar.size(); ++i)
        rep.static_drift = std::max(rep.static_drift, std::abs(static_log.final_state.v[i] - ubar[i]));
    rep.static_drift_bound = opt.drift_tolerance * (1.0 + max_abs(ubar));
    rep.checks.static_drift = !static_log.blew_up && rep.static_drift <= rep.static_drift_bound;

    const RadialFunction ubar_fn{opt.grid, ubar, -params.tail_power()};
    const double ubar_lpr = lq_norm(ubar_fn, params.p * r, params.d);
    const double mode_lpr =
        lq_norm(RadialFunction{opt.grid, sel.eigenpair.f, std::nullopt}, params.p * r, params.d);
    double eps = opt.epsilon.value_or(opt.amplitude_target * ubar_lpr /
                                      (std::exp(rep.lambda_bar * opt.tau1) * mode_lpr));
    EvolveOptions anc;
    anc.dtau = opt.dtau;
    anc.norms = norms;
    AncientBranch branch;
    for (int attempt = 0;; ++attempt) {
        branch = ancient_branch(pot, sel.eigenpair, rep.lambda_bar, eps, opt.tau0, opt.tau1, anc);
        const double end = branch.log.records.back().lpr;
        const double allowed = std::min(opt.amplitude_budget, 2.0 * opt.amplitude_target) * ubar_lpr;
        if (opt.epsilon || end <= allowed || attempt >= 8) break;
        eps *= 0.95 * allowed / end;
    }
    rep.epsilon = eps;
    rep.min_lower_ratio = branch.min_lower_ratio;
    rep.checks.lower_bound = branch.lower_bound_holds;
    rep.fitted_delta = branch.fitted_delta;
    rep.delta_required = branch.delta_required;
    rep.checks.residual_order = branch.delta_ok;

    std::vector<double> logt, logd;
    for (const auto& rec : branch.log.records) {
        const PhysicalNorm pn = to_physical_norm(rec.lr, rec.tau, r, params);
        rep.t.push_back(pn.t);
        rep.distance.push_back(pn.norm);
        logt.push_back(std::log(pn.t));
        logd.push_back(std::log(pn.norm));
    }
    const LineFit fit = fit_line(logt, logd);
    rep.trajectory = std::move(branch.log);
    rep.predicted_slope = -(bound - rep.lambda_bar);
    rep.measured_slope = fit.slope;
    rep.slope_r2 = fit.r2;
    rep.decades = (opt.tau1 - opt.tau0) / std::log(10.0);
    rep.checks.slope = std::abs(fit.slope - rep.predicted_slope) <=
                       opt.slope_tolerance * std::abs(rep.predicted_slope);
    rep.checks.linearity = fit.r2 >= opt.r2_min;
    rep.checks.decades = rep.decades >= 2.0;
    const auto& c = rep.checks;
    rep.pass = c.feasibility && c.eigenvalue && c.growth_rate && c.static_drift && c.lower_bound &&
               c.residual_order && c.slope && c.linearity && c.decades;
    return rep;
}

void write_trajectory_csv(std::ostream& os, const TrajectoryLog& log) {
    constexpr std::string_view header[] = {"tau", "t", "l1", "lq", "lr", "lpr", "l2w", "dist_ref"};
    io::CsvWriter w(os, header);
    for (const auto& r : log.records) {
        const double row[] = {r.tau, r.t, r.l1, r.lq, r.lr, r.lpr, r.l2w, r.dist_ref};
        w.row(row);
    }
}

void write_demo_json(std::ostream& os, const DemoReport& rep) {
    nlohmann::ordered_json j;
    j["d"] = rep.params.d;
    j["p"] = rep.params.p;
    j["q"] = rep.q;
    j["r"] = rep.r;
    j["q_c"] = rep.params.q_c;
    j["alpha_star_bracket"] = {rep.alpha_star.lo, rep.alpha_star.hi};
    j["alpha_bar"] = rep.alpha_bar;
    j["lambda_bar"] = rep.lambda_bar;
    j["lambda_matrix"] = rep.matrix_lambda;
    j["ell_bar"] = rep.ell_bar;
    j["eps_target"] = rep.eps_target;
    j["epsilon"] = rep.epsilon;
    j["tau_window"] = {rep.options.tau0, rep.options.tau1};
    j["feasibility"] = {{"bound", rep.feasibility.bound},
                        {"slack", rep.feasibility.slack},
                        {"satisfied", rep.feasibility.satisfied}};
    j["potential_gap"] = rep.potential_gap;
    j["positive_eigenvalues"] = rep.positive_eigenvalues;
    j["measured_growth_rate"] = rep.measured_growth_rate;
    j["static_drift"] = rep.static_drift;
    j["static_drift_bound"] = rep.static_drift_bound;
    j["min_lower_ratio"] = rep.min_lower_ratio;
    j["fitted_delta"] = rep.fitted_delta;
    j["delta_required"] = rep.delta_required;
    j["predicted_slope"] = rep.predicted_slope;
    j["measured_slope"] = rep.measured_slope;
    j["slope_r2"] = rep.slope_r2;
    j["decades"] = rep.decades;
    j["tolerances"] = {{"slope_relative", rep.options.slope_tolerance},
                       {"r2_min", rep.options.r2_min},
                       {"growth_rate_absolute", rep.options.growth_tolerance},
                       {"drift_relative", rep.options.drift_tolerance},
                       {"eigenvalue_relative", 1e-4},
                       {"eigenvalue_absolute", 1e-6},
                       {"amplitude_target", rep.options.amplitude_target},
                       {"amplitude_budget", rep.options.amplitude_budget},
                       {"min_decades", 2.0}};
    const auto& c = rep.checks;
    j["checks"] = {{"feasibility", c.feasibility},     {"eigenvalue", c.eigenvalue},
                   {"growth_rate", c.growth_rate},     {"static_drift", c.static_drift},
                   {"lower_bound", c.lower_bound},     {"residual_order", c.residual_order},
                   {"slope", c.slope},                 {"linearity", c.linearity},
                   {"decades", c.decades}};
    j["pass"] = rep.pass;
    os << j.dump(2) << '\n';
}

}  // namespace nlh
