#include "nlh_cli/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "nlh/dynamics.hpp"
#include "nlh/errors.hpp"
#include "nlh/exponents.hpp"
#include "nlh/io.hpp"
#include "nlh/profile.hpp"
#include "nlh/semigroup.hpp"
#include "nlh/spectral.hpp"

namespace nlh::cli {

namespace {

using json = nlohmann::ordered_json;

const std::vector<std::pair<std::string, std::string>> kCommands = {
    {"exponents", "critical exponents and regime"},
    {"profile", "shoot one expander profile"},
    {"ell-sweep", "tail constant over an alpha range"},
    {"alpha-star", "locate the first neutral zero transition"},
    {"spectrum", "positive eigenvalues by shooting and matrix"},
    {"semigroup-check", "smoothing, growth and quadrature checks"},
    {"evolve", "similarity-variable evolution from a perturbed profile"},
    {"demo", "end-to-end divergence of two solutions"},
};

// Ordered (key, value) view of the resolved configuration.
std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& c) {
    using io::format_double;
    return {{"command", c.command},
            {"d", std::to_string(c.d)},
            {"p", format_double(c.p)},
            {"q", format_double(c.q)},
            {"r", format_double(c.r)},
            {"alpha", format_double(c.alpha)},
            {"alpha-min", format_double(c.alpha_min)},
            {"alpha-max", format_double(c.alpha_max)},
            {"alpha-steps", std::to_string(c.alpha_steps)},
            {"rho-max", format_double(c.rho_max)},
            {"drho", format_double(c.drho)},
            {"dtau", format_double(c.dtau)},
            {"eps", format_double(c.eps)},
            {"tau0", format_double(c.tau0)},
            {"tau1", format_double(c.tau1)},
            {"tol", format_double(c.tol)},
            {"seed", std::to_string(c.seed)},
            {"out", c.out},
            {"format", c.format}};
}

json config_json(const RunConfig& c) {
    json j;
    j["command"] = c.command;
    j["d"] = c.d;
    j["p"] = c.p;
    j["q"] = c.q;
    j["r"] = c.r;
    j["alpha"] = c.alpha;
    j["alpha-min"] = c.alpha_min;
    j["alpha-max"] = c.alpha_max;
    j["alpha-steps"] = c.alpha_steps;
    j["rho-max"] = c.rho_max;
    j["drho"] = c.drho;
    j["dtau"] = c.dtau;
    j["eps"] = c.eps;
    j["tau0"] = c.tau0;
    j["tau1"] = c.tau1;
    j["tol"] = c.tol;
    j["seed"] = c.seed;
    j["out"] = c.out;
    j["format"] = c.format;
    return j;
}

class Artifacts {
public:
    Artifacts(const RunConfig& c, std::ostream& out) : cfg_(c), out_(out) {
        std::filesystem::create_directories(cfg_.out);
    }

    bool csv_enabled() const { return cfg_.format == "csv" || cfg_.format == "both"; }
    bool json_enabled() const { return cfg_.format == "json" || cfg_.format == "both"; }

    void json_file(const std::string& name, json body) {
        if (!json_enabled()) return;
        json j;
        j["config"] = config_json(cfg_);
        for (auto& [k, v] : body.items()) j[k] = v;
        write(name + ".json", j.dump(2) + "\n");
    }

    void csv_file(const std::string& name, const std::function<void(std::ostream&)>& body) {
        if (!csv_enabled()) return;
        std::ostringstream os;
        for (const auto& [k, v] : config_entries(cfg_)) os << "# " << k << '=' << v << '\n';
        body(os);
        write(name + ".csv", os.str());
    }

    void metadata() {
        json j;
        j["command"] = cfg_.command;
        j["files"] = files_;
        const auto now = std::chrono::system_clock::now().time_since_epoch();
        j["unix_time_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(now).count();
        std::ofstream f(std::filesystem::path(cfg_.out) / (cfg_.command + ".meta.json"),
                        std::ios::binary);
        f << j.dump(2) << '\n';
    }

private:
    void write(const std::string& name, const std::string& content) {
        const auto path = std::filesystem::path(cfg_.out) / name;
        std::ofstream f(path, std::ios::binary);
        if (!f) throw Error("cannot write " + path.string());
        f << content;
        files_.push_back(name);
        out_ << "wrote " << path.string() << '\n';
    }

    const RunConfig& cfg_;
    std::ostream& out_;
    std::vector<std::string> files_;
};

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

RadialGrid make_grid(const RunConfig& c) { return RadialGrid::uniform(c.rho_max, c.drho); }

int cmd_exponents(const RunConfig& c, Artifacts& art, std::ostream& out) {
    const ProblemParams pp = derived_exponents(c.d, c.p);
    json j;
    j["d"] = pp.d;
    j["p"] = pp.p;
    j["q_c"] = pp.q_c;
    j["p_fujita"] = pp.p_fujita;
    j["p_c"] = pp.p_c;
    j["p_jl"] = pp.p_jl.value() ? json(*pp.p_jl.value()) : json(nullptr);
    j["p_jl_infinite"] = pp.p_jl.is_infinite();
    j["regime"] = std::string(to_string(pp.regime));
    art.json_file("exponents", j);
    out << "regime " << to_string(pp.regime) << '\n';
    return kPass;
}

int cmd_profile(const RunConfig& c, Artifacts& art, std::ostream& out) {
    const ProblemParams pp = derived_exponents(c.d, c.p);
    const ExpanderProfile prof = shoot_profile(c.alpha, pp, make_grid(c));
    const double bound = 1e-6 * (1.0 + prof.max_abs_u);
    const double slope = std::abs(prof.ell) > 1e-6 ? fitted_tail_exponent(prof) : std::nan("");
    const double expected = -pp.tail_power();
    const bool defect_ok = prof.residual_max <= bound;
    const bool tail_ok = !(std::abs(prof.ell) > 1e-6) ||
                         std::abs(slope - expected) <= 0.02 * std::abs(expected);
    json j;
    j["alpha"] = prof.alpha;
    j["ell"] = prof.ell;
    j["ell_uncertainty"] = prof.ell_uncertainty;
    j["residual_max"] = prof.residual_max;
    j["residual_bound"] = bound;
    j["max_abs_u"] = prof.max_abs_u;
    j["bounded"] = prof.bounded;
    j["zero_crossings"] = prof.zero_crossings;
    j["tail_exponent"] = number_or_null(slope);
    j["tail_exponent_expected"] = expected;
    j["checks"] = {{"defect", defect_ok}, {"tail_exponent", tail_ok}};
    art.json_file("profile", j);
    art.csv_file("profile", [&](std::ostream& os) { write_profile_csv(os, prof); });
    out << "ell " << io::format_double(prof.ell) << " +- " << io::format_double(prof.ell_uncertainty)
        << '\n';
    return defect_ok && tail_ok ? kPass : kCheckFailed;
}

int cmd_ell_sweep(const RunConfig& c, Artifacts& art, std::ostream& out) {
    const ProblemParams pp = derived_exponents(c.d, c.p);
    if (c.alpha_steps < 0) throw DomainError("alpha-steps must be >= 0");
    std::vector<double> alphas;
    for (int i = 0; i < c.alpha_steps; ++i)
        alphas.push_back(c.alpha_steps == 1
                             ? c.alpha_min
                             : c.alpha_min + (c.alpha_max - c.alpha_min) * i / (c.alpha_steps - 1.0));
    const EllSweep sweep = sweep_ell(alphas, pp, make_grid(c));
    json rows = json::array();
    for (const auto& r : sweep.rows) {
        json row;
        row["alpha"] = r.alpha;
        row["ell"] = number_or_null(r.ell);
        row["uncertainty"] = r.uncertainty;
        row["residual"] = r.residual;
        row["error"] = r.error ? json(*r.error) : json(nullptr);
        rows.push_back(row);
    }
    art.json_file("ell-sweep", {{"rows", rows}, {"continuity", sweep.continuity}});
    art.csv_file("ell-sweep", [&](std::ostream& os) {
        constexpr std::string_view header[] = {"alpha", "ell", "uncertainty", "residual", "error"};
        io::CsvWriter w(os, header);
        for (const auto& r : sweep.rows) {
            const std::string cells[] = {io::format_double(r.alpha), io::format_double(r.ell),
                                         io::format_double(r.uncertainty),
                                         io::format_double(r.residual), r.error ? "error" : ""};
            w.raw_row(cells);
        }
    });
    out << sweep.rows.size() << " rows, continuity " << io::format_double(sweep.continuity) << '\n';
    return kPass;
}

int cmd_alpha_star(const RunConfig& c, Artifacts& art, std::ostream& out, std::ostream& err) {
    const ProblemParams pp = derived_exponents(c.d, c.p);
    const RadialGrid grid = make_grid(c);
    const AlphaStarResult res = find_alpha_star(pp, c.alpha_min, c.alpha_max, c.tol, grid);
    json j;
    j["present"] = res.alpha_star.has_value();
    j["alpha_star"] = res.alpha_star ? json(*res.alpha_star) : json(nullptr);
    j["bracket"] = {res.lo, res.hi};
    j["zero_count_lo"] = res.zero_count_lo;
    j["zero_count_hi"] = res.zero_count_hi;
    j["tolerance"] = res.tolerance;
    j["transitions"] = res.transitions;
    j["diagnostic"] = res.diagnostic;
    int code = kPass;
    if (res.alpha_star) {
        const EigenPair top = top_eigenpair(*res.alpha_star, pp, grid);
        const double limit = std::max(1e-4, 10.0 * c.tol);
        j["lambda_top"] = top.lambda;
        j["lambda_top_limit"] = limit;
        if (std::abs(top.lambda) > limit) code = kCheckFailed;
        out << "alpha* " << io::format_double(*res.alpha_star) << '\n';
    } else {
        err << res.diagnostic << '\n';
        code = kCheckFailed;
    }
    art.json_file("alpha-star", j);
    return code;
}

int cmd_spectrum(const RunConfig& c, Artifacts& art, std::ostream& out) {
    const ProblemParams pp = derived_exponents(c.d, c.p);
    const RadialGrid grid = make_grid(c);
    const auto pairs = positive_spectrum(c.alpha, pp, grid);
    const auto matrix = matrix_spectrum(c.alpha, pp, grid);
    bool ok = true;
    json eig = json::array();
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const double m = k < matrix.size() ? matrix[k] : std::nan("");
        const bool agree = std::abs(m - pairs[k].lambda) <=
                           std::max(1e-4 * std::abs(pairs[k].lambda), 1e-6);
        const bool sturm = pairs[k].zero_count == static_cast<int>(k);
        ok = ok && agree && sturm;
        eig.push_back({{"lambda", pairs[k].lambda},
                       {"lambda_matrix", number_or_null(m)},
                       {"zero_count", pairs[k].zero_count},
                       {"l2w_norm", pairs[k].l2w_norm},
                       {"agree", agree},
                       {"sturm_index", sturm}});
        art.csv_file("spectrum-eigenfunction-" + std::to_string(k),
                     [&](std::ostream& os) { write_eigenfunction_csv(os, pairs[k]); });
    }
    art.json_file("spectrum", {{"alpha", c.alpha},
                               {"positive_count", pairs.size()},
                               {"eigenpairs", eig},
                               {"matrix_eigenvalues", matrix}});
    art.csv_file("spectrum", [&](std::ostream& os) { write_spectrum_csv(os, c.alpha, pairs); });
    out << pairs.size() << " positive eigenvalues\n";
    return ok ? kPass : kCheckFailed;
}

int cmd_semigroup(const RunConfig& c, Artifacts& art, std::ostream& out) {
    const ProblemParams pp = derived_exponents(c.d, c.p);
    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> amp(0.5, 2.0);
    std::uniform_real_distribution<double> var(0.2, 3.0);
    std::vector<GaussianDatum> samples(8);
    for (auto& g : samples) {
        g.amplitude = amp(rng);
        g.variance = var(rng);
    }
    const SmoothingReport rep = verify_smoothing(1.0, 2.0, 1.0, 2.0, samples, pp);
    std::ostringstream sm;
    write_smoothing_json(sm, rep);
    json growth = json::array();
    bool growth_ok = true;
    for (double eta : {1.0, 2.0, pp.q_c, 2.0 * pp.q_c}) {
        const double got = gaussian_growth_exponent(eta, pp);
        const double want = pp.inv_pm1() - pp.d / (2.0 * eta);
        const bool ok = std::abs(got - want) <= 1e-3;
        growth_ok = growth_ok && ok;
        growth.push_back({{"eta", eta}, {"fitted", got}, {"expected", want}, {"pass", ok}});
    }
    const RadialGrid grid = make_grid(c);
    const RadialFunction f = RadialFunction::sample(grid, samples.front());
    json quad = json::array();
    bool quad_ok = true;
    for (double tau : {1e-3, 0.5, 2.0}) {
        const RadialFunction num = apply_S0(tau, f, pp);
        const GaussianDatum exact = apply_S0_gaussian(tau, samples.front(), pp);
        double err = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            err = std::max(err, std::abs(num.values[i] - exact(grid[i])));
            scale = std::max(scale, std::abs(exact(grid[i])));
        }
        const bool ok = err <= 1e-6 * scale;
        quad_ok = quad_ok && ok;
        quad.push_back({{"tau", tau}, {"relative_error", err / scale}, {"pass", ok}});
    }
    art.json_file("semigroup-check", {{"smoothing", json::parse(sm.str())},
                                      {"growth", growth},
                                      {"quadrature", quad}});
    const bool pass = rep.pass && growth_ok && quad_ok;
    out << "semigroup checks " << (pass ? "pass" : "fail") << '\n';
    return pass ? kPass : kCheckFailed;
}

int cmd_evolve(const RunConfig& c, Artifacts& art, std::ostream& out) {
    const ProblemParams pp = derived_exponents(c.d, c.p);
    const RadialGrid grid = make_grid(c);
    const ExpanderProfile prof = shoot_profile(c.alpha, pp, grid);
    const double eps = c.eps > 0.0 ? c.eps : 0.01;
    std::vector<double> v0(prof.u);
    for (double& x : v0) x *= 1.0 + eps;
    EvolveOptions opt;
    opt.dtau = c.dtau;
    opt.norms = {c.q, c.r};
    opt.reference = prof.u;
    opt.tail_exponent = -pp.tail_power();
    opt.boundary_reference = [&prof](double rho) { return prof.value_at(rho); };
    const TrajectoryLog log = evolve_similarity(v0, c.tau0, c.tau1, pp, grid, opt);
    art.csv_file("evolve", [&](std::ostream& os) { write_trajectory_csv(os, log); });
    art.json_file("evolve", {{"alpha", c.alpha},
                             {"eps", eps},
                             {"scheme", log.scheme},
                             {"blew_up", log.blew_up},
                             {"final_tau", log.final_state.tau},
                             {"final_dist_ref", log.records.back().dist_ref},
                             {"steps", log.step_sizes.size()}});
    out << "final tau " << io::format_double(log.final_state.tau)
        << (log.blew_up ? " (blow-up)" : "") << '\n';
    return kPass;
}

int cmd_demo(const RunConfig& c, Artifacts& art, std::ostream& out) {
    const ProblemParams pp = derived_exponents(c.d, c.p);
    DemoOptions opt;
    if (c.eps > 0.0) opt.epsilon = c.eps;
    opt.tau0 = c.tau0;
    opt.tau1 = c.tau1;
    opt.dtau = c.dtau;
    opt.grid = make_grid(c);
    const DemoReport rep = nonuniqueness_demo(pp, c.q, c.r, opt);
    std::ostringstream os;
    write_demo_json(os, rep);
    art.json_file("demo", json::parse(os.str()));
    art.csv_file("demo", [&](std::ostream& s) { write_trajectory_csv(s, rep.trajectory); });
    out << "demo " << (rep.pass ? "pass" : "fail") << ": slope "
        << io::format_double(rep.measured_slope) << " predicted "
        << io::format_double(rep.predicted_slope) << '\n';
    return rep.pass ? kPass : kCheckFailed;
}

void validate(const RunConfig& c) {
    if (!(c.tol > 0.0)) throw DomainError("tol must be positive");
    if (!(c.dtau > 0.0)) throw DomainError("dtau must be positive");
    if (!(c.drho > 0.0)) throw DomainError("drho must be positive");
    if (c.eps < 0.0) throw DomainError("eps must be >= 0");
    if (!(c.alpha_max > c.alpha_min)) throw DomainError("alpha-max must exceed alpha-min");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"Expanding self-similar profiles of the focusing heat equation", "nlh"};
    app.set_config("--config", "", "key=value configuration file; flags override");
    app.fallthrough();
    app.require_subcommand(1);
    app.add_option("--d", cfg.d, "dimension");
    app.add_option("--p", cfg.p, "power");
    app.add_option("--q", cfg.q, "subcritical Lebesgue exponent");
    app.add_option("--r", cfg.r, "supercritical Lebesgue exponent");
    app.add_option("--alpha", cfg.alpha, "shooting value U(0)");
    app.add_option("--alpha-min", cfg.alpha_min, "lower end of the alpha range");
    app.add_option("--alpha-max", cfg.alpha_max, "upper end of the alpha range");
    app.add_option("--alpha-steps", cfg.alpha_steps, "number of alpha samples");
    app.add_option("--rho-max", cfg.rho_max, "outer radius");
    app.add_option("--drho", cfg.drho, "grid spacing");
    app.add_option("--dtau", cfg.dtau, "time step");
    app.add_option("--eps", cfg.eps, "perturbation / seed amplitude (0 = automatic)");
    app.add_option("--tau0", cfg.tau0, "window start");
    app.add_option("--tau1", cfg.tau1, "window end");
    app.add_option("--tol", cfg.tol, "bisection tolerance");
    app.add_option("--seed", cfg.seed, "random seed");
    app.add_option("--out", cfg.out, "output directory");
    app.add_option("--format", cfg.format, "csv|json|both")
        ->check(CLI::IsMember({"csv", "json", "both"}));
    for (const auto& [name, about] : kCommands) app.add_subcommand(name, about);

    std::vector<std::string> rev(args.begin() + (args.empty() ? 0 : 1), args.end());
    std::reverse(rev.begin(), rev.end());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kPass;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n' << app.help();
        return kUsage;
    }
    cfg.command = app.get_subcommands().front()->get_name();

    try {
        validate(cfg);
        Artifacts art(cfg, out);
        int code = kError;
        if (cfg.command == "exponents") code = cmd_exponents(cfg, art, out);
        else if (cfg.command == "profile") code = cmd_profile(cfg, art, out);
        else if (cfg.command == "ell-sweep") code = cmd_ell_sweep(cfg, art, out);
        else if (cfg.command == "alpha-star") code = cmd_alpha_star(cfg, art, out, err);
        else if (cfg.command == "spectrum") code = cmd_spectrum(cfg, art, out);
        else if (cfg.command == "semigroup-check") code = cmd_semigroup(cfg, art, out);
        else if (cfg.command == "evolve") code = cmd_evolve(cfg, art, out);
        else if (cfg.command == "demo") code = cmd_demo(cfg, art, out);
        art.metadata();
        return code;
    } catch (const DomainError& e) {
        err << "domain error: " << e.what() << '\n';
        return kDomain;
    } catch (const NoUnstableExpanderError& e) {
        err << "no unstable expander: " << e.what() << '\n';
        return kCheckFailed;
    } catch (const FeasibilityError& e) {
        err << "infeasible: " << e.what() << '\n';
        return kCheckFailed;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kError;
    }
}

}  // namespace nlh::cli
