// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nlh/dynamics.hpp"
#include "nlh/errors.hpp"
#include "nlh/exponents.hpp"
#include "nlh/profile.hpp"
#include "nlh/semigroup.hpp"
#include "nlh/spectral.hpp"

using namespace nlh;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (ok) return;
        if (pass) detail << "failed: ";
        else detail << "; ";
        detail << what;
        pass = false;
    }
};

struct Criterion {
    int id;
    const char* title;
    double limit_s;  // 0 = no limit
    std::function<void(Outcome&)> body;
};

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

void exponents(Outcome& o) {
    for (int d = 3; d <= 10; ++d)
        o.require(joseph_lundgren_exponent(d).is_infinite(), "p_jl finite at d=" + std::to_string(d));
    double worst = 0.0;
    for (int d = 11; d <= 20; ++d) {
        const auto v = joseph_lundgren_exponent(d).value();
        if (!v) {
            o.require(false, "p_jl infinite at d=" + std::to_string(d));
            continue;
        }
        const double closed = 1.0 + 4.0 / (d - 4.0 - 2.0 * std::sqrt(d - 1.0));
        worst = std::max(worst, std::abs(*v - closed) / closed);
    }
    o.require(worst <= 1e-12, "relative error " + fmt(worst));
    if (o.pass) o.detail << "max relative error " << fmt(worst);
}

void profiles(Outcome& o) {
    int cases = 0;
    for (const auto& [d, p] : {std::pair{5, 3.0}, std::pair{3, 2.0}, std::pair{11, 7.0}})
        for (double alpha : {0.5, 1.0, 2.0}) {
            const std::string tag =
                "(" + std::to_string(d) + "," + fmt(p) + "," + fmt(alpha) + ")";
            const ProblemParams pp = derived_exponents(d, p);
            const ExpanderProfile a = shoot_profile(alpha, pp, RadialGrid::uniform(16.0, 0.01));
            const ExpanderProfile b = shoot_profile(alpha, pp, RadialGrid::uniform(32.0, 0.01));
            o.require(ode_defect(a) <= 1e-6 * (1.0 + a.max_abs_u), tag + " defect");
            const double want = -pp.tail_power();
            o.require(std::abs(fitted_tail_exponent(a) - want) <= 0.02 * std::abs(want), tag + " tail");
            o.require(std::abs(a.ell - b.ell) <= a.ell_uncertainty, tag + " ell doubling");
            ++cases;
        }
    if (o.pass) o.detail << cases << " cases";
}

void spectral(Outcome& o) {
    const ProblemParams p53 = derived_exponents(5, 3.0), p32 = derived_exponents(3, 2.0),
                        p117 = derived_exponents(11, 7.0);
    const std::vector<std::pair<ProblemParams, double>> cases{
        {p53, 1.0},  {p53, 2.2},  {p53, 5.0},  {p53, 10.0}, {p32, 0.3},  {p32, 1.0},
        {p32, 2.0},  {p32, 5.0},  {p117, 0.5}, {p117, 1.0}, {p117, 2.0}, {p117, 5.0}};
    double worst = 0.0;
    int positive = 0;
    for (const auto& [pp, alpha] : cases) {
        const std::string tag = "(" + std::to_string(pp.d) + "," + fmt(pp.p) + "," + fmt(alpha) + ")";
        const double core = std::pow(alpha, -0.5 * (pp.p - 1.0));
        const RadialGrid grid = RadialGrid::uniform(16.0, std::min(0.01, 0.25 * core));
        const EigenPair top = top_eigenpair(alpha, pp, grid);
        const auto matrix = matrix_spectrum(alpha, pp, grid, std::min(top.lambda, 0.0) - 1.0);
        if (matrix.empty()) {
            o.require(false, tag + " empty matrix spectrum");
            continue;
        }
        const double err = std::abs(top.lambda - matrix[0]);
        const bool near_zero = std::abs(top.lambda) < 1e-2;
        o.require(near_zero ? err <= 1e-6 || err <= 1e-4 * std::abs(top.lambda)
                            : err <= 1e-4 * std::abs(top.lambda),
                  tag + " top eigenvalue");
        if (std::abs(top.lambda) > 1e-12) worst = std::max(worst, err / std::abs(top.lambda));
        o.require(top.zero_count == 0, tag + " top zero count");
        const auto pairs = positive_spectrum(alpha, pp, grid);
        for (std::size_t k = 0; k < pairs.size(); ++k) {
            o.require(pairs[k].zero_count == static_cast<int>(k), tag + " Sturm index");
            o.require(k < matrix.size() &&
                          std::abs(pairs[k].lambda - matrix[k]) <=
                              std::max(1e-4 * std::abs(pairs[k].lambda), 1e-6),
                      tag + " eigenvalue " + std::to_string(k));
        }
        positive += static_cast<int>(pairs.size());
    }
    if (o.pass)
        o.detail << cases.size() << " cases, " << positive << " positive eigenpairs, max relative gap "
                 << fmt(worst);
}

void dichotomy(Outcome& o) {
    for (const auto& [d, p] : {std::pair{5, 3.0}, std::pair{3, 2.0}}) {
        const std::string tag = "(" + std::to_string(d) + "," + fmt(p) + ")";
        const ProblemParams pp = derived_exponents(d, p);
        const AlphaStarResult r = find_alpha_star(pp, 0.1, 50.0, 1e-6);
        if (!r.alpha_star) {
            o.require(false, tag + " no alpha*");
            continue;
        }
        o.require(r.hi - r.lo <= 1e-6, tag + " bracket width");
        const double lam = top_eigenpair(*r.alpha_star, pp).lambda;
        o.require(std::abs(lam) <= 1e-4, tag + " lambda_top " + fmt(lam));
        o.detail << tag << " alpha*=" << fmt(*r.alpha_star) << " lambda=" << fmt(lam) << ' ';
    }
    const AlphaStarResult none = find_alpha_star(derived_exponents(11, 7.0), 0.1, 50.0, 1e-6);
    o.require(!none.alpha_star.has_value(), "(11,7) transition found");
    if (o.pass) o.detail << "(11,7) none";
}

void semigroup(Outcome& o) {
    const ProblemParams pp = derived_exponents(5, 3.0);
    std::mt19937_64 rng(20240607);
    std::uniform_real_distribution<double> amp(-3.0, 3.0), var(0.01, 10.0), tt(0.0, 3.0);
    double law = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const GaussianDatum g{amp(rng), var(rng)};
        const double t1 = tt(rng), t2 = tt(rng);
        const GaussianDatum two = apply_S0_gaussian(t1, apply_S0_gaussian(t2, g, pp), pp);
        const GaussianDatum one = apply_S0_gaussian(t1 + t2, g, pp);
        law = std::max({law, std::abs(two.amplitude - one.amplitude) / std::abs(one.amplitude),
                        std::abs(two.variance - one.variance) / one.variance});
    }
    o.require(law <= 1e-12, "semigroup law " + fmt(law));

    double growth = 0.0;
    for (const ProblemParams& q : {pp, derived_exponents(3, 2.0)}) {
        for (double eta : {1.0, 2.0, q.q_c, 2.0 * q.q_c}) {
            const double got = gaussian_growth_exponent(eta, q);
            const double want = q.inv_pm1() - q.d / (2.0 * eta);
            growth = std::max(growth, std::abs(got - want));
            if (eta < q.q_c) o.require(got < 0.0, "sign below q_c");
            if (eta > q.q_c) o.require(got > 0.0, "sign above q_c");
        }
    }
    o.require(growth <= 1e-3, "growth exponent " + fmt(growth));

    double quad = 0.0;
    const GaussianDatum g{1.3, 0.7};
    const RadialGrid grid = RadialGrid::uniform();
    const RadialFunction f = RadialFunction::sample(grid, g);
    for (double tau : {1e-3, 0.5, 2.0}) {
        const RadialFunction num = apply_S0(tau, f, pp);
        const GaussianDatum ex = apply_S0_gaussian(tau, g, pp);
        double err = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            err = std::max(err, std::abs(num.values[i] - ex(grid[i])));
            scale = std::max(scale, std::abs(ex(grid[i])));
        }
        quad = std::max(quad, err / scale);
    }
    o.require(quad <= 1e-6, "quadrature " + fmt(quad));
    if (o.pass)
        o.detail << "law " << fmt(law) << ", growth " << fmt(growth) << ", quadrature " << fmt(quad);
}

void dynamics(Outcome& o) {
    const ProblemParams pp = derived_exponents(5, 3.0);
    const RadialGrid grid = RadialGrid::uniform();
    const auto star = find_alpha_star(pp, 0.1, 50.0, 1e-9, grid);
    if (!star.alpha_star) {
        o.require(false, "no alpha*");
        return;
    }
    const double alpha = *star.alpha_star + 0.05;
    const PotentialField pot = PotentialField::from_profile(shoot_profile(alpha, pp, grid));
    const EigenPair mode = top_eigenpair(alpha, pp, grid);

    EvolveOptions st;
    st.boundary_reference = [&](double r) { return pot.profile.value_at(r); };
    st.log_every = 100;
    const auto& u = pot.profile.u;
    const double drift = max_abs_diff(evolve_similarity(u, 0.0, 5.0, pp, grid, st).final_state.v, u);
    o.require(drift <= 1e-5 * (1.0 + pot.profile.max_abs_u), "static drift " + fmt(drift));

    const double rate = fitted_growth_rate(linearized_evolve(mode.f, pot, 0.0, 5.0), 0.0, 5.0);
    o.require(std::abs(rate - mode.lambda) <= 1e-3, "growth rate " + fmt(rate));

    std::vector<double> ratio;
    for (double eps : {1e-2, 5e-3, 2.5e-3}) {
        std::vector<double> w(mode.f);
        for (double& x : w) x *= eps;
        const auto a = evolve_perturbation(w, pot, 0.0, 2.0).final_state.v;
        const auto b = linearized_evolve(w, pot, 0.0, 2.0).final_state.v;
        ratio.push_back(max_abs_diff(a, b) / (eps * eps));
    }
    const double spread = *std::max_element(ratio.begin(), ratio.end()) /
                          *std::min_element(ratio.begin(), ratio.end());
    o.require(ratio[0] > 0.0 && spread <= 2.0, "tangency spread " + fmt(spread));

    std::vector<double> u0(grid.size());
    for (std::size_t i = 0; i < u0.size(); ++i) u0[i] = std::exp(-grid[i] * grid[i]);
    std::vector<std::vector<double>> fin;
    for (double dt : {0.04, 0.02, 0.01}) {
        EvolveOptions e;
        e.dtau = dt;
        e.log_every = 1000;
        fin.push_back(linearized_evolve(u0, pot, 0.0, 1.0, e).final_state.v);
    }
    const double rich = max_abs_diff(fin[0], fin[1]) / max_abs_diff(fin[1], fin[2]);
    o.require(std::abs(rich - 4.0) <= 0.3, "Richardson ratio " + fmt(rich));
    if (o.pass)
        o.detail << "drift " << fmt(drift) << ", rate " << fmt(rate) << " vs " << fmt(mode.lambda)
                 << ", tangency ratios " << fmt(ratio[0]) << '/' << fmt(ratio[1]) << '/'
                 << fmt(ratio[2]) << ", Richardson " << fmt(rich);
}

void demo(Outcome& o) {
    const DemoReport rep = nonuniqueness_demo(derived_exponents(5, 3.0), 2.0, 10.0);
    o.require(rep.feasibility.slack > 0.0, "feasibility slack");
    o.require(rep.checks.lower_bound && rep.min_lower_ratio > 1.0, "ancient lower bound");
    const double rel = std::abs(rep.measured_slope - rep.predicted_slope) / std::abs(rep.predicted_slope);
    o.require(rel <= 0.1, "slope " + fmt(rep.measured_slope) + " vs " + fmt(rep.predicted_slope));
    o.require(rep.slope_r2 >= 0.99, "R^2 " + fmt(rep.slope_r2));
    o.require(rep.decades >= 2.0, "decades " + fmt(rep.decades));
    o.require(rep.pass, "demo sub-checks");
    if (o.pass)
        o.detail << "slope " << fmt(rep.measured_slope) << " vs " << fmt(rep.predicted_slope)
                 << ", R^2 " << fmt(rep.slope_r2) << ", " << fmt(rep.decades) << " decades";
}

double sample_real(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> mant(-1.0, 1.0);
    std::uniform_int_distribution<int> expo(-4, 4);
    return mant(rng) * std::pow(10.0, expo(rng));
}

void inequalities(Outcome& o) {
    std::mt19937_64 rng(20240607);
    std::uniform_real_distribution<double> pp(1.0, 6.0);
    const auto violates = [](const GapBound& g) {
        return !(g.lhs <= g.rhs * (1.0 + 1e-12) + 1e-12 * (1.0 + std::abs(g.lhs) + std::abs(g.rhs)));
    };
    int taylor = 0, contraction = 0;
    for (int k = 0; k < 100000; ++k) {
        const double p = std::max(pp(rng), 1.0 + 1e-9);
        const double x = sample_real(rng), y = sample_real(rng), z = sample_real(rng);
        taylor += violates(taylor_remainder_gap(x, y, p));
        contraction += violates(contraction_remainder_gap(x, y, z, p));
    }
    o.require(taylor == 0, std::to_string(taylor) + " taylor violations");
    o.require(contraction == 0, std::to_string(contraction) + " contraction violations");
    if (o.pass) o.detail << "2 x 100000 samples, 0 violations";
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "exponent suite", 1.0, exponents},
        {2, "profile suite", 10.0, profiles},
        {3, "spectral cross-validation", 30.0, spectral},
        {4, "alpha* dichotomy", 0.0, dichotomy},
        {5, "semigroup suite", 10.0, semigroup},
        {6, "dynamics suite", 60.0, dynamics},
        {7, "non-uniqueness demo", 300.0, demo},
        {8, "inequality suite", 5.0, inequalities},
    };
    int failed = 0;
    for (const Criterion& c : criteria) {
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            c.body(o);
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.limit_s > 0.0) o.require(secs < c.limit_s, "runtime over " + fmt(c.limit_s) + " s");
        failed += !o.pass;
        std::printf("Criterion %d: %s  %s (%s; %.2f s%s)\n", c.id, o.pass ? "PASS" : "FAIL", c.title,
                    o.detail.str().c_str(), secs,
                    c.limit_s > 0.0 ? (" / " + fmt(c.limit_s) + " s").c_str() : "");
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
