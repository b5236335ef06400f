#include "nlh/profile.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>
#include <string>

#include <Eigen/Dense>

#include "adaptive_ode.hpp"
#include "nlh/errors.hpp"
#include "nlh/io.hpp"

namespace nlh {

namespace {

constexpr double kTailWindowStart = 0.70;
constexpr double kTailWindowSplit = 0.85;
constexpr double kTailDisagreement = 1e-2;

// Least-squares coefficients of y ~ sum_j c_j x^j over the samples.
std::vector<double> poly_fit(std::span<const double> x, std::span<const double> y, int terms) {
    Eigen::MatrixXd a(static_cast<Eigen::Index>(x.size()), terms);
    Eigen::VectorXd b(static_cast<Eigen::Index>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i) {
        double xp = 1.0;
        for (int j = 0; j < terms; ++j) {
            a(static_cast<Eigen::Index>(i), j) = xp;
            xp *= x[i];
        }
        b(static_cast<Eigen::Index>(i)) = y[i];
    }
    const Eigen::VectorXd c = a.colPivHouseholderQr().solve(b);
    return {c.data(), c.data() + c.size()};
}

// Index range [lo, hi) of grid nodes with rho in [a*rho_max, b*rho_max].
std::pair<std::size_t, std::size_t> window(const RadialGrid& g, double a, double b) {
    const double lo_r = a * g.rho_max();
    const double hi_r = b * g.rho_max();
    const auto nodes = g.nodes();
    const auto lo = static_cast<std::size_t>(
        std::lower_bound(nodes.begin(), nodes.end(), lo_r - 1e-12) - nodes.begin());
    const auto hi = static_cast<std::size_t>(
        std::upper_bound(nodes.begin(), nodes.end(), hi_r + 1e-12) - nodes.begin());
    return {lo, hi};
}

// rho^{2/(p-1)} U extrapolated to rho -> infinity through the O(rho^-2) series.
double window_tail_constant(const ExpanderProfile& prof, double a, double b) {
    const auto [lo, hi] = window(prof.grid, a, b);
    std::vector<double> x;
    std::vector<double> y;
    const double k = prof.params.tail_power();
    for (std::size_t i = lo; i < hi; ++i) {
        const double r = prof.grid[i];
        x.push_back(1.0 / (r * r));
        y.push_back(std::pow(r, k) * prof.u[i]);
    }
    return poly_fit(x, y, 3).front();
}

double quintic_hermite(double t, double h, double p0, double d0, double s0, double p1, double d1,
                       double s1) {
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double t4 = t3 * t;
    const double t5 = t4 * t;
    const double h0 = 1 - 10 * t3 + 15 * t4 - 6 * t5;
    const double h1 = t - 6 * t3 + 8 * t4 - 3 * t5;
    const double h2 = 0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5;
    const double h3 = 10 * t3 - 15 * t4 + 6 * t5;
    const double h4 = -4 * t3 + 7 * t4 - 3 * t5;
    const double h5 = 0.5 * t3 - t4 + 0.5 * t5;
    return h0 * p0 + h * h1 * d0 + h * h * h2 * s0 + h3 * p1 + h * h4 * d1 + h * h * h5 * s1;
}

double quintic_hermite_derivative(double t, double h, double p0, double d0, double s0, double p1,
                                  double d1, double s1) {
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double t4 = t3 * t;
    const double h0 = -30 * t2 + 60 * t3 - 30 * t4;
    const double h1 = 1 - 18 * t2 + 32 * t3 - 15 * t4;
    const double h2 = t - 4.5 * t2 + 6 * t3 - 2.5 * t4;
    const double h3 = 30 * t2 - 60 * t3 + 30 * t4;
    const double h4 = -12 * t2 + 28 * t3 - 15 * t4;
    const double h5 = 1.5 * t2 - 4 * t3 + 2.5 * t4;
    return (h0 * p0 + h * h1 * d0 + h * h * h2 * s0 + h3 * p1 + h * h4 * d1 + h * h * h5 * s1) / h;
}

}  // namespace

SeriesStart series_start(double alpha, const ProblemParams& params, double rho0) {
    if (!(alpha >= 0.0)) throw DomainError("shooting value alpha must be >= 0");
    if (!(rho0 > 0.0)) throw DomainError("series start radius must be positive");
    const double d = params.d;
    const double p = params.p;
    SeriesStart s;
    if (alpha == 0.0) return s;
    const double ap = std::pow(alpha, p);
    s.c2 = -(alpha * params.inv_pm1() + ap) / (2.0 * d);
    s.c4 = -s.c2 * (1.0 + params.inv_pm1() + p * std::pow(alpha, p - 1.0)) / (4.0 * (d + 2.0));
    const double r2 = rho0 * rho0;
    s.u = alpha + s.c2 * r2 + s.c4 * r2 * r2;
    s.du = 2.0 * s.c2 * rho0 + 4.0 * s.c4 * r2 * rho0;
    return s;
}

double default_start_radius(double alpha, const ProblemParams& params) {
    const double stiffness = params.inv_pm1() + params.p * std::pow(std::abs(alpha), params.p - 1.0);
    return std::min(1e-4, 1e-2 / std::sqrt(stiffness));
}

double profile_second_derivative(const ProblemParams& params, double rho, double u, double du) {
    return -((params.d - 1.0) / rho + 0.5 * rho) * du - u * params.inv_pm1() -
           signed_power(u, params.p);
}

double ExpanderProfile::second_derivative(std::size_t i) const {
    const double r = grid[i];
    if (r == 0.0) return -(u[0] * params.inv_pm1() + signed_power(u[0], params.p)) / params.d;
    return profile_second_derivative(params, r, u[i], du[i]);
}

double ExpanderProfile::value_at(double rho) const {
    const double h = grid.spacing();
    const std::size_t n = grid.size() - 1;
    if (rho >= grid.rho_max()) {
        const double s = rho - grid.rho_max();
        const double r = grid.rho_max();
        const double u2 = second_derivative(n);
        const double b = (params.d - 1.0) / r + 0.5 * r;
        const double db = -(params.d - 1.0) / (r * r) + 0.5;
        const double c = params.inv_pm1() + params.p * std::pow(std::abs(u[n]), params.p - 1.0);
        const double u3 = -db * du[n] - b * u2 - c * du[n];
        return u[n] + s * du[n] + 0.5 * s * s * u2 + s * s * s * u3 / 6.0;
    }
    const double x = std::max(rho, 0.0) / h;
    const auto i = std::min(static_cast<std::size_t>(x), n - 1);
    const double t = x - static_cast<double>(i);
    return quintic_hermite(t, h, u[i], du[i], second_derivative(i), u[i + 1], du[i + 1],
                           second_derivative(i + 1));
}

double ExpanderProfile::derivative_at(double rho) const {
    const double h = grid.spacing();
    const std::size_t n = grid.size() - 1;
    if (rho >= grid.rho_max()) {
        const double s = rho - grid.rho_max();
        return du[n] + s * second_derivative(n);
    }
    const double x = std::max(rho, 0.0) / h;
    const auto i = std::min(static_cast<std::size_t>(x), n - 1);
    const double t = x - static_cast<double>(i);
    return quintic_hermite_derivative(t, h, u[i], du[i], second_derivative(i), u[i + 1],
                                      du[i + 1], second_derivative(i + 1));
}

double ode_defect(const ExpanderProfile& prof) {
    const std::size_t n = prof.grid.size();
    if (n < 7) return 0.0;
    const double h = prof.grid.spacing();
    auto d1 = [h](std::span<const double> f, std::size_t i) {
        return (-f[i - 3] + 9 * f[i - 2] - 45 * f[i - 1] + 45 * f[i + 1] - 9 * f[i + 2] + f[i + 3]) /
               (60.0 * h);
    };
    double worst = 0.0;
    for (std::size_t i = 3; i + 3 < n; ++i) {
        const double r = prof.grid[i];
        const double ode =
            d1(prof.du, i) - profile_second_derivative(prof.params, r, prof.u[i], prof.du[i]);
        const double consistency = d1(prof.u, i) - prof.du[i];
        worst = std::max({worst, std::abs(ode), std::abs(consistency)});
    }
    return worst;
}

ExpanderProfile shoot_profile(double alpha, const ProblemParams& params, const RadialGrid& grid) {
    if (!(alpha >= 0.0)) throw DomainError("shooting value alpha must be >= 0");
    ExpanderProfile prof;
    prof.alpha = alpha;
    prof.params = params;
    prof.grid = grid;
    prof.u.assign(grid.size(), 0.0);
    prof.du.assign(grid.size(), 0.0);
    if (alpha == 0.0) return prof;

    const double rho0 = std::min(default_start_radius(alpha, params), 0.5 * grid[1]);
    const SeriesStart s = series_start(alpha, params, rho0);
    std::array<double, 2> y{s.u, s.du};
    const double p = params.p;
    const double dm1 = params.d - 1.0;
    const double c0 = params.inv_pm1();
    auto rhs = [p, dm1, c0](const std::array<double, 2>& st, double r) {
        const double u = st[0];
        const double du = st[1];
        return std::array<double, 2>{du, -(dm1 / r + 0.5 * r) * du - c0 * u - signed_power(u, p)};
    };
    prof.u[0] = alpha;
    prof.du[0] = 0.0;
    detail::integrate_through(rhs, y, rho0, grid.nodes().subspan(1),
                              [&prof](std::size_t i, const std::array<double, 2>& st, double) {
                                  prof.u[i + 1] = st[0];
                                  prof.du[i + 1] = st[1];
                              });

    prof.max_abs_u = 0.0;
    for (double v : prof.u) prof.max_abs_u = std::max(prof.max_abs_u, std::abs(v));
    prof.bounded = std::isfinite(prof.max_abs_u);
    int crossings = 0;
    for (std::size_t i = 1; i < prof.u.size(); ++i)
        if ((prof.u[i - 1] > 0.0 && prof.u[i] < 0.0) || (prof.u[i - 1] < 0.0 && prof.u[i] > 0.0))
            ++crossings;
    prof.zero_crossings = crossings;
    prof.residual_max = ode_defect(prof);
    const TailEstimate tail = estimate_ell(prof);
    prof.ell = tail.ell;
    prof.ell_uncertainty = tail.uncertainty;
    return prof;
}

TailEstimate estimate_ell(const ExpanderProfile& prof) {
    if (prof.grid.rho_max() < 10.0) throw DomainError("tail estimate needs rho_max >= 10");
    bool all_zero = std::all_of(prof.u.begin(), prof.u.end(), [](double v) { return v == 0.0; });
    if (all_zero) return {};
    const double first = window_tail_constant(prof, kTailWindowStart, kTailWindowSplit);
    const double last = window_tail_constant(prof, kTailWindowSplit, 1.0);
    TailEstimate t{last, std::abs(last - first)};
    const double scale = std::max(std::abs(last), 1e-12);
    if (!std::isfinite(last) || t.uncertainty > kTailDisagreement * scale)
        throw TailNotResolvedError("tail windows disagree (" + io::format_double(first) + " vs " +
                                   io::format_double(last) + "); increase rho_max");
    return t;
}

double fitted_tail_exponent(const ExpanderProfile& prof) {
    const auto [lo, hi] = window(prof.grid, kTailWindowStart, 1.0);
    std::vector<double> x;
    std::vector<double> slope;
    for (std::size_t i = lo; i < hi; ++i) {
        const double r = prof.grid[i];
        if (prof.u[i] == 0.0) continue;
        x.push_back(1.0 / (r * r));
        slope.push_back(r * prof.du[i] / prof.u[i]);
    }
    if (x.size() < 3) throw DomainError("tail exponent needs a nonvanishing tail");
    return poly_fit(x, slope, 3).front();
}

EllSweep sweep_ell(std::span<const double> alphas, const ProblemParams& params,
                   const RadialGrid& grid) {
    for (double a : alphas)
        if (!(a > 0.0)) throw DomainError("sweep requires alpha > 0");
    EllSweep out;
    out.rows.resize(alphas.size());
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        EllSweepRow& row = out.rows[i];
        row.alpha = alphas[i];
        try {
            const ExpanderProfile prof = shoot_profile(alphas[i], params, grid);
            row.ell = prof.ell;
            row.uncertainty = prof.ell_uncertainty;
            row.residual = prof.residual_max;
        } catch (const Error& e) {
            row.error = e.what();
            row.ell = std::nan("");
        }
    }
    const EllSweepRow* prev = nullptr;
    for (const auto& row : out.rows) {
        if (row.error) continue;
        if (prev) out.continuity = std::max(out.continuity, std::abs(row.ell - prev->ell));
        prev = &row;
    }
    return out;
}

void write_profile_csv(std::ostream& os, const ExpanderProfile& prof) {
    constexpr std::string_view header[] = {"rho", "u", "du"};
    io::CsvWriter w(os, header);
    for (std::size_t i = 0; i < prof.grid.size(); ++i) {
        const double row[] = {prof.grid[i], prof.u[i], prof.du[i]};
        w.row(row);
    }
}

}  // namespace nlh
