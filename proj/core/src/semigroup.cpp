#include "nlh/semigroup.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <ostream>

#include <nlohmann/json.hpp>

#include "nlh/errors.hpp"
#include "quadrature.hpp"

namespace nlh {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kAngularTol = 1e-8;
constexpr int kAngularMaxOrder = 1024;
// Gaussian kernel factors below e^{-46} are dropped.
constexpr double kKernelCut = 46.0;
constexpr int kRadialOrder = 16;
constexpr double kPanelMax = 0.5;

struct GaussLegendre {
    std::vector<double> x;
    std::vector<double> w;
};

GaussLegendre compute_gauss_legendre(int n) {
    GaussLegendre gl{std::vector<double>(n), std::vector<double>(n)};
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        gl.x[i] = -x;
        gl.x[n - 1 - i] = x;
        gl.w[i] = w;
        gl.w[n - 1 - i] = w;
    }
    return gl;
}

const GaussLegendre& gauss_legendre(int n) {
    static std::mutex mu;
    static std::map<int, GaussLegendre> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, compute_gauss_legendre(n)).first;
    return it->second;
}

double gl_integrate(const GaussLegendre& gl, double a, double b,
                    const std::function<double(double)>& f) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < gl.x.size(); ++i) s += gl.w[i] * f(mid + half * gl.x[i]);
    return s * half;
}

double int_power(double x, int m) {
    double r = 1.0;
    for (int i = 0; i < m; ++i) r *= x;
    return r;
}

// Angular nodes on [0, pi] with cos(phi) and sin(phi)^m precomputed.
struct AngularRule {
    std::vector<double> cosines;
    std::vector<double> weights;  // GL weight * sin^m * pi/2
};

const AngularRule& full_angular_rule(int n, int m) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, AngularRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({n, m});
    if (it != cache.end()) return it->second;
    const GaussLegendre& gl = gauss_legendre(n);
    AngularRule rule;
    for (int i = 0; i < n; ++i) {
        const double phi = 0.5 * kPi * (gl.x[i] + 1.0);
        rule.cosines.push_back(std::cos(phi));
        rule.weights.push_back(0.5 * kPi * gl.w[i] * int_power(std::sin(phi), m));
    }
    return cache.emplace(std::pair{n, m}, std::move(rule)).first->second;
}

double angular_sum(double z, int m, int n, double upper) {
    if (upper == kPi) {
        const AngularRule& rule = full_angular_rule(n, m);
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += rule.weights[i] * std::exp(z * (rule.cosines[i] - 1.0));
        return s;
    }
    const GaussLegendre& gl = gauss_legendre(n);
    const double half = 0.5 * upper;
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        const double phi = half * (gl.x[i] + 1.0);
        s += gl.w[i] * std::exp(z * (std::cos(phi) - 1.0)) * int_power(std::sin(phi), m);
    }
    return s * half;
}

// int_0^pi e^{z (cos phi - 1)} sin^{d-2} phi dphi
double angular_factor(double z, int d) {
    if (d == 3) return z < 1e-8 ? 2.0 - 2.0 * z : -std::expm1(-2.0 * z) / z;
    const double upper =
        z > 0.5 * kKernelCut ? std::acos(std::max(-1.0, 1.0 - kKernelCut / z)) : kPi;
    const int m = d - 2;
    double prev = angular_sum(z, m, 8, upper);
    for (int n = 16; n <= kAngularMaxOrder; n *= 2) {
        const double cur = angular_sum(z, m, n, upper);
        if (std::abs(cur - prev) <= kAngularTol * std::abs(cur)) return cur;
        prev = cur;
    }
    throw AccuracyError("angular quadrature did not converge", std::abs(prev));
}

void check_exponents(double eta, double eta_prime, double gamma, double gamma_prime) {
    if (!(eta >= 1.0 && gamma >= 1.0 && eta <= eta_prime && gamma <= gamma_prime))
        throw DomainError("smoothing needs 1 <= eta <= eta' and 1 <= gamma <= gamma'");
    const double gap_eta = 1.0 / eta - 1.0 / eta_prime;
    const double gap_gamma = 1.0 / gamma - 1.0 / gamma_prime;
    if (std::abs(gap_eta - gap_gamma) > 1e-12)
        throw DomainError("smoothing needs 1/eta - 1/eta' = 1/gamma - 1/gamma'");
}

double smoothing_weight(double tau, double eta, double eta_prime, const ProblemParams& params) {
    const double a = std::expm1(tau);
    const double d = params.d;
    return std::pow(a, 0.5 * d * (1.0 / eta - 1.0 / eta_prime)) *
           std::exp(-(params.inv_pm1() - 0.5 * d / eta) * tau);
}

template <class NormAfter, class NormBefore>
SmoothingReport smoothing_report(double eta, double eta_prime, double gamma, double gamma_prime,
                                 std::size_t samples, const ProblemParams& params,
                                 std::vector<double> taus, NormAfter&& after, NormBefore&& before) {
    check_exponents(eta, eta_prime, gamma, gamma_prime);
    for (double t : taus)
        if (!(t > 0.0 && t <= 2.0)) throw DomainError("smoothing tau samples must lie in (0, 2]");
    SmoothingReport rep{eta, eta_prime, gamma, gamma_prime, std::move(taus), {}, 0.0, false};
    for (double t : rep.tau_list) {
        double worst = 0.0;
        for (std::size_t s = 0; s < samples; ++s) {
            const double r1 = after(s, t, eta_prime) * smoothing_weight(t, eta, eta_prime, params) /
                              before(s, eta);
            const double r2 = after(s, t, gamma_prime) *
                              smoothing_weight(t, gamma, gamma_prime, params) / before(s, gamma);
            worst = std::max({worst, r1, r2});
        }
        rep.ratios.push_back(worst);
    }
    // M is fitted on the coarser half of the tau samples; the finer half must stay within 10 M.
    std::vector<std::size_t> order(rep.tau_list.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return rep.tau_list[a] > rep.tau_list[b]; });
    const std::size_t coarse = std::max<std::size_t>(1, order.size() / 2);
    double overall = 0.0;
    for (std::size_t k = 0; k < order.size(); ++k) {
        if (k < coarse) rep.fitted_M = std::max(rep.fitted_M, rep.ratios[order[k]]);
        overall = std::max(overall, rep.ratios[order[k]]);
    }
    rep.pass = std::isfinite(overall) && overall <= 10.0 * rep.fitted_M;
    return rep;
}

}  // namespace

RadialFunction RadialFunction::sample(const RadialGrid& grid, const std::function<double(double)>& f,
                                      std::optional<double> tail_exponent) {
    RadialFunction out{grid, std::vector<double>(grid.size()), tail_exponent};
    for (std::size_t i = 0; i < grid.size(); ++i) out.values[i] = f(grid[i]);
    return out;
}

double RadialFunction::value_at(double rho) const {
    rho = std::abs(rho);
    const std::size_t n = grid.size() - 1;
    if (rho > grid.rho_max()) {
        if (!tail_exponent) return 0.0;
        return values[n] * std::pow(rho / grid.rho_max(), *tail_exponent);
    }
    const double h = grid.spacing();
    const double x = rho / h;
    auto base = static_cast<long>(std::floor(x)) - 2;
    base = std::min(base, static_cast<long>(n) - 5);
    double s = 0.0;
    for (long j = 0; j < 6; ++j) {
        const long node = base + j;
        double w = 1.0;
        for (long k = 0; k < 6; ++k)
            if (k != j) w *= (x - static_cast<double>(base + k)) / static_cast<double>(j - k);
        s += w * values[static_cast<std::size_t>(std::labs(node))];
    }
    return s;
}

double GaussianDatum::operator()(double rho) const {
    return amplitude * std::exp(-rho * rho / (2.0 * variance));
}

double unit_sphere_area(int d) {
    return 2.0 * std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d);
}

double lq_norm(const RadialFunction& f, double gamma, int d) {
    if (!(gamma >= 1.0)) throw DomainError("lq_norm needs gamma >= 1");
    const std::size_t n = f.grid.size();
    double peak = 0.0;
    for (double v : f.values) peak = std::max(peak, std::abs(v));
    if (peak == 0.0) return 0.0;
    // Normalising by the peak keeps |f|^gamma clear of underflow for large gamma.
    std::vector<double> integrand(n);
    for (std::size_t i = 0; i < n; ++i)
        integrand[i] = std::pow(std::abs(f.values[i]) / peak, gamma) * std::pow(f.grid[i], d - 1);
    double total = detail::simpson(integrand, f.grid.spacing());
    if (f.tail_exponent && f.values.back() != 0.0) {
        const double power = gamma * *f.tail_exponent + d;
        if (power >= 0.0)
            throw DivergenceError("non-integrable tail: gamma * tail_exponent + d = " +
                                  std::to_string(power) + " >= 0 (tail_exponent " +
                                  std::to_string(*f.tail_exponent) + ")");
        const double rm = f.grid.rho_max();
        total += std::pow(std::abs(f.values.back()) / peak, gamma) * std::pow(rm, d) / (-power);
    }
    return peak * std::pow(unit_sphere_area(d) * total, 1.0 / gamma);
}

double lq_norm(const GaussianDatum& g, double gamma, int d) {
    if (!(gamma >= 1.0)) throw DomainError("lq_norm needs gamma >= 1");
    return std::abs(g.amplitude) * std::pow(2.0 * kPi * g.variance / gamma, d / (2.0 * gamma));
}

GaussianDatum apply_S0_gaussian(double tau, const GaussianDatum& g, const ProblemParams& params) {
    if (!(tau >= 0.0)) throw DomainError("apply_S0_gaussian needs tau >= 0");
    if (!(g.variance > 0.0)) throw DomainError("Gaussian variance must be positive");
    const double a = std::expm1(tau);
    const double decay = std::exp(-tau);
    GaussianDatum out;
    out.variance = decay * g.variance - 2.0 * std::expm1(-tau);
    out.amplitude = g.amplitude * std::exp(tau * params.inv_pm1()) *
                    std::pow(g.variance / (g.variance + 2.0 * a), 0.5 * params.d);
    return out;
}

RadialFunction apply_S0(double tau, const RadialFunction& f, const ProblemParams& params) {
    if (!(tau > 0.0)) throw DomainError("apply_S0 needs tau > 0");
    const int d = params.d;
    const double a = std::expm1(tau);
    const double width = std::sqrt(4.0 * a * kKernelCut);
    const double panel = std::min(kPanelMax, std::sqrt(a));
    const double prefactor = std::pow(4.0 * kPi * a, -0.5 * d) * unit_sphere_area(d - 1) *
                             std::exp(tau * params.inv_pm1());
    const double scale = std::exp(0.5 * tau);
    const double s_end = f.tail_exponent ? std::numeric_limits<double>::infinity() : f.grid.rho_max();
    const GaussLegendre& gl = gauss_legendre(kRadialOrder);

    RadialFunction out{f.grid, std::vector<double>(f.grid.size(), 0.0), f.tail_exponent};
    for (std::size_t j = 0; j < f.grid.size(); ++j) {
        const double big_r = scale * f.grid[j];
        const double lo = std::max(0.0, big_r - width);
        const double hi = std::min(s_end, big_r + width);
        if (!(hi > lo)) continue;
        const auto panels = static_cast<std::size_t>(std::ceil((hi - lo) / panel));
        const double w = (hi - lo) / static_cast<double>(panels);
        double sum = 0.0;
        for (std::size_t k = 0; k < panels; ++k) {
            const double a0 = lo + w * static_cast<double>(k);
            auto integrand = [&](double s) {
                const double fs = f.value_at(s);
                if (std::abs(fs) < 1e-300) return 0.0;
                const double diff = big_r - s;
                return fs * int_power(s, d - 1) * std::exp(-diff * diff / (4.0 * a)) *
                       angular_factor(big_r * s / (2.0 * a), d);
            };
            sum += gl_integrate(gl, a0, a0 + w, integrand);
        }
        out.values[j] = prefactor * sum;
    }
    return out;
}

double gaussian_growth_exponent(double eta, const ProblemParams& params, double tau_lo,
                                double tau_hi) {
    if (!(eta >= 1.0)) throw DomainError("growth exponent needs eta >= 1");
    if (!(tau_hi > tau_lo && tau_lo >= 0.0)) throw DomainError("growth fit needs 0 <= tau_lo < tau_hi");
    const GaussianDatum wide{1.0, 1e12};
    constexpr int kSamples = 9;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < kSamples; ++i) {
        const double t = tau_lo + (tau_hi - tau_lo) * i / (kSamples - 1.0);
        const double y = std::log(lq_norm(apply_S0_gaussian(t, wide, params), eta, params.d));
        sx += t;
        sy += y;
        sxx += t * t;
        sxy += t * y;
    }
    return (kSamples * sxy - sx * sy) / (kSamples * sxx - sx * sx);
}

std::vector<double> default_smoothing_taus() {
    std::vector<double> t;
    for (int k = 1; k <= 10; ++k) t.push_back(std::ldexp(1.0, -k));
    return t;
}

SmoothingReport verify_smoothing(double eta, double eta_prime, double gamma, double gamma_prime,
                                 std::span<const GaussianDatum> samples,
                                 const ProblemParams& params, std::vector<double> tau_list) {
    return smoothing_report(
        eta, eta_prime, gamma, gamma_prime, samples.size(), params, std::move(tau_list),
        [&](std::size_t s, double t, double e) {
            return lq_norm(apply_S0_gaussian(t, samples[s], params), e, params.d);
        },
        [&](std::size_t s, double e) { return lq_norm(samples[s], e, params.d); });
}

SmoothingReport verify_smoothing(double eta, double eta_prime, double gamma, double gamma_prime,
                                 std::span<const RadialFunction> samples,
                                 const ProblemParams& params, std::vector<double> tau_list) {
    std::map<std::pair<std::size_t, double>, RadialFunction> evolved;
    auto get = [&](std::size_t s, double t) -> const RadialFunction& {
        auto it = evolved.find({s, t});
        if (it == evolved.end()) it = evolved.emplace(std::pair{s, t}, apply_S0(t, samples[s], params)).first;
        return it->second;
    };
    return smoothing_report(
        eta, eta_prime, gamma, gamma_prime, samples.size(), params, std::move(tau_list),
        [&](std::size_t s, double t, double e) { return lq_norm(get(s, t), e, params.d); },
        [&](std::size_t s, double e) { return lq_norm(samples[s], e, params.d); });
}

void write_smoothing_json(std::ostream& os, const SmoothingReport& r) {
    nlohmann::ordered_json j;
    j["eta"] = r.eta;
    j["eta_prime"] = r.eta_prime;
    j["tau_list"] = r.tau_list;
    j["ratios"] = r.ratios;
    j["fitted_M"] = r.fitted_M;
    j["pass"] = r.pass;
    os << j.dump(2) << '\n';
}

}  // namespace nlh
