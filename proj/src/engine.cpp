#include "pemc/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "pemc/models.hpp"
#include "pemc/payoffs.hpp"
#include "pemc/problem.hpp"
#include "pemc/stats.hpp"

namespace pemc::engine {

namespace {

double z_value(double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw std::domain_error("confidence level: alpha must be in (0,1]");
    if (alpha == 1.0) return 0.0;
    return stats::normal_quantile(1.0 - alpha / 2.0);
}

double median_of(std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    const auto mid = xs.size() / 2;
    std::nth_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(mid), xs.end());
    return xs[mid];
}

using clock_type = std::chrono::steady_clock;

}  // namespace

std::string PemcEstimate::to_json() const {
    nlohmann::json j;
    j["estimate"] = estimate;
    j["n"] = n;
    j["N"] = N;
    j["sigma2_fg"] = sigma2_fg;
    j["sigma2_g"] = sigma2_g;
    j["ci"] = {ci_lo, ci_hi};
    j["alpha"] = alpha;
    j["costs"] = {{"coupled_ns", coupled_ns}, {"marginal_ns", marginal_ns}};
    if (theta_warning) j["theta_warning"] = true;
    return j.dump();
}

PemcEstimate standard_mc(long n, const PayoffFn& payoff, pemc::rng::RngStream& stream,
                         double alpha) {
    if (n < 2) throw std::invalid_argument("standard_mc: n must be >= 2");
    std::vector<double> fs(static_cast<std::size_t>(n));
    std::vector<double> costs(fs.size());
    for (std::size_t i = 0; i < fs.size(); ++i) {
        const auto t0 = clock_type::now();
        fs[i] = payoff(stream);
        costs[i] = std::chrono::duration<double, std::nano>(clock_type::now() - t0).count();
    }
    PemcEstimate est;
    est.n = n;
    est.N = 0;
    est.alpha = alpha;
    est.estimate = stats::mean(fs);
    est.sigma2_fg = stats::variance(fs);
    est.sigma2_g = 0.0;
    est.coupled_ns = median_of(costs);
    const double hw = z_value(alpha) * std::sqrt(est.sigma2_fg / static_cast<double>(n));
    est.ci_lo = est.estimate - hw;
    est.ci_hi = est.estimate + hw;
    return est;
}

PemcEstimate pemc_estimate(long n, long N, const CoupledFn& coupled, const MarginalFn& marginal,
                           pemc::rng::RngStream& coupled_stream,
                           pemc::rng::RngStream& marginal_stream, double alpha, double a) {
    if (n < 2 || N < 2) throw std::invalid_argument("pemc_estimate: n and N must be >= 2");
    std::vector<double> diffs(static_cast<std::size_t>(n));
    std::vector<double> costs_c(diffs.size());
    for (std::size_t i = 0; i < diffs.size(); ++i) {
        const auto t0 = clock_type::now();
        const auto [f, g] = coupled(coupled_stream);
        diffs[i] = f - a * g;
        costs_c[i] = std::chrono::duration<double, std::nano>(clock_type::now() - t0).count();
    }
    std::vector<double> gs(static_cast<std::size_t>(N));
    std::vector<double> costs_m(gs.size());
    for (std::size_t j = 0; j < gs.size(); ++j) {
        const auto t0 = clock_type::now();
        gs[j] = a * marginal(marginal_stream);
        costs_m[j] = std::chrono::duration<double, std::nano>(clock_type::now() - t0).count();
    }
    PemcEstimate est;
    est.n = n;
    est.N = N;
    est.alpha = alpha;
    est.estimate = stats::mean(diffs) + stats::mean(gs);
    est.sigma2_fg = stats::variance(diffs);
    est.sigma2_g = stats::variance(gs);
    est.coupled_ns = median_of(costs_c);
    est.marginal_ns = median_of(costs_m);
    const auto [lo, hi] = confidence_interval(est, alpha);
    est.ci_lo = lo;
    est.ci_hi = hi;
    return est;
}

std::pair<double, double> confidence_interval(const PemcEstimate& estimate, double alpha) {
    if (estimate.n < 1) throw std::invalid_argument("confidence_interval: need n >= 1");
    double var = estimate.sigma2_fg / static_cast<double>(estimate.n);
    if (estimate.N > 0) var += estimate.sigma2_g / static_cast<double>(estimate.N);
    const double hw = z_value(alpha) * std::sqrt(var);
    return {estimate.estimate - hw, estimate.estimate + hw};
}

AllocationPlan optimal_allocation(double sigma_fg, double sigma_g, double c_fg, double c_g,
                                  double budget) {
    if (!(sigma_fg > 0.0) || !(sigma_g > 0.0) || !(c_fg > 0.0) || !(c_g > 0.0))
        throw std::invalid_argument("optimal_allocation: inputs must be > 0");
    if (budget < c_fg + c_g)
        throw std::invalid_argument("optimal_allocation: budget below one of each sample");

    // Continuous optimum: n/N = (sigma_fg/sigma_g) * sqrt(c_g/c_fg), spent to
    // the full budget.
    const double ratio = sigma_fg / sigma_g * std::sqrt(c_g / c_fg);
    const double n_star = budget * ratio / (ratio * c_fg + c_g);

    AllocationPlan best;
    best.sigma_fg = sigma_fg;
    best.sigma_g = sigma_g;
    best.c_fg = c_fg;
    best.c_g = c_g;
    best.budget = budget;
    best.variance = std::numeric_limits<double>::infinity();

    // The floor on N makes the discrete objective locally jagged, so a narrow
    // window around n_star can miss the true integer optimum. Scan everything
    // when that is affordable; otherwise fall back to the neighborhood.
    const long n_max = static_cast<long>((budget - c_g) / c_fg);
    long lo = 1, hi = n_max;
    if (n_max > 100000) {
        lo = std::max(1L, static_cast<long>(std::floor(n_star)) - 1000);
        hi = std::min(n_max, static_cast<long>(std::ceil(n_star)) + 1000);
    }
    for (long n = lo; n <= hi; ++n) {
        const long N = static_cast<long>((budget - static_cast<double>(n) * c_fg) / c_g);
        if (N < 1) continue;
        const double var = sigma_fg * sigma_fg / static_cast<double>(n) +
                           sigma_g * sigma_g / static_cast<double>(N);
        if (var < best.variance) {
            best.variance = var;
            best.n = n;
            best.N = N;
        }
    }
    if (best.n == 0) throw std::invalid_argument("optimal_allocation: no feasible plan");
    return best;
}

double variance_ratio_r(double rho, double c) {
    if (rho < 0.0 || rho > 1.0) throw std::domain_error("variance_ratio_r: rho must be in [0,1]");
    if (!(c > 0.0)) throw std::domain_error("variance_ratio_r: c must be > 0");
    if (rho == 0.0) return 1.0;
    if (rho == 1.0) return c;
    const double s = std::sqrt(1.0 - rho * rho);
    return (1.0 - rho * rho) * (1.0 + rho / s * std::sqrt(c)) +
           rho * rho * (s / rho * std::sqrt(c) + c);
}

double cv_coefficient(double cov_fg, double var_g, long n, long N) {
    if (!(var_g > 0.0)) throw std::domain_error("cv_coefficient: var_g must be > 0");
    if (n < 1 || N < 1) throw std::invalid_argument("cv_coefficient: n and N must be >= 1");
    const double ratio = static_cast<double>(n) / static_cast<double>(N);
    return cov_fg / ((ratio + 1.0) * var_g);
}

PemcEstimate classical_cv_estimate(const ParameterPoint& theta, long n,
                                   pemc::rng::RngStream& stream, double alpha) {
    if (theta.kind != ModelKind::Gbm)
        throw std::invalid_argument("classical_cv_estimate: GBM only");
    if (n < 2) throw std::invalid_argument("classical_cv_estimate: n must be >= 2");
    const auto spec = problem::make_payoff_spec(theta);
    auto geo_spec = spec;
    geo_spec.kind = payoffs::PayoffKind::AsianGeometric;
    const double geo_mean = std::exp(theta.rate * theta.horizon) *
                            payoffs::geometric_asian_closed_form(theta);
    std::vector<double> residuals(static_cast<std::size_t>(n));
    std::vector<double> costs(residuals.size());
    for (auto i = std::size_t{0}; i < residuals.size(); ++i) {
        const auto t0 = clock_type::now();
        const auto sample = models::simulate_gbm(theta, theta.feature_dim, stream);
        residuals[i] =
            payoffs::evaluate(sample.path, spec) - payoffs::evaluate(sample.path, geo_spec);
        costs[i] = std::chrono::duration<double, std::nano>(clock_type::now() - t0).count();
    }
    PemcEstimate est;
    est.n = n;
    est.N = 0;
    est.alpha = alpha;
    est.estimate = stats::mean(residuals) + geo_mean;
    est.sigma2_fg = stats::variance(residuals);
    est.coupled_ns = median_of(costs);
    const double hw = z_value(alpha) * std::sqrt(est.sigma2_fg / static_cast<double>(n));
    est.ci_lo = est.estimate - hw;
    est.ci_hi = est.estimate + hw;
    return est;
}

CovarianceProbe empirical_covariance_probe(const CoupledFn& coupled, const MarginalFn& marginal,
                                           long probe_n, pemc::rng::RngStream& stream) {
    if (probe_n < 30) throw std::invalid_argument("empirical_covariance_probe: probe_n >= 30");
    std::vector<double> fs(static_cast<std::size_t>(probe_n));
    std::vector<double> gs(fs.size());
    std::vector<double> diffs(fs.size());
    std::vector<double> costs_c(fs.size()), costs_m(fs.size());
    for (std::size_t i = 0; i < fs.size(); ++i) {
        const auto t0 = clock_type::now();
        const auto [f, g] = coupled(stream);
        costs_c[i] = std::chrono::duration<double, std::nano>(clock_type::now() - t0).count();
        fs[i] = f;
        gs[i] = g;
        diffs[i] = f - g;
    }
    for (std::size_t i = 0; i < costs_m.size(); ++i) {
        const auto t0 = clock_type::now();
        (void)marginal(stream);
        costs_m[i] = std::chrono::duration<double, std::nano>(clock_type::now() - t0).count();
    }
    CovarianceProbe probe;
    const double s2_f = stats::variance(fs);
    const double s2_g = stats::variance(gs);
    const double s2_fg = stats::variance(diffs);
    probe.sigma_f = std::sqrt(s2_f);
    probe.sigma_g = std::sqrt(s2_g);
    probe.sigma_fg = std::sqrt(s2_fg);
    probe.cov_identity = 0.5 * (s2_f + s2_g - s2_fg);
    probe.degenerate = s2_f <= 0.0 || s2_g <= 0.0;
    probe.rho_hat =
        probe.degenerate ? 0.0 : probe.cov_identity / (probe.sigma_f * probe.sigma_g);
    probe.c_fg_ns = median_of(costs_c);
    probe.c_g_ns = median_of(costs_m);
    probe.c_hat = probe.c_fg_ns > 0.0 ? probe.c_g_ns / probe.c_fg_ns : 0.0;
    return probe;
}

}  // namespace pemc::engine
