#pragma once

#include <functional>
#include <string>
#include <utility>

#include "pemc/params.hpp"
#include "pemc/rng.hpp"

namespace pemc::predictor {
struct PredictorModel;
}

namespace pemc::engine {

struct PemcEstimate {
    double estimate = 0.0;
    long n = 0;                 // coupled draws
    long N = 0;                 // marginal draws (0 for plain MC)
    double sigma2_fg = 0.0;     // sample variance of f - a*g on coupled draws
    double sigma2_g = 0.0;      // sample variance of a*g on marginal draws
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double alpha = 0.05;
    double coupled_ns = 0.0;    // median per-sample wall cost
    double marginal_ns = 0.0;
    bool theta_warning = false; // theta outside the model's training space

    std::string to_json() const;
};

/// Returns (f(Y), g(X)) from one coupled draw.
using CoupledFn = std::function<std::pair<double, double>(pemc::rng::RngStream&)>;
/// Returns g(X~) from one marginal draw.
using MarginalFn = std::function<double(pemc::rng::RngStream&)>;
/// Returns f(Y) from one draw.
using PayoffFn = std::function<double(pemc::rng::RngStream&)>;

PemcEstimate standard_mc(long n, const PayoffFn& payoff, pemc::rng::RngStream& stream,
                         double alpha = 0.05);

/// PEMC(a) = (1/n) sum(f_i - a*g_i) + a*(1/N) sum(g~_j); a = 1 recovers the
/// plain PEMC estimator. Unbiased for E[f] for any fixed a.
PemcEstimate pemc_estimate(long n, long N, const CoupledFn& coupled,
                           const MarginalFn& marginal, pemc::rng::RngStream& coupled_stream,
                           pemc::rng::RngStream& marginal_stream, double alpha = 0.05,
                           double a = 1.0);

/// Symmetric normal interval PEMC +- z_{1-alpha/2} * sqrt(s2_fg/n + s2_g/N).
std::pair<double, double> confidence_interval(const PemcEstimate& estimate, double alpha);

struct AllocationPlan {
    long n = 0;
    long N = 0;
    double sigma_fg = 0.0, sigma_g = 0.0, c_fg = 0.0, c_g = 0.0, budget = 0.0;
    double variance = 0.0;  // sigma_fg^2/n + sigma_g^2/N at the chosen plan
};

/// Budgeted split per the n/N = (sigma_fg/sigma_g)*sqrt(c_g/c_fg) rule, with
/// integer rounding that scans the neighborhood of the continuous optimum and
/// keeps the feasible variance minimizer.
AllocationPlan optimal_allocation(double sigma_fg, double sigma_g, double c_fg, double c_g,
                                  double budget);

/// Cost-aware variance ratio Var(PEMC)/Var(MC) under optimal allocation for
/// an ideal predictor, r(rho, c) with c = c_g/c_f. Continuity limits: r(0,c)=1,
/// r(1,c)=c.
double variance_ratio_r(double rho, double c);

/// a* = cov_fg / ((n/N + 1) * var_g).
double cv_coefficient(double cov_fg, double var_g, long n, long N);

/// Classical geometric control variate for the GBM arithmetic Asian:
/// (1/n) sum(P_A - P_G) + exp(rT) * closed-form geometric price. Estimates the
/// undiscounted E[P_A], consistent with the other estimators.
PemcEstimate classical_cv_estimate(const ParameterPoint& theta, long n,
                                   pemc::rng::RngStream& stream, double alpha = 0.05);

struct CovarianceProbe {
    double sigma_fg = 0.0;   // sd of f - g
    double sigma_g = 0.0;
    double sigma_f = 0.0;
    double rho_hat = 0.0;    // corr(f, g) via the covariance identity
    double cov_identity = 0.0;  // (s2_f + s2_g - s2_fg) / 2
    double c_fg_ns = 0.0;    // median per-draw costs
    double c_g_ns = 0.0;
    double c_hat = 0.0;      // c_g / c_fg
    bool degenerate = false; // zero-variance probe
};

CovarianceProbe empirical_covariance_probe(const CoupledFn& coupled, const MarginalFn& marginal,
                                           long probe_n, pemc::rng::RngStream& stream);

}  // namespace pemc::engine
