#pragma once

#include <span>
#include <vector>

#include "pemc/params.hpp"
#include "pemc/rng.hpp"

namespace pemc::models {

/// One coupled draw (Y, X): the simulated path together with the feature
/// vector X = phi(Y) computed from the same randomness.
struct CoupledSample {
    std::vector<double> path;        // asset path S_0..S_n, or forward curve at t'_0
    std::vector<double> aux_path;    // nu path (Heston/SLV), short-rate history (HJM)
    std::vector<double> increments;  // driving increments per step; interleaved
                                     // (dW^S, dW^nu) pairs for two-driver models
    std::vector<double> features;    // X
    double discount_integral = 0.0;  // HJM: sum f(t_i, t_i) * dt up to t'_0
};

/// Long-run OU level eta_t = -delta^2 / (2 kappa) * (1 + exp(-2 kappa t)),
/// chosen so that E[exp(2 nu_t)] = 1 when nu_0 = 0.
double slv_eta(double delta, double kappa, double t);

/// Exact log-Euler GBM path with n = horizon/dt steps. X has `feature_dim`
/// entries, each the sum of Brownian increments over one of `feature_dim`
/// equal consecutive blocks of steps.
CoupledSample simulate_gbm(const ParameterPoint& theta, int feature_dim,
                           pemc::rng::RngStream& stream);

/// Full-truncation Euler for the variance, exact log-Euler for the asset given
/// the frozen per-step variance. X = (W_T^S, W_T^nu).
CoupledSample simulate_heston(const ParameterPoint& theta, pemc::rng::RngStream& stream);

/// Stochastic local volatility: nu is an OU factor multiplying the
/// interpolated surface vol, sigma_t = sigma_hat(S_t, t) * exp(nu_{t+dt}).
/// X = (W_T^S, W_T^nu).
CoupledSample simulate_slv(const ParameterPoint& theta, const surfaces::VolSurfaceGrid& surface,
                           pemc::rng::RngStream& stream);

/// One-factor HJM forward-curve evolution to t'_0 under the discrete
/// no-arbitrage drift. path holds f(t'_0, T) for grid maturities T >= t'_0;
/// X = (W_{t'_0},), the terminal value of the single driving Brownian motion.
CoupledSample simulate_hjm(const ParameterPoint& theta, const surfaces::HjmGrids& grids,
                           pemc::rng::RngStream& stream);

/// Discrete no-arbitrage drifts for one row of the volatility grid.
/// vol_row[k] = sigma(t, t + k*h); returns mu[k] = vol_row[k] * I_k where
/// I_k is the trapezoid approximation of the integral of sigma(t, .) from
/// t to t + k*h (so mu[0] = 0 for the degenerate interval).
std::vector<double> hjm_discrete_drift(std::span<const double> vol_row, double spacing);

/// Draws `count` independent samples of X from its marginal law (no paths).
/// Dispatches on theta.kind; feature layout matches the coupled simulators.
std::vector<std::vector<double>> sample_feature_marginal(const ParameterPoint& theta,
                                                         std::size_t count,
                                                         pemc::rng::RngStream& stream);

}  // namespace pemc::models
