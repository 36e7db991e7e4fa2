#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pemc/params.hpp"

namespace pemc::payoffs {

enum class PayoffKind {
    AsianArithmetic,
    AsianGeometric,
    LookbackFloating,
    VarianceSwap,
    Swaption
};

/// Payoff contract evaluated on a simulated path. `obs_indices` index into the
/// path (path[0] = S_0); they must be strictly increasing and in range, or the
/// evaluation throws. For the variance swap the first index is the initial
/// fixing, so the number of accrued returns is obs_indices.size() - 1.
struct PayoffSpec {
    PayoffKind kind = PayoffKind::AsianArithmetic;
    double strike = 0.0;
    std::vector<std::size_t> obs_indices;
    double annualization = 252.0;  // variance swap only

    static std::vector<std::size_t> every_step(std::size_t n_steps, bool include_start);
};

/// All path payoffs are undiscounted; discounting is applied by callers where
/// a present value is wanted.
double asian_arithmetic(std::span<const double> path, const PayoffSpec& spec);
double asian_geometric(std::span<const double> path, const PayoffSpec& spec);

/// Terminal price minus the running minimum over the observation dates,
/// max(S_T - min_t S_t, 0).
double lookback_floating(std::span<const double> path, const PayoffSpec& spec);

/// (annualization / n_D) * sum of squared log returns between consecutive
/// observations, minus the strike (in variance units).
double variance_swap(std::span<const double> path, const PayoffSpec& spec);

double evaluate(std::span<const double> path, const PayoffSpec& spec);

/// Payer-swaption payoff at expiry t'_0 given the instantaneous forward curve
/// f(t'_0, .) sampled on a uniform maturity grid that starts at t'_0 with the
/// given spacing. Bonds are B(t'_0, t) = exp(-sum of f * spacing) over the
/// grid points in [t'_0, t). The fixed rate defaults to the par-like rate
/// derived from theta's initial curve when theta.fixed_rate == 0.
double swaption_payoff(std::span<const double> forward_curve, double spacing,
                       const ParameterPoint& theta);

/// Underlying swap value at expiry (can be negative); payoff = max(0, value).
double swap_value_at_expiry(std::span<const double> forward_curve, double spacing,
                            const ParameterPoint& theta);

/// Reference fixed rate derived from the initial curve:
/// R = exp(-sum_{i=0}^{n_p-1} f(0, t'_0 + i * dt') / (T* - t'_0)) with
/// T* = t'_0 + n_p * dt'.
double swaption_reference_rate(const ParameterPoint& theta);

/// Discounted closed-form price of the geometric-average Asian call under GBM
/// with n equally spaced observations over [0, theta.horizon].
double geometric_asian_closed_form(const ParameterPoint& theta);

}  // namespace pemc::payoffs
