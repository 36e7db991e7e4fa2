#include "pemc/payoffs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "pemc/stats.hpp"
#include "pemc/surfaces.hpp"

namespace pemc::payoffs {

namespace {

void check_observations(std::span<const double> path, const PayoffSpec& spec,
                        std::size_t min_count) {
    if (spec.obs_indices.size() < min_count)
        throw std::invalid_argument("payoff: too few observation dates");
    std::size_t prev = 0;
    bool first = true;
    for (std::size_t idx : spec.obs_indices) {
        if (idx >= path.size())
            throw std::invalid_argument("payoff: observation index beyond path end");
        if (!first && idx <= prev)
            throw std::invalid_argument("payoff: observation indices must be strictly increasing");
        prev = idx;
        first = false;
    }
}

}  // namespace

std::vector<std::size_t> PayoffSpec::every_step(std::size_t n_steps, bool include_start) {
    std::vector<std::size_t> idx;
    idx.reserve(n_steps + (include_start ? 1 : 0));
    for (std::size_t i = include_start ? 0 : 1; i <= n_steps; ++i) idx.push_back(i);
    return idx;
}

double asian_arithmetic(std::span<const double> path, const PayoffSpec& spec) {
    check_observations(path, spec, 1);
    double acc = 0.0;
    for (std::size_t idx : spec.obs_indices) acc += path[idx];
    return std::max(0.0, acc / static_cast<double>(spec.obs_indices.size()) - spec.strike);
}

double asian_geometric(std::span<const double> path, const PayoffSpec& spec) {
    check_observations(path, spec, 1);
    double acc = 0.0;
    for (std::size_t idx : spec.obs_indices) {
        if (!(path[idx] > 0.0))
            throw std::domain_error("asian_geometric: nonpositive price");
        acc += std::log(path[idx]);
    }
    return std::max(0.0,
                    std::exp(acc / static_cast<double>(spec.obs_indices.size())) - spec.strike);
}

double lookback_floating(std::span<const double> path, const PayoffSpec& spec) {
    check_observations(path, spec, 1);
    double m = path[spec.obs_indices.front()];
    for (std::size_t idx : spec.obs_indices) m = std::min(m, path[idx]);
    return std::max(0.0, path[spec.obs_indices.back()] - m);
}

double variance_swap(std::span<const double> path, const PayoffSpec& spec) {
    check_observations(path, spec, 2);
    double acc = 0.0;
    for (std::size_t k = 1; k < spec.obs_indices.size(); ++k) {
        const double s_prev = path[spec.obs_indices[k - 1]];
        const double s_now = path[spec.obs_indices[k]];
        if (!(s_prev > 0.0) || !(s_now > 0.0))
            throw std::domain_error("variance_swap: nonpositive price");
        const double lr = std::log(s_now / s_prev);
        acc += lr * lr;
    }
    const double n_returns = static_cast<double>(spec.obs_indices.size() - 1);
    return spec.annualization / n_returns * acc - spec.strike;
}

double evaluate(std::span<const double> path, const PayoffSpec& spec) {
    switch (spec.kind) {
        case PayoffKind::AsianArithmetic: return asian_arithmetic(path, spec);
        case PayoffKind::AsianGeometric: return asian_geometric(path, spec);
        case PayoffKind::LookbackFloating: return lookback_floating(path, spec);
        case PayoffKind::VarianceSwap: return variance_swap(path, spec);
        case PayoffKind::Swaption:
            throw std::invalid_argument("evaluate: swaption needs a forward curve, not a path");
    }
    throw std::logic_error("evaluate: bad PayoffKind");
}

double swaption_reference_rate(const ParameterPoint& theta) {
    if (theta.fixed_rate != 0.0) return theta.fixed_rate;
    const double t_final = theta.swap_start + theta.swap_payments * theta.swap_dt;
    double acc = 0.0;
    for (int i = 0; i < theta.swap_payments; ++i) {
        const double ti = theta.swap_start + i * theta.swap_dt;
        acc += theta.hjm ? [&] {
            // payment dates land on grid nodes when the grid spacing divides dt'
            const double h = theta.hjm->spacing();
            const auto j = static_cast<std::size_t>(std::lround(ti / h));
            if (j >= theta.hjm->fwd0.size())
                throw std::invalid_argument("swaption_reference_rate: curve too short");
            return theta.hjm->fwd0[j];
        }()
                         : surfaces::hjm_forward_base(theta.f0, theta.c_f, theta.alpha_f, ti);
    }
    return std::exp(-acc / (t_final - theta.swap_start));
}

double swap_value_at_expiry(std::span<const double> forward_curve, double spacing,
                            const ParameterPoint& theta) {
    if (!(spacing > 0.0)) throw std::invalid_argument("swap_value_at_expiry: spacing must be > 0");
    const auto steps_per_payment =
        static_cast<std::size_t>(std::lround(theta.swap_dt / spacing));
    if (steps_per_payment == 0 ||
        std::abs(steps_per_payment * spacing - theta.swap_dt) > 1e-9)
        throw std::invalid_argument("swap_value_at_expiry: spacing must divide the payment interval");
    const std::size_t last = steps_per_payment * static_cast<std::size_t>(theta.swap_payments);
    if (forward_curve.size() < last + 1)
        throw std::invalid_argument("swap_value_at_expiry: curve too short for the swap tenor");

    const double rate = swaption_reference_rate(theta);
    double integral = 0.0;  // sum f * spacing from t'_0 to the current node
    double annuity = 0.0;
    double bond_last = 1.0;
    for (std::size_t k = 1; k <= last; ++k) {
        integral += forward_curve[k - 1] * spacing;
        if (k % steps_per_payment == 0) {
            bond_last = std::exp(-integral);
            annuity += bond_last * theta.swap_dt;
        }
    }
    return theta.notional * (rate * annuity + bond_last - 1.0);
}

double swaption_payoff(std::span<const double> forward_curve, double spacing,
                       const ParameterPoint& theta) {
    return std::max(0.0, swap_value_at_expiry(forward_curve, spacing, theta));
}

double geometric_asian_closed_form(const ParameterPoint& theta) {
    if (theta.kind != ModelKind::Gbm)
        throw std::invalid_argument("geometric_asian_closed_form: GBM only");
    theta.validate();
    const double n = static_cast<double>(theta.n_obs);
    const double t_obs = theta.horizon;
    const double mu_g = std::log(theta.s0) +
                        (theta.rate - 0.5 * theta.sigma * theta.sigma) * t_obs * (n + 1.0) /
                            (2.0 * n);
    const double var_g =
        theta.sigma * theta.sigma * t_obs * (n + 1.0) * (2.0 * n + 1.0) / (6.0 * n * n);
    const double disc = std::exp(-theta.rate * theta.horizon);
    const double sd_g = std::sqrt(var_g);
    if (sd_g == 0.0) return disc * std::max(0.0, std::exp(mu_g) - theta.strike);
    if (!(theta.strike > 0.0)) return disc * (std::exp(mu_g + 0.5 * var_g) - theta.strike);
    const double d2 = (mu_g - std::log(theta.strike)) / sd_g;
    const double d1 = d2 + sd_g;
    return disc * (std::exp(mu_g + 0.5 * var_g) * stats::normal_cdf(d1) -
                   theta.strike * stats::normal_cdf(d2));
}

}  // namespace pemc::payoffs
