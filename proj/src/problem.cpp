#include "pemc/problem.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

#include "pemc/surfaces.hpp"

namespace pemc::problem {

payoffs::PayoffSpec make_payoff_spec(const ParameterPoint& theta) {
    payoffs::PayoffSpec spec;
    const auto n = static_cast<std::size_t>(std::lround(theta.horizon / theta.dt));
    switch (theta.kind) {
        case ModelKind::Gbm:
        case ModelKind::Heston:
            spec.kind = payoffs::PayoffKind::AsianArithmetic;
            spec.strike = theta.strike;
            spec.obs_indices = payoffs::PayoffSpec::every_step(n, false);
            break;
        case ModelKind::Slv:
            spec.kind = payoffs::PayoffKind::VarianceSwap;
            spec.strike = theta.strike;
            spec.obs_indices = payoffs::PayoffSpec::every_step(n, true);
            spec.annualization = 252.0;
            break;
        case ModelKind::Hjm:
        case ModelKind::Ed:
            throw std::invalid_argument("make_payoff_spec: model has no path payoff spec");
    }
    return spec;
}

ParameterPoint with_default_grids(ParameterPoint theta) {
    if (theta.kind == ModelKind::Slv && !theta.surface) {
        pemc::rng::RngStream unused(0, 0);
        theta.surface = std::make_shared<surfaces::VolSurfaceGrid>(
            surfaces::make_slv_surface(theta.s0, theta.horizon, theta.dt, 0.0, unused));
    }
    if (theta.kind == ModelKind::Hjm && !theta.hjm) {
        pemc::rng::RngStream unused(0, 0);
        const double t_final = theta.swap_start + theta.swap_payments * theta.swap_dt;
        theta.hjm = std::make_shared<surfaces::HjmGrids>(
            surfaces::make_hjm_grids(theta.sigma0, theta.alpha_sigma, theta.f0, theta.c_f,
                                     theta.alpha_f, t_final, theta.dt, false, unused));
    }
    return theta;
}

ParameterPoint sample_parameter_point(const ParameterSpaceSpec& space,
                                      pemc::rng::RngStream& stream) {
    ParameterPoint theta = space.base;
    for (const auto& [name, range] : space.ranges) {
        if (range.integer) {
            const auto lo = static_cast<long>(std::lround(range.lo));
            const auto hi = static_cast<long>(std::lround(range.hi));
            if (hi < lo) throw std::invalid_argument("sample_parameter_point: bad range");
            const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
            const auto draw = static_cast<long>(stream.next_u64() % span);
            set_param(theta, name, static_cast<double>(lo + draw));
        } else {
            set_param(theta, name, stream.uniform(range.lo, range.hi));
        }
    }
    if (theta.kind == ModelKind::Slv) {
        theta.surface = std::make_shared<surfaces::VolSurfaceGrid>(surfaces::make_slv_surface(
            theta.s0, theta.horizon, theta.dt, space.surface_noise, stream));
    } else if (theta.kind == ModelKind::Hjm) {
        const double t_final = theta.swap_start + theta.swap_payments * theta.swap_dt;
        theta.hjm = std::make_shared<surfaces::HjmGrids>(
            surfaces::make_hjm_grids(theta.sigma0, theta.alpha_sigma, theta.f0, theta.c_f,
                                     theta.alpha_f, t_final, theta.dt, space.hjm_grid_noise,
                                     stream));
    }
    theta.validate();
    return theta;
}

CoupledDraw simulate_payoff(const ParameterPoint& theta, pemc::rng::RngStream& stream) {
    CoupledDraw out;
    switch (theta.kind) {
        case ModelKind::Gbm: {
            auto sample = models::simulate_gbm(theta, theta.feature_dim, stream);
            out.payoff = payoffs::evaluate(sample.path, make_payoff_spec(theta));
            out.x = std::move(sample.features);
            break;
        }
        case ModelKind::Heston: {
            auto sample = models::simulate_heston(theta, stream);
            out.payoff = payoffs::evaluate(sample.path, make_payoff_spec(theta));
            out.x = std::move(sample.features);
            break;
        }
        case ModelKind::Slv: {
            if (!theta.surface) throw std::invalid_argument("simulate_payoff: missing surface");
            auto sample = models::simulate_slv(theta, *theta.surface, stream);
            out.payoff = payoffs::evaluate(sample.path, make_payoff_spec(theta));
            out.x = std::move(sample.features);
            break;
        }
        case ModelKind::Hjm: {
            if (!theta.hjm) throw std::invalid_argument("simulate_payoff: missing HJM grids");
            auto sample = models::simulate_hjm(theta, *theta.hjm, stream);
            out.payoff = payoffs::swaption_payoff(sample.path, theta.dt, theta);
            out.x = std::move(sample.features);
            break;
        }
        case ModelKind::Ed: {
            const auto cfg = ed::EdConfig::from_theta(theta);
            const auto week = ed::simulate_week(cfg, stream);
            out.payoff = static_cast<double>(week.deaths);
            out.x.assign(week.features.begin(), week.features.end());
            break;
        }
    }
    return out;
}

std::vector<std::vector<double>> sample_x(const ParameterPoint& theta, std::size_t count,
                                          pemc::rng::RngStream& stream) {
    if (theta.kind == ModelKind::Ed) {
        const auto cfg = ed::EdConfig::from_theta(theta);
        const auto feats = ed::sample_ed_feature_marginal(cfg, count, stream);
        std::vector<std::vector<double>> out;
        out.reserve(count);
        for (const auto& f : feats) out.emplace_back(f.begin(), f.end());
        return out;
    }
    return models::sample_feature_marginal(theta, count, stream);
}

std::size_t x_dimension(const ParameterPoint& theta) {
    switch (theta.kind) {
        case ModelKind::Gbm: return static_cast<std::size_t>(theta.feature_dim);
        case ModelKind::Heston:
        case ModelKind::Slv: return 2;
        case ModelKind::Hjm: return 1;
        case ModelKind::Ed: return 12;
    }
    throw std::logic_error("x_dimension: bad ModelKind");
}

}  // namespace pemc::problem
