#include "pemc/models.hpp"

#include <cmath>
#include <stdexcept>

#include "pemc/surfaces.hpp"

namespace pemc::models {

namespace {

std::size_t step_count(const ParameterPoint& theta) {
    const double ratio = theta.horizon / theta.dt;
    const auto n = static_cast<std::size_t>(std::lround(ratio));
    if (n == 0 || std::abs(ratio - static_cast<double>(n)) > 1e-6)
        throw std::invalid_argument("simulate: dt must divide the horizon");
    return n;
}

}  // namespace

double slv_eta(double delta, double kappa, double t) {
    if (!(kappa > 0.0)) throw std::domain_error("slv_eta: kappa must be > 0");
    return -delta * delta / (2.0 * kappa) * (1.0 + std::exp(-2.0 * kappa * t));
}

CoupledSample simulate_gbm(const ParameterPoint& theta, int feature_dim,
                           pemc::rng::RngStream& stream) {
    const std::size_t n = step_count(theta);
    if (feature_dim < 1 || n % static_cast<std::size_t>(feature_dim) != 0)
        throw std::invalid_argument("simulate_gbm: feature_dim must divide the step count");
    const std::size_t block = n / static_cast<std::size_t>(feature_dim);

    CoupledSample out;
    out.path.resize(n + 1);
    out.increments.resize(n);
    out.features.assign(static_cast<std::size_t>(feature_dim), 0.0);
    out.path[0] = theta.s0;
    const double drift = (theta.rate - 0.5 * theta.sigma * theta.sigma) * theta.dt;
    const double sqrt_dt = std::sqrt(theta.dt);
    for (std::size_t i = 0; i < n; ++i) {
        const double dw = sqrt_dt * stream.normal();
        out.increments[i] = dw;
        out.features[i / block] += dw;
        out.path[i + 1] = out.path[i] * std::exp(drift + theta.sigma * dw);
    }
    return out;
}

CoupledSample simulate_heston(const ParameterPoint& theta, pemc::rng::RngStream& stream) {
    const std::size_t n = step_count(theta);
    CoupledSample out;
    out.path.resize(n + 1);
    out.aux_path.resize(n + 1);
    out.increments.resize(2 * n);
    out.path[0] = theta.s0;
    out.aux_path[0] = theta.nu0;
    double ws = 0.0, wv = 0.0;
    double nu = theta.nu0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto [dws, dwv] = pemc::rng::gaussian_pair(theta.rho, theta.dt, stream);
        out.increments[2 * i] = dws;
        out.increments[2 * i + 1] = dwv;
        const double nu_plus = std::max(nu, 0.0);
        out.path[i + 1] =
            out.path[i] *
            std::exp((theta.rate - 0.5 * nu_plus) * theta.dt + std::sqrt(nu_plus) * dws);
        nu += theta.kappa * (theta.eta - nu_plus) * theta.dt +
              theta.delta * std::sqrt(nu_plus) * dwv;
        out.aux_path[i + 1] = nu;
        ws += dws;
        wv += dwv;
    }
    out.features = {ws, wv};
    return out;
}

CoupledSample simulate_slv(const ParameterPoint& theta, const surfaces::VolSurfaceGrid& surface,
                           pemc::rng::RngStream& stream) {
    const std::size_t n = step_count(theta);
    CoupledSample out;
    out.path.resize(n + 1);
    out.aux_path.resize(n + 1);
    out.increments.resize(2 * n);
    out.path[0] = theta.s0;
    out.aux_path[0] = theta.nu0;
    double ws = 0.0, wv = 0.0;
    double nu = theta.nu0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * theta.dt;
        const auto [dws, dwv] = pemc::rng::gaussian_pair(theta.rho, theta.dt, stream);
        out.increments[2 * i] = dws;
        out.increments[2 * i + 1] = dwv;
        nu += theta.kappa * (slv_eta(theta.delta, theta.kappa, t) - nu) * theta.dt +
              theta.delta * dwv;
        const double vol = surface.interpolate(out.path[i], t) * std::exp(nu);
        out.path[i + 1] =
            out.path[i] * std::exp((theta.rate - 0.5 * vol * vol) * theta.dt + vol * dws);
        out.aux_path[i + 1] = nu;
        ws += dws;
        wv += dwv;
    }
    out.features = {ws, wv};
    return out;
}

std::vector<double> hjm_discrete_drift(std::span<const double> vol_row, double spacing) {
    if (vol_row.empty()) throw std::invalid_argument("hjm_discrete_drift: empty vol row");
    if (!(spacing > 0.0)) throw std::invalid_argument("hjm_discrete_drift: spacing must be > 0");
    std::vector<double> mu(vol_row.size());
    mu[0] = 0.0;
    double integral = 0.0;
    for (std::size_t k = 1; k < vol_row.size(); ++k) {
        integral += 0.5 * spacing * (vol_row[k - 1] + vol_row[k]);
        mu[k] = vol_row[k] * integral;
    }
    return mu;
}

CoupledSample simulate_hjm(const ParameterPoint& theta, const surfaces::HjmGrids& grids,
                           pemc::rng::RngStream& stream) {
    const double h = grids.spacing();
    if (std::abs(h - theta.dt) > 1e-9)
        throw std::invalid_argument("simulate_hjm: grid spacing disagrees with theta.dt");
    const auto m = static_cast<std::size_t>(std::lround(theta.swap_start / h));
    const std::size_t n_grid = grids.times.size();
    if (m == 0 || m >= n_grid)
        throw std::invalid_argument("simulate_hjm: swap start outside the grid");

    std::vector<double> f = grids.fwd0;
    CoupledSample out;
    out.increments.resize(m);
    out.aux_path.resize(m + 1);
    out.aux_path[0] = f[0];
    const double sqrt_h = std::sqrt(h);
    double w = 0.0;
    for (std::size_t i = 1; i <= m; ++i) {
        out.discount_integral += f[i - 1] * h;
        const double z = stream.normal();
        const double dw = sqrt_h * z;
        out.increments[i - 1] = dw;
        w += dw;
        // trapezoid of sigma(t_{i-1}, .) from t_{i-1} out to each maturity
        double integral = 0.0;
        double vol_prev = grids.vol_at(i - 1, i - 1);
        for (std::size_t j = i; j < n_grid; ++j) {
            const double vol = grids.vol_at(i - 1, j);
            integral += 0.5 * h * (vol_prev + vol);
            f[j] += vol * integral * h + vol * dw;
            vol_prev = vol;
        }
        out.aux_path[i] = f[i];
    }
    out.path.assign(f.begin() + static_cast<std::ptrdiff_t>(m), f.end());
    out.features = {w};
    return out;
}

std::vector<std::vector<double>> sample_feature_marginal(const ParameterPoint& theta,
                                                         std::size_t count,
                                                         pemc::rng::RngStream& stream) {
    std::vector<std::vector<double>> out;
    out.reserve(count);
    switch (theta.kind) {
        case ModelKind::Gbm: {
            const std::size_t n = step_count(theta);
            const auto d = static_cast<std::size_t>(theta.feature_dim);
            if (theta.feature_dim < 1 || n % d != 0)
                throw std::invalid_argument(
                    "sample_feature_marginal: feature_dim must divide the step count");
            const double sd = std::sqrt(static_cast<double>(n / d) * theta.dt);
            for (std::size_t k = 0; k < count; ++k) {
                std::vector<double> x(d);
                for (auto& v : x) v = sd * stream.normal();
                out.push_back(std::move(x));
            }
            break;
        }
        case ModelKind::Heston:
        case ModelKind::Slv: {
            const double t_total = static_cast<double>(step_count(theta)) * theta.dt;
            for (std::size_t k = 0; k < count; ++k) {
                const auto [ws, wv] = pemc::rng::gaussian_pair(theta.rho, t_total, stream);
                out.push_back({ws, wv});
            }
            break;
        }
        case ModelKind::Hjm: {
            const auto m = static_cast<std::size_t>(std::lround(theta.swap_start / theta.dt));
            const double sd = std::sqrt(static_cast<double>(m) * theta.dt);
            for (std::size_t k = 0; k < count; ++k) out.push_back({sd * stream.normal()});
            break;
        }
        case ModelKind::Ed:
            throw std::invalid_argument(
                "sample_feature_marginal: ED features are sampled by the ED module");
    }
    return out;
}

}  // namespace pemc::models
