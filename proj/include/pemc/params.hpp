#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace pemc::surfaces {
struct VolSurfaceGrid;
struct HjmGrids;
}  // namespace pemc::surfaces

namespace pemc {

using surfaces::HjmGrids;
using surfaces::VolSurfaceGrid;

enum class ModelKind { Gbm, Heston, Slv, Hjm, Ed };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

/// One evaluation point theta: model, simulation and payoff parameters,
/// plus the grids (surface / curve) attached to it when the model needs them.
struct ParameterPoint {
    ModelKind kind = ModelKind::Gbm;

    // model parameters
    double rate = 0.02;        // risk-free rate r
    double sigma = 0.2;        // GBM volatility
    double eta = 0.04;         // Heston long-run variance
    double delta = 0.3;        // vol-of-vol (Heston/SLV)
    double rho = -0.5;         // driver correlation
    double kappa = 3.0;        // mean-reversion speed

    // simulation parameters
    double s0 = 100.0;
    double nu0 = 0.04;
    double dt = 1.0 / 252.0;
    double horizon = 1.0;      // T

    // payoff parameters (Asian / variance swap)
    double strike = 100.0;
    int n_obs = 252;
    int feature_dim = 1;       // GBM Brownian-block count

    // HJM model + swaption contract
    double sigma0 = 0.02;
    double alpha_sigma = 0.45;
    double f0 = 0.02;
    double c_f = 0.03;
    double alpha_f = 0.45;
    double swap_start = 5.0;   // t'_0
    double swap_dt = 1.0;      // payment interval
    int swap_payments = 20;    // n_p
    double notional = 100.0;
    double fixed_rate = 0.0;   // 0 -> derived from the initial curve

    // ED policy parameters
    int ed_tau = 20;
    std::array<int, 6> ed_hosp2_shifts = {2, 2, 4, 2, 4, 1};
    double ed_crisis = 1.25;

    std::shared_ptr<const VolSurfaceGrid> surface;  // SLV
    std::shared_ptr<const HjmGrids> hjm;            // HJM

    void validate() const;

    /// Stable digest of all scalar fields and grid contents, used for
    /// ground-truth cache keys.
    std::uint64_t digest() const;
};

struct Range {
    double lo = 0.0;
    double hi = 0.0;
    bool integer = false;
};

/// Uniform product space over named scalar parameters; everything not listed
/// stays at the base point's value. Grid-valued parameters are rebuilt from
/// their baseline formulas plus noise at sampling time.
struct ParameterSpaceSpec {
    ParameterPoint base;
    std::map<std::string, Range> ranges;
    double surface_noise = 0.0;  // SLV grid noise xi
    bool hjm_grid_noise = false;

    bool contains(const ParameterPoint& theta) const;
};

/// Named scalar field access on ParameterPoint (used by space sampling and
/// config parsing). Throws on unknown names.
double get_param(const ParameterPoint& theta, const std::string& name);
void set_param(ParameterPoint& theta, const std::string& name, double value);

}  // namespace pemc
