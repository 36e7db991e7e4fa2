#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace pemc::rng {
class RngStream;
}

namespace pemc::surfaces {

/// Rectangular local-volatility grid: axes strictly increasing, values stored
/// row-major as values[i * times.size() + j] = sigma(spots[i], times[j]).
/// Queries outside the grid are clamped to the boundary before interpolating.
struct VolSurfaceGrid {
    std::vector<double> spots;
    std::vector<double> times;
    std::vector<double> values;

    double at(std::size_t i, std::size_t j) const { return values[i * times.size() + j]; }
    double& at(std::size_t i, std::size_t j) { return values[i * times.size() + j]; }

    /// Bilinear interpolation with boundary clamping.
    double interpolate(double spot, double time) const;

    void validate() const;
};

/// Baseline local volatility (squared) at log-moneyness x = log(s/s0) and
/// time t > 0. Returns sigma^2.
double local_vol_base_sq(double x, double t);

/// Builds the baseline surface for spot s0 on a spots x times grid covering
/// [s0/3, 3*s0] x [dt, horizon], optionally perturbed by iid N(0, xi^2) noise
/// on each node (floored at 1e-4 to keep the surface positive).
VolSurfaceGrid make_slv_surface(double s0, double horizon, double dt, double xi,
                                pemc::rng::RngStream& stream, std::size_t n_spots = 30,
                                std::size_t n_times = 30);

/// CSV layout: header row is the time axis (first cell blank), each following
/// row starts with the spot value and continues with sigma(spot, t) values.
void save_surface_csv(const VolSurfaceGrid& grid, const std::string& path);
VolSurfaceGrid load_surface_csv(const std::string& path);

/// HJM forward-curve state on a shared uniform time/maturity axis
/// t_j = j * spacing, j = 0..n-1. The volatility grid is parametric
/// (sigma0 * exp(-alpha_sigma * (T - t)) plus an optional per-maturity noise
/// column) unless an explicit matrix has been attached, e.g. loaded from CSV.
struct HjmGrids {
    std::vector<double> times;
    std::vector<double> fwd0;        // f(0, t_j)
    double sigma0 = 0.0;
    double alpha_sigma = 0.0;
    std::vector<double> col_noise;   // empty -> no noise
    std::vector<double> vol_matrix;  // empty -> parametric; else row-major n x n

    double spacing() const;

    /// sigma(t_i, t_j) for j >= i.
    double vol_at(std::size_t i, std::size_t j) const;

    void validate() const;
};

/// Baseline HJM volatility sigma_base(t, T) = sigma0 * exp(-alpha_sigma * (T - t)).
double hjm_vol_base(double t, double maturity, double sigma0, double alpha_sigma);

/// Baseline instantaneous forward curve f(0, T) = f0 + c_f * (1 - exp(-alpha_f * T)).
double hjm_forward_base(double f0, double c_f, double alpha_f, double maturity);

/// Builds the grids on [0, horizon] with the given spacing. When `noisy` is
/// set, each maturity column j gets an additive vol perturbation
/// N(0, (sigma0 / (2 * (t_j + 5)))^2) (floored so vols stay >= 1e-6) and the
/// initial forward curve gets N(0, (1 / (100 * (t_j + 5)))^2) node noise.
HjmGrids make_hjm_grids(double sigma0, double alpha_sigma, double f0, double c_f,
                        double alpha_f, double horizon, double spacing, bool noisy,
                        pemc::rng::RngStream& stream);

/// CSV layout mirrors the surface: header row is the observation-time axis,
/// first column is the maturity axis, body cell (j, i) holds sigma(t_i, t_j).
void save_hjm_vol_csv(const HjmGrids& grids, const std::string& path);
/// Loads an explicit vol matrix; fwd0 is rebuilt from the given curve params.
HjmGrids load_hjm_vol_csv(const std::string& path, double f0, double c_f, double alpha_f);

}  // namespace pemc::surfaces
