#include "pemc/surfaces.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "pemc/rng.hpp"

namespace pemc::surfaces {

namespace {

std::size_t clamped_cell(const std::vector<double>& axis, double x, double& weight) {
    // Returns i such that axis[i] <= x <= axis[i+1] (after clamping), and the
    // interpolation weight toward axis[i+1].
    if (x <= axis.front()) {
        weight = 0.0;
        return 0;
    }
    if (x >= axis.back()) {
        weight = 1.0;
        return axis.size() - 2;
    }
    const auto it = std::upper_bound(axis.begin(), axis.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - axis.begin()) - 1;
    weight = (x - axis[i]) / (axis[i + 1] - axis[i]);
    return i;
}

void check_axis(const std::vector<double>& axis, const char* name) {
    if (axis.size() < 2) throw std::invalid_argument(std::string(name) + ": need >= 2 points");
    for (std::size_t i = 1; i < axis.size(); ++i)
        if (!(axis[i] > axis[i - 1]))
            throw std::invalid_argument(std::string(name) + ": axis must be strictly increasing");
}

std::vector<double> parse_csv_row(const std::string& line) {
    std::vector<double> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        if (cell.empty())
            out.push_back(std::numeric_limits<double>::quiet_NaN());
        else
            out.push_back(std::stod(cell));
    }
    return out;
}

}  // namespace

double VolSurfaceGrid::interpolate(double spot, double time) const {
    double ws = 0.0, wt = 0.0;
    const std::size_t i = clamped_cell(spots, spot, ws);
    const std::size_t j = clamped_cell(times, time, wt);
    const double v00 = at(i, j);
    const double v01 = at(i, j + 1);
    const double v10 = at(i + 1, j);
    const double v11 = at(i + 1, j + 1);
    return (1.0 - ws) * ((1.0 - wt) * v00 + wt * v01) + ws * ((1.0 - wt) * v10 + wt * v11);
}

void VolSurfaceGrid::validate() const {
    check_axis(spots, "VolSurfaceGrid spots");
    check_axis(times, "VolSurfaceGrid times");
    if (values.size() != spots.size() * times.size())
        throw std::invalid_argument("VolSurfaceGrid: values size mismatch");
    for (double v : values)
        if (!(v > 0.0)) throw std::invalid_argument("VolSurfaceGrid: values must be > 0");
}

double local_vol_base_sq(double x, double t) {
    if (!(t > 0.0)) throw std::domain_error("local_vol_base_sq: t must be > 0");
    static const double p[3] = {0.3, 0.5, 0.2};
    static const double tau[3] = {0.4, 0.3, 0.6};
    double num = 0.0, den = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double w = std::exp(-x * x / (2.0 * t * tau[i] * tau[i]) - t * tau[i] * tau[i] / 8.0);
        num += p[i] * tau[i] * w;
        den += (p[i] / tau[i]) * w;
    }
    return num / den;
}

VolSurfaceGrid make_slv_surface(double s0, double horizon, double dt, double xi,
                                pemc::rng::RngStream& stream, std::size_t n_spots,
                                std::size_t n_times) {
    if (!(s0 > 0.0) || !(horizon > 0.0) || !(dt > 0.0) || xi < 0.0)
        throw std::invalid_argument("make_slv_surface: bad arguments");
    VolSurfaceGrid grid;
    grid.spots.resize(n_spots);
    grid.times.resize(n_times);
    const double s_min = s0 / 3.0, s_max = 3.0 * s0;
    for (std::size_t i = 0; i < n_spots; ++i)
        grid.spots[i] = s_min + (s_max - s_min) * static_cast<double>(i) /
                                    static_cast<double>(n_spots - 1);
    for (std::size_t j = 0; j < n_times; ++j)
        grid.times[j] =
            dt + (horizon - dt) * static_cast<double>(j) / static_cast<double>(n_times - 1);
    grid.values.resize(n_spots * n_times);
    for (std::size_t i = 0; i < n_spots; ++i) {
        const double x = std::log(grid.spots[i] / s0);
        for (std::size_t j = 0; j < n_times; ++j) {
            double v = std::sqrt(local_vol_base_sq(x, grid.times[j]));
            if (xi > 0.0) v += xi * stream.normal();
            grid.at(i, j) = std::max(v, 1e-4);
        }
    }
    return grid;
}

void save_surface_csv(const VolSurfaceGrid& grid, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_surface_csv: cannot open " + path);
    out.precision(17);
    for (double t : grid.times) out << ',' << t;
    out << '\n';
    for (std::size_t i = 0; i < grid.spots.size(); ++i) {
        out << grid.spots[i];
        for (std::size_t j = 0; j < grid.times.size(); ++j) out << ',' << grid.at(i, j);
        out << '\n';
    }
}

VolSurfaceGrid load_surface_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_surface_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("load_surface_csv: empty file");
    VolSurfaceGrid grid;
    auto header = parse_csv_row(line);
    grid.times.assign(header.begin() + 1, header.end());
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto row = parse_csv_row(line);
        if (row.size() != grid.times.size() + 1)
            throw std::runtime_error("load_surface_csv: ragged row in " + path);
        grid.spots.push_back(row[0]);
        grid.values.insert(grid.values.end(), row.begin() + 1, row.end());
    }
    grid.validate();
    return grid;
}

double HjmGrids::spacing() const {
    if (times.size() < 2) throw std::logic_error("HjmGrids: need >= 2 grid times");
    return times[1] - times[0];
}

double HjmGrids::vol_at(std::size_t i, std::size_t j) const {
    if (!vol_matrix.empty()) return vol_matrix[i * times.size() + j];
    double v = sigma0 * std::exp(-alpha_sigma * (times[j] - times[i]));
    if (!col_noise.empty()) v += col_noise[j];
    return std::max(v, 1e-6);
}

void HjmGrids::validate() const {
    check_axis(times, "HjmGrids times");
    if (fwd0.size() != times.size()) throw std::invalid_argument("HjmGrids: fwd0 size mismatch");
    const double h = spacing();
    for (std::size_t i = 1; i < times.size(); ++i)
        if (std::abs(times[i] - times[i - 1] - h) > 1e-9 * std::max(1.0, h))
            throw std::invalid_argument("HjmGrids: time axis must be uniform");
    if (!vol_matrix.empty() && vol_matrix.size() != times.size() * times.size())
        throw std::invalid_argument("HjmGrids: vol matrix size mismatch");
    if (!col_noise.empty() && col_noise.size() != times.size())
        throw std::invalid_argument("HjmGrids: col_noise size mismatch");
}

double hjm_vol_base(double t, double maturity, double sigma0, double alpha_sigma) {
    if (maturity < t) throw std::domain_error("hjm_vol_base: maturity must be >= t");
    return sigma0 * std::exp(-alpha_sigma * (maturity - t));
}

double hjm_forward_base(double f0, double c_f, double alpha_f, double maturity) {
    return f0 + c_f * (1.0 - std::exp(-alpha_f * maturity));
}

HjmGrids make_hjm_grids(double sigma0, double alpha_sigma, double f0, double c_f,
                        double alpha_f, double horizon, double spacing, bool noisy,
                        pemc::rng::RngStream& stream) {
    if (!(horizon > 0.0) || !(spacing > 0.0))
        throw std::invalid_argument("make_hjm_grids: bad horizon or spacing");
    HjmGrids g;
    g.sigma0 = sigma0;
    g.alpha_sigma = alpha_sigma;
    const auto n = static_cast<std::size_t>(std::lround(horizon / spacing)) + 1;
    g.times.resize(n);
    g.fwd0.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        g.times[j] = static_cast<double>(j) * spacing;
        g.fwd0[j] = hjm_forward_base(f0, c_f, alpha_f, g.times[j]);
    }
    if (noisy) {
        g.col_noise.resize(n);
        for (std::size_t j = 0; j < n; ++j)
            g.col_noise[j] = stream.normal() * sigma0 / (2.0 * (g.times[j] + 5.0));
        for (std::size_t j = 0; j < n; ++j)
            g.fwd0[j] += stream.normal() / (100.0 * (g.times[j] + 5.0));
    }
    g.validate();
    return g;
}

void save_hjm_vol_csv(const HjmGrids& grids, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_hjm_vol_csv: cannot open " + path);
    out.precision(17);
    const std::size_t n = grids.times.size();
    for (double t : grids.times) out << ',' << t;
    out << '\n';
    for (std::size_t j = 0; j < n; ++j) {
        out << grids.times[j];
        for (std::size_t i = 0; i < n; ++i)
            out << ',' << (j >= i ? grids.vol_at(i, j) : 0.0);
        out << '\n';
    }
}

HjmGrids load_hjm_vol_csv(const std::string& path, double f0, double c_f, double alpha_f) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_hjm_vol_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("load_hjm_vol_csv: empty file");
    HjmGrids g;
    auto header = parse_csv_row(line);
    g.times.assign(header.begin() + 1, header.end());
    const std::size_t n = g.times.size();
    g.vol_matrix.assign(n * n, 0.0);
    std::size_t j = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto row = parse_csv_row(line);
        if (row.size() != n + 1 || j >= n)
            throw std::runtime_error("load_hjm_vol_csv: ragged or oversized body in " + path);
        for (std::size_t i = 0; i < n; ++i) g.vol_matrix[i * n + j] = row[i + 1];
        ++j;
    }
    if (j != n) throw std::runtime_error("load_hjm_vol_csv: missing rows in " + path);
    g.fwd0.resize(n);
    for (std::size_t k = 0; k < n; ++k) g.fwd0[k] = hjm_forward_base(f0, c_f, alpha_f, g.times[k]);
    g.validate();
    return g;
}

}  // namespace pemc::surfaces
