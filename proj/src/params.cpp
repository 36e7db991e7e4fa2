#include "pemc/params.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

#include "pemc/surfaces.hpp"

namespace pemc {

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::Gbm: return "gbm";
        case ModelKind::Heston: return "heston";
        case ModelKind::Slv: return "slv";
        case ModelKind::Hjm: return "hjm";
        case ModelKind::Ed: return "ed";
    }
    throw std::logic_error("to_string: bad ModelKind");
}

ModelKind model_kind_from_string(const std::string& name) {
    if (name == "gbm") return ModelKind::Gbm;
    if (name == "heston") return ModelKind::Heston;
    if (name == "slv") return ModelKind::Slv;
    if (name == "hjm") return ModelKind::Hjm;
    if (name == "ed") return ModelKind::Ed;
    throw std::invalid_argument("unknown model kind: " + name);
}

void ParameterPoint::validate() const {
    if (!(s0 > 0.0)) throw std::invalid_argument("ParameterPoint: s0 must be > 0");
    if (!(dt > 0.0)) throw std::invalid_argument("ParameterPoint: dt must be > 0");
    if (!(horizon > 0.0)) throw std::invalid_argument("ParameterPoint: horizon must be > 0");
    if (std::abs(rho) > 1.0) throw std::invalid_argument("ParameterPoint: |rho| must be <= 1");
    if (sigma < 0.0 || delta < 0.0 || kappa < 0.0)
        throw std::invalid_argument("ParameterPoint: vol parameters must be >= 0");
    if (n_obs < 1) throw std::invalid_argument("ParameterPoint: n_obs must be >= 1");
    if (feature_dim < 1) throw std::invalid_argument("ParameterPoint: feature_dim must be >= 1");
    if (kind == ModelKind::Gbm) {
        const auto steps = static_cast<long>(std::lround(horizon / dt));
        if (steps % feature_dim != 0)
            throw std::invalid_argument(
                "ParameterPoint: feature_dim must divide the number of steps");
    }
    if (kind == ModelKind::Hjm) {
        if (swap_payments < 1) throw std::invalid_argument("ParameterPoint: swap_payments >= 1");
        if (!(swap_start > 0.0) || !(swap_dt > 0.0))
            throw std::invalid_argument("ParameterPoint: swap timing must be positive");
    }
    if (kind == ModelKind::Ed) {
        if (ed_tau < 0) throw std::invalid_argument("ParameterPoint: ed_tau must be >= 0");
        if (!(ed_crisis >= 1.0))
            throw std::invalid_argument("ParameterPoint: ed_crisis must be >= 1");
        for (int c : ed_hosp2_shifts)
            if (c < 0) throw std::invalid_argument("ParameterPoint: shift counts must be >= 0");
    }
}

namespace {

inline void hash_u64(std::uint64_t& h, std::uint64_t v) {
    h ^= v + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
}

inline void hash_d(std::uint64_t& h, double x) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(x));
    std::memcpy(&bits, &x, sizeof(bits));
    hash_u64(h, bits);
}

}  // namespace

std::uint64_t ParameterPoint::digest() const {
    std::uint64_t h = 0x243F6A8885A308D3ULL;
    hash_u64(h, static_cast<std::uint64_t>(kind));
    for (double v : {rate, sigma, eta, delta, rho, kappa, s0, nu0, dt, horizon, strike,
                     sigma0, alpha_sigma, f0, c_f, alpha_f, swap_start, swap_dt, notional,
                     fixed_rate, ed_crisis})
        hash_d(h, v);
    hash_u64(h, static_cast<std::uint64_t>(n_obs));
    hash_u64(h, static_cast<std::uint64_t>(feature_dim));
    hash_u64(h, static_cast<std::uint64_t>(swap_payments));
    hash_u64(h, static_cast<std::uint64_t>(ed_tau));
    for (int c : ed_hosp2_shifts) hash_u64(h, static_cast<std::uint64_t>(c));
    if (surface) {
        for (double v : surface->spots) hash_d(h, v);
        for (double v : surface->times) hash_d(h, v);
        for (double v : surface->values) hash_d(h, v);
    }
    if (hjm) {
        for (double v : hjm->times) hash_d(h, v);
        for (double v : hjm->fwd0) hash_d(h, v);
        hash_d(h, hjm->sigma0);
        hash_d(h, hjm->alpha_sigma);
        for (double v : hjm->col_noise) hash_d(h, v);
        for (double v : hjm->vol_matrix) hash_d(h, v);
    }
    return h;
}

namespace {

struct FieldEntry {
    const char* name;
    double ParameterPoint::* dptr = nullptr;
    int ParameterPoint::* iptr = nullptr;
};

const FieldEntry kFields[] = {
    {"rate", &ParameterPoint::rate},
    {"sigma", &ParameterPoint::sigma},
    {"eta", &ParameterPoint::eta},
    {"delta", &ParameterPoint::delta},
    {"rho", &ParameterPoint::rho},
    {"kappa", &ParameterPoint::kappa},
    {"s0", &ParameterPoint::s0},
    {"nu0", &ParameterPoint::nu0},
    {"dt", &ParameterPoint::dt},
    {"horizon", &ParameterPoint::horizon},
    {"strike", &ParameterPoint::strike},
    {"sigma0", &ParameterPoint::sigma0},
    {"alpha_sigma", &ParameterPoint::alpha_sigma},
    {"f0", &ParameterPoint::f0},
    {"c_f", &ParameterPoint::c_f},
    {"alpha_f", &ParameterPoint::alpha_f},
    {"swap_start", &ParameterPoint::swap_start},
    {"swap_dt", &ParameterPoint::swap_dt},
    {"notional", &ParameterPoint::notional},
    {"fixed_rate", &ParameterPoint::fixed_rate},
    {"ed_crisis", &ParameterPoint::ed_crisis},
    {"n_obs", nullptr, &ParameterPoint::n_obs},
    {"feature_dim", nullptr, &ParameterPoint::feature_dim},
    {"swap_payments", nullptr, &ParameterPoint::swap_payments},
    {"ed_tau", nullptr, &ParameterPoint::ed_tau},
};

const FieldEntry& find_field(const std::string& name) {
    for (const auto& f : kFields)
        if (name == f.name) return f;
    throw std::invalid_argument("unknown parameter name: " + name);
}

}  // namespace

namespace {

int shift_index(const std::string& name) {
    // ed_shift1 .. ed_shift6 address the hosp2 shift-count array
    if (name.size() == 9 && name.rfind("ed_shift", 0) == 0) {
        const int idx = name.back() - '1';
        if (idx >= 0 && idx < 6) return idx;
    }
    return -1;
}

}  // namespace

double get_param(const ParameterPoint& theta, const std::string& name) {
    if (const int idx = shift_index(name); idx >= 0)
        return static_cast<double>(theta.ed_hosp2_shifts[static_cast<std::size_t>(idx)]);
    const auto& f = find_field(name);
    return f.dptr ? theta.*(f.dptr) : static_cast<double>(theta.*(f.iptr));
}

void set_param(ParameterPoint& theta, const std::string& name, double value) {
    if (const int idx = shift_index(name); idx >= 0) {
        theta.ed_hosp2_shifts[static_cast<std::size_t>(idx)] =
            static_cast<int>(std::lround(value));
        return;
    }
    const auto& f = find_field(name);
    if (f.dptr)
        theta.*(f.dptr) = value;
    else
        theta.*(f.iptr) = static_cast<int>(std::lround(value));
}

bool ParameterSpaceSpec::contains(const ParameterPoint& theta) const {
    if (theta.kind != base.kind) return false;
    for (const auto& [name, range] : ranges) {
        const double v = get_param(theta, name);
        if (v < range.lo - 1e-12 || v > range.hi + 1e-12) return false;
    }
    return true;
}

}  // namespace pemc
