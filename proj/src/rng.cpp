#include "pemc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pemc::rng {

namespace {

inline std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
}

constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
    : master_seed_(master_seed), stream_id_(stream_id) {
    std::uint64_t sm = master_seed + 0x9E3779B97F4A7C15ULL * (stream_id + 1);
    for (auto& s : state_) s = splitmix64(sm);
}

std::uint64_t RngStream::next_u64() noexcept {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double RngStream::uniform01() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
    if (hi < lo) throw std::invalid_argument("uniform: hi < lo");
    return lo + (hi - lo) * uniform01();
}

double RngStream::normal() {
    if (has_cached_normal_) {
        has_cached_normal_ = false;
        return cached_normal_;
    }
    // u1 in (0,1] keeps the log finite.
    const double u1 = 1.0 - uniform01();
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    cached_normal_ = radius * std::sin(kTwoPi * u2);
    has_cached_normal_ = true;
    return radius * std::cos(kTwoPi * u2);
}

double RngStream::exponential(double rate) {
    if (!(rate > 0.0)) throw std::invalid_argument("exponential: rate must be > 0");
    return -std::log(1.0 - uniform01()) / rate;
}

double RngStream::gamma(double shape, double rate) {
    if (!(shape > 0.0) || !(rate > 0.0))
        throw std::invalid_argument("gamma: shape and rate must be > 0");
    if (shape < 1.0) {
        const double u = 1.0 - uniform01();
        return gamma(shape + 1.0, rate) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform01();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
    }
}

std::size_t RngStream::multinomial(std::span<const double> probabilities) {
    if (probabilities.empty()) throw std::invalid_argument("multinomial: empty probabilities");
    double total = 0.0;
    for (double p : probabilities) {
        if (p < 0.0) throw std::invalid_argument("multinomial: negative probability");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("multinomial: probabilities must sum to 1 within 1e-9");
    const double u = uniform01() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < probabilities.size(); ++i) {
        acc += probabilities[i];
        if (u < acc) return i;
    }
    return probabilities.size() - 1;
}

long long poisson(double mean, RngStream& stream) {
    if (!(mean >= 0.0)) throw std::invalid_argument("poisson: mean must be >= 0");
    long long count = 0;
    while (mean > 500.0) {
        // Poisson(m) = Poisson(500) + Poisson(m - 500) independently
        count += poisson(500.0, stream);
        mean -= 500.0;
    }
    const double limit = std::exp(-mean);
    double prod = stream.uniform01();
    while (prod > limit) {
        ++count;
        prod *= stream.uniform01();
    }
    return count;
}

std::pair<double, double> gaussian_pair(double rho, double dt, RngStream& stream) {
    if (std::abs(rho) > 1.0) throw std::domain_error("gaussian_pair: |rho| must be <= 1");
    if (!(dt > 0.0)) throw std::domain_error("gaussian_pair: dt must be > 0");
    const double z1 = stream.normal();
    const double z2 = stream.normal();
    const double sqrt_dt = std::sqrt(dt);
    return {sqrt_dt * z1, sqrt_dt * (rho * z1 + std::sqrt(1.0 - rho * rho) * z2)};
}

double RateSchedule::rate_at(double t) const {
    const auto idx = static_cast<std::size_t>(t);
    if (idx >= hourly_rates.size()) return 0.0;
    return hourly_rates[idx];
}

double RateSchedule::max_rate() const {
    if (hourly_rates.empty()) return 0.0;
    return *std::max_element(hourly_rates.begin(), hourly_rates.end());
}

double RateSchedule::integrated_rate() const {
    return std::accumulate(hourly_rates.begin(), hourly_rates.end(), 0.0);
}

void RateSchedule::validate() const {
    if (hourly_rates.empty()) throw std::invalid_argument("RateSchedule: empty schedule");
    for (double r : hourly_rates)
        if (!(r >= 0.0)) throw std::invalid_argument("RateSchedule: rates must be >= 0");
}

std::vector<double> sample_nhpp(const RateSchedule& schedule, RngStream& stream) {
    schedule.validate();
    std::vector<double> arrivals;
    const double lam_max = schedule.max_rate();
    if (lam_max <= 0.0) return arrivals;
    const double horizon = schedule.horizon_hours();
    double t = 0.0;
    for (;;) {
        t += stream.exponential(lam_max);
        if (t >= horizon) break;
        if (stream.uniform01() * lam_max < schedule.rate_at(t)) arrivals.push_back(t);
    }
    return arrivals;
}

}  // namespace pemc::rng
