#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace pemc::rng {

/// Deterministic, splittable random stream keyed by (master_seed, stream_id).
///
/// The generator is xoshiro256++ seeded through splitmix64, so equal keys give
/// bit-identical sequences on every platform and distinct stream ids give
/// statistically independent streams. A stream is single-owner: it may be moved
/// between threads but never shared concurrently.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_id);

    std::uint64_t master_seed() const noexcept { return master_seed_; }
    std::uint64_t stream_id() const noexcept { return stream_id_; }

    std::uint64_t next_u64() noexcept;

    /// Uniform draw in [0, 1).
    double uniform01() noexcept;

    double uniform(double lo, double hi);

    /// Standard normal via Box-Muller (second draw cached in the stream state).
    double normal();

    double exponential(double rate);

    /// Marsaglia-Tsang gamma with shape/rate parametrization.
    double gamma(double shape, double rate);

    /// Single categorical draw; probabilities must sum to 1 within 1e-9
    /// (smaller discrepancies are renormalized silently).
    std::size_t multinomial(std::span<const double> probabilities);

private:
    std::uint64_t master_seed_;
    std::uint64_t stream_id_;
    std::uint64_t state_[4];
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

/// Exact Poisson draw (Knuth's product method, chunked for large means).
long long poisson(double mean, RngStream& stream);

/// Correlated Brownian increments over one step: (sqrt(dt)*Z1,
/// sqrt(dt)*(rho*Z1 + sqrt(1-rho^2)*Z2)).
std::pair<double, double> gaussian_pair(double rho, double dt, RngStream& stream);

/// Piecewise-constant hourly intensity over an integer-hour horizon.
struct RateSchedule {
    std::vector<double> hourly_rates;  // one entry per hour of the horizon

    double horizon_hours() const noexcept { return static_cast<double>(hourly_rates.size()); }
    double rate_at(double t) const;
    double max_rate() const;
    double integrated_rate() const;
    void validate() const;
};

/// Arrival times of a nonhomogeneous Poisson process, sorted ascending,
/// sampled by thinning against the schedule's maximum rate.
std::vector<double> sample_nhpp(const RateSchedule& schedule, RngStream& stream);

}  // namespace pemc::rng
