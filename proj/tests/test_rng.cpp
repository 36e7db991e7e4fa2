#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "pemc/rng.hpp"
#include "pemc/stats.hpp"

using namespace pemc;

TEST_CASE("equal keys give bit-identical sequences") {
    rng::RngStream a(42, 7), b(42, 7);
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("distinct stream ids decorrelate") {
    rng::RngStream a(42, 1), b(42, 2);
    const int n = 100000;
    std::vector<double> xs(n), ys(n);
    for (int i = 0; i < n; ++i) {
        xs[i] = a.normal();
        ys[i] = b.normal();
    }
    // 3 sigma of a sample correlation of independent normals is 3/sqrt(n)
    CHECK(std::abs(stats::correlation(xs, ys)) < 3.0 / std::sqrt(double(n)));
}

TEST_CASE("uniform01 stays in [0,1) with mean 1/2") {
    rng::RngStream s(1, 0);
    double sum = 0.0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) {
        const double u = s.uniform01();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    // sd of the mean is 1/sqrt(12 n)
    CHECK(std::abs(sum / n - 0.5) < 3.0 / std::sqrt(12.0 * n));
}

TEST_CASE("uniform(5,5) is always 5") {
    rng::RngStream s(3, 0);
    for (int i = 0; i < 100; ++i) CHECK(s.uniform(5.0, 5.0) == doctest::Approx(5.0));
}

TEST_CASE("normal moments at n=1e6") {
    rng::RngStream s(5, 0);
    const int n = 1000000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = s.normal();
        sum += z;
        sq += z * z;
    }
    CHECK(std::abs(sum / n) < 3.0 / std::sqrt(double(n)));
    CHECK(sq / n == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("exponential(1) mean 1.0 within 0.003") {
    rng::RngStream s(6, 0);
    const int n = 1000000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += s.exponential(1.0);
    CHECK(std::abs(sum / n - 1.0) < 0.003);
}

TEST_CASE("gamma(shape k, rate b) has mean k/b and variance k/b^2") {
    rng::RngStream s(7, 0);
    const int n = 400000;
    const double k = 2.5, b = 1.5;
    std::vector<double> xs(n);
    for (auto& x : xs) x = s.gamma(k, b);
    const double m = stats::mean(xs);
    CHECK(m == doctest::Approx(k / b).epsilon(0.01));
    CHECK(stats::variance(xs) == doctest::Approx(k / (b * b)).epsilon(0.03));
}

TEST_CASE("multinomial triage frequencies within 3 sigma") {
    const std::array<double, 5> p = {0.1098, 0.2761, 0.4596, 0.1297, 0.0248};
    rng::RngStream s(8, 0);
    const int n = 100000;
    std::array<long, 5> counts{};
    for (int i = 0; i < n; ++i) ++counts[s.multinomial(p)];
    for (int k = 0; k < 5; ++k) {
        const double se = std::sqrt(p[k] * (1 - p[k]) * n);
        CHECK(std::abs(double(counts[k]) - p[k] * n) < 3.0 * se);
    }
}

TEST_CASE("multinomial rejects a badly scaled vector") {
    rng::RngStream s(9, 0);
    const std::array<double, 2> bad = {0.5, 0.6};
    CHECK_THROWS(s.multinomial(bad));
}

TEST_CASE("poisson matches mean and variance") {
    rng::RngStream s(10, 0);
    const int n = 200000;
    const double lam = 7.3;
    std::vector<double> xs(n);
    for (auto& x : xs) x = double(rng::poisson(lam, s));
    CHECK(stats::mean(xs) == doctest::Approx(lam).epsilon(0.01));
    CHECK(stats::variance(xs) == doctest::Approx(lam).epsilon(0.03));
}

TEST_CASE("poisson large mean (chunked path)") {
    rng::RngStream s(11, 0);
    const int n = 20000;
    const double lam = 1500.0;
    std::vector<double> xs(n);
    for (auto& x : xs) x = double(rng::poisson(lam, s));
    CHECK(stats::mean(xs) == doctest::Approx(lam).epsilon(0.002));
}

TEST_CASE("gaussian_pair rho=0 dt=1 gives independent standard normals") {
    rng::RngStream s(12, 0);
    const int n = 200000;
    std::vector<double> a(n), b(n);
    for (int i = 0; i < n; ++i) std::tie(a[i], b[i]) = rng::gaussian_pair(0.0, 1.0, s);
    CHECK(std::abs(stats::correlation(a, b)) < 3.0 / std::sqrt(double(n)));
    CHECK(stats::variance(a) == doctest::Approx(1.0).epsilon(0.02));
    CHECK(stats::variance(b) == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("gaussian_pair rho=1 gives identical components") {
    rng::RngStream s(13, 0);
    for (int i = 0; i < 100; ++i) {
        const auto [a, b] = rng::gaussian_pair(1.0, 1.0, s);
        CHECK(a == doctest::Approx(b).epsilon(1e-12));
    }
}

TEST_CASE("gaussian_pair rho=-0.5 dt=1/252 empirical correlation") {
    rng::RngStream s(14, 0);
    const int n = 1000000;
    std::vector<double> a(n), b(n);
    for (int i = 0; i < n; ++i) std::tie(a[i], b[i]) = rng::gaussian_pair(-0.5, 1.0 / 252.0, s);
    CHECK(stats::correlation(a, b) == doctest::Approx(-0.5).epsilon(0.01));
    CHECK(stats::variance(a) == doctest::Approx(1.0 / 252.0).epsilon(0.01));
}

TEST_CASE("gaussian_pair domain errors") {
    rng::RngStream s(15, 0);
    CHECK_THROWS_AS((void)rng::gaussian_pair(1.5, 1.0, s), std::domain_error);
    CHECK_THROWS_AS((void)rng::gaussian_pair(0.0, 0.0, s), std::domain_error);
}

TEST_CASE("nhpp: all-zero schedule gives no events") {
    rng::RateSchedule sched;
    sched.hourly_rates.assign(24, 0.0);
    rng::RngStream s(16, 0);
    CHECK(rng::sample_nhpp(sched, s).empty());
}

TEST_CASE("nhpp: constant rate 2/hour over 1000 hours") {
    rng::RateSchedule sched;
    sched.hourly_rates.assign(1000, 2.0);
    rng::RngStream s(17, 0);
    const auto events = rng::sample_nhpp(sched, s);
    CHECK(std::abs(double(events.size()) - 2000.0) < 3.0 * std::sqrt(2000.0));
    for (std::size_t i = 1; i < events.size(); ++i) CHECK(events[i] >= events[i - 1]);
    CHECK(events.back() <= 1000.0);
}

TEST_CASE("nhpp: alternating rates hit each segment's mean") {
    rng::RateSchedule sched;
    sched.hourly_rates.resize(4000);
    for (std::size_t h = 0; h < sched.hourly_rates.size(); ++h)
        sched.hourly_rates[h] = (h % 2 == 0) ? 1.0 : 3.0;
    rng::RngStream s(18, 0);
    const auto events = rng::sample_nhpp(sched, s);
    double low = 0, high = 0;
    for (double t : events) ((int(t) % 2 == 0) ? low : high) += 1.0;
    CHECK(std::abs(low - 2000.0) < 3.0 * std::sqrt(2000.0));
    CHECK(std::abs(high - 6000.0) < 3.0 * std::sqrt(6000.0));
}

TEST_CASE("rate schedule integration and validation") {
    rng::RateSchedule sched;
    sched.hourly_rates = {1.0, 2.0, 0.5};
    CHECK(sched.integrated_rate() == doctest::Approx(3.5));
    CHECK(sched.max_rate() == doctest::Approx(2.0));
    CHECK(sched.rate_at(1.5) == doctest::Approx(2.0));
    sched.hourly_rates[1] = -1.0;
    CHECK_THROWS(sched.validate());
}

TEST_CASE("normal_quantile inverts normal_cdf") {
    for (double p : {0.01, 0.025, 0.2, 0.5, 0.8, 0.975, 0.99}) {
        CHECK(stats::normal_cdf(stats::normal_quantile(p)) == doctest::Approx(p).epsilon(1e-9));
    }
    CHECK(stats::normal_quantile(0.975) == doctest::Approx(1.959963985).epsilon(1e-7));
}
