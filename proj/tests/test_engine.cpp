#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include <json.hpp>

#include "pemc/engine.hpp"
#include "pemc/payoffs.hpp"
#include "pemc/problem.hpp"
#include "pemc/rng.hpp"
#include "pemc/stats.hpp"

using namespace pemc;

namespace {

// closed-form r(rho, c) recomputed from scratch for cross-checking
double r_reference(double rho, double c) {
    const double q = std::sqrt(1.0 - rho * rho);
    return (1.0 - rho * rho) * (1.0 + rho / q * std::sqrt(c)) +
           rho * rho * (q / rho * std::sqrt(c) + c);
}

engine::PemcEstimate make_estimate(double est, long n, long N, double s2_fg, double s2_g) {
    engine::PemcEstimate e;
    e.estimate = est;
    e.n = n;
    e.N = N;
    e.sigma2_fg = s2_fg;
    e.sigma2_g = s2_g;
    return e;
}

}  // namespace

TEST_CASE("confidence interval hand value") {
    // z_{0.975} * sqrt(4/100 + 1/400) = 1.959964 * sqrt(0.0425)
    const auto est = make_estimate(10.0, 100, 400, 4.0, 1.0);
    const auto [lo, hi] = engine::confidence_interval(est, 0.05);
    const double half = 1.959963985 * std::sqrt(4.0 / 100.0 + 1.0 / 400.0);
    CHECK(hi - lo == doctest::Approx(2.0 * half).epsilon(1e-9));
    CHECK(0.5 * (lo + hi) == doctest::Approx(10.0));
    CHECK(half == doctest::Approx(0.404089).epsilon(1e-4));
}

TEST_CASE("confidence interval edge cases") {
    const auto est = make_estimate(5.0, 100, 0, 4.0, 0.0);
    // N = 0 (plain MC): the marginal term drops out
    const auto [lo, hi] = engine::confidence_interval(est, 0.05);
    CHECK(hi - lo == doctest::Approx(2.0 * 1.959963985 * 0.2).epsilon(1e-9));
    CHECK_THROWS_AS((void)engine::confidence_interval(est, 0.0), std::domain_error);
    CHECK_THROWS_AS((void)engine::confidence_interval(est, -0.1), std::domain_error);
    CHECK_THROWS_AS((void)engine::confidence_interval(est, 1.5), std::domain_error);
    // alpha = 1 degenerates to the point estimate
    const auto [l1, h1] = engine::confidence_interval(est, 1.0);
    CHECK(h1 - l1 == doctest::Approx(0.0));
    // wider alpha shrinks the interval
    const auto [l2, h2] = engine::confidence_interval(est, 0.5);
    CHECK(h2 - l2 < hi - lo);
}

TEST_CASE("variance ratio r(rho, c) matches the closed form") {
    CHECK(engine::variance_ratio_r(0.5, 0.001) == doctest::Approx(0.778).epsilon(0.002));
    CHECK(engine::variance_ratio_r(0.7, 0.001) == doctest::Approx(0.542).epsilon(0.002));
    for (double rho : {0.1, 0.3, 0.5, 0.7, 0.9, 0.99})
        for (double c : {1e-4, 1e-3, 1e-2})
            CHECK(engine::variance_ratio_r(rho, c) ==
                  doctest::Approx(r_reference(rho, c)).epsilon(1e-12));
}

TEST_CASE("variance ratio limits and monotonicity") {
    // rho -> 0 gives no improvement, rho -> 1 leaves only the marginal cost
    CHECK(engine::variance_ratio_r(0.0, 0.001) == doctest::Approx(1.0));
    CHECK(engine::variance_ratio_r(1.0, 0.001) == doctest::Approx(0.001));
    // small rho is a net loss (r > 1): the marginal draws cost more than the
    // feeble correlation saves
    CHECK(engine::variance_ratio_r(0.05, 1e-2) > 1.0);
    // beyond the break-even point r decreases in rho
    for (double c : {1e-4, 1e-3, 1e-2}) {
        double prev = engine::variance_ratio_r(0.3, c);
        for (double rho = 0.35; rho < 0.96; rho += 0.05) {
            const double cur = engine::variance_ratio_r(rho, c);
            CHECK(cur < prev);
            prev = cur;
        }
    }
    CHECK_THROWS((void)engine::variance_ratio_r(-0.1, 0.001));
    CHECK_THROWS((void)engine::variance_ratio_r(1.1, 0.001));
    CHECK_THROWS((void)engine::variance_ratio_r(0.5, 0.0));
}

TEST_CASE("control variate coefficient hand values") {
    CHECK(engine::cv_coefficient(1.0, 2.0, 100, 100) == doctest::Approx(0.25));
    CHECK(engine::cv_coefficient(0.0, 2.0, 100, 100) == doctest::Approx(0.0));
    // n/N -> 0 recovers the classical cov/var
    CHECK(engine::cv_coefficient(3.0, 2.0, 1, 1000000000) == doctest::Approx(1.5).epsilon(1e-6));
    CHECK_THROWS((void)engine::cv_coefficient(1.0, 0.0, 100, 100));
    CHECK_THROWS((void)engine::cv_coefficient(1.0, 1.0, 0, 100));
}

TEST_CASE("optimal allocation symmetric case") {
    // equal sds and equal costs: n/N = 1, budget split evenly
    const auto plan = engine::optimal_allocation(1.0, 1.0, 1.0, 1.0, 1000.0);
    CHECK(plan.n == plan.N);
    CHECK(plan.n * plan.c_fg + plan.N * plan.c_g <= 1000.0 + 1e-9);
    CHECK(plan.n == 500);
}

TEST_CASE("optimal allocation cheap marginal draws") {
    // c_g/c_fg = 0.01 with equal sds: n/N = 0.1
    const auto plan = engine::optimal_allocation(1.0, 1.0, 1.0, 0.01, 110.0);
    CHECK(double(plan.N) / double(plan.n) == doctest::Approx(10.0).epsilon(0.05));
    CHECK(plan.n * 1.0 + plan.N * 0.01 <= 110.0 + 1e-9);
}

TEST_CASE("optimal allocation matches exhaustive search on random instances") {
    rng::RngStream s(71, 0);
    for (int rep = 0; rep < 100; ++rep) {
        const double sfg = s.uniform(0.1, 3.0);
        const double sg = s.uniform(0.1, 3.0);
        const double cfg = s.uniform(0.5, 2.0);
        const double cg = s.uniform(0.01, 2.0);
        const double budget = s.uniform(50.0, 200.0);
        const auto plan = engine::optimal_allocation(sfg, sg, cfg, cg, budget);
        // brute force over all feasible n with N maximal for the leftover
        double best = std::numeric_limits<double>::infinity();
        const long n_max = static_cast<long>(budget / cfg);
        for (long n = 1; n <= n_max; ++n) {
            const long N = static_cast<long>((budget - n * cfg) / cg);
            if (N < 1) continue;
            const double v = sfg * sfg / double(n) + sg * sg / double(N);
            best = std::min(best, v);
        }
        REQUIRE(std::isfinite(best));
        CHECK(plan.variance == doctest::Approx(best).epsilon(1e-6));
        CHECK(plan.n * cfg + plan.N * cg <= budget + 1e-9);
    }
}

TEST_CASE("optimal allocation rejects impossible budgets") {
    CHECK_THROWS((void)engine::optimal_allocation(1.0, 1.0, 10.0, 10.0, 5.0));
    CHECK_THROWS((void)engine::optimal_allocation(-1.0, 1.0, 1.0, 1.0, 100.0));
    CHECK_THROWS((void)engine::optimal_allocation(1.0, 1.0, 0.0, 1.0, 100.0));
}

TEST_CASE("covariance identity equals the direct sample covariance") {
    rng::RngStream s(72, 0);
    const int n = 5000;
    std::vector<double> f(n), g(n);
    for (int i = 0; i < n; ++i) {
        const auto [a, b] = rng::gaussian_pair(0.6, 1.0, s);
        f[std::size_t(i)] = 2.0 + 1.5 * a;
        g[std::size_t(i)] = -1.0 + 0.7 * b;
    }
    std::vector<double> d(n);
    for (int i = 0; i < n; ++i) d[std::size_t(i)] = f[std::size_t(i)] - g[std::size_t(i)];
    const double identity =
        0.5 * (stats::variance(f) + stats::variance(g) - stats::variance(d));
    CHECK(identity == doctest::Approx(stats::covariance(f, g)).epsilon(1e-10));
}

TEST_CASE("covariance probe on correlated gaussians") {
    rng::RngStream shared(73, 0);
    engine::CoupledFn coupled = [](rng::RngStream& s) {
        const auto [a, b] = rng::gaussian_pair(0.8, 1.0, s);
        return std::make_pair(5.0 + 2.0 * a, 5.0 + 2.0 * b);
    };
    engine::MarginalFn marginal = [](rng::RngStream& s) { return 5.0 + 2.0 * s.normal(); };
    const auto probe = engine::empirical_covariance_probe(coupled, marginal, 20000, shared);
    CHECK(!probe.degenerate);
    CHECK(probe.rho_hat == doctest::Approx(0.8).epsilon(0.03));
    CHECK(probe.sigma_f == doctest::Approx(2.0).epsilon(0.05));
    CHECK(probe.sigma_g == doctest::Approx(2.0).epsilon(0.05));
    // sd(f - g) = 2 * sqrt(2 * (1 - 0.8))
    CHECK(probe.sigma_fg == doctest::Approx(2.0 * std::sqrt(0.4)).epsilon(0.05));
    CHECK(probe.cov_identity == doctest::Approx(0.8 * 4.0).epsilon(0.05));
    CHECK(probe.c_fg_ns > 0.0);
    CHECK(probe.c_g_ns > 0.0);
}

TEST_CASE("covariance probe flags a degenerate predictor") {
    rng::RngStream s(74, 0);
    engine::CoupledFn coupled = [](rng::RngStream& st) {
        return std::make_pair(1.0 + st.normal(), 0.0);
    };
    engine::MarginalFn marginal = [](rng::RngStream&) { return 0.0; };
    const auto probe = engine::empirical_covariance_probe(coupled, marginal, 2000, s);
    CHECK(probe.degenerate);
    CHECK(probe.sigma_g == doctest::Approx(0.0));
    CHECK(probe.rho_hat == doctest::Approx(0.0));
}

TEST_CASE("standard mc on a constant payoff") {
    rng::RngStream s(75, 0);
    engine::PayoffFn payoff = [](rng::RngStream&) { return 7.25; };
    const auto est = engine::standard_mc(500, payoff, s);
    CHECK(est.estimate == doctest::Approx(7.25));
    CHECK(est.n == 500);
    CHECK(est.N == 0);
    CHECK(est.sigma2_fg == doctest::Approx(0.0));
    CHECK(est.ci_lo == doctest::Approx(7.25));
    CHECK(est.ci_hi == doctest::Approx(7.25));
    CHECK_THROWS((void)engine::standard_mc(0, payoff, s));
}

TEST_CASE("pemc with constant g reduces to plain mc") {
    // g identically 3: the correction a*(mean g~ - mean g) vanishes exactly
    rng::RngStream cs(76, 0), ms(76, 1), ref(76, 0);
    engine::CoupledFn coupled = [](rng::RngStream& s) {
        return std::make_pair(10.0 + s.normal(), 3.0);
    };
    engine::MarginalFn marginal = [](rng::RngStream&) { return 3.0; };
    const auto est = engine::pemc_estimate(400, 4000, coupled, marginal, cs, ms);
    engine::PayoffFn payoff = [](rng::RngStream& s) { return 10.0 + s.normal(); };
    const auto mc = engine::standard_mc(400, payoff, ref);
    CHECK(est.estimate == doctest::Approx(mc.estimate).epsilon(1e-12));
    CHECK(est.sigma2_g == doctest::Approx(0.0));
}

TEST_CASE("pemc with g = 0 reduces to plain mc for any a") {
    for (double a : {0.0, 0.5, 1.0, 2.0}) {
        rng::RngStream cs(77, 0), ms(77, 1), ref(77, 0);
        engine::CoupledFn coupled = [](rng::RngStream& s) {
            return std::make_pair(4.0 + 2.0 * s.normal(), 0.0);
        };
        engine::MarginalFn marginal = [](rng::RngStream&) { return 0.0; };
        const auto est = engine::pemc_estimate(300, 3000, coupled, marginal, cs, ms, 0.05, a);
        engine::PayoffFn payoff = [](rng::RngStream& s) { return 4.0 + 2.0 * s.normal(); };
        const auto mc = engine::standard_mc(300, payoff, ref);
        CHECK(est.estimate == doctest::Approx(mc.estimate).epsilon(1e-12));
    }
}

TEST_CASE("pemc(a) is unbiased for every fixed a") {
    // f = mu + e, g = correlated noise with nonzero mean; averaging estimates
    // over independent repetitions must recover mu at any a
    const double mu = 2.0;
    for (double a : {0.0, 0.5, 1.0, 2.0}) {
        std::vector<double> ests;
        for (int rep = 0; rep < 400; ++rep) {
            rng::RngStream cs(78, 2 * std::uint64_t(rep)), ms(78, 2 * std::uint64_t(rep) + 1);
            engine::CoupledFn coupled = [&](rng::RngStream& s) {
                const auto [u, v] = rng::gaussian_pair(0.7, 1.0, s);
                return std::make_pair(mu + u, 1.0 + v);
            };
            engine::MarginalFn marginal = [](rng::RngStream& s) { return 1.0 + s.normal(); };
            ests.push_back(
                engine::pemc_estimate(50, 500, coupled, marginal, cs, ms, 0.05, a).estimate);
        }
        const double se = std::sqrt(stats::variance(ests) / double(ests.size()));
        CHECK(std::abs(stats::mean(ests) - mu) < 3.5 * se);
    }
}

TEST_CASE("pemc variance tracks the formula") {
    std::vector<double> ests;
    double s2_fg_sum = 0.0, s2_g_sum = 0.0;
    const int reps = 500;
    const long n = 100, N = 1000;
    for (int rep = 0; rep < reps; ++rep) {
        rng::RngStream cs(79, 2 * std::uint64_t(rep)), ms(79, 2 * std::uint64_t(rep) + 1);
        engine::CoupledFn coupled = [](rng::RngStream& s) {
            const auto [u, v] = rng::gaussian_pair(0.9, 1.0, s);
            return std::make_pair(3.0 + u, 3.0 + v);
        };
        engine::MarginalFn marginal = [](rng::RngStream& s) { return 3.0 + s.normal(); };
        const auto est = engine::pemc_estimate(n, N, coupled, marginal, cs, ms);
        ests.push_back(est.estimate);
        s2_fg_sum += est.sigma2_fg;
        s2_g_sum += est.sigma2_g;
    }
    const double var_emp = stats::variance(ests);
    const double var_formula = (s2_fg_sum / reps) / double(n) + (s2_g_sum / reps) / double(N);
    CHECK(var_emp == doctest::Approx(var_formula).epsilon(0.2));
}

TEST_CASE("classical cv at sigma = 0 has zero variance") {
    ParameterPoint theta;
    theta.kind = ModelKind::Gbm;
    theta.rate = 0.02;
    theta.s0 = 100.0;
    theta.sigma = 0.0;
    theta.strike = 90.0;
    theta.dt = 1.0 / 252.0;
    theta.horizon = 1.0;
    theta.n_obs = 252;
    theta.feature_dim = 1;
    rng::RngStream s1(80, 0), s2(80, 1);
    const auto a = engine::classical_cv_estimate(theta, 200, s1);
    const auto b = engine::classical_cv_estimate(theta, 200, s2);
    CHECK(a.estimate == doctest::Approx(b.estimate).epsilon(1e-12));
    CHECK(a.sigma2_fg == doctest::Approx(0.0));
}

TEST_CASE("classical cv agrees with plain mc on the arithmetic asian price") {
    ParameterPoint theta;
    theta.kind = ModelKind::Gbm;
    theta.rate = 0.02;
    theta.s0 = 100.0;
    theta.sigma = 0.2;
    theta.strike = 100.0;
    theta.dt = 1.0 / 252.0;
    theta.horizon = 1.0;
    theta.n_obs = 252;
    theta.feature_dim = 1;
    rng::RngStream s(81, 0);
    const auto cv = engine::classical_cv_estimate(theta, 20000, s);
    rng::RngStream s2(81, 1);
    engine::PayoffFn payoff = [&](rng::RngStream& st) {
        return problem::simulate_payoff(theta, st).payoff;
    };
    const auto mc = engine::standard_mc(20000, payoff, s2);
    const double se = std::sqrt(cv.sigma2_fg / 20000.0 + mc.sigma2_fg / 20000.0);
    CHECK(std::abs(cv.estimate - mc.estimate) < 4.0 * se);
    // the control removes nearly all the variance
    CHECK(cv.sigma2_fg < 0.05 * mc.sigma2_fg);
}

TEST_CASE("estimate json has the reporting fields") {
    auto est = make_estimate(1.5, 100, 1000, 2.0, 0.5);
    est.ci_lo = 1.2;
    est.ci_hi = 1.8;
    est.theta_warning = true;
    const auto j = nlohmann::json::parse(est.to_json());
    CHECK(j.at("estimate").get<double>() == doctest::Approx(1.5));
    CHECK(j.at("n").get<long>() == 100);
    CHECK(j.at("N").get<long>() == 1000);
    CHECK(j.at("ci")[0].get<double>() == doctest::Approx(1.2));
    CHECK(j.at("ci")[1].get<double>() == doctest::Approx(1.8));
    CHECK(j.at("theta_warning").get<bool>());
    CHECK(j.contains("sigma2_fg"));
    CHECK(j.contains("sigma2_g"));
    CHECK(j.contains("alpha"));
    CHECK(j.at("costs").contains("coupled_ns"));
    // the warning flag is omitted when clean
    const auto clean = nlohmann::json::parse(make_estimate(1.0, 10, 10, 1.0, 1.0).to_json());
    CHECK(!clean.contains("theta_warning"));
}
