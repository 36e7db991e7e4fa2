#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <vector>

#include "pemc/nn.hpp"
#include "pemc/predictor.hpp"
#include "pemc/problem.hpp"
#include "pemc/rng.hpp"
#include "pemc/stats.hpp"

using namespace pemc;

namespace {

ParameterSpaceSpec small_gbm_space() {
    ParameterSpaceSpec space;
    space.base.kind = ModelKind::Gbm;
    space.base.rate = 0.02;
    space.base.s0 = 100.0;
    space.base.sigma = 0.2;
    space.base.strike = 100.0;
    space.base.dt = 1.0 / 252.0;
    space.base.horizon = 1.0;
    space.base.n_obs = 252;
    space.base.feature_dim = 1;
    space.ranges["rate"] = {0.01, 0.03};
    space.ranges["s0"] = {80.0, 120.0};
    space.ranges["sigma"] = {0.05, 0.25};
    space.ranges["strike"] = {90.0, 110.0};
    return space;
}

}  // namespace

TEST_CASE("average pooling block means") {
    // 4x4 -> 2x2: each output is the mean of a 2x2 block
    std::vector<double> m(16);
    for (int i = 0; i < 16; ++i) m[std::size_t(i)] = double(i);
    const auto pooled = predictor::average_pool(m, 4, 4, 2, 2);
    REQUIRE(pooled.size() == 4);
    CHECK(pooled[0] == doctest::Approx((0 + 1 + 4 + 5) / 4.0));
    CHECK(pooled[1] == doctest::Approx((2 + 3 + 6 + 7) / 4.0));
    CHECK(pooled[2] == doctest::Approx((8 + 9 + 12 + 13) / 4.0));
    CHECK(pooled[3] == doctest::Approx((10 + 11 + 14 + 15) / 4.0));
    // identity pooling
    const auto same = predictor::average_pool(m, 4, 4, 4, 4);
    for (int i = 0; i < 16; ++i) CHECK(same[std::size_t(i)] == doctest::Approx(m[std::size_t(i)]));
}

TEST_CASE("feature codec dimensions per model kind") {
    auto theta = problem::with_default_grids(small_gbm_space().base);
    auto codec = predictor::FeatureCodec::for_theta(theta);
    CHECK(codec.theta_dim == 4);
    CHECK(codec.x_dim == 1);
    const auto enc = codec.encode(theta, std::vector<double>{0.37});
    REQUIRE(enc.size() == 5);
    CHECK(enc.back() == doctest::Approx(0.37));

    ParameterPoint ed_theta;
    ed_theta.kind = ModelKind::Ed;
    auto ed_codec = predictor::FeatureCodec::for_theta(ed_theta);
    CHECK(ed_codec.theta_dim == 8);
    CHECK(ed_codec.x_dim == 12);
}

TEST_CASE("training batch: labels from two independent batches agree in mean") {
    const auto space = small_gbm_space();
    rng::RngStream s1(61, 0), s2(61, 1);
    const auto b1 =
        predictor::generate_training_batch(space, 4000, predictor::LabelMode::Raw, s1);
    const auto b2 =
        predictor::generate_training_batch(space, 4000, predictor::LabelMode::Raw, s2);
    REQUIRE(b1.size() == 4000);
    std::vector<double> l1, l2;
    for (const auto& r : b1) l1.push_back(r.label);
    for (const auto& r : b2) l2.push_back(r.label);
    const double se =
        std::sqrt(stats::variance(l1) / 4000.0 + stats::variance(l2) / 4000.0);
    CHECK(std::abs(stats::mean(l1) - stats::mean(l2)) < 3.0 * se);

    rng::RngStream s3(61, 2);
    CHECK(predictor::generate_training_batch(space, 0, predictor::LabelMode::Raw, s3).empty());
}

TEST_CASE("cv_residual labels keep the mean and shed most of the variance") {
    // freeze theta so the label variance is purely the payoff noise
    auto space = small_gbm_space();
    space.ranges.clear();
    rng::RngStream sr(62, 0), sc(62, 1);
    const auto raw =
        predictor::generate_training_batch(space, 4000, predictor::LabelMode::Raw, sr);
    const auto res =
        predictor::generate_training_batch(space, 4000, predictor::LabelMode::CvResidual, sc);
    std::vector<double> lr, lc;
    for (const auto& r : raw) lr.push_back(r.label);
    for (const auto& r : res) lc.push_back(r.label);
    // both label modes are unbiased for the same price
    const double se =
        std::sqrt(stats::variance(lr) / 4000.0 + stats::variance(lc) / 4000.0);
    CHECK(std::abs(stats::mean(lr) - stats::mean(lc)) < 4.0 * se);
    // the geometric control removes the bulk of the payoff variance
    CHECK(stats::variance(lc) < 0.05 * stats::variance(lr));

    ParameterSpaceSpec bad = space;
    bad.base.kind = ModelKind::Heston;
    rng::RngStream s2(62, 1);
    CHECK_THROWS(
        (void)predictor::generate_training_batch(bad, 10, predictor::LabelMode::CvResidual, s2));
}

TEST_CASE("mlp learns a linear map") {
    nn::MlpConfig cfg;
    cfg.theta_dim = 2;
    cfg.x_dim = 1;
    cfg.dropout = 0.0;
    rng::RngStream init(63, 0), data(63, 1), drop(63, 2);
    nn::Mlp net(cfg, init);
    nn::AdamConfig adam;
    const int batch = 128;
    std::vector<double> feats(std::size_t(batch) * 3), targets(batch);
    double last = 0.0;
    for (int step = 0; step < 1500; ++step) {
        for (int i = 0; i < batch; ++i) {
            const double a = data.normal(), b = data.normal(), x = data.normal();
            feats[std::size_t(i) * 3 + 0] = a;
            feats[std::size_t(i) * 3 + 1] = b;
            feats[std::size_t(i) * 3 + 2] = x;
            targets[std::size_t(i)] = 2.0 * x;  // label = 2 X1
        }
        last = net.train_step(feats, targets, batch, adam, drop);
    }
    CHECK(last < 0.01 * 4.0);  // < 1% of Var(label) = 4
}

TEST_CASE("mlp constant target converges to the constant") {
    nn::MlpConfig cfg;
    cfg.theta_dim = 1;
    cfg.x_dim = 1;
    cfg.dropout = 0.0;
    rng::RngStream init(64, 0), data(64, 1), drop(64, 2);
    nn::Mlp net(cfg, init);
    nn::AdamConfig adam;
    const int batch = 64;
    std::vector<double> feats(std::size_t(batch) * 2), targets(batch, 3.5);
    for (int step = 0; step < 2000; ++step) {
        for (auto& f : feats) f = data.normal();
        net.train_step(feats, targets, batch, adam, drop);
    }
    std::vector<double> probe = {0.3, -0.7};
    CHECK(net.predict_one(probe) == doctest::Approx(3.5).epsilon(0.01));
}

TEST_CASE("mlp prediction is deterministic and parameter round-trip exact") {
    nn::MlpConfig cfg;
    cfg.theta_dim = 3;
    cfg.x_dim = 2;
    rng::RngStream init(65, 0);
    nn::Mlp net(cfg, init);
    const std::vector<double> f = {0.1, -0.2, 0.3, 0.4, -0.5};
    const double y = net.predict_one(f);
    CHECK(net.predict_one(f) == doctest::Approx(y));

    rng::RngStream init2(65, 1);
    nn::Mlp other(cfg, init2);
    other.set_parameters(net.parameters());
    CHECK(other.predict_one(f) == doctest::Approx(y).epsilon(1e-15));
}

TEST_CASE("trained gbm model: correlation, mare, and held-out improvement") {
    const auto space = small_gbm_space();
    predictor::TrainConfig tc;
    tc.n_train_total = 20000;
    tc.chunk_size = 10000;
    tc.batch_size = 256;
    tc.epochs_per_chunk = 4;
    rng::RngStream ts(66, 0);
    const auto model = predictor::train(space, tc, ts);
    CHECK(model.records_seen == 20000);
    CHECK(!model.loss_curve.empty());
    CHECK(model.loss_curve.back() < model.loss_curve.front());

    // correlation with the payoff on held-out coupled pairs at the eval theta
    const auto theta = problem::with_default_grids(space.base);
    rng::RngStream es(66, 1);
    const int n = 4000;
    std::vector<double> fs(n), gs(n);
    for (int i = 0; i < n; ++i) {
        const auto draw = problem::simulate_payoff(theta, es);
        fs[std::size_t(i)] = draw.payoff;
        gs[std::size_t(i)] = model.predict(theta, draw.x);
    }
    CHECK(stats::correlation(fs, gs) > 0.5);

    rng::RngStream ms(66, 2);
    CHECK(predictor::mare_diagnostic(model, theta, 4000, ms) < 0.25);

    // training beats the constant-mean predictor on held-out MSE
    rng::RngStream hs1(66, 3), hs2(66, 3);
    const double mse_trained =
        predictor::held_out_mse(model, space, 4000, predictor::LabelMode::Raw, hs1);
    const auto held =
        predictor::generate_training_batch(space, 4000, predictor::LabelMode::Raw, hs2);
    std::vector<double> labels;
    for (const auto& r : held) labels.push_back(r.label);
    CHECK(mse_trained < stats::variance(labels));
}

TEST_CASE("model persistence round trip") {
    const auto space = small_gbm_space();
    predictor::TrainConfig tc;
    tc.n_train_total = 5000;
    tc.chunk_size = 5000;
    tc.batch_size = 256;
    tc.epochs_per_chunk = 2;
    rng::RngStream ts(67, 0);
    const auto model = predictor::train(space, tc, ts);
    const std::string path = "test_model_tmp.bin";
    model.save(path);
    const auto loaded = predictor::PredictorModel::load(path);
    CHECK(loaded.kind == model.kind);
    CHECK(loaded.records_seen == model.records_seen);
    const auto theta = problem::with_default_grids(space.base);
    rng::RngStream es(67, 1);
    for (int i = 0; i < 50; ++i) {
        const auto draw = problem::simulate_payoff(theta, es);
        CHECK(loaded.predict(theta, draw.x) ==
              doctest::Approx(model.predict(theta, draw.x)).epsilon(1e-15));
    }
    std::filesystem::remove(path);
}

TEST_CASE("mare errors out when the payoff mean vanishes") {
    ParameterSpaceSpec space = small_gbm_space();
    auto theta = problem::with_default_grids(space.base);
    theta.sigma = 0.0;
    theta.rate = 0.0;
    theta.strike = 200.0;  // payoff identically zero
    predictor::TrainConfig tc;
    tc.n_train_total = 1000;
    tc.chunk_size = 1000;
    tc.batch_size = 128;
    tc.epochs_per_chunk = 1;
    rng::RngStream ts(68, 0);
    const auto model = predictor::train(space, tc, ts);
    rng::RngStream ms(68, 1);
    CHECK_THROWS((void)predictor::mare_diagnostic(model, theta, 100, ms));
}

TEST_CASE("normalization statistics are frozen and invertible") {
    const auto space = small_gbm_space();
    predictor::TrainConfig tc;
    tc.n_train_total = 4000;
    tc.chunk_size = 2000;
    tc.batch_size = 256;
    tc.epochs_per_chunk = 1;
    rng::RngStream ts(69, 0);
    const auto model = predictor::train(space, tc, ts);
    REQUIRE(model.in_mean.size() == model.codec.total_dim());
    for (double sc : model.in_scale) CHECK(sc > 0.0);
    // round trip x -> normalized -> x
    for (std::size_t k = 0; k < model.in_mean.size(); ++k) {
        const double x = 1.234;
        const double z = (x - model.in_mean[k]) / model.in_scale[k];
        CHECK(z * model.in_scale[k] + model.in_mean[k] == doctest::Approx(x).epsilon(1e-12));
    }
}
