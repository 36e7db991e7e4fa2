#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pemc/nn.hpp"
#include "pemc/params.hpp"
#include "pemc/problem.hpp"

namespace pemc::predictor {

enum class LabelMode { Raw, CvResidual };

struct TrainingRecord {
    std::vector<double> feature;  // theta encoding followed by X
    double label = 0.0;
};

/// Fixed per-model-kind feature layout. Grid-valued parameters enter as
/// average-pooled summaries (6x6 for the SLV surface; 16-bin profiles of the
/// spot-vol column and the initial forward curve for HJM).
struct FeatureCodec {
    ModelKind kind = ModelKind::Gbm;
    std::size_t theta_dim = 0;
    std::size_t x_dim = 0;

    static FeatureCodec for_theta(const ParameterPoint& theta);

    std::vector<double> encode_theta(const ParameterPoint& theta) const;
    std::vector<double> encode(const ParameterPoint& theta, std::span<const double> x) const;
    std::size_t total_dim() const { return theta_dim + x_dim; }
};

/// Average-pools a row-major rows x cols matrix down to out_r x out_c blocks.
std::vector<double> average_pool(std::span<const double> values, std::size_t rows,
                                 std::size_t cols, std::size_t out_r, std::size_t out_c);

struct TrainConfig {
    long n_train_total = 200000;
    int batch_size = 1024;
    int chunk_size = 32768;      // records generated, trained on, then discarded
    int epochs_per_chunk = 6;
    nn::AdamConfig adam;         // lr 1e-3 default
    double dropout = 0.5;
    int branch_hidden = 64;
    int branch_out = 32;
    int comb_hidden = 64;
    LabelMode label_mode = LabelMode::Raw;
    bool early_stop = false;     // MARE-based, patience 5 validation rounds
    int patience = 5;
};

struct PredictorModel {
    ModelKind kind = ModelKind::Gbm;
    FeatureCodec codec;
    nn::MlpConfig arch;
    nn::Mlp net;
    std::vector<double> in_mean, in_scale;  // frozen before the first gradient step
    double label_mean = 0.0;
    double label_scale = 1.0;
    // training metadata
    long records_seen = 0;
    double final_loss = 0.0;
    std::uint64_t train_seed = 0;
    std::vector<double> loss_curve;  // one entry per chunk-epoch

    double predict(std::span<const double> raw_feature) const;
    double predict(const ParameterPoint& theta, std::span<const double> x) const;

    void save(const std::string& path) const;
    static PredictorModel load(const std::string& path);
};

/// One batch of fresh training records: theta ~ space, one coupled draw each.
/// CvResidual (GBM only) relabels with P_A - P_G + exp(rT) * closed-form
/// geometric price, the boosted-control-variate target.
std::vector<TrainingRecord> generate_training_batch(const ParameterSpaceSpec& space,
                                                    std::size_t batch_size, LabelMode mode,
                                                    pemc::rng::RngStream& stream);

/// Streaming trainer: generates chunks on the fly, freezes normalization on
/// the first chunk, runs several shuffled epochs per chunk, then discards it.
/// Memory use is bounded by chunk_size regardless of n_train_total.
PredictorModel train(const ParameterSpaceSpec& space, const TrainConfig& config,
                     pemc::rng::RngStream& stream);

/// |mean g(X) - mean f(Y)| / |mean f(Y)| over fresh coupled draws at theta.
double mare_diagnostic(const PredictorModel& model, const ParameterPoint& theta,
                       std::size_t eval_count, pemc::rng::RngStream& stream);

/// Held-out MSE of the model on fresh coupled draws from the space.
double held_out_mse(const PredictorModel& model, const ParameterSpaceSpec& space,
                    std::size_t eval_count, LabelMode mode, pemc::rng::RngStream& stream);

}  // namespace pemc::predictor
