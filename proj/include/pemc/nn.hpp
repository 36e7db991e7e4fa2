#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pemc/rng.hpp"

namespace pemc::nn {

struct MlpConfig {
    int theta_dim = 0;
    int x_dim = 0;
    int branch_hidden = 64;
    int branch_out = 32;
    int comb_hidden = 64;
    double dropout = 0.5;

    void validate() const;
};

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// Fully connected layer with Adam state. Weights use fan-in-scaled uniform
/// initialization.
struct Linear {
    int in = 0, out = 0;
    std::vector<double> w, b;
    std::vector<double> gw, gb;
    std::vector<double> mw, vw, mb, vb;

    void init(int in_dim, int out_dim, pemc::rng::RngStream& stream);
    void forward(const double* x, double* y, int batch) const;
    /// Accumulates gw/gb from (x, gy) and writes dL/dx into gx (may be null).
    void backward(const double* x, const double* gy, double* gx, int batch);
    void zero_grad();
    void adam_step(const AdamConfig& opt, long step);
};

/// Two-branch regression MLP with a residual (skip) connection in the
/// combined trunk:
///   theta -> [Linear, ReLU, Dropout, Linear, ReLU] -> e_theta
///   x     -> [Linear, ReLU, Dropout, Linear, ReLU] -> e_x
///   concat(e_theta, e_x) -> [Linear, ReLU, Dropout] -> h
///   h + ReLU(Linear(h)) -> Linear -> scalar
/// Dropout is inverted (activations scaled by 1/(1-p) at train time) so
/// prediction needs no rescaling.
class Mlp {
public:
    Mlp() = default;
    Mlp(const MlpConfig& config, pemc::rng::RngStream& stream);

    const MlpConfig& config() const { return cfg_; }

    /// Inference forward pass (no dropout). features holds `batch` rows of
    /// theta_dim + x_dim inputs; returns one output per row.
    void predict(std::span<const double> features, std::span<double> out, int batch) const;
    double predict_one(std::span<const double> features) const;

    /// One SGD step on a batch: forward with dropout, MSE loss against
    /// targets, backward, Adam update. Returns the batch MSE before the
    /// update. Throws a runtime error if the loss is not finite.
    double train_step(std::span<const double> features, std::span<const double> targets,
                      int batch, const AdamConfig& opt, pemc::rng::RngStream& dropout_stream);

    long steps_taken() const { return step_; }

    /// Flat parameter vector (all layers, fixed order) for persistence.
    std::vector<double> parameters() const;
    void set_parameters(std::span<const double> params);

private:
    MlpConfig cfg_;
    Linear theta1_, theta2_, x1_, x2_, comb1_, comb2_, head_;
    long step_ = 0;

    struct Workspace;
    void forward_impl(std::span<const double> features, int batch, bool train,
                      pemc::rng::RngStream* dropout_stream, Workspace& ws) const;
};

}  // namespace pemc::nn
