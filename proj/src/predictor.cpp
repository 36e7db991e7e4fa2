#include "pemc/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "pemc/payoffs.hpp"
#include "pemc/stats.hpp"
#include "pemc/surfaces.hpp"

namespace pemc::predictor {

using nlohmann::json;

std::vector<double> average_pool(std::span<const double> values, std::size_t rows,
                                 std::size_t cols, std::size_t out_r, std::size_t out_c) {
    if (values.size() != rows * cols)
        throw std::invalid_argument("average_pool: size mismatch");
    if (out_r == 0 || out_c == 0 || out_r > rows || out_c > cols)
        throw std::invalid_argument("average_pool: bad output shape");
    std::vector<double> out(out_r * out_c, 0.0);
    for (std::size_t br = 0; br < out_r; ++br) {
        const std::size_t r0 = br * rows / out_r;
        const std::size_t r1 = (br + 1) * rows / out_r;
        for (std::size_t bc = 0; bc < out_c; ++bc) {
            const std::size_t c0 = bc * cols / out_c;
            const std::size_t c1 = (bc + 1) * cols / out_c;
            double acc = 0.0;
            for (std::size_t r = r0; r < r1; ++r)
                for (std::size_t c = c0; c < c1; ++c) acc += values[r * cols + c];
            out[br * out_c + bc] = acc / static_cast<double>((r1 - r0) * (c1 - c0));
        }
    }
    return out;
}

namespace {

constexpr std::size_t kSurfacePool = 6;
constexpr std::size_t kCurvePool = 16;

}  // namespace

FeatureCodec FeatureCodec::for_theta(const ParameterPoint& theta) {
    FeatureCodec codec;
    codec.kind = theta.kind;
    codec.x_dim = problem::x_dimension(theta);
    switch (theta.kind) {
        case ModelKind::Gbm: codec.theta_dim = 4; break;
        case ModelKind::Heston: codec.theta_dim = 8; break;
        case ModelKind::Slv: codec.theta_dim = kSurfacePool * kSurfacePool + 6; break;
        case ModelKind::Hjm: codec.theta_dim = 2 * kCurvePool + 5; break;
        case ModelKind::Ed: codec.theta_dim = 8; break;
    }
    return codec;
}

std::vector<double> FeatureCodec::encode_theta(const ParameterPoint& theta) const {
    if (theta.kind != kind)
        throw std::invalid_argument("FeatureCodec: model kind mismatch");
    std::vector<double> out;
    out.reserve(theta_dim);
    switch (kind) {
        case ModelKind::Gbm:
            out = {theta.rate, theta.s0, theta.sigma, theta.strike};
            break;
        case ModelKind::Heston:
            out = {theta.rate, theta.eta, theta.delta, theta.rho,
                   theta.kappa, theta.s0, theta.nu0, theta.strike};
            break;
        case ModelKind::Slv: {
            if (!theta.surface)
                throw std::invalid_argument("FeatureCodec: SLV theta without surface");
            out = average_pool(theta.surface->values, theta.surface->spots.size(),
                              theta.surface->times.size(), kSurfacePool, kSurfacePool);
            for (double v : {theta.rate, theta.delta, theta.kappa, theta.rho, theta.s0,
                             theta.strike})
                out.push_back(v);
            break;
        }
        case ModelKind::Hjm: {
            if (!theta.hjm) throw std::invalid_argument("FeatureCodec: HJM theta without grids");
            const std::size_t n = theta.hjm->times.size();
            std::vector<double> vol_col(n);
            for (std::size_t j = 0; j < n; ++j) vol_col[j] = theta.hjm->vol_at(0, j);
            out = average_pool(vol_col, 1, n, 1, kCurvePool);
            const auto fwd = average_pool(theta.hjm->fwd0, 1, n, 1, kCurvePool);
            out.insert(out.end(), fwd.begin(), fwd.end());
            for (double v : {theta.sigma0, theta.alpha_sigma, theta.f0, theta.c_f,
                             theta.alpha_f})
                out.push_back(v);
            break;
        }
        case ModelKind::Ed: {
            out.push_back(static_cast<double>(theta.ed_tau));
            for (int c : theta.ed_hosp2_shifts) out.push_back(static_cast<double>(c));
            out.push_back(theta.ed_crisis);
            break;
        }
    }
    if (out.size() != theta_dim)
        throw std::logic_error("FeatureCodec: encoded theta dimension mismatch");
    return out;
}

std::vector<double> FeatureCodec::encode(const ParameterPoint& theta,
                                         std::span<const double> x) const {
    if (x.size() != x_dim) throw std::invalid_argument("FeatureCodec: X dimension mismatch");
    auto out = encode_theta(theta);
    out.insert(out.end(), x.begin(), x.end());
    return out;
}

std::vector<TrainingRecord> generate_training_batch(const ParameterSpaceSpec& space,
                                                    std::size_t batch_size, LabelMode mode,
                                                    pemc::rng::RngStream& stream) {
    if (mode == LabelMode::CvResidual && space.base.kind != ModelKind::Gbm)
        throw std::invalid_argument("generate_training_batch: cv_residual requires GBM");
    const auto codec = FeatureCodec::for_theta(space.base);
    std::vector<TrainingRecord> out;
    out.reserve(batch_size);
    for (std::size_t i = 0; i < batch_size; ++i) {
        const auto theta = problem::sample_parameter_point(space, stream);
        TrainingRecord rec;
        if (mode == LabelMode::CvResidual) {
            const auto sample = models::simulate_gbm(theta, theta.feature_dim, stream);
            const auto spec = problem::make_payoff_spec(theta);
            auto geo_spec = spec;
            geo_spec.kind = payoffs::PayoffKind::AsianGeometric;
            const double p_a = payoffs::evaluate(sample.path, spec);
            const double p_g = payoffs::evaluate(sample.path, geo_spec);
            const double geo_mean = std::exp(theta.rate * theta.horizon) *
                                    payoffs::geometric_asian_closed_form(theta);
            rec.label = p_a - p_g + geo_mean;
            rec.feature = codec.encode(theta, sample.features);
        } else {
            const auto draw = problem::simulate_payoff(theta, stream);
            rec.label = draw.payoff;
            rec.feature = codec.encode(theta, draw.x);
        }
        for (double v : rec.feature)
            if (!std::isfinite(v))
                throw std::runtime_error("generate_training_batch: non-finite feature");
        if (!std::isfinite(rec.label))
            throw std::runtime_error("generate_training_batch: non-finite label");
        out.push_back(std::move(rec));
    }
    return out;
}

double PredictorModel::predict(std::span<const double> raw_feature) const {
    if (raw_feature.size() != codec.total_dim())
        throw std::invalid_argument("PredictorModel: feature layout mismatch");
    std::vector<double> norm(raw_feature.size());
    for (std::size_t i = 0; i < norm.size(); ++i)
        norm[i] = (raw_feature[i] - in_mean[i]) / in_scale[i];
    return net.predict_one(norm) * label_scale + label_mean;
}

double PredictorModel::predict(const ParameterPoint& theta, std::span<const double> x) const {
    const auto feature = codec.encode(theta, x);
    return predict(feature);
}

namespace {

double validation_mare(const PredictorModel& model, const ParameterSpaceSpec& space,
                       std::size_t count, LabelMode mode, pemc::rng::RngStream& stream) {
    const auto batch = generate_training_batch(space, count, mode, stream);
    double mean_f = 0.0, mean_g = 0.0;
    for (const auto& rec : batch) {
        mean_f += rec.label;
        mean_g += model.predict(rec.feature);
    }
    mean_f /= static_cast<double>(batch.size());
    mean_g /= static_cast<double>(batch.size());
    if (std::abs(mean_f) < 1e-12)
        throw std::runtime_error("validation MARE undefined: mean payoff is ~0");
    return std::abs(mean_g - mean_f) / std::abs(mean_f);
}

}  // namespace

PredictorModel train(const ParameterSpaceSpec& space, const TrainConfig& config,
                     pemc::rng::RngStream& stream) {
    if (config.n_train_total < config.batch_size)
        throw std::invalid_argument("train: n_train_total must be >= batch_size");
    if (config.chunk_size < config.batch_size)
        throw std::invalid_argument("train: chunk_size must be >= batch_size");

    PredictorModel model;
    model.kind = space.base.kind;
    model.codec = FeatureCodec::for_theta(space.base);
    model.arch.theta_dim = static_cast<int>(model.codec.theta_dim);
    model.arch.x_dim = static_cast<int>(model.codec.x_dim);
    model.arch.branch_hidden = config.branch_hidden;
    model.arch.branch_out = config.branch_out;
    model.arch.comb_hidden = config.comb_hidden;
    model.arch.dropout = config.dropout;
    model.net = nn::Mlp(model.arch, stream);
    model.train_seed = stream.master_seed();

    const std::size_t dim = model.codec.total_dim();
    long remaining = config.n_train_total;
    bool stats_frozen = false;
    double best_mare = std::numeric_limits<double>::infinity();
    int rounds_without_improvement = 0;

    std::vector<double> feats, labels, batch_feats, batch_labels;
    std::vector<std::size_t> order;
    while (remaining > 0) {
        const auto chunk_records = static_cast<std::size_t>(
            std::min<long>(remaining, config.chunk_size));
        remaining -= static_cast<long>(chunk_records);
        auto chunk = generate_training_batch(space, chunk_records, config.label_mode, stream);
        model.records_seen += static_cast<long>(chunk.size());

        if (!stats_frozen) {
            model.in_mean.assign(dim, 0.0);
            model.in_scale.assign(dim, 0.0);
            double lm = 0.0, ls = 0.0;
            for (const auto& rec : chunk) {
                for (std::size_t i = 0; i < dim; ++i) model.in_mean[i] += rec.feature[i];
                lm += rec.label;
            }
            const auto cn = static_cast<double>(chunk.size());
            for (auto& v : model.in_mean) v /= cn;
            lm /= cn;
            for (const auto& rec : chunk) {
                for (std::size_t i = 0; i < dim; ++i) {
                    const double d = rec.feature[i] - model.in_mean[i];
                    model.in_scale[i] += d * d;
                }
                ls += (rec.label - lm) * (rec.label - lm);
            }
            for (auto& v : model.in_scale) v = std::max(std::sqrt(v / cn), 1e-12);
            model.label_mean = lm;
            model.label_scale = std::max(std::sqrt(ls / cn), 1e-12);
            stats_frozen = true;
        }

        feats.resize(chunk.size() * dim);
        labels.resize(chunk.size());
        for (std::size_t r = 0; r < chunk.size(); ++r) {
            for (std::size_t i = 0; i < dim; ++i)
                feats[r * dim + i] =
                    (chunk[r].feature[i] - model.in_mean[i]) / model.in_scale[i];
            labels[r] = (chunk[r].label - model.label_mean) / model.label_scale;
        }
        chunk.clear();
        chunk.shrink_to_fit();

        order.resize(labels.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        for (int epoch = 0; epoch < config.epochs_per_chunk; ++epoch) {
            for (std::size_t i = order.size(); i > 1; --i)
                std::swap(order[i - 1], order[stream.next_u64() % i]);
            double epoch_loss = 0.0;
            std::size_t n_batches = 0;
            for (std::size_t start = 0; start < order.size();
                 start += static_cast<std::size_t>(config.batch_size)) {
                const std::size_t stop =
                    std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
                const std::size_t bs = stop - start;
                batch_feats.resize(bs * dim);
                batch_labels.resize(bs);
                for (std::size_t k = 0; k < bs; ++k) {
                    const std::size_t src = order[start + k];
                    std::copy(feats.begin() + static_cast<std::ptrdiff_t>(src * dim),
                              feats.begin() + static_cast<std::ptrdiff_t>((src + 1) * dim),
                              batch_feats.begin() + static_cast<std::ptrdiff_t>(k * dim));
                    batch_labels[k] = labels[src];
                }
                epoch_loss += model.net.train_step(batch_feats, batch_labels,
                                                   static_cast<int>(bs), config.adam, stream);
                ++n_batches;
            }
            model.loss_curve.push_back(epoch_loss / static_cast<double>(n_batches));
        }

        if (config.early_stop) {
            const double mare = validation_mare(model, space, 2048, config.label_mode, stream);
            if (mare < best_mare - 1e-4) {
                best_mare = mare;
                rounds_without_improvement = 0;
            } else if (++rounds_without_improvement >= config.patience) {
                break;
            }
        }
    }
    model.final_loss = model.loss_curve.empty() ? 0.0 : model.loss_curve.back();
    return model;
}

double mare_diagnostic(const PredictorModel& model, const ParameterPoint& theta,
                       std::size_t eval_count, pemc::rng::RngStream& stream) {
    if (eval_count < 1) throw std::invalid_argument("mare_diagnostic: eval_count must be >= 1");
    double mean_f = 0.0, mean_g = 0.0;
    for (std::size_t i = 0; i < eval_count; ++i) {
        const auto draw = problem::simulate_payoff(theta, stream);
        mean_f += draw.payoff;
        mean_g += model.predict(theta, draw.x);
    }
    mean_f /= static_cast<double>(eval_count);
    mean_g /= static_cast<double>(eval_count);
    if (std::abs(mean_f) < 1e-12)
        throw std::runtime_error("mare_diagnostic undefined: mean payoff is ~0");
    return std::abs(mean_g - mean_f) / std::abs(mean_f);
}

double held_out_mse(const PredictorModel& model, const ParameterSpaceSpec& space,
                    std::size_t eval_count, LabelMode mode, pemc::rng::RngStream& stream) {
    const auto batch = generate_training_batch(space, eval_count, mode, stream);
    double acc = 0.0;
    for (const auto& rec : batch) {
        const double e = model.predict(rec.feature) - rec.label;
        acc += e * e;
    }
    return acc / static_cast<double>(batch.size());
}

namespace {

constexpr int kModelFormatVersion = 1;

}  // namespace

void PredictorModel::save(const std::string& path) const {
    json header;
    header["version"] = kModelFormatVersion;
    header["kind"] = to_string(kind);
    header["arch"] = {{"theta_dim", arch.theta_dim},
                      {"x_dim", arch.x_dim},
                      {"branch_hidden", arch.branch_hidden},
                      {"branch_out", arch.branch_out},
                      {"comb_hidden", arch.comb_hidden},
                      {"dropout", arch.dropout}};
    header["in_mean"] = in_mean;
    header["in_scale"] = in_scale;
    header["label_mean"] = label_mean;
    header["label_scale"] = label_scale;
    header["records_seen"] = records_seen;
    header["final_loss"] = final_loss;
    header["train_seed"] = train_seed;
    header["loss_curve"] = loss_curve;
    const auto params = net.parameters();
    header["param_count"] = params.size();

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("PredictorModel::save: cannot open " + path);
    out << header.dump() << '\n';
    // payload: little-endian float64 parameter vector
    out.write(reinterpret_cast<const char*>(params.data()),
              static_cast<std::streamsize>(params.size() * sizeof(double)));
    if (!out) throw std::runtime_error("PredictorModel::save: write failed for " + path);
}

PredictorModel PredictorModel::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("PredictorModel::load: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("PredictorModel::load: empty file");
    const json header = json::parse(line);
    if (header.at("version").get<int>() != kModelFormatVersion)
        throw std::runtime_error("PredictorModel::load: unsupported format version");

    PredictorModel model;
    model.kind = model_kind_from_string(header.at("kind").get<std::string>());
    const auto& arch = header.at("arch");
    model.arch.theta_dim = arch.at("theta_dim").get<int>();
    model.arch.x_dim = arch.at("x_dim").get<int>();
    model.arch.branch_hidden = arch.at("branch_hidden").get<int>();
    model.arch.branch_out = arch.at("branch_out").get<int>();
    model.arch.comb_hidden = arch.at("comb_hidden").get<int>();
    model.arch.dropout = arch.at("dropout").get<double>();
    model.codec.kind = model.kind;
    model.codec.theta_dim = static_cast<std::size_t>(model.arch.theta_dim);
    model.codec.x_dim = static_cast<std::size_t>(model.arch.x_dim);
    model.in_mean = header.at("in_mean").get<std::vector<double>>();
    model.in_scale = header.at("in_scale").get<std::vector<double>>();
    model.label_mean = header.at("label_mean").get<double>();
    model.label_scale = header.at("label_scale").get<double>();
    model.records_seen = header.at("records_seen").get<long>();
    model.final_loss = header.at("final_loss").get<double>();
    model.train_seed = header.at("train_seed").get<std::uint64_t>();
    model.loss_curve = header.at("loss_curve").get<std::vector<double>>();

    pemc::rng::RngStream init(0, 0);
    model.net = nn::Mlp(model.arch, init);
    const auto count = header.at("param_count").get<std::size_t>();
    std::vector<double> params(count);
    in.read(reinterpret_cast<char*>(params.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
    if (static_cast<std::size_t>(in.gcount()) != count * sizeof(double))
        throw std::runtime_error("PredictorModel::load: truncated payload in " + path);
    model.net.set_parameters(params);
    return model;
}

}  // namespace pemc::predictor
