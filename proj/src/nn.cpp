#include "pemc/nn.hpp"

#include <cmath>
#include <stdexcept>

namespace pemc::nn {

void MlpConfig::validate() const {
    if (theta_dim < 1 || x_dim < 1)
        throw std::invalid_argument("MlpConfig: theta_dim and x_dim must be >= 1");
    if (branch_hidden < 1 || branch_out < 1 || comb_hidden < 1)
        throw std::invalid_argument("MlpConfig: layer widths must be >= 1");
    if (!(dropout >= 0.0 && dropout < 1.0))
        throw std::invalid_argument("MlpConfig: dropout must be in [0,1)");
}

void Linear::init(int in_dim, int out_dim, pemc::rng::RngStream& stream) {
    in = in_dim;
    out = out_dim;
    const auto n = static_cast<std::size_t>(in) * static_cast<std::size_t>(out);
    w.resize(n);
    b.resize(static_cast<std::size_t>(out));
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    for (auto& v : w) v = stream.uniform(-bound, bound);
    for (auto& v : b) v = stream.uniform(-bound, bound);
    gw.assign(n, 0.0);
    gb.assign(b.size(), 0.0);
    mw.assign(n, 0.0);
    vw.assign(n, 0.0);
    mb.assign(b.size(), 0.0);
    vb.assign(b.size(), 0.0);
}

void Linear::forward(const double* x, double* y, int batch) const {
    for (int bi = 0; bi < batch; ++bi) {
        const double* xr = x + static_cast<std::size_t>(bi) * in;
        double* yr = y + static_cast<std::size_t>(bi) * out;
        for (int o = 0; o < out; ++o) {
            const double* wr = w.data() + static_cast<std::size_t>(o) * in;
            double acc = b[static_cast<std::size_t>(o)];
            for (int i = 0; i < in; ++i) acc += wr[i] * xr[i];
            yr[o] = acc;
        }
    }
}

void Linear::backward(const double* x, const double* gy, double* gx, int batch) {
    for (int bi = 0; bi < batch; ++bi) {
        const double* xr = x + static_cast<std::size_t>(bi) * in;
        const double* gyr = gy + static_cast<std::size_t>(bi) * out;
        for (int o = 0; o < out; ++o) {
            const double g = gyr[o];
            if (g == 0.0) continue;
            double* gwr = gw.data() + static_cast<std::size_t>(o) * in;
            for (int i = 0; i < in; ++i) gwr[i] += g * xr[i];
            gb[static_cast<std::size_t>(o)] += g;
        }
        if (gx) {
            double* gxr = gx + static_cast<std::size_t>(bi) * in;
            for (int i = 0; i < in; ++i) {
                double acc = 0.0;
                for (int o = 0; o < out; ++o)
                    acc += w[static_cast<std::size_t>(o) * in + i] * gyr[o];
                gxr[i] = acc;
            }
        }
    }
}

void Linear::zero_grad() {
    std::fill(gw.begin(), gw.end(), 0.0);
    std::fill(gb.begin(), gb.end(), 0.0);
}

namespace {

void adam_update(std::vector<double>& p, const std::vector<double>& g, std::vector<double>& m,
                 std::vector<double>& v, const AdamConfig& opt, long step) {
    const double bc1 = 1.0 - std::pow(opt.beta1, static_cast<double>(step));
    const double bc2 = 1.0 - std::pow(opt.beta2, static_cast<double>(step));
    for (std::size_t i = 0; i < p.size(); ++i) {
        m[i] = opt.beta1 * m[i] + (1.0 - opt.beta1) * g[i];
        v[i] = opt.beta2 * v[i] + (1.0 - opt.beta2) * g[i] * g[i];
        p[i] -= opt.lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + opt.eps);
    }
}

}  // namespace

void Linear::adam_step(const AdamConfig& opt, long step) {
    adam_update(w, gw, mw, vw, opt, step);
    adam_update(b, gb, mb, vb, opt, step);
}

struct Mlp::Workspace {
    std::vector<double> tin, xin;
    std::vector<double> t1r, t1m, t1a, t2z, t2a;
    std::vector<double> x1r, x1m, x1a, x2z, x2a;
    std::vector<double> cat, c1r, c1m, c1a, c2z, c2a, sum, y;
};

Mlp::Mlp(const MlpConfig& config, pemc::rng::RngStream& stream) : cfg_(config) {
    cfg_.validate();
    theta1_.init(cfg_.theta_dim, cfg_.branch_hidden, stream);
    theta2_.init(cfg_.branch_hidden, cfg_.branch_out, stream);
    x1_.init(cfg_.x_dim, cfg_.branch_hidden, stream);
    x2_.init(cfg_.branch_hidden, cfg_.branch_out, stream);
    comb1_.init(2 * cfg_.branch_out, cfg_.comb_hidden, stream);
    comb2_.init(cfg_.comb_hidden, cfg_.comb_hidden, stream);
    head_.init(cfg_.comb_hidden, 1, stream);
}

void Mlp::forward_impl(std::span<const double> features, int batch, bool train,
                       pemc::rng::RngStream* dropout_stream, Workspace& ws) const {
    const auto b = static_cast<std::size_t>(batch);
    const std::size_t td = static_cast<std::size_t>(cfg_.theta_dim);
    const std::size_t xd = static_cast<std::size_t>(cfg_.x_dim);
    if (features.size() != b * (td + xd))
        throw std::invalid_argument("Mlp: feature buffer size mismatch");
    const std::size_t bh = static_cast<std::size_t>(cfg_.branch_hidden);
    const std::size_t bo = static_cast<std::size_t>(cfg_.branch_out);
    const std::size_t ch = static_cast<std::size_t>(cfg_.comb_hidden);

    ws.tin.resize(b * td);
    ws.xin.resize(b * xd);
    for (std::size_t bi = 0; bi < b; ++bi) {
        const double* row = features.data() + bi * (td + xd);
        std::copy(row, row + td, ws.tin.data() + bi * td);
        std::copy(row + td, row + td + xd, ws.xin.data() + bi * xd);
    }

    const double keep = 1.0 - cfg_.dropout;
    auto relu_dropout = [&](std::vector<double>& z, std::vector<double>& r,
                            std::vector<double>& m, std::vector<double>& a) {
        r.resize(z.size());
        m.resize(z.size());
        a.resize(z.size());
        for (std::size_t i = 0; i < z.size(); ++i) {
            r[i] = z[i] > 0.0 ? z[i] : 0.0;
            double mask = 1.0;
            if (train && cfg_.dropout > 0.0)
                mask = dropout_stream->uniform01() < keep ? 1.0 / keep : 0.0;
            m[i] = mask;
            a[i] = r[i] * mask;
        }
    };
    auto relu = [](std::vector<double>& z, std::vector<double>& a) {
        a.resize(z.size());
        for (std::size_t i = 0; i < z.size(); ++i) a[i] = z[i] > 0.0 ? z[i] : 0.0;
    };

    std::vector<double> z;
    z.resize(b * bh);
    theta1_.forward(ws.tin.data(), z.data(), batch);
    relu_dropout(z, ws.t1r, ws.t1m, ws.t1a);
    ws.t2z.resize(b * bo);
    theta2_.forward(ws.t1a.data(), ws.t2z.data(), batch);
    relu(ws.t2z, ws.t2a);

    z.resize(b * bh);
    x1_.forward(ws.xin.data(), z.data(), batch);
    relu_dropout(z, ws.x1r, ws.x1m, ws.x1a);
    ws.x2z.resize(b * bo);
    x2_.forward(ws.x1a.data(), ws.x2z.data(), batch);
    relu(ws.x2z, ws.x2a);

    ws.cat.resize(b * 2 * bo);
    for (std::size_t bi = 0; bi < b; ++bi) {
        std::copy(ws.t2a.data() + bi * bo, ws.t2a.data() + (bi + 1) * bo,
                  ws.cat.data() + bi * 2 * bo);
        std::copy(ws.x2a.data() + bi * bo, ws.x2a.data() + (bi + 1) * bo,
                  ws.cat.data() + bi * 2 * bo + bo);
    }

    z.resize(b * ch);
    comb1_.forward(ws.cat.data(), z.data(), batch);
    relu_dropout(z, ws.c1r, ws.c1m, ws.c1a);
    ws.c2z.resize(b * ch);
    comb2_.forward(ws.c1a.data(), ws.c2z.data(), batch);
    relu(ws.c2z, ws.c2a);
    ws.sum.resize(b * ch);
    for (std::size_t i = 0; i < b * ch; ++i) ws.sum[i] = ws.c1a[i] + ws.c2a[i];
    ws.y.resize(b);
    head_.forward(ws.sum.data(), ws.y.data(), batch);
}

void Mlp::predict(std::span<const double> features, std::span<double> out, int batch) const {
    Workspace ws;
    forward_impl(features, batch, false, nullptr, ws);
    if (out.size() != static_cast<std::size_t>(batch))
        throw std::invalid_argument("Mlp::predict: output buffer size mismatch");
    std::copy(ws.y.begin(), ws.y.end(), out.begin());
}

double Mlp::predict_one(std::span<const double> features) const {
    double y = 0.0;
    predict(features, {&y, 1}, 1);
    return y;
}

double Mlp::train_step(std::span<const double> features, std::span<const double> targets,
                       int batch, const AdamConfig& opt,
                       pemc::rng::RngStream& dropout_stream) {
    if (targets.size() != static_cast<std::size_t>(batch))
        throw std::invalid_argument("Mlp::train_step: target size mismatch");
    Workspace ws;
    forward_impl(features, batch, true, &dropout_stream, ws);

    const auto b = static_cast<std::size_t>(batch);
    const std::size_t bo = static_cast<std::size_t>(cfg_.branch_out);
    const std::size_t ch = static_cast<std::size_t>(cfg_.comb_hidden);

    double loss = 0.0;
    std::vector<double> gy(b);
    for (std::size_t i = 0; i < b; ++i) {
        const double e = ws.y[i] - targets[i];
        loss += e * e;
        gy[i] = 2.0 * e / static_cast<double>(b);
    }
    loss /= static_cast<double>(b);
    if (!std::isfinite(loss))
        throw std::runtime_error(
            "Mlp::train_step: loss diverged (non-finite) at step " + std::to_string(step_ + 1));

    for (Linear* l : {&theta1_, &theta2_, &x1_, &x2_, &comb1_, &comb2_, &head_}) l->zero_grad();

    std::vector<double> gsum(b * ch);
    head_.backward(ws.sum.data(), gy.data(), gsum.data(), batch);

    std::vector<double> gc2(b * ch);
    for (std::size_t i = 0; i < b * ch; ++i) gc2[i] = ws.c2z[i] > 0.0 ? gsum[i] : 0.0;
    std::vector<double> gc1_from2(b * ch);
    comb2_.backward(ws.c1a.data(), gc2.data(), gc1_from2.data(), batch);

    std::vector<double> gz5(b * ch);
    for (std::size_t i = 0; i < b * ch; ++i) {
        const double g = gsum[i] + gc1_from2[i];
        gz5[i] = ws.c1r[i] > 0.0 ? g * ws.c1m[i] : 0.0;
    }
    std::vector<double> gcat(b * 2 * bo);
    comb1_.backward(ws.cat.data(), gz5.data(), gcat.data(), batch);

    std::vector<double> gt2(b * bo), gx2(b * bo);
    for (std::size_t bi = 0; bi < b; ++bi)
        for (std::size_t k = 0; k < bo; ++k) {
            gt2[bi * bo + k] = ws.t2z[bi * bo + k] > 0.0 ? gcat[bi * 2 * bo + k] : 0.0;
            gx2[bi * bo + k] = ws.x2z[bi * bo + k] > 0.0 ? gcat[bi * 2 * bo + bo + k] : 0.0;
        }

    std::vector<double> gt1(ws.t1a.size()), gx1(ws.x1a.size());
    theta2_.backward(ws.t1a.data(), gt2.data(), gt1.data(), batch);
    x2_.backward(ws.x1a.data(), gx2.data(), gx1.data(), batch);

    for (std::size_t i = 0; i < gt1.size(); ++i)
        gt1[i] = ws.t1r[i] > 0.0 ? gt1[i] * ws.t1m[i] : 0.0;
    for (std::size_t i = 0; i < gx1.size(); ++i)
        gx1[i] = ws.x1r[i] > 0.0 ? gx1[i] * ws.x1m[i] : 0.0;
    theta1_.backward(ws.tin.data(), gt1.data(), nullptr, batch);
    x1_.backward(ws.xin.data(), gx1.data(), nullptr, batch);

    ++step_;
    for (Linear* l : {&theta1_, &theta2_, &x1_, &x2_, &comb1_, &comb2_, &head_})
        l->adam_step(opt, step_);
    return loss;
}

std::vector<double> Mlp::parameters() const {
    std::vector<double> out;
    for (const Linear* l : {&theta1_, &theta2_, &x1_, &x2_, &comb1_, &comb2_, &head_}) {
        out.insert(out.end(), l->w.begin(), l->w.end());
        out.insert(out.end(), l->b.begin(), l->b.end());
    }
    return out;
}

void Mlp::set_parameters(std::span<const double> params) {
    std::size_t pos = 0;
    for (Linear* l : {&theta1_, &theta2_, &x1_, &x2_, &comb1_, &comb2_, &head_}) {
        if (pos + l->w.size() + l->b.size() > params.size())
            throw std::invalid_argument("Mlp::set_parameters: parameter vector too short");
        std::copy(params.begin() + static_cast<std::ptrdiff_t>(pos),
                  params.begin() + static_cast<std::ptrdiff_t>(pos + l->w.size()),
                  l->w.begin());
        pos += l->w.size();
        std::copy(params.begin() + static_cast<std::ptrdiff_t>(pos),
                  params.begin() + static_cast<std::ptrdiff_t>(pos + l->b.size()),
                  l->b.begin());
        pos += l->b.size();
    }
    if (pos != params.size())
        throw std::invalid_argument("Mlp::set_parameters: parameter vector size mismatch");
}

}  // namespace pemc::nn
