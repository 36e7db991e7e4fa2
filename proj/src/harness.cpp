#include "pemc/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "pemc/models.hpp"
#include "pemc/payoffs.hpp"
#include "pemc/problem.hpp"
#include "pemc/stats.hpp"

namespace pemc::harness {

namespace {

namespace fs = std::filesystem;
using clock_type = std::chrono::steady_clock;

constexpr std::uint64_t kPurposeGroundTruth = 11;
constexpr std::uint64_t kPurposeTrain = 21;
constexpr std::uint64_t kPurposeProbe = 31;
constexpr std::uint64_t kPurposeEstimate = 41;   // + method slot
constexpr std::uint64_t kPurposeMarginal = 61;   // + method slot

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
    h ^= v + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

int method_slot(const std::string& method) {
    if (method == "mc") return 0;
    if (method == "pemc") return 1;
    if (method == "cv") return 2;
    if (method == "boost_pemc") return 3;
    throw std::invalid_argument("unknown method: " + method);
}

}  // namespace

pemc::rng::RngStream make_stream(std::uint64_t master_seed, std::uint64_t purpose,
                                 std::uint64_t index) {
    return pemc::rng::RngStream(master_seed, mix(mix(0x243F6A8885A308D3ULL, purpose), index));
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    nlohmann::json j;
    in >> j;
    return from_json(j);
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    c.version = j.value("version", 1);
    if (c.version != 1) throw std::invalid_argument("config: unsupported version");

    const auto kind = model_kind_from_string(j.value("model", std::string("gbm")));
    switch (kind) {
        case ModelKind::Gbm:
            c.space = gbm_space(j.value("feature_dim", 1));
            break;
        case ModelKind::Heston: {
            c.space = gbm_space(1);
            c.space.base.kind = ModelKind::Heston;
            c.space.base.feature_dim = 1;
            break;
        }
        case ModelKind::Slv: c.space = slv_space(); break;
        case ModelKind::Hjm: c.space = hjm_space(); break;
        case ModelKind::Ed: c.space = ed_space(); break;
    }
    if (j.contains("base"))
        for (const auto& [name, value] : j.at("base").items())
            set_param(c.space.base, name, value.get<double>());
    if (j.contains("ranges")) {
        for (const auto& [name, value] : j.at("ranges").items()) {
            Range r;
            if (value.is_array()) {
                r.lo = value.at(0).get<double>();
                r.hi = value.at(1).get<double>();
            } else {
                r.lo = value.at("lo").get<double>();
                r.hi = value.at("hi").get<double>();
                r.integer = value.value("integer", false);
            }
            c.space.ranges[name] = r;
        }
    }
    c.space.surface_noise = j.value("surface_noise", c.space.surface_noise);
    c.space.hjm_grid_noise = j.value("hjm_grid_noise", c.space.hjm_grid_noise);

    c.eval_theta = c.space.base;
    if (j.contains("eval"))
        for (const auto& [name, value] : j.at("eval").items())
            set_param(c.eval_theta, name, value.get<double>());
    c.eval_theta = problem::with_default_grids(c.eval_theta);

    if (j.contains("train")) {
        const auto& t = j.at("train");
        c.train.n_train_total = t.value("n_train_total", c.train.n_train_total);
        c.train.batch_size = t.value("batch_size", c.train.batch_size);
        c.train.chunk_size = t.value("chunk_size", c.train.chunk_size);
        c.train.epochs_per_chunk = t.value("epochs_per_chunk", c.train.epochs_per_chunk);
        c.train.adam.lr = t.value("lr", c.train.adam.lr);
        c.train.dropout = t.value("dropout", c.train.dropout);
        c.train.branch_hidden = t.value("branch_hidden", c.train.branch_hidden);
        c.train.branch_out = t.value("branch_out", c.train.branch_out);
        c.train.comb_hidden = t.value("comb_hidden", c.train.comb_hidden);
        c.train.early_stop = t.value("early_stop", c.train.early_stop);
        c.train.patience = t.value("patience", c.train.patience);
    }

    c.model_path = j.value("model_path", c.model_path);
    c.train_if_missing = j.value("train_if_missing", c.train_if_missing);
    if (j.contains("methods")) c.methods = j.at("methods").get<std::vector<std::string>>();
    c.repeats = j.value("repeats", c.repeats);
    if (j.contains("n_grid")) c.n_grid = j.at("n_grid").get<std::vector<long>>();
    c.n_ratio = j.value("n_ratio", c.n_ratio);
    c.use_allocation_probe = j.value("use_allocation_probe", c.use_allocation_probe);
    c.probe_n = j.value("probe_n", c.probe_n);
    c.ground_truth_m = j.value("ground_truth_m", c.ground_truth_m);
    c.alpha = j.value("alpha", c.alpha);
    c.master_seed = j.value("seed", c.master_seed);
    c.out_dir = j.value("out_dir", c.out_dir);
    c.report_name = j.value("report_name", c.report_name);
    c.emit_raw = j.value("emit_raw", c.emit_raw);
    c.validate();
    return c;
}

void ExperimentConfig::validate() const {
    if (version != 1) throw std::invalid_argument("config: unsupported version");
    if (methods.empty()) throw std::invalid_argument("config: no methods");
    for (const auto& m : methods) (void)method_slot(m);
    if (repeats < 2) throw std::invalid_argument("config: repeats must be >= 2");
    if (n_grid.empty()) throw std::invalid_argument("config: empty n grid");
    for (long n : n_grid)
        if (n < 2) throw std::invalid_argument("config: n values must be >= 2");
    if (!(n_ratio > 0.0)) throw std::invalid_argument("config: n_ratio must be > 0");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("config: alpha in (0,1)");
    if (ground_truth_m < 1000)
        throw std::invalid_argument("config: ground_truth_m must be >= 1000");
    if (probe_n < 30) throw std::invalid_argument("config: probe_n must be >= 30");
    eval_theta.validate();
    space.base.validate();
    for (const auto& [name, range] : space.ranges)
        if (!(range.hi >= range.lo)) throw std::invalid_argument("config: empty range " + name);
}

GroundTruth ground_truth(const ParameterPoint& theta, long m, std::uint64_t seed,
                         const std::string& cache_dir) {
    if (m < 2) throw std::invalid_argument("ground_truth: m must be >= 2");
    const std::uint64_t digest = theta.digest();
    fs::create_directories(cache_dir);
    const std::string path = cache_dir + "/gt_" + hex64(digest) + "_" + std::to_string(m) + "_" +
                             std::to_string(seed) + ".json";
    if (fs::exists(path)) {
        std::ifstream in(path);
        nlohmann::json j;
        in >> j;
        if (j.value("digest", std::string()) != hex64(digest) ||
            j.value("m", -1L) != m || j.value("seed", std::uint64_t{0}) != seed)
            throw std::runtime_error("ground_truth: cache integrity failure at " + path);
        return {j.at("value").get<double>(), j.at("se").get<double>()};
    }
    auto stream = make_stream(seed, kPurposeGroundTruth, digest);
    // Welford, so the pass stays O(1) in memory at any m.
    double mean = 0.0, m2 = 0.0;
    for (long i = 0; i < m; ++i) {
        const double f = problem::simulate_payoff(theta, stream).payoff;
        const double d = f - mean;
        mean += d / static_cast<double>(i + 1);
        m2 += d * (f - mean);
    }
    GroundTruth gt;
    gt.value = mean;
    gt.se = std::sqrt(m2 / static_cast<double>(m - 1) / static_cast<double>(m));
    nlohmann::json j;
    j["digest"] = hex64(digest);
    j["m"] = m;
    j["seed"] = seed;
    j["value"] = gt.value;
    j["se"] = gt.se;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("ground_truth: cannot write " + path);
    out << j.dump(2) << '\n';
    return gt;
}

predictor::PredictorModel ensure_model(const ExperimentConfig& config,
                                       predictor::LabelMode mode) {
    std::string path = config.model_path;
    if (!path.empty() && mode == predictor::LabelMode::CvResidual) path += ".cv";
    if (!path.empty() && fs::exists(path)) {
        auto model = predictor::PredictorModel::load(path);
        if (model.kind != config.space.base.kind)
            throw std::runtime_error("ensure_model: model kind mismatch at " + path);
        return model;
    }
    if (!path.empty() && !config.train_if_missing)
        throw std::runtime_error("ensure_model: missing model file " + path);
    auto tc = config.train;
    tc.label_mode = mode;
    auto stream = make_stream(config.master_seed, kPurposeTrain,
                              mode == predictor::LabelMode::CvResidual ? 1 : 0);
    auto model = predictor::train(config.space, tc, stream);
    if (!path.empty()) model.save(path);
    return model;
}

nlohmann::json ExperimentReport::to_json() const {
    nlohmann::json j;
    j["version"] = 1;
    j["ground_truth"] = ground_truth;
    j["ground_truth_se"] = ground_truth_se;
    j["metadata"] = metadata;
    j["rows"] = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json row;
        row["method"] = r.method;
        row["n"] = r.n;
        row["N"] = r.N;
        row["rmse"] = r.rmse;
        row["mae"] = r.mae;
        row["bias"] = r.bias;
        row["ci_width"] = r.ci_width;
        row["coverage"] = r.coverage;
        row["runtime_ns"] = r.runtime_ns;
        row["var_empirical"] = r.var_empirical;
        row["var_formula"] = r.var_formula;
        row["rho_hat"] = r.rho_hat;
        j["rows"].push_back(row);
    }
    if (!raw.empty()) j["raw"] = raw;
    return j;
}

ExperimentReport ExperimentReport::from_json(const nlohmann::json& j) {
    ExperimentReport rep;
    rep.ground_truth = j.at("ground_truth").get<double>();
    rep.ground_truth_se = j.at("ground_truth_se").get<double>();
    rep.metadata = j.value("metadata", nlohmann::json::object());
    for (const auto& row : j.at("rows")) {
        ReportRow r;
        r.method = row.at("method").get<std::string>();
        r.n = row.at("n").get<long>();
        r.N = row.at("N").get<long>();
        r.rmse = row.at("rmse").get<double>();
        r.mae = row.at("mae").get<double>();
        r.bias = row.at("bias").get<double>();
        r.ci_width = row.at("ci_width").get<double>();
        r.coverage = row.at("coverage").get<double>();
        r.runtime_ns = row.at("runtime_ns").get<double>();
        r.var_empirical = row.value("var_empirical", 0.0);
        r.var_formula = row.value("var_formula", 0.0);
        r.rho_hat = row.value("rho_hat", 0.0);
        rep.rows.push_back(r);
    }
    if (j.contains("raw")) rep.raw = j.at("raw").get<std::vector<std::vector<double>>>();
    return rep;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
    config.validate();
    const auto theta = problem::with_default_grids(config.eval_theta);
    const bool theta_warning = !config.space.contains(theta);

    const bool want_pemc =
        std::find(config.methods.begin(), config.methods.end(), "pemc") != config.methods.end();
    const bool want_boost = std::find(config.methods.begin(), config.methods.end(),
                                      "boost_pemc") != config.methods.end();
    const bool want_cv =
        std::find(config.methods.begin(), config.methods.end(), "cv") != config.methods.end();
    if ((want_boost || want_cv) && theta.kind != ModelKind::Gbm)
        throw std::invalid_argument("run_experiment: cv and boost_pemc are GBM-only");

    std::optional<predictor::PredictorModel> model;
    if (want_pemc) model = ensure_model(config, predictor::LabelMode::Raw);
    std::optional<predictor::PredictorModel> boost_model;
    if (want_boost) boost_model = ensure_model(config, predictor::LabelMode::CvResidual);

    const auto gt =
        ground_truth(theta, config.ground_truth_m, config.master_seed, config.out_dir + "/cache");

    engine::CoupledFn coupled;
    engine::MarginalFn marginal;
    if (want_pemc) {
        coupled = [&theta, &model](pemc::rng::RngStream& s) {
            const auto draw = problem::simulate_payoff(theta, s);
            return std::make_pair(draw.payoff, model->predict(theta, draw.x));
        };
        marginal = [&theta, &model](pemc::rng::RngStream& s) {
            const auto xs = problem::sample_x(theta, 1, s);
            return model->predict(theta, xs[0]);
        };
    }

    engine::CoupledFn boost_coupled;
    engine::MarginalFn boost_marginal;
    double boost_const = 0.0;
    payoffs::PayoffSpec arith_spec, geo_spec;
    if (want_boost) {
        arith_spec = problem::make_payoff_spec(theta);
        geo_spec = arith_spec;
        geo_spec.kind = payoffs::PayoffKind::AsianGeometric;
        boost_const = std::exp(theta.rate * theta.horizon) *
                      payoffs::geometric_asian_closed_form(theta);
        boost_coupled = [&, boost_const](pemc::rng::RngStream& s) {
            const auto sample = models::simulate_gbm(theta, theta.feature_dim, s);
            const double f = payoffs::evaluate(sample.path, arith_spec) -
                             payoffs::evaluate(sample.path, geo_spec) + boost_const;
            return std::make_pair(f, boost_model->predict(theta, sample.features));
        };
        boost_marginal = [&theta, &boost_model](pemc::rng::RngStream& s) {
            const auto xs = problem::sample_x(theta, 1, s);
            return boost_model->predict(theta, xs[0]);
        };
    }

    const engine::PayoffFn payoff_fn = [&theta](pemc::rng::RngStream& s) {
        return problem::simulate_payoff(theta, s).payoff;
    };

    // One probe per experiment: reported in the metadata and, when the
    // allocation override is on, used to re-derive N from the n/N rule.
    std::optional<engine::CovarianceProbe> probe;
    if (want_pemc) {
        auto ps = make_stream(config.master_seed, kPurposeProbe, 0);
        probe = engine::empirical_covariance_probe(coupled, marginal, config.probe_n, ps);
    }

    const auto big_n_for = [&](long n) -> long {
        if (config.use_allocation_probe && probe && !probe->degenerate &&
            probe->sigma_fg > 0.0 && probe->c_g_ns > 0.0) {
            const double ratio =
                probe->sigma_g / probe->sigma_fg * std::sqrt(probe->c_fg_ns / probe->c_g_ns);
            return std::max(2L, static_cast<long>(std::lround(static_cast<double>(n) * ratio)));
        }
        return std::max(2L, static_cast<long>(std::lround(config.n_ratio * static_cast<double>(n))));
    };

    ExperimentReport report;
    report.ground_truth = gt.value;
    report.ground_truth_se = gt.se;

    for (const auto& method : config.methods) {
        const auto slot = static_cast<std::uint64_t>(method_slot(method));
        for (std::size_t ni = 0; ni < config.n_grid.size(); ++ni) {
            const long n = config.n_grid[ni];
            const long bigN = (method == "pemc" || method == "boost_pemc") ? big_n_for(n) : 0;
            std::vector<double> estimates, widths, runtimes;
            estimates.reserve(static_cast<std::size_t>(config.repeats));
            double cover = 0.0, var_formula_sum = 0.0;
            for (int rep = 0; rep < config.repeats; ++rep) {
                const std::uint64_t idx =
                    static_cast<std::uint64_t>(ni) * 1000003ULL + static_cast<std::uint64_t>(rep);
                auto cs = make_stream(config.master_seed, kPurposeEstimate + slot, idx);
                auto ms = make_stream(config.master_seed, kPurposeMarginal + slot, idx);
                const auto t0 = clock_type::now();
                engine::PemcEstimate est;
                if (method == "mc") {
                    est = engine::standard_mc(n, payoff_fn, cs, config.alpha);
                } else if (method == "pemc") {
                    est = engine::pemc_estimate(n, bigN, coupled, marginal, cs, ms, config.alpha);
                } else if (method == "cv") {
                    est = engine::classical_cv_estimate(theta, n, cs, config.alpha);
                } else {
                    est = engine::pemc_estimate(n, bigN, boost_coupled, boost_marginal, cs, ms,
                                                config.alpha);
                }
                runtimes.push_back(
                    std::chrono::duration<double, std::nano>(clock_type::now() - t0).count());
                estimates.push_back(est.estimate);
                widths.push_back(est.ci_hi - est.ci_lo);
                if (est.ci_lo <= gt.value && gt.value <= est.ci_hi) cover += 1.0;
                double vf = est.sigma2_fg / static_cast<double>(est.n);
                if (est.N > 0) vf += est.sigma2_g / static_cast<double>(est.N);
                var_formula_sum += vf;
            }
            ReportRow row;
            row.method = method;
            row.n = n;
            row.N = bigN;
            double sq = 0.0, ab = 0.0;
            for (double e : estimates) {
                sq += (e - gt.value) * (e - gt.value);
                ab += std::abs(e - gt.value);
            }
            row.rmse = std::sqrt(sq / static_cast<double>(estimates.size()));
            row.mae = ab / static_cast<double>(estimates.size());
            row.bias = stats::mean(estimates) - gt.value;
            row.ci_width = stats::mean(widths);
            row.coverage = cover / static_cast<double>(config.repeats);
            row.runtime_ns = stats::mean(runtimes);
            row.var_empirical = stats::variance(estimates);
            row.var_formula = var_formula_sum / static_cast<double>(config.repeats);
            if ((method == "pemc" || method == "boost_pemc") && probe) row.rho_hat = probe->rho_hat;
            report.rows.push_back(row);
            if (config.emit_raw) report.raw.push_back(estimates);
        }
    }

    nlohmann::json meta;
    meta["model"] = to_string(theta.kind);
    meta["eval_digest"] = hex64(theta.digest());
    meta["seed"] = config.master_seed;
    meta["repeats"] = config.repeats;
    meta["n_grid"] = config.n_grid;
    meta["methods"] = config.methods;
    meta["n_ratio"] = config.n_ratio;
    meta["use_allocation_probe"] = config.use_allocation_probe;
    meta["ground_truth_m"] = config.ground_truth_m;
    meta["alpha"] = config.alpha;
    meta["theta_warning"] = theta_warning;
    if (probe) {
        meta["probe"] = {{"rho_hat", probe->rho_hat},
                         {"sigma_fg", probe->sigma_fg},
                         {"sigma_g", probe->sigma_g},
                         {"sigma_f", probe->sigma_f},
                         {"c_fg_ns", probe->c_fg_ns},
                         {"c_g_ns", probe->c_g_ns}};
    }
    if (model) {
        meta["predictor"] = {{"records_seen", model->records_seen},
                             {"final_loss", model->final_loss},
                             {"train_seed", model->train_seed}};
    }
    report.metadata = meta;
    return report;
}

void emit_report(const ExperimentReport& report, const std::string& out_dir,
                 const std::string& name) {
    fs::create_directories(out_dir);
    {
        std::ofstream csv(out_dir + "/" + name + ".csv");
        if (!csv) throw std::runtime_error("emit_report: cannot write csv in " + out_dir);
        csv.precision(12);
        csv << "method,n,N,rmse,mae,bias,ci_width,coverage,runtime_ns\n";
        for (const auto& r : report.rows)
            csv << r.method << ',' << r.n << ',' << r.N << ',' << r.rmse << ',' << r.mae << ','
                << r.bias << ',' << r.ci_width << ',' << r.coverage << ',' << r.runtime_ns
                << '\n';
    }
    {
        std::ofstream js(out_dir + "/" + name + ".json");
        if (!js) throw std::runtime_error("emit_report: cannot write json in " + out_dir);
        js << report.to_json().dump(2) << '\n';
    }
    if (!report.raw.empty()) {
        std::ofstream raw(out_dir + "/" + name + "_raw.csv");
        if (!raw) throw std::runtime_error("emit_report: cannot write raw csv in " + out_dir);
        raw.precision(17);
        raw << "method,n,repeat,estimate\n";
        for (std::size_t i = 0; i < report.raw.size(); ++i)
            for (std::size_t rep = 0; rep < report.raw[i].size(); ++rep)
                raw << report.rows[i].method << ',' << report.rows[i].n << ',' << rep << ','
                    << report.raw[i][rep] << '\n';
    }
}

ParameterSpaceSpec gbm_space(int feature_dim) {
    ParameterSpaceSpec space;
    space.base = gbm_eval_theta(feature_dim);
    space.ranges["rate"] = {0.01, 0.03};
    space.ranges["s0"] = {80.0, 120.0};
    space.ranges["sigma"] = {0.05, 0.25};
    space.ranges["strike"] = {90.0, 110.0};
    return space;
}

ParameterPoint gbm_eval_theta(int feature_dim) {
    ParameterPoint theta;
    theta.kind = ModelKind::Gbm;
    theta.rate = 0.02;
    theta.s0 = 100.0;
    theta.sigma = 0.2;
    theta.strike = 100.0;
    theta.dt = 1.0 / 252.0;
    theta.horizon = 1.0;
    theta.n_obs = 252;
    theta.feature_dim = feature_dim;
    return theta;
}

ParameterSpaceSpec slv_space() {
    ParameterSpaceSpec space;
    space.base = slv_eval_theta();
    space.base.surface.reset();   // rebuilt per sample with node noise
    space.ranges["s0"] = {50.0, 150.0};
    space.ranges["kappa"] = {1.5, 4.5};
    space.ranges["delta"] = {0.1, 1.0};
    space.ranges["rho"] = {-0.9, -0.2};
    space.surface_noise = 0.02;
    return space;
}

ParameterPoint slv_eval_theta() {
    ParameterPoint theta;
    theta.kind = ModelKind::Slv;
    theta.rate = 0.02;
    theta.s0 = 100.0;
    theta.kappa = 3.0;
    theta.delta = 0.5;
    theta.rho = -0.5;
    theta.nu0 = 0.0;
    theta.dt = 1.0 / 252.0;
    theta.horizon = 1.0;
    theta.strike = 0.04;          // variance-swap strike, cancels in the errors
    theta.n_obs = 252;
    return problem::with_default_grids(theta);
}

ParameterSpaceSpec hjm_space() {
    ParameterSpaceSpec space;
    space.base = hjm_eval_theta();
    space.base.hjm.reset();       // rebuilt per sample with grid noise
    space.ranges["sigma0"] = {0.01, 0.03};
    space.ranges["alpha_sigma"] = {0.001, 0.9};
    space.ranges["f0"] = {0.01, 0.03};
    space.ranges["c_f"] = {0.01, 0.05};
    space.ranges["alpha_f"] = {0.001, 0.9};
    space.hjm_grid_noise = true;
    return space;
}

ParameterPoint hjm_eval_theta() {
    ParameterPoint theta;
    theta.kind = ModelKind::Hjm;
    theta.sigma0 = 0.02;
    theta.alpha_sigma = 0.45;
    theta.f0 = 0.02;
    theta.c_f = 0.03;
    theta.alpha_f = 0.45;
    theta.dt = 1.0 / 52.0;
    theta.horizon = 25.0;
    theta.swap_start = 5.0;
    theta.swap_dt = 1.0;
    theta.swap_payments = 20;
    theta.notional = 100.0;
    return problem::with_default_grids(theta);
}

ParameterSpaceSpec ed_space() {
    ParameterSpaceSpec space;
    space.base = ed_eval_theta(20);
    space.ranges["ed_tau"] = {0.0, 50.0, true};
    space.ranges["ed_shift1"] = {1.0, 3.0, true};
    space.ranges["ed_shift2"] = {1.0, 3.0, true};
    space.ranges["ed_shift3"] = {2.0, 6.0, true};
    space.ranges["ed_shift4"] = {1.0, 4.0, true};
    space.ranges["ed_shift5"] = {2.0, 5.0, true};
    space.ranges["ed_shift6"] = {1.0, 3.0, true};
    space.ranges["ed_crisis"] = {1.0, 2.0};
    return space;
}

ParameterPoint ed_eval_theta(int tau) {
    ParameterPoint theta;
    theta.kind = ModelKind::Ed;
    theta.ed_tau = tau;
    theta.ed_crisis = 1.25;
    theta.ed_hosp2_shifts = {2, 2, 4, 2, 4, 1};
    theta.dt = 1.0;
    theta.horizon = 168.0;
    return theta;
}

}  // namespace pemc::harness
