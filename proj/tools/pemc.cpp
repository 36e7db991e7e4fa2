// pemc: config-driven driver for the variance-reduction engine.
//
//   pemc gen-data   --config c.json --count 1000 --out records.csv
//   pemc train      --config c.json --out model.bin
//   pemc price      --config c.json --method pemc --n 1000
//   pemc allocate   --config c.json --budget-ms 500
//   pemc experiment --config c.json --out reports/
//   pemc ed-sim     --config c.json --reps 20

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "pemc/ed.hpp"
#include "pemc/engine.hpp"
#include "pemc/harness.hpp"
#include "pemc/predictor.hpp"
#include "pemc/problem.hpp"

namespace {

using namespace pemc;

struct GlobalOpts {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    int threads = 1;
    std::string out;
};

harness::ExperimentConfig load_config(const GlobalOpts& g) {
    harness::ExperimentConfig config;
    if (!g.config_path.empty())
        config = harness::ExperimentConfig::from_file(g.config_path);
    else
        config = harness::ExperimentConfig::from_json(nlohmann::json::object());
    if (g.seed) config.master_seed = *g.seed;
    if (!g.out.empty()) config.out_dir = g.out;
    return config;
}

int cmd_gen_data(const GlobalOpts& g, long count, const std::string& label_mode,
                 const std::string& out_file) {
    const auto config = load_config(g);
    const auto mode = label_mode == "cv_residual" ? predictor::LabelMode::CvResidual
                                                  : predictor::LabelMode::Raw;
    auto stream = harness::make_stream(config.master_seed, 91, 0);
    std::ofstream out(out_file);
    if (!out) {
        std::cerr << "cannot open " << out_file << "\n";
        return 1;
    }
    out.precision(17);
    long done = 0;
    bool header = false;
    while (done < count) {
        const auto batch_size = static_cast<std::size_t>(std::min<long>(4096, count - done));
        const auto batch =
            predictor::generate_training_batch(config.space, batch_size, mode, stream);
        for (const auto& rec : batch) {
            if (!header) {
                for (std::size_t k = 0; k < rec.feature.size(); ++k) out << 'x' << k << ',';
                out << "label\n";
                header = true;
            }
            for (double v : rec.feature) out << v << ',';
            out << rec.label << '\n';
        }
        done += static_cast<long>(batch.size());
    }
    std::cout << "wrote " << done << " records to " << out_file << "\n";
    return 0;
}

int cmd_train(const GlobalOpts& g, const std::string& label_mode, const std::string& out_file) {
    auto config = load_config(g);
    config.model_path = out_file;
    const auto mode = label_mode == "cv_residual" ? predictor::LabelMode::CvResidual
                                                  : predictor::LabelMode::Raw;
    const auto model = harness::ensure_model(config, mode);
    std::cout << "trained on " << model.records_seen << " records, final loss "
              << model.final_loss << ", saved to " << out_file
              << (mode == predictor::LabelMode::CvResidual ? ".cv" : "") << "\n";
    return 0;
}

int cmd_price(const GlobalOpts& g, const std::string& method, long n, long big_n) {
    auto config = load_config(g);
    config.methods = {method};
    config.n_grid = {n};
    if (big_n > 0) config.n_ratio = static_cast<double>(big_n) / static_cast<double>(n);
    const auto theta = problem::with_default_grids(config.eval_theta);

    auto cs = harness::make_stream(config.master_seed, 92, 0);
    auto ms = harness::make_stream(config.master_seed, 93, 0);
    engine::PemcEstimate est;
    if (method == "mc") {
        est = engine::standard_mc(
            n, [&theta](rng::RngStream& s) { return problem::simulate_payoff(theta, s).payoff; },
            cs, config.alpha);
    } else if (method == "cv") {
        est = engine::classical_cv_estimate(theta, n, cs, config.alpha);
    } else if (method == "pemc" || method == "boost_pemc") {
        if (config.model_path.empty()) {
            std::cerr << "price: set model_path in the config, or train one first with"
                         " `pemc train --out <model.bin>`\n";
            return 1;
        }
        const auto mode = method == "boost_pemc" ? predictor::LabelMode::CvResidual
                                                  : predictor::LabelMode::Raw;
        const auto model = harness::ensure_model(config, mode);
        const long N = big_n > 0 ? big_n
                                 : static_cast<long>(std::lround(config.n_ratio *
                                                                 static_cast<double>(n)));
        const engine::CoupledFn coupled = [&](rng::RngStream& s) {
            const auto draw = problem::simulate_payoff(theta, s);
            return std::make_pair(draw.payoff, model.predict(theta, draw.x));
        };
        const engine::MarginalFn marginal = [&](rng::RngStream& s) {
            return model.predict(theta, problem::sample_x(theta, 1, s)[0]);
        };
        est = engine::pemc_estimate(n, N, coupled, marginal, cs, ms, config.alpha);
    } else {
        std::cerr << "price: unknown method " << method << "\n";
        return 1;
    }
    est.theta_warning = !config.space.contains(theta);
    std::cout << est.to_json() << "\n";
    return 0;
}

int cmd_allocate(const GlobalOpts& g, long probe_n, double budget_ms) {
    auto config = load_config(g);
    if (config.model_path.empty()) {
        std::cerr << "allocate: set model_path in the config (the probe needs a predictor)\n";
        return 1;
    }
    const auto theta = problem::with_default_grids(config.eval_theta);
    const auto model = harness::ensure_model(config, predictor::LabelMode::Raw);
    const engine::CoupledFn coupled = [&](rng::RngStream& s) {
        const auto draw = problem::simulate_payoff(theta, s);
        return std::make_pair(draw.payoff, model.predict(theta, draw.x));
    };
    const engine::MarginalFn marginal = [&](rng::RngStream& s) {
        return model.predict(theta, problem::sample_x(theta, 1, s)[0]);
    };
    auto ps = harness::make_stream(config.master_seed, 94, 0);
    const auto probe = engine::empirical_covariance_probe(coupled, marginal, probe_n, ps);
    nlohmann::json j;
    j["probe"] = {{"rho_hat", probe.rho_hat},   {"sigma_fg", probe.sigma_fg},
                  {"sigma_g", probe.sigma_g},   {"sigma_f", probe.sigma_f},
                  {"c_fg_ns", probe.c_fg_ns},   {"c_g_ns", probe.c_g_ns},
                  {"degenerate", probe.degenerate}};
    if (budget_ms > 0.0 && !probe.degenerate && probe.sigma_fg > 0.0) {
        const auto plan = engine::optimal_allocation(probe.sigma_fg, probe.sigma_g,
                                                     probe.c_fg_ns, probe.c_g_ns,
                                                     budget_ms * 1e6);
        j["plan"] = {{"n", plan.n}, {"N", plan.N}, {"variance", plan.variance}};
    }
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_experiment(const GlobalOpts& g) {
    const auto config = load_config(g);
    const auto report = harness::run_experiment(config);
    harness::emit_report(report, config.out_dir, config.report_name);
    std::cout << "ground truth " << report.ground_truth << " (se " << report.ground_truth_se
              << "); " << report.rows.size() << " rows -> " << config.out_dir << "/"
              << config.report_name << ".{csv,json}\n";
    return 0;
}

int cmd_ed_sim(const GlobalOpts& g, int reps) {
    const auto config = load_config(g);
    auto theta = config.eval_theta;
    theta.kind = ModelKind::Ed;
    const auto ed_config = ed::EdConfig::from_theta(theta);
    auto stream = harness::make_stream(config.master_seed, 95, 0);
    double deaths = 0.0, arrivals = 0.0, diverted = 0.0;
    ed::WeekResult last;
    for (int i = 0; i < reps; ++i) {
        last = ed::simulate_week(ed_config, stream);
        deaths += last.deaths;
        arrivals += last.arrivals;
        diverted += last.diverted;
    }
    nlohmann::json j;
    j["reps"] = reps;
    j["tau"] = ed_config.tau;
    j["crisis_factor"] = ed_config.crisis_factor;
    j["mean_deaths"] = deaths / reps;
    j["mean_arrivals"] = arrivals / reps;
    j["mean_diverted"] = diverted / reps;
    j["last_week"] = {{"deaths", last.deaths},
                      {"arrivals", last.arrivals},
                      {"served", last.served},
                      {"waiting_at_horizon", last.waiting_at_horizon},
                      {"in_service_at_horizon", last.in_service_at_horizon},
                      {"triage_counts", last.triage_counts}};
    std::cout << j.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Prediction-enhanced Monte Carlo harness"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOpts g;
    app.add_option("--config", g.config_path, "JSON experiment config");
    app.add_option("--seed", g.seed, "Master seed override");
    app.add_option("--threads", g.threads, "Worker threads (currently single-threaded)");
    app.add_option("--out", g.out, "Output directory override");

    long gd_count = 10000;
    std::string gd_mode = "raw", gd_out = "records.csv";
    auto* gen = app.add_subcommand("gen-data", "Write training records to CSV");
    gen->add_option("--count", gd_count, "Record count");
    gen->add_option("--label-mode", gd_mode, "raw or cv_residual");
    gen->add_option("--out-file", gd_out, "Output CSV path");

    std::string tr_mode = "raw", tr_out = "model.bin";
    auto* tr = app.add_subcommand("train", "Train and save a predictor");
    tr->add_option("--label-mode", tr_mode, "raw or cv_residual");
    tr->add_option("--out-file", tr_out, "Model output path");

    std::string pr_method = "pemc";
    long pr_n = 1000, pr_N = 0;
    auto* pr = app.add_subcommand("price", "One estimate at the evaluation point");
    pr->add_option("--method", pr_method, "mc, pemc, cv or boost_pemc");
    pr->add_option("--n", pr_n, "Coupled sample count");
    pr->add_option("--N", pr_N, "Marginal sample count (default n_ratio * n)");

    long al_probe = 1000;
    double al_budget = 0.0;
    auto* al = app.add_subcommand("allocate", "Covariance probe and budget split");
    al->add_option("--probe-n", al_probe, "Probe sample count");
    al->add_option("--budget-ms", al_budget, "Wall budget in milliseconds");

    auto* ex = app.add_subcommand("experiment", "Repeated-estimate RMSE study");

    int ed_reps = 20;
    auto* eds = app.add_subcommand("ed-sim", "Emergency-department week simulation");
    eds->add_option("--reps", ed_reps, "Number of weeks to simulate");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_gen_data(g, gd_count, gd_mode, gd_out);
        if (tr->parsed()) return cmd_train(g, tr_mode, tr_out);
        if (pr->parsed()) return cmd_price(g, pr_method, pr_n, pr_N);
        if (al->parsed()) return cmd_allocate(g, al_probe, al_budget);
        if (ex->parsed()) return cmd_experiment(g);
        if (eds->parsed()) return cmd_ed_sim(g, ed_reps);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
