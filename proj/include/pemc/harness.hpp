#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pemc/engine.hpp"
#include "pemc/params.hpp"
#include "pemc/predictor.hpp"

namespace pemc::harness {

struct ExperimentConfig {
    int version = 1;
    ParameterSpaceSpec space;
    ParameterPoint eval_theta;
    predictor::TrainConfig train;
    std::string model_path;          // empty -> train in memory, no persistence
    bool train_if_missing = true;
    std::vector<std::string> methods = {"mc", "pemc"};  // + "cv", "boost_pemc"
    int repeats = 100;
    std::vector<long> n_grid = {1000, 4000};
    double n_ratio = 10.0;           // N = n_ratio * n unless the probe is used
    bool use_allocation_probe = false;
    long probe_n = 1000;
    double probe_budget = 0.0;       // seconds; 0 -> budget of n_grid.front() MC draws
    long ground_truth_m = 1000000;
    double alpha = 0.05;
    std::uint64_t master_seed = 20240801;
    std::string out_dir = "out";
    std::string report_name = "report";
    bool emit_raw = false;

    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig from_file(const std::string& path);
    void validate() const;
};

struct ReportRow {
    std::string method;
    long n = 0;
    long N = 0;
    double rmse = 0.0;
    double mae = 0.0;
    double bias = 0.0;
    double ci_width = 0.0;
    double coverage = 0.0;
    double runtime_ns = 0.0;         // mean wall time per estimate
    double var_empirical = 0.0;      // across-repeat variance of the estimates
    double var_formula = 0.0;        // mean of sigma2_fg/n + sigma2_g/N
    double rho_hat = 0.0;            // probe correlation (pemc rows)
};

struct ExperimentReport {
    double ground_truth = 0.0;
    double ground_truth_se = 0.0;
    std::vector<ReportRow> rows;
    nlohmann::json metadata;         // config echo, model info, probe numbers
    // raw[i] = per-repeat estimates for rows[i], emitted when emit_raw is set
    std::vector<std::vector<double>> raw;

    nlohmann::json to_json() const;
    static ExperimentReport from_json(const nlohmann::json& j);
};

/// Derived stream ids: one independent stream per (purpose, index) pair under
/// the experiment's master seed.
pemc::rng::RngStream make_stream(std::uint64_t master_seed, std::uint64_t purpose,
                                 std::uint64_t index);

struct GroundTruth {
    double value = 0.0;
    double se = 0.0;
};

/// Plain MC ground truth at theta with M draws, cached on disk under
/// cache_dir keyed by (theta digest, M, seed). A cache file whose stored key
/// fields disagree with the request is an integrity error.
GroundTruth ground_truth(const ParameterPoint& theta, long m, std::uint64_t seed,
                         const std::string& cache_dir);

ExperimentReport run_experiment(const ExperimentConfig& config);

/// Writes <name>.csv (fixed columns: method,n,N,rmse,mae,bias,ci_width,
/// coverage,runtime_ns), <name>.json (full report), and <name>_raw.csv when
/// raw estimates are present.
void emit_report(const ExperimentReport& report, const std::string& out_dir,
                 const std::string& name);

/// Canonical desk-scale spaces used by the CLI and the acceptance suite.
ParameterSpaceSpec gbm_space(int feature_dim);
ParameterSpaceSpec slv_space();
ParameterSpaceSpec hjm_space();
ParameterSpaceSpec ed_space();
ParameterPoint gbm_eval_theta(int feature_dim);
ParameterPoint slv_eval_theta();
ParameterPoint hjm_eval_theta();
ParameterPoint ed_eval_theta(int tau);

/// Loads the model at path or trains (and saves) one when allowed.
predictor::PredictorModel ensure_model(const ExperimentConfig& config,
                                       predictor::LabelMode mode);

}  // namespace pemc::harness
