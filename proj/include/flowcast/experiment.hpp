#ifndef FLOWCAST_EXPERIMENT_HPP
#define FLOWCAST_EXPERIMENT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "flowcast/component_dataset.hpp"
#include "flowcast/csv.hpp"
#include "flowcast/metrics.hpp"
#include "flowcast/stacker.hpp"
#include "flowcast/synthetic.hpp"

namespace flowcast {

enum class Method { Single, Bagging, MultiResolution, Emd, Eemd, Ceemdan };

std::string to_string(Method method);
Method method_from(const std::string& name);
bool is_decomposition(Method method);

struct DataConfig {
    std::string csv_path;  // empty: use the synthetic generator
    ColumnMap columns;
    SyntheticSpec synthetic;
};

// Window strides per split, in samples at the native resolution. For the
// multi-resolution ensemble the implied time advance must divide evenly at
// every configured resolution.
struct StrideConfig {
    std::size_t train = 1;
    std::size_t validation = 1;
    std::size_t test = 1;
};

struct ExperimentConfig {
    DataConfig data;
    Method method = Method::Eemd;
    StackerKind aggregation = StackerKind::Sum;
    double input_minutes = 120.0;
    double target_minutes = 10.0;
    SplitSpec split;
    StrideConfig strides;
    LeakageMode leakage = LeakageMode::PaperFaithful;
    std::size_t repeats = 10;
    std::uint64_t base_seed = 1;
    std::vector<std::uint64_t> seeds;  // explicit per-run seeds, else derived

    SiftConfig sift;
    NoiseConfig noise;
    std::size_t top_m = 5;
    bool include_residue_component = true;

    std::size_t bags = 25;
    double bag_fraction = 0.9;
    std::vector<std::size_t> resolutions_minutes = {1, 2, 5, 10};

    LearnerSpec learner;
    std::size_t tuning_budget = 0;  // 0: use the learner spec as configured
    SearchSpace search_space;
    StackerTuning stacker_tuning;

    Exec exec = Exec::Parallel;
    std::string output_dir;

    // Rejects invalid method/aggregation pairings and geometry.
    void validate() const;
    std::vector<std::uint64_t> run_seeds() const;
};

nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
std::string config_hash(const ExperimentConfig& config);

// Compact desk-scale settings: 30 synthetic days, K=10 trials, small
// recurrent learner, sparse strides.
ExperimentConfig quick_profile();
// Reference-scale settings: K=25, full tuning grid, dense strides.
ExperimentConfig paper_profile();

struct StageTimes {
    double decompose_minutes = 0.0;
    double train_minutes = 0.0;
    double aggregate_minutes = 0.0;

    double total() const { return decompose_minutes + train_minutes + aggregate_minutes; }
};

struct RunResult {
    std::uint64_t seed = 0;
    double rmse_value = 0.0;
    StageTimes times;
};

struct MetricsReport {
    std::string method_name;
    std::string aggregation_name;
    std::string leakage_mode;
    double input_minutes = 0.0;
    double target_minutes = 0.0;
    std::vector<RunResult> runs;
    double mean_rmse = 0.0;
    std::string hash;
    std::vector<std::uint64_t> seeds;

    MethodRuns method_runs() const;
};

MetricsReport run_experiment(const ExperimentConfig& config);

// Per-stage wall-clock medians over `runs` repeats of the configured
// experiment.
StageTimes timing_profile(const ExperimentConfig& config, std::size_t runs = 3);

// One row per run; excludes wall-clock so bytes depend only on config and
// seeds.
void emit_metrics_csv(const MetricsReport& report, const std::string& path);
MetricsReport parse_metrics_csv(const std::string& path);

void emit_report_json(const MetricsReport& report, const std::string& path);
MetricsReport load_report_json(const std::string& path);

// Cross-method table with significance marks from the paired Wilcoxon test.
std::string comparison_table(const std::vector<MetricsReport>& reports, double alpha = 0.05);
void emit_comparison(const std::vector<MetricsReport>& reports, const std::string& format,
                     const std::string& path);

// metrics.csv + report.json + report.txt under dir.
void persist_report(const MetricsReport& report, const std::string& dir);

}  // namespace flowcast

#endif  // FLOWCAST_EXPERIMENT_HPP
