#include "flowcast/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "flowcast/rng.hpp"

namespace flowcast {

namespace {

using Clock = std::chrono::steady_clock;

double minutes_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count() / 60.0;
}

}  // namespace

std::string to_string(Method method) {
    switch (method) {
        case Method::Single: return "single";
        case Method::Bagging: return "bagging";
        case Method::MultiResolution: return "multi_resolution";
        case Method::Emd: return "emd";
        case Method::Eemd: return "eemd";
        case Method::Ceemdan: return "ceemdan";
    }
    return "?";
}

Method method_from(const std::string& name) {
    if (name == "single") return Method::Single;
    if (name == "bagging") return Method::Bagging;
    if (name == "multi_resolution") return Method::MultiResolution;
    if (name == "emd") return Method::Emd;
    if (name == "eemd") return Method::Eemd;
    if (name == "ceemdan") return Method::Ceemdan;
    throw InvalidConfig("unknown method: " + name);
}

bool is_decomposition(Method method) {
    return method == Method::Emd || method == Method::Eemd || method == Method::Ceemdan;
}

void ExperimentConfig::validate() const {
    if (repeats < 1) throw InvalidConfig("repeats must be >= 1");
    if (top_m < 1) throw InvalidConfig("top_m must be >= 1");
    if (bags < 1) throw InvalidConfig("bags must be >= 1");
    if (!(bag_fraction > 0.0) || bag_fraction > 1.0) {
        throw InvalidConfig("bag_fraction must be in (0, 1]");
    }
    if (strides.train == 0 || strides.validation == 0 || strides.test == 0) {
        throw InvalidConfig("strides must be >= 1");
    }
    split.validate();
    sift.validate();
    noise.validate();
    learner.validate();

    // Aggregation pairing: sum reconstructs decomposed components; mean
    // averages exchangeable members. A single learner degenerates to the
    // identity under mean.
    if (is_decomposition(method)) {
        if (aggregation == StackerKind::Mean) {
            throw InvalidConfig(
                "mean aggregation is the bagging/multi-resolution baseline; "
                "decomposition methods use sum or an optimised final learner");
        }
    } else if (aggregation == StackerKind::Sum) {
        throw InvalidConfig(
            "sum aggregation is the decomposition baseline; " +
            to_string(method) + " uses mean or an optimised final learner");
    }
    if (method == Method::MultiResolution && resolutions_minutes.empty()) {
        throw InvalidConfig("multi_resolution needs at least one resolution");
    }
    if (!seeds.empty() && seeds.size() != repeats) {
        throw InvalidConfig("seeds list must match repeats");
    }
}

std::vector<std::uint64_t> ExperimentConfig::run_seeds() const {
    if (!seeds.empty()) return seeds;
    std::vector<std::uint64_t> out(repeats);
    for (std::size_t r = 0; r < repeats; ++r) out[r] = sub_seed(base_seed, r);
    return out;
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["data"] = {{"csv_path", c.data.csv_path},
                 {"timestamp_column", c.data.columns.timestamp},
                 {"flow_column", c.data.columns.flow},
                 {"site_column", c.data.columns.site},
                 {"site_id", c.data.columns.site_id},
                 {"synthetic",
                  {{"days", c.data.synthetic.days},
                   {"interval_minutes", c.data.synthetic.interval_minutes},
                   {"seed", c.data.synthetic.seed},
                   {"base_level", c.data.synthetic.base_level},
                   {"daily_amplitude", c.data.synthetic.daily_amplitude},
                   {"daily_phase_minutes", c.data.synthetic.daily_phase_minutes},
                   {"second_harmonic", c.data.synthetic.second_harmonic},
                   {"trend_per_day", c.data.synthetic.trend_per_day},
                   {"cycle_amplitudes", c.data.synthetic.cycle_amplitudes},
                   {"cycle_periods_minutes", c.data.synthetic.cycle_periods_minutes},
                   {"noise_sigma", c.data.synthetic.noise_sigma},
                   {"spike_probability", c.data.synthetic.spike_probability},
                   {"spike_magnitude", c.data.synthetic.spike_magnitude},
                   {"spike_duration_minutes", c.data.synthetic.spike_duration_minutes}}}};
    j["method"] = to_string(c.method);
    j["aggregation"] = to_string(c.aggregation);
    j["input_minutes"] = c.input_minutes;
    j["target_minutes"] = c.target_minutes;
    j["split"] = {{"train", c.split.train},
                  {"validation", c.split.validation},
                  {"test", c.split.test}};
    j["strides"] = {{"train", c.strides.train},
                    {"validation", c.strides.validation},
                    {"test", c.strides.test}};
    j["leakage_mode"] = to_string(c.leakage);
    j["repeats"] = c.repeats;
    j["base_seed"] = c.base_seed;
    j["seeds"] = c.seeds;
    j["sift"] = {{"spline",
                  c.sift.spline_kind == SplineKind::Akima
                      ? "akima"
                      : (c.sift.spline_kind == SplineKind::Cubic ? "cubic" : "linear")},
                 {"max_sift_iterations", c.sift.max_sift_iterations},
                 {"mean_tolerance", c.sift.mean_tolerance},
                 {"max_imfs", c.sift.max_imfs}};
    j["noise"] = {{"trials", c.noise.trials},
                  {"epsilon", c.noise.epsilon},
                  {"epsilon_schedule", c.noise.epsilon_schedule}};
    j["top_m"] = c.top_m;
    j["include_residue_component"] = c.include_residue_component;
    j["bags"] = c.bags;
    j["bag_fraction"] = c.bag_fraction;
    j["resolutions_minutes"] = c.resolutions_minutes;
    j["learner"] = {{"kind", to_string(c.learner.kind)},
                    {"widths", c.learner.widths},
                    {"dropouts", c.learner.dropouts},
                    {"learning_rate", c.learner.learning_rate},
                    {"batch_size", c.learner.batch_size},
                    {"max_epochs", c.learner.max_epochs},
                    {"patience", c.learner.patience}};
    j["tuning_budget"] = c.tuning_budget;
    j["search_space"] = {{"recurrent_widths", c.search_space.recurrent_widths},
                         {"dense_widths", c.search_space.dense_widths},
                         {"dropout_rates", c.search_space.dropout_rates}};
    j["stacker_tuning"] = {{"budget", c.stacker_tuning.budget},
                           {"dense_widths", c.stacker_tuning.space.dense_widths},
                           {"dropout_rates", c.stacker_tuning.space.dropout_rates},
                           {"max_epochs", c.stacker_tuning.base.max_epochs},
                           {"patience", c.stacker_tuning.base.patience},
                           {"learning_rate", c.stacker_tuning.base.learning_rate}};
    j["exec"] = c.exec == Exec::Parallel ? "parallel" : "serial";
    j["output_dir"] = c.output_dir;
    return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
    if (j.value("schema_version", 0) != 1) {
        throw InvalidConfig("unsupported config schema_version");
    }
    ExperimentConfig c;
    if (j.contains("data")) {
        const auto& d = j["data"];
        c.data.csv_path = d.value("csv_path", "");
        c.data.columns.timestamp = d.value("timestamp_column", "timestamp");
        c.data.columns.flow = d.value("flow_column", "flow");
        c.data.columns.site = d.value("site_column", "");
        c.data.columns.site_id = d.value("site_id", "");
        if (d.contains("synthetic")) {
            const auto& s = d["synthetic"];
            auto& spec = c.data.synthetic;
            spec.days = s.value("days", spec.days);
            spec.interval_minutes = s.value("interval_minutes", spec.interval_minutes);
            spec.seed = s.value("seed", spec.seed);
            spec.base_level = s.value("base_level", spec.base_level);
            spec.daily_amplitude = s.value("daily_amplitude", spec.daily_amplitude);
            spec.daily_phase_minutes = s.value("daily_phase_minutes", spec.daily_phase_minutes);
            spec.second_harmonic = s.value("second_harmonic", spec.second_harmonic);
            spec.trend_per_day = s.value("trend_per_day", spec.trend_per_day);
            spec.cycle_amplitudes = s.value("cycle_amplitudes", spec.cycle_amplitudes);
            spec.cycle_periods_minutes =
                s.value("cycle_periods_minutes", spec.cycle_periods_minutes);
            spec.noise_sigma = s.value("noise_sigma", spec.noise_sigma);
            spec.spike_probability = s.value("spike_probability", spec.spike_probability);
            spec.spike_magnitude = s.value("spike_magnitude", spec.spike_magnitude);
            spec.spike_duration_minutes =
                s.value("spike_duration_minutes", spec.spike_duration_minutes);
        }
    }
    c.method = method_from(j.value("method", "eemd"));
    c.aggregation = stacker_kind_from(j.value("aggregation", "sum"));
    c.input_minutes = j.value("input_minutes", c.input_minutes);
    c.target_minutes = j.value("target_minutes", c.target_minutes);
    if (j.contains("split")) {
        c.split.train = j["split"].value("train", c.split.train);
        c.split.validation = j["split"].value("validation", c.split.validation);
        c.split.test = j["split"].value("test", c.split.test);
    }
    if (j.contains("strides")) {
        c.strides.train = j["strides"].value("train", c.strides.train);
        c.strides.validation = j["strides"].value("validation", c.strides.validation);
        c.strides.test = j["strides"].value("test", c.strides.test);
    }
    const auto leakage = j.value("leakage_mode", "paper_faithful");
    if (leakage == "paper_faithful") {
        c.leakage = LeakageMode::PaperFaithful;
    } else if (leakage == "strict_causal") {
        c.leakage = LeakageMode::StrictCausal;
    } else {
        throw InvalidConfig("unknown leakage_mode: " + leakage);
    }
    c.repeats = j.value("repeats", c.repeats);
    c.base_seed = j.value("base_seed", c.base_seed);
    c.seeds = j.value("seeds", c.seeds);
    if (j.contains("sift")) {
        const auto& s = j["sift"];
        const auto spline = s.value("spline", "akima");
        if (spline == "akima") {
            c.sift.spline_kind = SplineKind::Akima;
        } else if (spline == "cubic") {
            c.sift.spline_kind = SplineKind::Cubic;
        } else if (spline == "linear") {
            c.sift.spline_kind = SplineKind::LinearFallback;
        } else {
            throw InvalidConfig("unknown spline kind: " + spline);
        }
        c.sift.max_sift_iterations = s.value("max_sift_iterations", c.sift.max_sift_iterations);
        c.sift.mean_tolerance = s.value("mean_tolerance", c.sift.mean_tolerance);
        c.sift.max_imfs = s.value("max_imfs", c.sift.max_imfs);
    }
    if (j.contains("noise")) {
        c.noise.trials = j["noise"].value("trials", c.noise.trials);
        c.noise.epsilon = j["noise"].value("epsilon", c.noise.epsilon);
        c.noise.epsilon_schedule =
            j["noise"].value("epsilon_schedule", c.noise.epsilon_schedule);
    }
    c.top_m = j.value("top_m", c.top_m);
    c.include_residue_component =
        j.value("include_residue_component", c.include_residue_component);
    c.bags = j.value("bags", c.bags);
    c.bag_fraction = j.value("bag_fraction", c.bag_fraction);
    c.resolutions_minutes = j.value("resolutions_minutes", c.resolutions_minutes);
    if (j.contains("learner")) {
        const auto& l = j["learner"];
        c.learner.kind = learner_kind_from(l.value("kind", "recurrent"));
        c.learner.widths = l.value("widths", c.learner.widths);
        c.learner.dropouts = l.value("dropouts", c.learner.dropouts);
        c.learner.learning_rate = l.value("learning_rate", c.learner.learning_rate);
        c.learner.batch_size = l.value("batch_size", c.learner.batch_size);
        c.learner.max_epochs = l.value("max_epochs", c.learner.max_epochs);
        c.learner.patience = l.value("patience", c.learner.patience);
    }
    c.tuning_budget = j.value("tuning_budget", c.tuning_budget);
    if (j.contains("search_space")) {
        const auto& s = j["search_space"];
        c.search_space.recurrent_widths =
            s.value("recurrent_widths", c.search_space.recurrent_widths);
        c.search_space.dense_widths = s.value("dense_widths", c.search_space.dense_widths);
        c.search_space.dropout_rates = s.value("dropout_rates", c.search_space.dropout_rates);
    }
    if (j.contains("stacker_tuning")) {
        const auto& s = j["stacker_tuning"];
        c.stacker_tuning.budget = s.value("budget", c.stacker_tuning.budget);
        c.stacker_tuning.space.dense_widths =
            s.value("dense_widths", c.stacker_tuning.space.dense_widths);
        c.stacker_tuning.space.dropout_rates =
            s.value("dropout_rates", c.stacker_tuning.space.dropout_rates);
        c.stacker_tuning.base.max_epochs =
            s.value("max_epochs", c.stacker_tuning.base.max_epochs);
        c.stacker_tuning.base.patience = s.value("patience", c.stacker_tuning.base.patience);
        c.stacker_tuning.base.learning_rate =
            s.value("learning_rate", c.stacker_tuning.base.learning_rate);
    }
    c.exec = j.value("exec", "parallel") == "serial" ? Exec::Serial : Exec::Parallel;
    c.output_dir = j.value("output_dir", "");
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open " + path);
    nlohmann::json j;
    in >> j;
    return config_from_json(j);
}

std::string config_hash(const ExperimentConfig& config) {
    const std::string dump = config_to_json(config).dump();
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char ch : dump) {
        h ^= ch;
        h *= 0x100000001B3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ExperimentConfig quick_profile() {
    ExperimentConfig c;
    c.data.synthetic.days = 30.0;
    c.data.synthetic.seed = 424242;
    c.strides = {30, 10, 30};
    c.noise.trials = 10;
    c.learner.kind = LearnerKind::Recurrent;
    c.learner.widths = {8, 8, 8};
    c.learner.dropouts = {0.0, 0.0};
    c.learner.batch_size = 64;
    c.learner.max_epochs = 20;
    c.learner.patience = 5;
    c.tuning_budget = 0;
    c.stacker_tuning.budget = 1;
    c.stacker_tuning.base.max_epochs = 60;
    c.stacker_tuning.base.patience = 10;
    return c;
}

ExperimentConfig paper_profile() {
    ExperimentConfig c;
    c.data.synthetic.days = 30.0;
    c.data.synthetic.seed = 424242;
    c.strides = {1, 1, 1};
    c.noise.trials = 25;
    c.learner.kind = LearnerKind::Recurrent;
    c.learner.widths = {32, 16, 16};
    c.learner.max_epochs = 100;
    c.learner.patience = 10;
    c.tuning_budget = 10;
    c.stacker_tuning.budget = 5;
    return c;
}

MethodRuns MetricsReport::method_runs() const {
    MethodRuns runs_out;
    runs_out.name = method_name + "+" + aggregation_name;
    for (const auto& r : runs) runs_out.rmse_per_run.push_back(r.rmse_value);
    return runs_out;
}

namespace {

std::vector<std::vector<double>> inputs_of(const std::vector<WindowPair>& pairs) {
    std::vector<std::vector<double>> out;
    out.reserve(pairs.size());
    for (const auto& p : pairs) out.push_back(p.input);
    return out;
}

std::vector<double> scalar_targets(const std::vector<WindowPair>& pairs) {
    std::vector<double> out;
    out.reserve(pairs.size());
    for (const auto& p : pairs) out.push_back(p.target[0]);
    return out;
}

// member_preds[m][window] -> meta rows, member-major then output-step.
MetaDataset build_meta(const std::vector<std::vector<std::vector<double>>>& member_preds,
                       const std::vector<double>& targets,
                       const std::vector<std::string>& member_labels) {
    MetaDataset meta;
    const std::size_t members = member_preds.size();
    const std::size_t windows = targets.size();
    const std::size_t out_len = member_preds.front().front().size();
    meta.features.resize(static_cast<Eigen::Index>(windows),
                         static_cast<Eigen::Index>(members * out_len));
    meta.targets = targets;
    for (std::size_t m = 0; m < members; ++m) {
        for (std::size_t s = 0; s < out_len; ++s) {
            meta.column_labels.push_back(member_labels[m] + "/step" + std::to_string(s + 1));
        }
    }
    for (std::size_t w = 0; w < windows; ++w) {
        for (std::size_t m = 0; m < members; ++m) {
            for (std::size_t s = 0; s < out_len; ++s) {
                meta.features(static_cast<Eigen::Index>(w),
                              static_cast<Eigen::Index>(m * out_len + s)) =
                    member_preds[m][w][s];
            }
        }
    }
    return meta;
}

std::vector<double> meta_row_of(const std::vector<std::vector<std::vector<double>>>& preds,
                                std::size_t window) {
    std::vector<double> row;
    for (const auto& member : preds) {
        for (double v : member[window]) row.push_back(v);
    }
    return row;
}

struct MemberSets {
    // Per member: train pairs, val pairs, test pairs.
    std::vector<std::vector<WindowPair>> train;
    std::vector<std::vector<WindowPair>> val;
    std::vector<std::vector<WindowPair>> test;
    std::vector<std::string> labels;
    std::vector<double> val_truth;   // scalar ground truth per val window
    std::vector<double> test_truth;  // scalar ground truth per test window
};

LearnerSpec member_spec(const ExperimentConfig& config, std::uint64_t run_seed,
                        std::size_t member, const std::vector<WindowPair>& train,
                        const std::vector<WindowPair>& val) {
    LearnerSpec spec = config.learner;
    if (config.tuning_budget > 0) {
        spec = tune(config.search_space, spec, config.tuning_budget, train, val,
                    sub_seed(run_seed, 0x7E00 + member));
    }
    spec.seed = sub_seed(run_seed, 0x1000 + member);
    return spec;
}

MemberSets assemble_single(const ExperimentConfig& config, const Split& split) {
    MemberSets sets;
    sets.train.push_back(slice_windows(split.train, config.input_minutes, config.target_minutes,
                                       config.strides.train, TargetMode::ScalarSum));
    sets.val.push_back(slice_windows(split.validation, config.input_minutes,
                                     config.target_minutes, config.strides.validation,
                                     TargetMode::ScalarSum));
    sets.test.push_back(slice_windows(split.test, config.input_minutes, config.target_minutes,
                                      config.strides.test, TargetMode::ScalarSum));
    sets.labels.push_back("single");
    sets.val_truth = scalar_targets(sets.val[0]);
    sets.test_truth = scalar_targets(sets.test[0]);
    return sets;
}

MemberSets assemble_bagging(const ExperimentConfig& config, const Split& split,
                            std::uint64_t run_seed) {
    const auto train_pairs =
        slice_windows(split.train, config.input_minutes, config.target_minutes,
                      config.strides.train, TargetMode::ScalarSum);
    const auto val_pairs =
        slice_windows(split.validation, config.input_minutes, config.target_minutes,
                      config.strides.validation, TargetMode::ScalarSum);
    const auto test_pairs =
        slice_windows(split.test, config.input_minutes, config.target_minutes,
                      config.strides.test, TargetMode::ScalarSum);
    const auto bags = bootstrap_bags(train_pairs.size(), config.bag_fraction, config.bags,
                                     sub_seed(run_seed, 0xBA65ull));

    MemberSets sets;
    for (std::size_t b = 0; b < bags.size(); ++b) {
        std::vector<WindowPair> bag;
        bag.reserve(bags[b].size());
        for (auto idx : bags[b]) bag.push_back(train_pairs[idx]);
        sets.train.push_back(std::move(bag));
        sets.val.push_back(val_pairs);
        sets.test.push_back(test_pairs);
        sets.labels.push_back("bag" + std::to_string(b + 1));
    }
    sets.val_truth = scalar_targets(val_pairs);
    sets.test_truth = scalar_targets(test_pairs);
    return sets;
}

MemberSets assemble_multi_resolution(const ExperimentConfig& config, const Split& split) {
    const double interval = split.train.interval_minutes;
    MemberSets sets;

    for (std::size_t r_minutes : config.resolutions_minutes) {
        const double group_d = static_cast<double>(r_minutes) / interval;
        if (std::abs(group_d - std::round(group_d)) > 1e-9 || group_d < 1.0) {
            throw InvalidConfig("resolution " + std::to_string(r_minutes) +
                                "min is not a multiple of the sampling interval");
        }
        const auto group = static_cast<std::size_t>(std::llround(group_d));
        auto stride_for = [&](std::size_t native_stride) {
            const double advance = static_cast<double>(native_stride) * interval;
            const double member_stride = advance / static_cast<double>(r_minutes);
            if (std::abs(member_stride - std::round(member_stride)) > 1e-9 ||
                member_stride < 1.0) {
                throw InvalidConfig("stride does not align at resolution " +
                                    std::to_string(r_minutes) + "min");
            }
            return static_cast<std::size_t>(std::llround(member_stride));
        };

        sets.train.push_back(slice_windows(aggregate_resolution(split.train, group),
                                           config.input_minutes, config.target_minutes,
                                           stride_for(config.strides.train),
                                           TargetMode::ScalarSum));
        sets.val.push_back(slice_windows(aggregate_resolution(split.validation, group),
                                         config.input_minutes, config.target_minutes,
                                         stride_for(config.strides.validation),
                                         TargetMode::ScalarSum));
        sets.test.push_back(slice_windows(aggregate_resolution(split.test, group),
                                          config.input_minutes, config.target_minutes,
                                          stride_for(config.strides.test),
                                          TargetMode::ScalarSum));
        sets.labels.push_back("res" + std::to_string(r_minutes) + "min");
    }

    // Trailing-group drops can cost a window at coarse resolutions; keep
    // the common prefix so members stay index-aligned.
    auto align = [](std::vector<std::vector<WindowPair>>& groups) {
        std::size_t count = groups.front().size();
        for (const auto& g : groups) count = std::min(count, g.size());
        for (auto& g : groups) g.resize(count);
        return count;
    };
    align(sets.train);
    const std::size_t val_count = align(sets.val);
    const std::size_t test_count = align(sets.test);

    // Ground truth from the native-resolution slices over the same spans.
    auto truth = [&](const TimeSeries& segment, std::size_t stride, std::size_t count) {
        auto pairs = slice_windows(segment, config.input_minutes, config.target_minutes,
                                   stride, TargetMode::ScalarSum);
        pairs.resize(count);
        return scalar_targets(pairs);
    };
    sets.val_truth = truth(split.validation, config.strides.validation, val_count);
    sets.test_truth = truth(split.test, config.strides.test, test_count);
    return sets;
}

MemberSets assemble_decomposition(const ExperimentConfig& config, const Split& split,
                                  std::uint64_t run_seed) {
    const double interval = split.train.interval_minutes;
    auto steps = [&](double minutes) {
        const double ratio = minutes / interval;
        if (std::abs(ratio - std::round(ratio)) > 1e-9 || ratio < 1.0) {
            throw InvalidConfig("horizon is not a multiple of the sampling interval");
        }
        return static_cast<std::size_t>(std::llround(ratio));
    };
    const std::size_t input_steps = steps(config.input_minutes);
    const std::size_t target_steps = steps(config.target_minutes);
    const std::size_t total = input_steps + target_steps;

    DecomposeConfig dc;
    dc.method = config.method == Method::Emd
                    ? MethodTag::EMD
                    : (config.method == Method::Eemd ? MethodTag::EEMD : MethodTag::CEEMDAN);
    dc.sift = config.sift;
    dc.noise = config.noise;
    dc.noise.seed = sub_seed(run_seed, 0x0153ull);
    dc.top_m = config.top_m;
    dc.include_residue_component = config.include_residue_component;
    dc.leakage = config.leakage;

    auto build = [&](const TimeSeries& segment, std::size_t stride) {
        return decompose_dataset(make_sequences(segment, total, stride), input_steps,
                                 target_steps, dc, config.exec);
    };
    const auto train_data = build(split.train, config.strides.train);
    const auto val_data = build(split.validation, config.strides.validation);
    const auto test_data = build(split.test, config.strides.test);

    MemberSets sets;
    for (std::size_t m = 0; m < config.top_m; ++m) {
        sets.train.push_back(train_data.components[m]);
        sets.val.push_back(val_data.components[m]);
        sets.test.push_back(test_data.components[m]);
        sets.labels.push_back(train_data.labels[m]);
    }
    sets.val_truth = val_data.ground_truth;
    sets.test_truth = test_data.ground_truth;
    return sets;
}

RunResult run_one(const ExperimentConfig& config, const Split& split, std::uint64_t run_seed) {
    RunResult result;
    result.seed = run_seed;

    auto start = Clock::now();
    MemberSets sets;
    switch (config.method) {
        case Method::Single: sets = assemble_single(config, split); break;
        case Method::Bagging: sets = assemble_bagging(config, split, run_seed); break;
        case Method::MultiResolution: sets = assemble_multi_resolution(config, split); break;
        default: sets = assemble_decomposition(config, split, run_seed); break;
    }
    // Only the decompose-then-slice protocol pays a decomposition cost;
    // plain windowing is bookkeeping, not a pipeline stage.
    if (is_decomposition(config.method)) {
        result.times.decompose_minutes = minutes_since(start);
    }

    start = Clock::now();
    const std::size_t members = sets.train.size();
    std::vector<ForecastModel> models(members);
    parallel_for(members, config.exec, [&](std::size_t m) {
        const auto spec = member_spec(config, run_seed, m, sets.train[m], sets.val[m]);
        models[m] = fit(spec, sets.train[m], sets.val[m]);
    });
    result.times.train_minutes = minutes_since(start);

    start = Clock::now();
    std::vector<std::vector<std::vector<double>>> test_preds(members);
    parallel_for(members, config.exec, [&](std::size_t m) {
        test_preds[m] = predict_batch(models[m], inputs_of(sets.test[m]));
    });

    const std::size_t test_windows = sets.test_truth.size();
    std::vector<double> predictions(test_windows);

    if (config.aggregation == StackerKind::Mean || config.aggregation == StackerKind::Sum) {
        for (std::size_t w = 0; w < test_windows; ++w) {
            std::vector<std::vector<double>> member_vectors;
            member_vectors.reserve(members);
            for (std::size_t m = 0; m < members; ++m) member_vectors.push_back(test_preds[m][w]);
            const auto combined = aggregate_baseline(member_vectors, config.aggregation);
            double scalar = 0.0;
            for (double v : combined) scalar += v;
            predictions[w] = scalar;
        }
    } else {
        std::vector<std::vector<std::vector<double>>> val_preds(members);
        parallel_for(members, config.exec, [&](std::size_t m) {
            val_preds[m] = predict_batch(models[m], inputs_of(sets.val[m]));
        });
        const auto meta = build_meta(val_preds, sets.val_truth, sets.labels);
        // The stacker's own early stopping uses the chronological tail of
        // the validation meta rows.
        MetaDataset stack_train = meta, stack_val;
        const std::size_t holdout = std::max<std::size_t>(1, meta.rows() / 5);
        if (meta.rows() > holdout + 1) {
            const auto keep = static_cast<Eigen::Index>(meta.rows() - holdout);
            stack_train.features = meta.features.topRows(keep);
            stack_train.targets.assign(meta.targets.begin(), meta.targets.begin() + keep);
            stack_val.features = meta.features.bottomRows(static_cast<Eigen::Index>(holdout));
            stack_val.targets.assign(meta.targets.begin() + keep, meta.targets.end());
        }
        const auto stacker = fit_stacker(config.aggregation, stack_train, stack_val,
                                         sub_seed(run_seed, 0x57ACull), config.stacker_tuning);
        for (std::size_t w = 0; w < test_windows; ++w) {
            predictions[w] = apply_stacker(stacker, meta_row_of(test_preds, w));
        }
    }

    result.rmse_value = rmse(predictions, sets.test_truth);
    result.times.aggregate_minutes = minutes_since(start);
    return result;
}

TimeSeries acquire_series(const ExperimentConfig& config) {
    if (config.data.csv_path.empty()) {
        return generate_synthetic(config.data.synthetic);
    }
    auto result = ingest_csv(config.data.csv_path, config.data.columns);
    // Windowing never crosses gaps; experiments run on the longest
    // contiguous segment.
    std::size_t best = 0;
    for (std::size_t i = 1; i < result.segments.size(); ++i) {
        if (result.segments[i].size() > result.segments[best].size()) best = i;
    }
    return result.segments[best];
}

}  // namespace

MetricsReport run_experiment(const ExperimentConfig& config) {
    config.validate();

    MetricsReport report;
    report.method_name = to_string(config.method);
    report.aggregation_name = to_string(config.aggregation);
    report.leakage_mode = to_string(config.leakage);
    report.input_minutes = config.input_minutes;
    report.target_minutes = config.target_minutes;
    report.seeds = config.run_seeds();
    report.hash = config_hash(config);

    const auto series = acquire_series(config);
    const auto split = chronological_split(series, config.split);

    for (std::size_t r = 0; r < report.seeds.size(); ++r) {
        try {
            report.runs.push_back(run_one(config, split, report.seeds[r]));
        } catch (const Error& e) {
            if (!config.output_dir.empty()) persist_report(report, config.output_dir);
            throw Error("repeat " + std::to_string(r) + " (seed " +
                        std::to_string(report.seeds[r]) + ") failed: " + e.what());
        }
    }

    double sum = 0.0;
    for (const auto& run : report.runs) sum += run.rmse_value;
    report.mean_rmse = sum / static_cast<double>(report.runs.size());
    return report;
}

StageTimes timing_profile(const ExperimentConfig& config, std::size_t runs) {
    ExperimentConfig c = config;
    c.repeats = runs;
    c.seeds.clear();
    const auto report = run_experiment(c);

    auto median_of = [&](auto getter) {
        std::vector<double> values;
        for (const auto& run : report.runs) values.push_back(getter(run.times));
        std::sort(values.begin(), values.end());
        const std::size_t n = values.size();
        return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
    };
    StageTimes medians;
    medians.decompose_minutes = median_of([](const StageTimes& t) { return t.decompose_minutes; });
    medians.train_minutes = median_of([](const StageTimes& t) { return t.train_minutes; });
    medians.aggregate_minutes =
        median_of([](const StageTimes& t) { return t.aggregate_minutes; });
    return medians;
}

void emit_metrics_csv(const MetricsReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoFailure("cannot write " + path);
    out << "run,seed,method,aggregation,input_minutes,target_minutes,leakage,rmse\n";
    for (std::size_t r = 0; r < report.runs.size(); ++r) {
        out << r << ',' << report.runs[r].seed << ',' << report.method_name << ','
            << report.aggregation_name << ',' << format_double(report.input_minutes) << ','
            << format_double(report.target_minutes) << ',' << report.leakage_mode << ','
            << format_double(report.runs[r].rmse_value) << '\n';
    }
    if (!out) throw IoFailure("write failed: " + path);
}

MetricsReport parse_metrics_csv(const std::string& path) {
    const auto rows = read_csv_rows(path);
    if (rows.empty()) throw EmptyFile("no rows in " + path);
    MetricsReport report;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() != 8) throw Error("bad metrics row in " + path);
        RunResult run;
        run.seed = std::stoull(row[1]);
        run.rmse_value = std::stod(row[7]);
        report.method_name = row[2];
        report.aggregation_name = row[3];
        report.input_minutes = std::stod(row[4]);
        report.target_minutes = std::stod(row[5]);
        report.leakage_mode = row[6];
        report.runs.push_back(run);
        report.seeds.push_back(run.seed);
    }
    double sum = 0.0;
    for (const auto& run : report.runs) sum += run.rmse_value;
    report.mean_rmse = report.runs.empty() ? 0.0 : sum / static_cast<double>(report.runs.size());
    return report;
}

void emit_report_json(const MetricsReport& report, const std::string& path) {
    nlohmann::json j;
    j["format"] = "flowcast-report";
    j["version"] = 1;
    j["method"] = report.method_name;
    j["aggregation"] = report.aggregation_name;
    j["leakage_mode"] = report.leakage_mode;
    j["input_minutes"] = report.input_minutes;
    j["target_minutes"] = report.target_minutes;
    j["config_hash"] = report.hash;
    j["seeds"] = report.seeds;
    j["mean_rmse"] = report.mean_rmse;
    auto& runs = j["runs"] = nlohmann::json::array();
    for (const auto& run : report.runs) {
        runs.push_back({{"seed", run.seed},
                        {"rmse", run.rmse_value},
                        {"decompose_minutes", run.times.decompose_minutes},
                        {"train_minutes", run.times.train_minutes},
                        {"aggregate_minutes", run.times.aggregate_minutes}});
    }
    std::ofstream out(path);
    if (!out) throw IoFailure("cannot write " + path);
    out << j.dump(2) << '\n';
    if (!out) throw IoFailure("write failed: " + path);
}

MetricsReport load_report_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open " + path);
    nlohmann::json j;
    in >> j;
    if (j.value("format", "") != "flowcast-report" || j.value("version", 0) != 1) {
        throw Error("unrecognized report file: " + path);
    }
    MetricsReport report;
    report.method_name = j.at("method").get<std::string>();
    report.aggregation_name = j.at("aggregation").get<std::string>();
    report.leakage_mode = j.at("leakage_mode").get<std::string>();
    report.input_minutes = j.at("input_minutes").get<double>();
    report.target_minutes = j.at("target_minutes").get<double>();
    report.hash = j.at("config_hash").get<std::string>();
    report.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    report.mean_rmse = j.at("mean_rmse").get<double>();
    for (const auto& run : j.at("runs")) {
        RunResult r;
        r.seed = run.at("seed").get<std::uint64_t>();
        r.rmse_value = run.at("rmse").get<double>();
        r.times.decompose_minutes = run.value("decompose_minutes", 0.0);
        r.times.train_minutes = run.value("train_minutes", 0.0);
        r.times.aggregate_minutes = run.value("aggregate_minutes", 0.0);
        report.runs.push_back(r);
    }
    return report;
}

std::string comparison_table(const std::vector<MetricsReport>& reports, double alpha) {
    std::ostringstream out;
    out << "method                         runs  mean_rmse      best\n";
    if (reports.empty()) return out.str();

    for (const auto& r : reports) {
        if (r.leakage_mode != reports.front().leakage_mode) {
            throw Error("comparison mixes leakage modes; report them separately");
        }
    }

    std::vector<MethodRuns> method_runs;
    method_runs.reserve(reports.size());
    for (const auto& r : reports) method_runs.push_back(r.method_runs());
    const auto flags = mark_significant(method_runs, alpha);

    for (std::size_t i = 0; i < reports.size(); ++i) {
        std::string name = method_runs[i].name;
        name.resize(30, ' ');
        std::string mean = format_double(reports[i].mean_rmse);
        mean.resize(14, ' ');
        out << name << ' ' << reports[i].runs.size() << "     " << mean
            << (flags[i] ? "*" : "") << '\n';
    }
    out << "\n'*': statistically the best (paired two-sided Wilcoxon signed-rank vs the "
           "lowest mean, alpha="
        << format_double(alpha) << ").\n";
    out << "leakage mode: " << reports.front().leakage_mode << "\n";
    return out.str();
}

void emit_comparison(const std::vector<MetricsReport>& reports, const std::string& format,
                     const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoFailure("cannot write " + path);

    if (format == "table-text") {
        out << comparison_table(reports);
    } else if (format == "csv") {
        out << "method,aggregation,leakage,runs,mean_rmse,best\n";
        if (!reports.empty()) {
            std::vector<MethodRuns> method_runs;
            for (const auto& r : reports) method_runs.push_back(r.method_runs());
            const auto flags = mark_significant(method_runs);
            for (std::size_t i = 0; i < reports.size(); ++i) {
                out << reports[i].method_name << ',' << reports[i].aggregation_name << ','
                    << reports[i].leakage_mode << ',' << reports[i].runs.size() << ','
                    << format_double(reports[i].mean_rmse) << ',' << (flags[i] ? 1 : 0) << '\n';
            }
        }
    } else if (format == "json") {
        nlohmann::json j;
        j["alpha"] = 0.05;
        j["test"] = "paired two-sided Wilcoxon signed-rank";
        auto& arr = j["methods"] = nlohmann::json::array();
        std::vector<bool> flags;
        if (!reports.empty()) {
            std::vector<MethodRuns> method_runs;
            for (const auto& r : reports) method_runs.push_back(r.method_runs());
            flags = mark_significant(method_runs);
        }
        for (std::size_t i = 0; i < reports.size(); ++i) {
            nlohmann::json entry;
            entry["method"] = reports[i].method_name;
            entry["aggregation"] = reports[i].aggregation_name;
            entry["leakage_mode"] = reports[i].leakage_mode;
            entry["mean_rmse"] = reports[i].mean_rmse;
            entry["config_hash"] = reports[i].hash;
            entry["seeds"] = reports[i].seeds;
            entry["best"] = static_cast<bool>(flags[i]);
            arr.push_back(entry);
        }
        out << j.dump(2) << '\n';
    } else {
        throw InvalidConfig("unknown report format: " + format);
    }
    if (!out) throw IoFailure("write failed: " + path);
}

void persist_report(const MetricsReport& report, const std::string& dir) {
    std::filesystem::create_directories(dir);
    emit_metrics_csv(report, dir + "/metrics.csv");
    emit_report_json(report, dir + "/report.json");
    std::ofstream out(dir + "/report.txt");
    if (!out) throw IoFailure("cannot write " + dir + "/report.txt");
    out << comparison_table({report});
}

}  // namespace flowcast
