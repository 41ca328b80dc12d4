#include "flowcast/stacker.hpp"

#include <fstream>

#include "flowcast/rng.hpp"
#include "model_json.hpp"

namespace flowcast {

std::string to_string(StackerKind kind) {
    switch (kind) {
        case StackerKind::Mean: return "mean";
        case StackerKind::Sum: return "sum";
        case StackerKind::Linear: return "linear";
        case StackerKind::Neural: return "neural";
    }
    return "?";
}

StackerKind stacker_kind_from(const std::string& name) {
    if (name == "mean") return StackerKind::Mean;
    if (name == "sum") return StackerKind::Sum;
    if (name == "linear") return StackerKind::Linear;
    if (name == "neural") return StackerKind::Neural;
    throw Error("unknown aggregation kind: " + name);
}

std::vector<double> aggregate_baseline(const std::vector<std::vector<double>>& members,
                                       StackerKind kind) {
    if (kind != StackerKind::Mean && kind != StackerKind::Sum) {
        throw Error("aggregate_baseline: kind must be mean or sum");
    }
    if (members.empty()) throw EmptyInput("aggregate_baseline: no member predictions");
    const std::size_t width = members.front().size();
    for (const auto& m : members) {
        if (m.size() != width) throw ShapeMismatch("aggregate_baseline: unequal shapes");
    }

    // Mean scales each term before adding so that a linear stacker with
    // weights 1/M reproduces it exactly, not just to rounding.
    const double scale =
        kind == StackerKind::Mean ? 1.0 / static_cast<double>(members.size()) : 1.0;
    std::vector<double> out(width, 0.0);
    for (const auto& m : members) {
        for (std::size_t j = 0; j < width; ++j) out[j] += m[j] * scale;
    }
    return out;
}

namespace {

Stacker fit_linear_stacker(const MetaDataset& meta) {
    const auto rows = static_cast<Eigen::Index>(meta.rows());
    const auto cols = static_cast<Eigen::Index>(meta.cols());
    if (rows < cols + 1) {
        throw Error("fit_stacker: linear needs at least cols+1 meta rows");
    }

    Eigen::MatrixXd a(rows, cols + 1);
    a.leftCols(cols) = meta.features;
    a.col(cols).setOnes();
    Eigen::VectorXd y(rows);
    for (Eigen::Index i = 0; i < rows; ++i) y(i) = meta.targets[static_cast<std::size_t>(i)];

    Eigen::MatrixXd gram = a.transpose() * a;
    gram.diagonal().array() += 1e-8;
    const Eigen::VectorXd solution = gram.ldlt().solve(a.transpose() * y);

    Stacker stacker;
    stacker.kind = StackerKind::Linear;
    stacker.weights = solution.head(cols);
    stacker.bias = solution(cols);
    // Rank deficiency leaves the ridge solve at the minimum-norm solution;
    // flag it for the report.
    stacker.singular_fallback =
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(a).rank() < cols + 1;
    return stacker;
}

std::vector<WindowPair> meta_to_pairs(const MetaDataset& meta) {
    std::vector<WindowPair> pairs(meta.rows());
    for (std::size_t i = 0; i < meta.rows(); ++i) {
        pairs[i].input.resize(meta.cols());
        for (std::size_t j = 0; j < meta.cols(); ++j) {
            pairs[i].input[j] = meta.features(static_cast<Eigen::Index>(i),
                                              static_cast<Eigen::Index>(j));
        }
        pairs[i].target = {meta.targets[i]};
    }
    return pairs;
}

}  // namespace

Stacker fit_stacker(StackerKind kind, const MetaDataset& meta, const MetaDataset& val_meta,
                    std::uint64_t seed, const StackerTuning& tuning) {
    if (meta.rows() == 0) throw EmptyInput("fit_stacker: empty meta dataset");
    if (meta.targets.size() != meta.rows()) {
        throw ShapeMismatch("fit_stacker: target count != row count");
    }

    Stacker stacker;
    stacker.kind = kind;
    switch (kind) {
        case StackerKind::Mean:
        case StackerKind::Sum:
            return stacker;  // parameter-free
        case StackerKind::Linear:
            return fit_linear_stacker(meta);
        case StackerKind::Neural: {
            const auto train_pairs = meta_to_pairs(meta);
            const auto val_pairs =
                val_meta.rows() > 0 ? meta_to_pairs(val_meta) : std::vector<WindowPair>{};
            LearnerSpec spec = tuning.base;
            spec.kind = LearnerKind::FeedForward;
            if (tuning.budget > 1) {
                spec = tune(tuning.space, spec, tuning.budget, train_pairs, val_pairs, seed);
            } else {
                std::mt19937_64 rng(sub_seed(seed, 0x57ACull));
                spec = sample_spec(tuning.space, spec, rng);
                spec.seed = sub_seed(seed, 1);
            }
            stacker.model = fit(spec, train_pairs, val_pairs);
            return stacker;
        }
    }
    throw Error("fit_stacker: unknown kind");
}

double apply_stacker(const Stacker& stacker, const std::vector<double>& row) {
    switch (stacker.kind) {
        case StackerKind::Mean: {
            if (row.empty()) throw EmptyInput("apply_stacker: empty row");
            const double scale = 1.0 / static_cast<double>(row.size());
            double sum = 0.0;
            for (double v : row) sum += v * scale;
            return sum;
        }
        case StackerKind::Sum: {
            double sum = 0.0;
            for (double v : row) sum += v;
            return sum;
        }
        case StackerKind::Linear: {
            if (static_cast<Eigen::Index>(row.size()) != stacker.weights.size()) {
                throw ShapeMismatch("apply_stacker: row width != weight count");
            }
            double sum = 0.0;
            for (std::size_t j = 0; j < row.size(); ++j) {
                sum += stacker.weights(static_cast<Eigen::Index>(j)) * row[j];
            }
            return sum + stacker.bias;
        }
        case StackerKind::Neural:
            return predict(stacker.model, row)[0];
    }
    throw Error("apply_stacker: unknown kind");
}

void save_stacker(const Stacker& stacker, const std::string& path) {
    nlohmann::json j;
    j["format"] = "flowcast-stacker";
    j["version"] = 1;
    j["kind"] = to_string(stacker.kind);
    if (stacker.kind == StackerKind::Linear) {
        std::vector<double> w(static_cast<std::size_t>(stacker.weights.size()));
        for (Eigen::Index i = 0; i < stacker.weights.size(); ++i) {
            w[static_cast<std::size_t>(i)] = stacker.weights(i);
        }
        j["weights"] = w;
        j["bias"] = stacker.bias;
        j["singular_fallback"] = stacker.singular_fallback;
    } else if (stacker.kind == StackerKind::Neural) {
        j["model"] = model_to_json(stacker.model);
    }
    std::ofstream out(path);
    if (!out) throw IoFailure("cannot write " + path);
    out << j.dump();
    if (!out) throw IoFailure("write failed: " + path);
}

Stacker load_stacker(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open " + path);
    nlohmann::json j;
    in >> j;
    if (j.value("format", "") != "flowcast-stacker" || j.value("version", 0) != 1) {
        throw Error("unrecognized stacker checkpoint: " + path);
    }

    Stacker stacker;
    stacker.kind = stacker_kind_from(j.at("kind").get<std::string>());
    if (stacker.kind == StackerKind::Linear) {
        const auto w = j.at("weights").get<std::vector<double>>();
        stacker.weights.resize(static_cast<Eigen::Index>(w.size()));
        for (std::size_t i = 0; i < w.size(); ++i) {
            stacker.weights(static_cast<Eigen::Index>(i)) = w[i];
        }
        stacker.bias = j.at("bias").get<double>();
        stacker.singular_fallback = j.at("singular_fallback").get<bool>();
    } else if (stacker.kind == StackerKind::Neural) {
        stacker.model = model_from_json(j.at("model"));
    }
    return stacker;
}

}  // namespace flowcast
