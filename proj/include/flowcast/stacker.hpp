#ifndef FLOWCAST_STACKER_HPP
#define FLOWCAST_STACKER_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "flowcast/learner.hpp"

namespace flowcast {

enum class StackerKind { Mean, Sum, Linear, Neural };

std::string to_string(StackerKind kind);
StackerKind stacker_kind_from(const std::string& name);

// Meta-data extracted from base learners: one row per window, one column
// per base-learner output (flattened component-major then step for the
// decomposition path).
struct MetaDataset {
    Eigen::MatrixXd features;  // rows x cols
    std::vector<double> targets;
    std::vector<std::string> column_labels;

    std::size_t rows() const { return static_cast<std::size_t>(features.rows()); }
    std::size_t cols() const { return static_cast<std::size_t>(features.cols()); }
};

struct Stacker {
    StackerKind kind = StackerKind::Sum;
    // Linear: one weight per meta column plus bias.
    Eigen::VectorXd weights;
    double bias = 0.0;
    bool singular_fallback = false;  // rank-deficient design, minimum-norm fit
    // Neural: feedforward learner on meta rows.
    ForecastModel model;
};

// Elementwise mean or sum across member predictions of equal shape.
std::vector<double> aggregate_baseline(const std::vector<std::vector<double>>& members,
                                       StackerKind kind);

struct StackerTuning {
    std::size_t budget = 1;
    SearchSpace space;         // dense widths default to the stacker grid below
    LearnerSpec base;          // epochs/patience/learning-rate defaults

    StackerTuning() {
        space.dense_widths = {8, 16, 32, 64};
        base.kind = LearnerKind::FeedForward;
        base.widths = {16, 16};
        base.max_epochs = 60;
        base.patience = 10;
    }
};

// Linear: least squares on the meta features (tiny ridge); Neural: a
// feedforward learner tuned over the stacker grid. val_meta provides the
// early-stopping split for the neural kind.
Stacker fit_stacker(StackerKind kind, const MetaDataset& meta, const MetaDataset& val_meta,
                    std::uint64_t seed, const StackerTuning& tuning = {});

double apply_stacker(const Stacker& stacker, const std::vector<double>& row);

void save_stacker(const Stacker& stacker, const std::string& path);
Stacker load_stacker(const std::string& path);

}  // namespace flowcast

#endif  // FLOWCAST_STACKER_HPP
