#ifndef FLOWCAST_LEARNER_HPP
#define FLOWCAST_LEARNER_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "flowcast/windows.hpp"

namespace flowcast {

enum class LearnerKind { Linear, FeedForward, Recurrent };

std::string to_string(LearnerKind kind);
LearnerKind learner_kind_from(const std::string& name);

struct LearnerSpec {
    LearnerKind kind = LearnerKind::Recurrent;
    // FeedForward: {h1, h2}. Recurrent: {lstm, d1, d2}. Ignored for Linear.
    std::vector<std::size_t> widths = {8, 8, 8};
    std::vector<double> dropouts = {0.0, 0.0};
    double learning_rate = 1e-3;
    std::size_t batch_size = 64;
    int max_epochs = 100;
    int patience = 10;
    std::uint64_t seed = 0;

    void validate() const;
};

struct EpochLog {
    double train_loss = 0.0;
    double val_loss = 0.0;
};

// Per-learner z-score fitted on the train split; identity for the linear
// learner (its closed-form solve is scale-exact already).
struct Normalizer {
    double x_mean = 0.0, x_std = 1.0;
    double y_mean = 0.0, y_std = 1.0;
};

struct ForecastModel {
    LearnerSpec spec;
    std::size_t input_length = 0;
    std::size_t output_length = 0;
    Normalizer norm;
    std::vector<std::pair<std::string, Eigen::MatrixXd>> parameters;
    std::vector<EpochLog> training_log;
    int best_epoch = -1;  // 1-based epoch with the lowest validation loss

    std::size_t parameter_count() const;
    double best_val_loss() const;
};

// Mini-batch MSE training with early stopping on the validation split;
// linear solves in closed form (tiny ridge). Deterministic given the spec
// seed. Throws DivergedTraining when a loss goes non-finite.
ForecastModel fit(const LearnerSpec& spec, const std::vector<WindowPair>& train,
                  const std::vector<WindowPair>& val);

std::vector<double> predict(const ForecastModel& model, const std::vector<double>& input);
std::vector<std::vector<double>> predict_batch(const ForecastModel& model,
                                               const std::vector<std::vector<double>>& inputs);

struct SearchSpace {
    std::vector<std::size_t> recurrent_widths = {8, 16, 32, 64, 128};
    std::vector<std::size_t> dense_widths = {8, 16, 32, 64, 128};
    std::vector<double> dropout_rates = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
};

LearnerSpec sample_spec(const SearchSpace& space, const LearnerSpec& base,
                        std::mt19937_64& rng);

// Random search over the declared grid; lowest validation loss wins, ties
// broken by parameter count then sample order. A budget of one returns the
// single sampled spec untrained.
LearnerSpec tune(const SearchSpace& space, const LearnerSpec& base, std::size_t budget,
                 const std::vector<WindowPair>& train, const std::vector<WindowPair>& val,
                 std::uint64_t seed);

// Versioned structured-text checkpoint; loading reproduces predictions
// bitwise.
void save_model(const ForecastModel& model, const std::string& path);
ForecastModel load_model(const std::string& path);

}  // namespace flowcast

#endif  // FLOWCAST_LEARNER_HPP
