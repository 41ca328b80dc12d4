#ifndef FLOWCAST_ENSEMBLE_HPP
#define FLOWCAST_ENSEMBLE_HPP

#include <cstdint>
#include <vector>

#include "flowcast/emd.hpp"
#include "flowcast/parallel.hpp"
#include "flowcast/time_series.hpp"

namespace flowcast {

struct NoiseConfig {
    int trials = 25;
    double epsilon = 0.2;
    // Per-stage schedule for the adaptive-noise recursion; empty means the
    // constant epsilon at every stage.
    std::vector<double> epsilon_schedule;
    std::uint64_t seed = 0;

    double stage_epsilon(std::size_t stage) const {
        if (epsilon_schedule.empty()) return epsilon;
        return stage < epsilon_schedule.size() ? epsilon_schedule[stage]
                                               : epsilon_schedule.back();
    }

    void validate() const {
        if (trials < 1) throw Error("NoiseConfig: trials must be >= 1");
        if (!(epsilon > 0.0)) throw Error("NoiseConfig: epsilon must be positive");
        for (double e : epsilon_schedule) {
            if (!(e > 0.0)) throw Error("NoiseConfig: schedule entries must be positive");
        }
    }
};

// Per-trial IMFs aligned by extraction order into a trials x rows x length
// block, zero-padded where a trial produced fewer IMFs.
struct TrialMatrix {
    std::size_t trials = 0;
    std::size_t rows = 0;
    std::size_t length = 0;
    std::vector<double> data;

    double at(std::size_t k, std::size_t m, std::size_t t) const {
        return data[(k * rows + m) * length + t];
    }
    double& at(std::size_t k, std::size_t m, std::size_t t) {
        return data[(k * rows + m) * length + t];
    }

    // Eq.-style ensemble mean over trials for one IMF index.
    std::vector<double> row_mean(std::size_t m) const;
};

TrialMatrix align_trials(const std::vector<Decomposition>& trial_decompositions);

// Trial-averaged decomposition: K noise-added copies, each fully
// decomposed, IMFs averaged by index. The residue is defined by
// subtraction, so reconstruction via residue is exact while the raw IMF
// sum is not.
Decomposition eemd(const TimeSeries& series, const NoiseConfig& noise,
                   const SiftConfig& sift, Exec exec = Exec::Parallel);

// Staged adaptive-noise decomposition with exact reconstruction.
Decomposition ceemdan(const TimeSeries& series, const NoiseConfig& noise,
                      const SiftConfig& sift, Exec exec = Exec::Parallel);

// Noise realization used by trial k: epsilon-free, scaled by the sample
// standard deviation of the source. Exposed for tests.
std::vector<double> trial_noise(std::uint64_t seed, std::size_t trial, std::size_t n,
                                double scale);

}  // namespace flowcast

#endif  // FLOWCAST_ENSEMBLE_HPP
