#ifndef FLOWCAST_WINDOWS_HPP
#define FLOWCAST_WINDOWS_HPP

#include <cstdint>
#include <vector>

#include "flowcast/time_series.hpp"

namespace flowcast {

enum class TargetMode { ScalarSum, PerStep };

// One supervised sample: an input window and either the summed horizon
// (scalar mode, one element) or the raw horizon samples (per-step mode).
struct WindowPair {
    std::vector<double> input;
    std::vector<double> target;
    std::int64_t source_index = 0;  // absolute origin of the input window

    double scalar_target() const {
        double sum = 0.0;
        for (double v : target) sum += v;
        return sum;
    }
};

struct SplitSpec {
    double train = 0.7;
    double validation = 0.1;
    double test = 0.2;

    void validate() const {
        if (!(train > 0.0) || !(validation > 0.0) || !(test > 0.0)) {
            throw Error("SplitSpec: fractions must be positive");
        }
        if (std::abs(train + validation + test - 1.0) > 1e-9) {
            throw Error("SplitSpec: fractions must sum to 1");
        }
    }
};

struct Split {
    TimeSeries train;
    TimeSeries validation;
    TimeSeries test;
};

// Contiguous chronological segments; boundaries at floor(fraction * N).
Split chronological_split(const TimeSeries& series, const SplitSpec& spec);

// Windows advance by `stride` samples. input_minutes / target_minutes must
// be positive multiples of the sampling interval.
std::vector<WindowPair> slice_windows(const TimeSeries& series, double input_minutes,
                                      double target_minutes, std::size_t stride,
                                      TargetMode mode);

// Sum of consecutive non-overlapping groups of r samples; trailing partial
// group dropped; interval scaled by r.
TimeSeries aggregate_resolution(const TimeSeries& series, std::size_t r);

// M index bags of size round(fraction * n), sampled with replacement under
// per-bag sub-seeds.
std::vector<std::vector<std::size_t>> bootstrap_bags(std::size_t n_pairs, double fraction,
                                                     std::size_t bags, std::uint64_t seed);

// Contiguous input+target slices for the decompose-then-slice protocol.
struct SequenceSet {
    std::vector<std::vector<double>> sequences;
    std::vector<std::int64_t> origins;
    std::size_t stride = 1;
};

SequenceSet make_sequences(const TimeSeries& series, std::size_t total_steps,
                           std::size_t stride);

}  // namespace flowcast

#endif  // FLOWCAST_WINDOWS_HPP
