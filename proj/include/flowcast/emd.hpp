#ifndef FLOWCAST_EMD_HPP
#define FLOWCAST_EMD_HPP

#include <cstddef>
#include <vector>

#include "flowcast/extrema.hpp"
#include "flowcast/time_series.hpp"

namespace flowcast {

// Spline envelopes through mirror-extended extrema (two knots reflected
// about each end before fitting). Requires at least one maximum and one
// minimum; throws InsufficientExtrema otherwise.
EnvelopePair build_envelopes(const std::vector<double>& values,
                             const ExtremaSet& extrema,
                             const SiftConfig& config);
EnvelopePair build_envelopes(const TimeSeries& series,
                             const ExtremaSet& extrema,
                             const SiftConfig& config);

// One sifting step: candidate = values - mean envelope.
std::vector<double> sift_once(const std::vector<double>& values, const SiftConfig& config);

struct ImfCheck {
    bool accepted = false;
    bool count_ok = false;
    bool mean_ok = false;
    std::size_t extrema_count = 0;
    std::size_t zero_crossings = 0;
    double max_mean_abs = 0.0;
    double range = 0.0;
};

// IMF test: extrema/zero-crossing counts differ by at most one, and the
// mean envelope stays within mean_tolerance of the candidate's range.
// When no envelopes can be built the signal itself stands in for the mean.
ImfCheck is_imf(const std::vector<double>& candidate, const SiftConfig& config);

Decomposition emd(const TimeSeries& series, const SiftConfig& config);
Decomposition emd(const std::vector<double>& values, const SiftConfig& config);

}  // namespace flowcast

#endif  // FLOWCAST_EMD_HPP
