#ifndef FLOWCAST_TIME_SERIES_HPP
#define FLOWCAST_TIME_SERIES_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "flowcast/error.hpp"

namespace flowcast {

// Uniformly sampled scalar flow sequence.
struct TimeSeries {
    std::vector<double> values;
    double interval_minutes = 1.0;
    std::int64_t origin_index = 0;

    std::size_t size() const { return values.size(); }

    void validate() const {
        if (values.empty()) throw Error("TimeSeries: values must be non-empty");
        if (!(interval_minutes > 0.0)) throw Error("TimeSeries: interval_minutes must be positive");
        for (double v : values) {
            if (!std::isfinite(v)) throw Error("TimeSeries: non-finite value");
        }
    }
};

struct Extremum {
    std::size_t index;
    double value;
};

struct ExtremaSet {
    std::vector<Extremum> maxima;
    std::vector<Extremum> minima;

    std::size_t total() const { return maxima.size() + minima.size(); }
};

// Upper/lower spline envelopes and their pointwise mean, all source-length.
struct EnvelopePair {
    std::vector<double> upper;
    std::vector<double> lower;
    std::vector<double> mean;
};

enum class SplineKind { Akima, Cubic, LinearFallback };

struct SiftConfig {
    SplineKind spline_kind = SplineKind::Akima;
    int max_sift_iterations = 50;
    double mean_tolerance = 0.05;  // fraction of candidate range
    int max_imfs = 12;

    void validate() const {
        if (max_sift_iterations < 1) throw Error("SiftConfig: max_sift_iterations must be >= 1");
        if (!(mean_tolerance > 0.0)) throw Error("SiftConfig: mean_tolerance must be positive");
        if (max_imfs < 1) throw Error("SiftConfig: max_imfs must be >= 1");
    }
};

enum class MethodTag { EMD, EEMD, CEEMDAN };

std::string to_string(MethodTag tag);

// Per-IMF bookkeeping from the sift loop.
struct ImfInfo {
    int sift_iterations = 0;
    bool force_accepted = false;        // hit the iteration cap
    std::size_t extrema_count = 0;      // of the accepted candidate
    std::size_t zero_crossings = 0;
    double max_mean_abs = 0.0;          // max |mean envelope| at acceptance
    std::size_t contributing_trials = 0;  // ensemble methods only
};

struct Decomposition {
    std::vector<std::vector<double>> imfs;  // highest-frequency first
    std::vector<double> residue;
    MethodTag method_tag = MethodTag::EMD;
    std::vector<ImfInfo> imf_info;
    bool stage_collapsed = false;  // CEEMDAN: noise IMFs ran out before the residue did

    std::size_t length() const { return residue.size(); }

    // max|s - (sum of IMFs + residue)|; exact (within float tolerance)
    // for EMD and CEEMDAN by telescoping.
    double reconstruction_error(const std::vector<double>& source) const;
};

}  // namespace flowcast

#endif  // FLOWCAST_TIME_SERIES_HPP
