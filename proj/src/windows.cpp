#include "flowcast/windows.hpp"

#include <cmath>
#include <random>

#include "flowcast/rng.hpp"

namespace flowcast {

Split chronological_split(const TimeSeries& series, const SplitSpec& spec) {
    spec.validate();
    series.validate();
    const std::size_t n = series.size();
    const std::size_t n_train = static_cast<std::size_t>(std::floor(spec.train * n));
    const std::size_t n_val = static_cast<std::size_t>(std::floor(spec.validation * n));
    if (n_train == 0 || n_val == 0 || n_train + n_val >= n) {
        throw SeriesTooShort("chronological_split: a split segment would be empty");
    }

    auto slice = [&](std::size_t begin, std::size_t end) {
        TimeSeries out;
        out.interval_minutes = series.interval_minutes;
        out.origin_index = series.origin_index + static_cast<std::int64_t>(begin);
        out.values.assign(series.values.begin() + begin, series.values.begin() + end);
        return out;
    };

    Split split;
    split.train = slice(0, n_train);
    split.validation = slice(n_train, n_train + n_val);
    split.test = slice(n_train + n_val, n);
    return split;
}

namespace {

std::size_t steps_for(double minutes, double interval, const char* what) {
    if (!(minutes > 0.0)) throw Error(std::string(what) + " must be positive");
    const double ratio = minutes / interval;
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 1e-9 || rounded < 1.0) {
        throw Error(std::string(what) + " must be a positive multiple of the interval");
    }
    return static_cast<std::size_t>(rounded);
}

}  // namespace

std::vector<WindowPair> slice_windows(const TimeSeries& series, double input_minutes,
                                      double target_minutes, std::size_t stride,
                                      TargetMode mode) {
    series.validate();
    if (stride == 0) throw Error("slice_windows: stride must be >= 1");
    const std::size_t input_steps = steps_for(input_minutes, series.interval_minutes, "input horizon");
    const std::size_t target_steps =
        steps_for(target_minutes, series.interval_minutes, "target horizon");
    const std::size_t window = input_steps + target_steps;
    if (window > series.size()) {
        throw HorizonTooLong("slice_windows: input+target horizon exceeds the series");
    }

    std::vector<WindowPair> pairs;
    for (std::size_t origin = 0; origin + window <= series.size(); origin += stride) {
        WindowPair pair;
        pair.source_index = series.origin_index + static_cast<std::int64_t>(origin);
        pair.input.assign(series.values.begin() + origin,
                          series.values.begin() + origin + input_steps);
        if (mode == TargetMode::PerStep) {
            pair.target.assign(series.values.begin() + origin + input_steps,
                               series.values.begin() + origin + window);
        } else {
            double sum = 0.0;
            for (std::size_t t = origin + input_steps; t < origin + window; ++t) {
                sum += series.values[t];
            }
            pair.target.assign(1, sum);
        }
        pairs.push_back(std::move(pair));
    }
    return pairs;
}

TimeSeries aggregate_resolution(const TimeSeries& series, std::size_t r) {
    series.validate();
    if (r == 0) throw Error("aggregate_resolution: r must be >= 1");
    if (r == 1) return series;

    TimeSeries out;
    out.interval_minutes = series.interval_minutes * static_cast<double>(r);
    out.origin_index = series.origin_index;
    const std::size_t groups = series.size() / r;
    out.values.resize(groups);
    for (std::size_t g = 0; g < groups; ++g) {
        double sum = 0.0;
        for (std::size_t i = g * r; i < (g + 1) * r; ++i) sum += series.values[i];
        out.values[g] = sum;
    }
    if (out.values.empty()) throw SeriesTooShort("aggregate_resolution: no full group");
    return out;
}

std::vector<std::vector<std::size_t>> bootstrap_bags(std::size_t n_pairs, double fraction,
                                                     std::size_t bags, std::uint64_t seed) {
    if (n_pairs == 0) throw EmptyInput("bootstrap_bags: no pairs");
    if (!(fraction > 0.0) || fraction > 1.0) throw Error("bootstrap_bags: fraction in (0, 1]");

    const std::size_t size =
        static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n_pairs)));
    std::vector<std::vector<std::size_t>> out(bags);
    for (std::size_t b = 0; b < bags; ++b) {
        std::mt19937_64 rng(sub_seed(seed, b));
        out[b].resize(size);
        for (auto& idx : out[b]) idx = uniform_index(rng, n_pairs);
    }
    return out;
}

SequenceSet make_sequences(const TimeSeries& series, std::size_t total_steps,
                           std::size_t stride) {
    series.validate();
    if (stride == 0) throw Error("make_sequences: stride must be >= 1");
    if (total_steps > series.size()) {
        throw HorizonTooLong("make_sequences: sequence length exceeds the series");
    }
    SequenceSet set;
    set.stride = stride;
    for (std::size_t origin = 0; origin + total_steps <= series.size(); origin += stride) {
        set.sequences.emplace_back(series.values.begin() + origin,
                                   series.values.begin() + origin + total_steps);
        set.origins.push_back(series.origin_index + static_cast<std::int64_t>(origin));
    }
    return set;
}

}  // namespace flowcast
