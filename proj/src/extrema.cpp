#include "flowcast/extrema.hpp"

namespace flowcast {

ExtremaSet find_extrema(const std::vector<double>& values) {
    const std::size_t n = values.size();
    if (n < 3) throw SeriesTooShort("find_extrema: need at least 3 points");

    ExtremaSet out;
    // Walk runs of equal values; a run is an extremum when the slopes on
    // both sides disagree in sign. Runs touching an endpoint are skipped.
    std::size_t i = 0;
    while (i + 1 < n) {
        std::size_t j = i;
        while (j + 1 < n && values[j + 1] == values[i]) ++j;
        // run is [i, j]
        if (i > 0 && j + 1 < n) {
            const double left = values[i - 1];
            const double right = values[j + 1];
            const double v = values[i];
            const std::size_t mid = i + (j - i) / 2;
            if (left < v && right < v) {
                out.maxima.push_back({mid, v});
            } else if (left > v && right > v) {
                out.minima.push_back({mid, v});
            }
        }
        i = j + 1;
    }
    return out;
}

ExtremaSet find_extrema(const TimeSeries& series) {
    return find_extrema(series.values);
}

std::size_t count_zero_crossings(const std::vector<double>& values) {
    std::size_t crossings = 0;
    int last_sign = 0;
    for (double v : values) {
        const int sign = v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
        if (sign == 0) continue;
        if (last_sign != 0 && sign != last_sign) ++crossings;
        last_sign = sign;
    }
    return crossings;
}

}  // namespace flowcast
