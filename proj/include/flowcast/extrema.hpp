#ifndef FLOWCAST_EXTREMA_HPP
#define FLOWCAST_EXTREMA_HPP

#include <cstddef>
#include <vector>

#include "flowcast/time_series.hpp"

namespace flowcast {

// Strict interior local extrema. A flat run that is a local max/min
// contributes its middle index (lower middle for even runs); endpoints are
// never reported. Throws SeriesTooShort below 3 points.
ExtremaSet find_extrema(const std::vector<double>& values);
ExtremaSet find_extrema(const TimeSeries& series);

// Sign changes between consecutive nonzero samples; a run of exact zeros
// between opposite signs counts as one crossing.
std::size_t count_zero_crossings(const std::vector<double>& values);

}  // namespace flowcast

#endif  // FLOWCAST_EXTREMA_HPP
