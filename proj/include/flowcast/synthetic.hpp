#ifndef FLOWCAST_SYNTHETIC_HPP
#define FLOWCAST_SYNTHETIC_HPP

#include <cstdint>
#include <vector>

#include "flowcast/time_series.hpp"

namespace flowcast {

// Seeded flow model: daily sinusoid (with a second harmonic for the
// double commute peak), slow trend, short signal-cycle oscillations,
// Gaussian noise, and occasional decaying spikes. Clamped at zero.
struct SyntheticSpec {
    double days = 30.0;
    double interval_minutes = 1.0;
    std::uint64_t seed = 0;
    double base_level = 60.0;
    double daily_amplitude = 35.0;
    double daily_phase_minutes = 360.0;
    double second_harmonic = 0.3;
    double trend_per_day = 0.4;
    std::vector<double> cycle_amplitudes = {12.0, 8.0};
    std::vector<double> cycle_periods_minutes = {15.0, 45.0};
    double noise_sigma = 4.0;
    double spike_probability = 0.001;
    double spike_magnitude = 40.0;
    double spike_duration_minutes = 8.0;

    void validate() const {
        if (!(days > 0.0) || !(interval_minutes > 0.0)) {
            throw Error("SyntheticSpec: days and interval must be positive");
        }
        if (cycle_amplitudes.size() != cycle_periods_minutes.size()) {
            throw Error("SyntheticSpec: cycle amplitude/period lists differ in length");
        }
    }
};

TimeSeries generate_synthetic(const SyntheticSpec& spec);

}  // namespace flowcast

#endif  // FLOWCAST_SYNTHETIC_HPP
