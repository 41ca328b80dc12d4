#include "flowcast/synthetic.hpp"

#include <cmath>
#include <random>

#include "flowcast/rng.hpp"

namespace flowcast {

TimeSeries generate_synthetic(const SyntheticSpec& spec) {
    spec.validate();
    const std::size_t n =
        static_cast<std::size_t>(spec.days * 1440.0 / spec.interval_minutes);

    std::mt19937_64 rng(sub_seed(spec.seed, 0xF10Cull));
    GaussianSampler gauss(sub_seed(spec.seed, 0x6A05ull));

    std::vector<double> cycle_phases(spec.cycle_amplitudes.size());
    for (auto& p : cycle_phases) p = 2.0 * M_PI * uniform01(rng);

    TimeSeries out;
    out.interval_minutes = spec.interval_minutes;
    out.values.resize(n);

    double spike = 0.0;
    const double spike_decay =
        spec.spike_duration_minutes > 0.0
            ? std::exp(-spec.interval_minutes / spec.spike_duration_minutes)
            : 0.0;

    for (std::size_t i = 0; i < n; ++i) {
        const double minutes = static_cast<double>(i) * spec.interval_minutes;
        const double day_phase =
            2.0 * M_PI * (minutes - spec.daily_phase_minutes) / 1440.0;
        double level = spec.base_level + spec.trend_per_day * minutes / 1440.0 +
                       spec.daily_amplitude *
                           (std::sin(day_phase) +
                            spec.second_harmonic * std::sin(2.0 * day_phase));
        for (std::size_t c = 0; c < spec.cycle_amplitudes.size(); ++c) {
            level += spec.cycle_amplitudes[c] *
                     std::sin(2.0 * M_PI * minutes / spec.cycle_periods_minutes[c] +
                              cycle_phases[c]);
        }

        spike *= spike_decay;
        if (uniform01(rng) < spec.spike_probability) {
            spike += spec.spike_magnitude * (0.5 + uniform01(rng));
        }

        const double value = level + spike + spec.noise_sigma * gauss();
        out.values[i] = value > 0.0 ? value : 0.0;
    }
    return out;
}

}  // namespace flowcast
