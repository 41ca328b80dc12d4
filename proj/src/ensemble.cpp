#include "flowcast/ensemble.hpp"

#include <algorithm>
#include <cmath>

#include "flowcast/rng.hpp"

namespace flowcast {

namespace {

double sample_std(const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return n > 1.0 ? std::sqrt(ss / (n - 1.0)) : 0.0;
}

// Same continuation rule as plain EMD: a residual needs at least one
// maximum and one minimum to support another stage.
bool decomposable(const std::vector<double>& values) {
    if (values.size() < 3) return false;
    const auto ex = find_extrema(values);
    return !ex.maxima.empty() && !ex.minima.empty();
}

}  // namespace

std::vector<double> trial_noise(std::uint64_t seed, std::size_t trial, std::size_t n,
                                double scale) {
    GaussianSampler gauss(sub_seed(seed, trial));
    auto noise = gauss.sequence(n);
    for (auto& v : noise) v *= scale;
    return noise;
}

std::vector<double> TrialMatrix::row_mean(std::size_t m) const {
    std::vector<double> mean(length, 0.0);
    for (std::size_t k = 0; k < trials; ++k) {
        for (std::size_t t = 0; t < length; ++t) mean[t] += at(k, m, t);
    }
    const double inv = 1.0 / static_cast<double>(trials);
    for (auto& v : mean) v *= inv;
    return mean;
}

TrialMatrix align_trials(const std::vector<Decomposition>& trial_decompositions) {
    if (trial_decompositions.empty()) throw Error("align_trials: need at least one trial");

    TrialMatrix matrix;
    matrix.trials = trial_decompositions.size();
    matrix.length = trial_decompositions.front().length();
    for (const auto& d : trial_decompositions) {
        matrix.rows = std::max(matrix.rows, d.imfs.size());
    }
    matrix.data.assign(matrix.trials * matrix.rows * matrix.length, 0.0);
    for (std::size_t k = 0; k < matrix.trials; ++k) {
        const auto& imfs = trial_decompositions[k].imfs;
        for (std::size_t m = 0; m < imfs.size(); ++m) {
            for (std::size_t t = 0; t < matrix.length; ++t) {
                matrix.at(k, m, t) = imfs[m][t];
            }
        }
    }
    return matrix;
}

Decomposition eemd(const TimeSeries& series, const NoiseConfig& noise,
                   const SiftConfig& sift, Exec exec) {
    series.validate();
    noise.validate();
    if (series.size() < 4) throw SeriesTooShort("eemd: need at least 4 points");

    const std::size_t n = series.size();
    const std::size_t trials = static_cast<std::size_t>(noise.trials);
    const double scale = noise.epsilon * sample_std(series.values);

    std::vector<Decomposition> per_trial(trials);
    parallel_for(trials, exec, [&](std::size_t k) {
        auto noisy = trial_noise(noise.seed, k, n, scale);
        for (std::size_t t = 0; t < n; ++t) noisy[t] += series.values[t];
        per_trial[k] = emd(noisy, sift);
    });

    const auto matrix = align_trials(per_trial);

    Decomposition out;
    out.method_tag = MethodTag::EEMD;
    out.imfs.reserve(matrix.rows);
    for (std::size_t m = 0; m < matrix.rows; ++m) {
        out.imfs.push_back(matrix.row_mean(m));
        ImfInfo info;
        for (std::size_t k = 0; k < trials; ++k) {
            if (per_trial[k].imfs.size() > m) ++info.contributing_trials;
        }
        out.imf_info.push_back(info);
    }
    out.residue.assign(n, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
        double sum = 0.0;
        for (const auto& imf : out.imfs) sum += imf[t];
        out.residue[t] = series.values[t] - sum;
    }
    return out;
}

Decomposition ceemdan(const TimeSeries& series, const NoiseConfig& noise,
                      const SiftConfig& sift, Exec exec) {
    series.validate();
    noise.validate();
    if (series.size() < 4) throw SeriesTooShort("ceemdan: need at least 4 points");

    const std::size_t n = series.size();
    const std::size_t trials = static_cast<std::size_t>(noise.trials);
    const double sd = sample_std(series.values);

    Decomposition out;
    out.method_tag = MethodTag::CEEMDAN;

    if (!decomposable(series.values)) {
        out.residue = series.values;
        return out;
    }

    // One noise realization per trial, decomposed once; stage m reuses the
    // m-th IMF of each realization.
    std::vector<std::vector<double>> bank(trials);
    std::vector<std::vector<std::vector<double>>> bank_imfs(trials);
    parallel_for(trials, exec, [&](std::size_t k) {
        bank[k] = trial_noise(noise.seed, k, n, sd);
        bank_imfs[k] = emd(bank[k], sift).imfs;
    });

    double scale = 0.0;
    for (double v : series.values) scale = std::max(scale, std::abs(v));
    const double tiny = 1e-14 * std::max(1.0, scale);

    std::vector<double> residual = series.values;
    std::vector<std::vector<double>> contribution(trials);
    std::vector<char> contributed(trials, 0);

    while (static_cast<int>(out.imfs.size()) < sift.max_imfs &&
           decomposable(residual)) {
        const std::size_t stage = out.imfs.size();
        const double eps = noise.stage_epsilon(stage);

        parallel_for(trials, exec, [&](std::size_t k) {
            contributed[k] = 0;
            std::vector<double> mixed;
            if (stage == 0) {
                mixed = residual;
                for (std::size_t t = 0; t < n; ++t) mixed[t] += eps * bank[k][t];
            } else {
                if (bank_imfs[k].size() < stage) return;  // noise ran out of IMFs
                mixed = residual;
                const auto& noise_imf = bank_imfs[k][stage - 1];
                for (std::size_t t = 0; t < n; ++t) mixed[t] += eps * noise_imf[t];
            }
            auto d = emd(mixed, sift);
            if (d.imfs.empty()) return;
            contribution[k] = std::move(d.imfs[0]);
            contributed[k] = 1;
        });

        std::size_t count = 0;
        std::vector<double> mean(n, 0.0);
        for (std::size_t k = 0; k < trials; ++k) {
            if (!contributed[k]) continue;
            ++count;
            for (std::size_t t = 0; t < n; ++t) mean[t] += contribution[k][t];
        }
        if (count == 0) {
            out.stage_collapsed = true;
            break;
        }
        const double inv = 1.0 / static_cast<double>(count);
        double peak = 0.0;
        for (auto& v : mean) {
            v *= inv;
            peak = std::max(peak, std::abs(v));
        }
        if (peak <= tiny) break;  // stage produced nothing; stop rather than loop

        for (std::size_t t = 0; t < n; ++t) residual[t] -= mean[t];
        ImfInfo info;
        info.contributing_trials = count;
        out.imfs.push_back(std::move(mean));
        out.imf_info.push_back(info);
    }

    out.residue = std::move(residual);
    return out;
}

}  // namespace flowcast
