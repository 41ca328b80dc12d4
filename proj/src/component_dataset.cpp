#include "flowcast/component_dataset.hpp"

#include "flowcast/rng.hpp"

namespace flowcast {

std::string to_string(LeakageMode mode) {
    return mode == LeakageMode::PaperFaithful ? "paper_faithful" : "strict_causal";
}

Decomposition decompose_window(const std::vector<double>& sequence, std::size_t window_index,
                               const DecomposeConfig& config) {
    TimeSeries s;
    s.values = sequence;
    switch (config.method) {
        case MethodTag::EMD:
            return emd(s, config.sift);
        case MethodTag::EEMD:
        case MethodTag::CEEMDAN: {
            NoiseConfig noise = config.noise;
            noise.seed = sub_seed(config.noise.seed, window_index);
            // Windows are the parallel level; trials stay serial inside.
            return config.method == MethodTag::EEMD
                       ? eemd(s, noise, config.sift, Exec::Serial)
                       : ceemdan(s, noise, config.sift, Exec::Serial);
        }
    }
    throw Error("decompose_window: unknown method");
}

ComponentDataset decompose_dataset(const SequenceSet& sequences, std::size_t input_steps,
                                   std::size_t target_steps, const DecomposeConfig& config,
                                   Exec exec) {
    if (config.top_m == 0) throw Error("decompose_dataset: top_m must be >= 1");
    const std::size_t total = input_steps + target_steps;
    const std::size_t n_windows = sequences.sequences.size();
    for (const auto& s : sequences.sequences) {
        if (s.size() != total) {
            throw ShapeMismatch("decompose_dataset: sequence length != input+target steps");
        }
    }

    const std::size_t n_imf_slots =
        config.include_residue_component ? config.top_m - 1 : config.top_m;

    struct WindowResult {
        std::vector<std::vector<double>> rows;  // top_m component rows
        std::size_t padded = 0;
        bool ok = false;
    };
    std::vector<WindowResult> results(n_windows);

    parallel_for(n_windows, exec, [&](std::size_t i) {
        auto& result = results[i];
        const auto& seq = sequences.sequences[i];
        const std::size_t decompose_len =
            config.leakage == LeakageMode::PaperFaithful ? total : input_steps;
        const std::vector<double> region(seq.begin(), seq.begin() + decompose_len);
        Decomposition d;
        try {
            d = decompose_window(region, i, config);
        } catch (const Error&) {
            return;  // window dropped, counted by the caller
        }
        result.rows.resize(config.top_m);
        for (std::size_t m = 0; m < n_imf_slots; ++m) {
            if (m < d.imfs.size()) {
                result.rows[m] = std::move(d.imfs[m]);
            } else {
                result.rows[m].assign(decompose_len, 0.0);
                ++result.padded;
            }
        }
        if (config.include_residue_component) {
            result.rows[config.top_m - 1] = std::move(d.residue);
        }
        result.ok = true;
    });

    ComponentDataset out;
    out.leakage = config.leakage;
    out.components.resize(config.top_m);
    for (std::size_t m = 0; m < n_imf_slots; ++m) {
        out.labels.push_back("imf_" + std::to_string(m + 1));
    }
    if (config.include_residue_component) out.labels.push_back("residue");

    for (std::size_t i = 0; i < n_windows; ++i) {
        auto& result = results[i];
        if (!result.ok) {
            ++out.windows_dropped;
            continue;
        }
        out.padded_slots += result.padded;
        const auto& seq = sequences.sequences[i];
        double truth = 0.0;
        for (std::size_t t = input_steps; t < total; ++t) truth += seq[t];
        out.ground_truth.push_back(truth);
        out.origins.push_back(sequences.origins[i]);

        for (std::size_t m = 0; m < config.top_m; ++m) {
            WindowPair pair;
            pair.source_index = sequences.origins[i];
            auto& row = result.rows[m];
            if (config.leakage == LeakageMode::PaperFaithful) {
                pair.input.assign(row.begin(), row.begin() + input_steps);
                pair.target.assign(row.begin() + input_steps, row.end());
            } else {
                pair.input = std::move(row);
                pair.target.assign(1, truth);
            }
            out.components[m].push_back(std::move(pair));
        }
    }
    return out;
}

}  // namespace flowcast
