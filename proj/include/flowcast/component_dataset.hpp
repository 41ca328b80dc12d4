#ifndef FLOWCAST_COMPONENT_DATASET_HPP
#define FLOWCAST_COMPONENT_DATASET_HPP

#include <string>
#include <vector>

#include "flowcast/ensemble.hpp"
#include "flowcast/windows.hpp"

namespace flowcast {

// Whether the per-window decomposition may see the target region.
// PaperFaithful decomposes the concatenated input+target sequence and
// slices afterwards; StrictCausal decomposes the input region only and
// pairs each component with the raw scalar target.
enum class LeakageMode { PaperFaithful, StrictCausal };

std::string to_string(LeakageMode mode);

struct DecomposeConfig {
    MethodTag method = MethodTag::EEMD;
    SiftConfig sift;
    NoiseConfig noise;
    std::size_t top_m = 5;
    // Keep the residue as the final component slot. Without it the summed
    // component forecast has no access to the series level.
    bool include_residue_component = true;
    LeakageMode leakage = LeakageMode::PaperFaithful;
};

// Window-aligned component datasets: components[m][i] belongs to window i
// for every m, with zero components substituted where a window produced
// fewer IMFs than requested.
struct ComponentDataset {
    std::vector<std::vector<WindowPair>> components;
    std::vector<double> ground_truth;  // scalar horizon sums from raw windows
    std::vector<std::int64_t> origins;
    std::vector<std::string> labels;
    LeakageMode leakage = LeakageMode::PaperFaithful;
    std::size_t windows_dropped = 0;
    std::size_t padded_slots = 0;

    std::size_t window_count() const { return ground_truth.size(); }
};

ComponentDataset decompose_dataset(const SequenceSet& sequences, std::size_t input_steps,
                                   std::size_t target_steps, const DecomposeConfig& config,
                                   Exec exec = Exec::Parallel);

// The decomposition a given window receives inside decompose_dataset
// (per-window noise sub-seed included); exposed for oracle tests.
Decomposition decompose_window(const std::vector<double>& sequence, std::size_t window_index,
                               const DecomposeConfig& config);

}  // namespace flowcast

#endif  // FLOWCAST_COMPONENT_DATASET_HPP
