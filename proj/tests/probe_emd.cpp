// Scratch probe (not a registered test).
#include <cstdio>

#include "flowcast/emd.hpp"
#include "flowcast/ensemble.hpp"
#include "helpers.hpp"

using namespace flowcast;

int main() {
    const auto v = testutil::two_tone(512);
    SiftConfig config;
    const auto d = emd(v, config);
    std::printf("EMD imfs=%zu\n", d.imfs.size());
    for (std::size_t m = 0; m < d.imfs.size(); ++m) {
        std::printf("  imf%zu: sift_iters=%d force=%d corr_fast=%.4f corr_slow=%.4f extrema=%zu\n",
                    m + 1, d.imf_info[m].sift_iterations, (int)d.imf_info[m].force_accepted,
                    testutil::interior_pearson(d.imfs[m], testutil::fast_tone(512)),
                    testutil::interior_pearson(d.imfs[m], testutil::slow_tone(512)),
                    find_extrema(d.imfs[m]).total());
    }
    const auto rex = find_extrema(d.residue).total();
    std::printf("  residue extrema=%zu corr_slow=%.4f max|r|=%.4f\n", rex,
                testutil::interior_pearson(d.residue, testutil::slow_tone(512)),
                testutil::max_abs(d.residue));

    // EEMD behavior at a few epsilons
    TimeSeries s;
    s.values = v;
    for (double eps : {0.2, 0.05, 0.02}) {
        NoiseConfig noise;
        noise.trials = 10;
        noise.epsilon = eps;
        noise.seed = 0;
        const auto e = eemd(s, noise, SiftConfig{});
        std::printf("EEMD eps=%.2f imfs=%zu", eps, e.imfs.size());
        for (std::size_t m = 0; m < std::min<std::size_t>(3, e.imfs.size()); ++m) {
            std::printf(" | imf%zu corr_fast=%.3f corr_slow=%.3f", m + 1,
                        testutil::interior_pearson(e.imfs[m], testutil::fast_tone(512)),
                        testutil::interior_pearson(e.imfs[m], testutil::slow_tone(512)));
        }
        std::printf("\n");
    }
    return 0;
}
