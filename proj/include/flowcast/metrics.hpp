#ifndef FLOWCAST_METRICS_HPP
#define FLOWCAST_METRICS_HPP

#include <string>
#include <vector>

#include "flowcast/error.hpp"

namespace flowcast {

double rmse(const std::vector<double>& predictions, const std::vector<double>& truths);

// Exact two-sided paired Wilcoxon signed-rank p-value. Zero differences are
// dropped; tied magnitudes get average ranks. Returns 1 when every pair is
// tied.
double wilcoxon_signed_rank_p(const std::vector<double>& a, const std::vector<double>& b);

struct MethodRuns {
    std::string name;
    std::vector<double> rmse_per_run;

    double mean() const;
};

// The lowest-mean method plus every method whose paired Wilcoxon test
// against it is not significant at alpha. Throws InsufficientRuns below
// five repeats.
std::vector<bool> mark_significant(const std::vector<MethodRuns>& methods,
                                   double alpha = 0.05);

}  // namespace flowcast

#endif  // FLOWCAST_METRICS_HPP
