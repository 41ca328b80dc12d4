#include "flowcast/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace flowcast {

double rmse(const std::vector<double>& predictions, const std::vector<double>& truths) {
    if (predictions.empty() || truths.empty()) throw EmptyInput("rmse: empty input");
    if (predictions.size() != truths.size()) throw ShapeMismatch("rmse: length mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double d = predictions[i] - truths[i];
        sum += d * d;
    }
    return std::sqrt(sum / static_cast<double>(predictions.size()));
}

double wilcoxon_signed_rank_p(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw ShapeMismatch("wilcoxon: unequal run counts");

    std::vector<double> diffs;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        if (d != 0.0) diffs.push_back(d);
    }
    const std::size_t n = diffs.size();
    if (n == 0) return 1.0;

    // Average ranks of |d|, doubled so ties stay integral.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return std::abs(diffs[x]) < std::abs(diffs[y]);
    });
    std::vector<long> rank2(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n &&
               std::abs(diffs[order[j + 1]]) == std::abs(diffs[order[i]])) {
            ++j;
        }
        const long sum2 = static_cast<long>((i + 1 + j + 1) * (j - i + 1));  // doubled rank sum
        const long avg2 = sum2 / static_cast<long>(j - i + 1);
        for (std::size_t k = i; k <= j; ++k) rank2[order[k]] = avg2;
        i = j + 1;
    }

    long w2_plus = 0;
    long total2 = 0;
    for (std::size_t k = 0; k < n; ++k) {
        total2 += rank2[k];
        if (diffs[k] > 0.0) w2_plus += rank2[k];
    }

    // Exact null distribution by subset-sum counting.
    std::vector<double> ways(static_cast<std::size_t>(total2) + 1, 0.0);
    ways[0] = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        const auto r = static_cast<std::size_t>(rank2[k]);
        for (std::size_t s = ways.size(); s-- > r;) {
            ways[s] += ways[s - r];
        }
    }
    const double denom = std::pow(2.0, static_cast<double>(n));
    double below = 0.0, above = 0.0;
    for (std::size_t s = 0; s < ways.size(); ++s) {
        if (s <= static_cast<std::size_t>(w2_plus)) below += ways[s];
        if (s >= static_cast<std::size_t>(w2_plus)) above += ways[s];
    }
    const double p = 2.0 * std::min(below, above) / denom;
    return std::min(1.0, p);
}

double MethodRuns::mean() const {
    if (rmse_per_run.empty()) return 0.0;
    double sum = 0.0;
    for (double v : rmse_per_run) sum += v;
    return sum / static_cast<double>(rmse_per_run.size());
}

std::vector<bool> mark_significant(const std::vector<MethodRuns>& methods, double alpha) {
    if (methods.empty()) return {};
    if (methods.size() == 1) return {true};

    const std::size_t runs = methods.front().rmse_per_run.size();
    for (const auto& m : methods) {
        if (m.rmse_per_run.size() != runs) {
            throw ShapeMismatch("mark_significant: unequal repeat counts");
        }
    }
    if (runs < 5) throw InsufficientRuns("mark_significant: need at least 5 repeats");

    std::size_t best = 0;
    for (std::size_t i = 1; i < methods.size(); ++i) {
        if (methods[i].mean() < methods[best].mean()) best = i;
    }

    std::vector<bool> flags(methods.size(), false);
    flags[best] = true;
    for (std::size_t i = 0; i < methods.size(); ++i) {
        if (i == best) continue;
        const double p =
            wilcoxon_signed_rank_p(methods[i].rmse_per_run, methods[best].rmse_per_run);
        if (p >= alpha) flags[i] = true;
    }
    return flags;
}

}  // namespace flowcast
