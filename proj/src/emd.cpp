#include "flowcast/emd.hpp"

#include <algorithm>
#include <cmath>

#include "flowcast/spline.hpp"

namespace flowcast {

std::string to_string(MethodTag tag) {
    switch (tag) {
        case MethodTag::EMD: return "EMD";
        case MethodTag::EEMD: return "EEMD";
        case MethodTag::CEEMDAN: return "CEEMDAN";
    }
    return "?";
}

double Decomposition::reconstruction_error(const std::vector<double>& source) const {
    double worst = 0.0;
    for (std::size_t t = 0; t < source.size(); ++t) {
        double sum = residue[t];
        for (const auto& imf : imfs) sum += imf[t];
        worst = std::max(worst, std::abs(source[t] - sum));
    }
    return worst;
}

namespace {

// Knots mirrored about both ends: up to two extrema reflected across
// index 0 and index n-1. Standard remedy for envelope end swing.
void mirrored_knots(const std::vector<Extremum>& ex, std::size_t n,
                    std::vector<double>& xs, std::vector<double>& ys) {
    xs.clear();
    ys.clear();
    const std::size_t k = ex.size();
    const std::size_t left = std::min<std::size_t>(2, k);
    const std::size_t right = std::min<std::size_t>(2, k);

    for (std::size_t i = left; i-- > 0;) {
        xs.push_back(-static_cast<double>(ex[i].index));
        ys.push_back(ex[i].value);
    }
    for (const auto& e : ex) {
        xs.push_back(static_cast<double>(e.index));
        ys.push_back(e.value);
    }
    const double last = static_cast<double>(n - 1);
    for (std::size_t i = 0; i < right; ++i) {
        const auto& e = ex[k - 1 - i];
        xs.push_back(2.0 * last - static_cast<double>(e.index));
        ys.push_back(e.value);
    }
}

// Decomposition continues while envelopes are constructible: at least one
// interior maximum and one interior minimum. A residual with fewer than
// two extrema is the final trend.
bool decomposable(const std::vector<double>& values) {
    if (values.size() < 3) return false;
    const auto ex = find_extrema(values);
    return !ex.maxima.empty() && !ex.minima.empty();
}

}  // namespace

EnvelopePair build_envelopes(const std::vector<double>& values,
                             const ExtremaSet& extrema,
                             const SiftConfig& config) {
    const std::size_t n = values.size();
    if (extrema.maxima.empty() || extrema.minima.empty()) {
        throw InsufficientExtrema("build_envelopes: need at least one maximum and one minimum");
    }

    std::vector<double> xs, ys;
    mirrored_knots(extrema.maxima, n, xs, ys);
    auto upper = Spline::fit(config.spline_kind, std::move(xs), std::move(ys));
    mirrored_knots(extrema.minima, n, xs, ys);
    auto lower = Spline::fit(config.spline_kind, std::move(xs), std::move(ys));

    EnvelopePair env;
    env.upper = upper.eval_grid(n);
    env.lower = lower.eval_grid(n);
    env.mean.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        env.mean[t] = (env.upper[t] + env.lower[t]) / 2.0;
    }
    return env;
}

EnvelopePair build_envelopes(const TimeSeries& series,
                             const ExtremaSet& extrema,
                             const SiftConfig& config) {
    return build_envelopes(series.values, extrema, config);
}

std::vector<double> sift_once(const std::vector<double>& values, const SiftConfig& config) {
    const auto env = build_envelopes(values, find_extrema(values), config);
    std::vector<double> out(values.size());
    for (std::size_t t = 0; t < values.size(); ++t) out[t] = values[t] - env.mean[t];
    return out;
}

ImfCheck is_imf(const std::vector<double>& candidate, const SiftConfig& config) {
    ImfCheck check;
    const auto [lo, hi] = std::minmax_element(candidate.begin(), candidate.end());
    check.range = *hi - *lo;
    check.zero_crossings = count_zero_crossings(candidate);

    ExtremaSet extrema;
    if (candidate.size() >= 3) extrema = find_extrema(candidate);
    check.extrema_count = extrema.total();

    const auto diff = check.extrema_count > check.zero_crossings
                          ? check.extrema_count - check.zero_crossings
                          : check.zero_crossings - check.extrema_count;
    check.count_ok = diff <= 1;

    if (!extrema.maxima.empty() && !extrema.minima.empty()) {
        const auto env = build_envelopes(candidate, extrema, config);
        for (double m : env.mean) check.max_mean_abs = std::max(check.max_mean_abs, std::abs(m));
    } else {
        // No envelopes: the signal is its own mean.
        for (double v : candidate) check.max_mean_abs = std::max(check.max_mean_abs, std::abs(v));
    }
    check.mean_ok = check.max_mean_abs <= config.mean_tolerance * check.range;
    check.accepted = check.count_ok && check.mean_ok;
    return check;
}

Decomposition emd(const std::vector<double>& values, const SiftConfig& config) {
    config.validate();
    if (values.size() < 4) throw SeriesTooShort("emd: need at least 4 points");

    Decomposition out;
    out.method_tag = MethodTag::EMD;
    std::vector<double> residual = values;

    while (static_cast<int>(out.imfs.size()) < config.max_imfs) {
        if (!decomposable(residual)) break;

        std::vector<double> candidate = residual;
        ImfInfo info;
        bool have_candidate = false;
        for (int iter = 0; iter < config.max_sift_iterations; ++iter) {
            ExtremaSet extrema = find_extrema(candidate);
            if (extrema.maxima.empty() || extrema.minima.empty()) break;
            const auto env = build_envelopes(candidate, extrema, config);
            for (std::size_t t = 0; t < candidate.size(); ++t) candidate[t] -= env.mean[t];

            info.sift_iterations = iter + 1;
            have_candidate = true;
            const auto check = is_imf(candidate, config);
            info.extrema_count = check.extrema_count;
            info.zero_crossings = check.zero_crossings;
            info.max_mean_abs = check.max_mean_abs;
            if (check.accepted) {
                info.force_accepted = false;
                break;
            }
            info.force_accepted = true;  // cleared if a later iteration passes
        }
        if (!have_candidate) break;  // sifting degenerated; leave it in the residue

        for (std::size_t t = 0; t < residual.size(); ++t) residual[t] -= candidate[t];
        out.imfs.push_back(std::move(candidate));
        out.imf_info.push_back(info);
    }

    out.residue = std::move(residual);
    return out;
}

Decomposition emd(const TimeSeries& series, const SiftConfig& config) {
    series.validate();
    return emd(series.values, config);
}

}  // namespace flowcast
