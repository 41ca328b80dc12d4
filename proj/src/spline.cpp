#include "flowcast/spline.hpp"

#include <algorithm>
#include <cmath>

namespace flowcast {

Spline Spline::fit(SplineKind requested, std::vector<double> xs, std::vector<double> ys) {
    if (xs.size() != ys.size()) throw Error("Spline: xs/ys size mismatch");
    if (xs.size() < 2) throw InsufficientExtrema("Spline: need at least 2 knots");
    for (std::size_t i = 1; i < xs.size(); ++i) {
        if (!(xs[i] > xs[i - 1])) throw Error("Spline: knots must be strictly increasing");
    }

    const std::size_t n = xs.size();
    SplineKind kind = requested;
    if (kind == SplineKind::Akima && n < 5) kind = SplineKind::Cubic;
    if (kind == SplineKind::Cubic && n < 4) kind = SplineKind::LinearFallback;

    Spline s;
    s.kind_ = kind;
    s.xs_ = std::move(xs);
    switch (kind) {
        case SplineKind::Akima: s.build_akima(ys); break;
        case SplineKind::Cubic: s.build_cubic(ys); break;
        case SplineKind::LinearFallback: s.build_linear(ys); break;
    }
    return s;
}

std::size_t Spline::segment(double x) const {
    // Last segment extends to +inf, first to -inf.
    auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    if (it == xs_.begin()) return 0;
    std::size_t idx = static_cast<std::size_t>(it - xs_.begin()) - 1;
    return std::min(idx, xs_.size() - 2);
}

double Spline::eval(double x) const {
    const std::size_t j = segment(x);
    const double dx = x - xs_[j];
    return c0_[j] + dx * (c1_[j] + dx * (c2_[j] + dx * c3_[j]));
}

std::vector<double> Spline::eval_grid(std::size_t n) const {
    std::vector<double> out(n);
    std::size_t j = 0;
    const std::size_t last = xs_.size() - 2;
    for (std::size_t t = 0; t < n; ++t) {
        const double x = static_cast<double>(t);
        while (j < last && x >= xs_[j + 1]) ++j;
        const double dx = x - xs_[j];
        out[t] = c0_[j] + dx * (c1_[j] + dx * (c2_[j] + dx * c3_[j]));
    }
    return out;
}

void Spline::build_linear(const std::vector<double>& ys) {
    const std::size_t m = xs_.size() - 1;
    c0_.resize(m);
    c1_.resize(m);
    c2_.assign(m, 0.0);
    c3_.assign(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        c0_[i] = ys[i];
        c1_[i] = (ys[i + 1] - ys[i]) / (xs_[i + 1] - xs_[i]);
    }
}

void Spline::build_cubic(const std::vector<double>& ys) {
    // Natural cubic spline: tridiagonal solve for second derivatives.
    const std::size_t n = xs_.size();
    std::vector<double> h(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) h[i] = xs_[i + 1] - xs_[i];

    std::vector<double> m2(n, 0.0);  // second derivatives
    std::vector<double> diag(n, 0.0), rhs(n, 0.0), upper(n, 0.0);
    diag[0] = 1.0;
    diag[n - 1] = 1.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        diag[i] = 2.0 * (h[i - 1] + h[i]);
        upper[i] = h[i];
        rhs[i] = 6.0 * ((ys[i + 1] - ys[i]) / h[i] - (ys[i] - ys[i - 1]) / h[i - 1]);
    }
    // Thomas algorithm; natural boundary rows are already reduced.
    for (std::size_t i = 2; i + 1 < n; ++i) {
        const double w = h[i - 1] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    for (std::size_t i = n - 2; i >= 1; --i) {
        m2[i] = (rhs[i] - upper[i] * m2[i + 1]) / diag[i];
        if (i == 1) break;
    }

    const std::size_t m = n - 1;
    c0_.resize(m);
    c1_.resize(m);
    c2_.resize(m);
    c3_.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        c0_[i] = ys[i];
        c1_[i] = (ys[i + 1] - ys[i]) / h[i] - h[i] * (2.0 * m2[i] + m2[i + 1]) / 6.0;
        c2_[i] = m2[i] / 2.0;
        c3_[i] = (m2[i + 1] - m2[i]) / (6.0 * h[i]);
    }
}

void Spline::build_akima(const std::vector<double>& ys) {
    const std::size_t n = xs_.size();
    // Segment slopes with two extrapolated slopes on each side.
    std::vector<double> m(n + 3);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        m[i + 2] = (ys[i + 1] - ys[i]) / (xs_[i + 1] - xs_[i]);
    }
    m[1] = 2.0 * m[2] - m[3];
    m[0] = 2.0 * m[1] - m[2];
    m[n + 1] = 2.0 * m[n] - m[n - 1];
    m[n + 2] = 2.0 * m[n + 1] - m[n];

    std::vector<double> slope(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double w1 = std::abs(m[i + 3] - m[i + 2]);
        const double w2 = std::abs(m[i + 1] - m[i]);
        if (w1 + w2 == 0.0) {
            slope[i] = 0.5 * (m[i + 1] + m[i + 2]);
        } else {
            slope[i] = (w1 * m[i + 1] + w2 * m[i + 2]) / (w1 + w2);
        }
    }
    build_hermite(ys, slope);
}

void Spline::build_hermite(const std::vector<double>& ys, const std::vector<double>& slopes) {
    const std::size_t m = xs_.size() - 1;
    c0_.resize(m);
    c1_.resize(m);
    c2_.resize(m);
    c3_.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double h = xs_[i + 1] - xs_[i];
        const double d = (ys[i + 1] - ys[i]) / h;
        c0_[i] = ys[i];
        c1_[i] = slopes[i];
        c2_[i] = (3.0 * d - 2.0 * slopes[i] - slopes[i + 1]) / h;
        c3_[i] = (slopes[i] + slopes[i + 1] - 2.0 * d) / (h * h);
    }
}

}  // namespace flowcast
