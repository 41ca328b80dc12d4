#ifndef FLOWCAST_SPLINE_HPP
#define FLOWCAST_SPLINE_HPP

#include <cstddef>
#include <vector>

#include "flowcast/time_series.hpp"

namespace flowcast {

// Interpolator through strictly increasing knots. `fit` applies the
// fallback ladder akima (>=5 knots) -> cubic (>=4) -> linear (>=2) starting
// from the requested kind; fewer than 2 knots is an error at the caller.
class Spline {
public:
    static Spline fit(SplineKind requested,
                      std::vector<double> xs,
                      std::vector<double> ys);

    double eval(double x) const;

    // Evaluate at x = 0, 1, ..., n-1. Knot span must cover the grid.
    std::vector<double> eval_grid(std::size_t n) const;

    SplineKind kind() const { return kind_; }

private:
    SplineKind kind_ = SplineKind::LinearFallback;
    std::vector<double> xs_;
    // Per-segment cubic coefficients: y = c0 + c1*dx + c2*dx^2 + c3*dx^3
    // with dx relative to the left knot. Linear segments have c2 = c3 = 0.
    std::vector<double> c0_, c1_, c2_, c3_;

    std::size_t segment(double x) const;
    void build_linear(const std::vector<double>& ys);
    void build_cubic(const std::vector<double>& ys);
    void build_akima(const std::vector<double>& ys);
    void build_hermite(const std::vector<double>& ys, const std::vector<double>& slopes);
};

}  // namespace flowcast

#endif  // FLOWCAST_SPLINE_HPP
