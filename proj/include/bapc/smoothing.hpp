#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "bapc/errors.hpp"

namespace bapc {

/// Local linear regression with tricube weights. `span` is the fraction of
/// points in each window. Windows of fewer than three points carry no
/// information beyond the raw curve, so such spans (including 0) return the
/// input unchanged.
inline std::vector<double> loess_smooth(const std::vector<double>& x,
                                        const std::vector<double>& y,
                                        double span) {
    const std::size_t n = x.size();
    if (y.size() != n) throw DimensionError("loess: x and y sizes differ");
    if (n == 0) throw ValidationError("loess: empty input");
    if (!(span >= 0.0 && span <= 1.0))
        throw ValidationError("loess: span must lie in [0,1]");
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(x[i]) || !std::isfinite(y[i]))
            throw NonFiniteError("loess: non-finite input");
        if (i > 0 && x[i] < x[i - 1])
            throw ValidationError("loess: x must be sorted ascending");
    }

    const std::size_t k =
        std::min<std::size_t>(n, static_cast<std::size_t>(std::ceil(span * static_cast<double>(n))));
    if (k < 3) return y;

    std::vector<double> smoothed(n);
    for (std::size_t i = 0; i < n; ++i) {
        // Grow the window around i one point at a time, always taking the
        // nearer of the two candidates just outside it.
        std::size_t lo = i, hi = i + 1;
        while (hi - lo < k) {
            const bool can_left = lo > 0;
            const bool can_right = hi < n;
            if (can_left &&
                (!can_right || x[i] - x[lo - 1] <= x[hi] - x[i]))
                --lo;
            else
                ++hi;
        }
        const double dmax = std::max(x[i] - x[lo], x[hi - 1] - x[i]);

        // Weighted least squares of y on (x - x_i) over the window. The
        // center point always has tricube weight 1, so the system never
        // degenerates to all-zero weights.
        double s0 = 0, s1 = 0, s2 = 0, t0 = 0, t1 = 0;
        for (std::size_t j = lo; j < hi; ++j) {
            const double dx = x[j] - x[i];
            const double u = dmax > 0.0 ? std::abs(dx) / dmax : 0.0;
            if (u >= 1.0) continue;
            const double tri = (1.0 - u * u * u);
            const double w = tri * tri * tri;
            s0 += w;
            s1 += w * dx;
            s2 += w * dx * dx;
            t0 += w * y[j];
            t1 += w * dx * y[j];
        }
        const double det = s0 * s2 - s1 * s1;
        // Collapsed windows (repeated x) fall back to the weighted mean.
        smoothed[i] = det > 1e-12 * std::max(1.0, s0 * s2)
                          ? (s2 * t0 - s1 * t1) / det
                          : t0 / s0;
    }
    return smoothed;
}

} // namespace bapc
