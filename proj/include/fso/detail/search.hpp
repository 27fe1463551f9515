#pragma once

#include <cmath>
#include <cstddef>
#include <utility>

namespace fso::detail {

/// Maximize a scalar function on [lo, hi]: coarse scan to bracket the best
/// region (the capacity objectives can have a second local maximum at the
/// left boundary), then golden-section refinement inside the winning cell.
template <typename F>
double maximize_scalar(F&& f, double lo, double hi, double tol, int coarse = 48) {
    if (hi <= lo) return lo;
    double best_x = lo;
    double best_v = f(lo);
    double step = (hi - lo) / coarse;
    for (int i = 1; i <= coarse; ++i) {
        double x = (i == coarse) ? hi : lo + step * i;
        double v = f(x);
        if (v > best_v) {
            best_v = v;
            best_x = x;
        }
    }
    double a = std::max(lo, best_x - step);
    double b = std::min(hi, best_x + step);

    constexpr double invphi = 0.6180339887498949;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
        }
    }
    double mid = 0.5 * (a + b);
    double fm = f(mid);
    // Keep whichever of {coarse best, refined mid} won; guards boundary maxima.
    return fm >= best_v ? mid : best_x;
}

/// Maximize f(x, y) on [0,xmax]x[0,ymax]: full grid pass, then one pass on an
/// 8x finer grid around the best cell. Returns (x, y).
template <typename F>
std::pair<double, double> maximize_grid2(F&& f, double xmax, double ymax, int n = 64) {
    double bx = 0.0, by = 0.0;
    double bv = f(0.0, 0.0);
    double dx = xmax / (n - 1), dy = ymax / (n - 1);
    for (int i = 0; i < n; ++i) {
        double x = i * dx;
        for (int j = 0; j < n; ++j) {
            double v = f(x, j * dy);
            if (v > bv) {
                bv = v;
                bx = x;
                by = j * dy;
            }
        }
    }
    double x0 = std::max(0.0, bx - dx), x1 = std::min(xmax, bx + dx);
    double y0 = std::max(0.0, by - dy), y1 = std::min(ymax, by + dy);
    constexpr int m = 17; // 8x refinement of the +-1 cell neighbourhood
    for (int i = 0; i < m; ++i) {
        double x = x0 + (x1 - x0) * i / (m - 1);
        for (int j = 0; j < m; ++j) {
            double y = y0 + (y1 - y0) * j / (m - 1);
            double v = f(x, y);
            if (v > bv) {
                bv = v;
                bx = x;
                by = y;
            }
        }
    }
    return {bx, by};
}

/// Find x in [lo, hi] with g(x) ~ 0 for a nonincreasing g (sign-based
/// bisection; tolerates discontinuities by converging on the crossing point).
template <typename F>
double bisect_decreasing(F&& g, double lo, double hi, int iters = 60) {
    for (int i = 0; i < iters; ++i) {
        double mid = 0.5 * (lo + hi);
        if (g(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace fso::detail
