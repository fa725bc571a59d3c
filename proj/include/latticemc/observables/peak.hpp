#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "latticemc/stats.hpp"

// Bell-curve peak location. The curves of interest are asymmetric on a linear
// rate axis, so the parabola is fitted in log(rate) to the five points around
// the sample maximum; the vertex and its propagated uncertainty are returned.

namespace latticemc {

struct CurvePoint {
    double x = 0.0;      ///< abscissa (must be > 0; fitted in log x)
    double y = 0.0;
    double y_err = 0.0;  ///< 0 means unknown (fit falls back to residual scaling)
};

struct PeakLocation {
    double position = 0.0;
    double position_err = 0.0;
    double height = 0.0;       ///< fitted value at the vertex
    double height_err = 0.0;
    std::size_t argmax = 0;    ///< index of the sample maximum
};

inline PeakLocation locate_peak(std::span<const CurvePoint> curve) {
    const std::size_t n = curve.size();
    if (n < 5) throw Error(Errc::insufficient_data, "locate_peak needs at least 5 points");
    std::size_t imax = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (curve[i].y > curve[imax].y) imax = i;
    if (imax == 0 || imax == n - 1)
        throw Error(Errc::no_interior_maximum,
                    "maximum sits on the grid boundary (index " + std::to_string(imax) + ")");

    // five-point window containing the maximum, clamped to the grid
    std::size_t lo = imax >= 2 ? imax - 2 : 0;
    lo = std::min(lo, n - 5);
    std::vector<double> lx, ly, lw;
    bool have_errors = true;
    for (std::size_t i = lo; i < lo + 5; ++i) {
        if (!(curve[i].x > 0.0))
            throw Error(Errc::type_mismatch, "locate_peak: abscissae must be positive");
        lx.push_back(std::log(curve[i].x));
        ly.push_back(curve[i].y);
        if (curve[i].y_err > 0.0)
            lw.push_back(1.0 / (curve[i].y_err * curve[i].y_err));
        else
            have_errors = false;
    }
    if (!have_errors) lw.assign(5, 1.0);

    const PolyFit pf = polyfit(lx, ly, lw, 2, /*scale_cov_by_residual=*/!have_errors);
    const double c1 = pf.coeff[1], c2 = pf.coeff[2];
    if (!(c2 < 0.0))
        throw Error(Errc::no_interior_maximum, "no concave vertex in the fitted window");

    PeakLocation out;
    out.argmax = imax;
    const double lstar = -c1 / (2.0 * c2);
    out.position = std::exp(lstar);
    out.height = pf.coeff[0] + c1 * lstar + c2 * lstar * lstar;

    // error propagation through the vertex expressions
    const double d1 = -1.0 / (2.0 * c2);           // dL*/dc1
    const double d2 = c1 / (2.0 * c2 * c2);        // dL*/dc2
    const auto cv = [&](std::size_t i, std::size_t j) { return pf.cov[i * 3 + j]; };
    double var_l = d1 * d1 * cv(1, 1) + d2 * d2 * cv(2, 2) + 2.0 * d1 * d2 * cv(1, 2);
    var_l = std::max(var_l, 0.0);
    out.position_err = out.position * std::sqrt(var_l);
    // height = c0 - c1^2/(4 c2)
    const double h0 = 1.0;
    const double h1 = -c1 / (2.0 * c2);
    const double h2 = c1 * c1 / (4.0 * c2 * c2);
    double var_h = h0 * h0 * cv(0, 0) + h1 * h1 * cv(1, 1) + h2 * h2 * cv(2, 2) +
                   2.0 * h0 * h1 * cv(0, 1) + 2.0 * h0 * h2 * cv(0, 2) +
                   2.0 * h1 * h2 * cv(1, 2);
    out.height_err = std::sqrt(std::max(var_h, 0.0));
    return out;
}

}  // namespace latticemc
