#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "latticemc/errors.hpp"

// Small statistics / linear algebra helpers shared by the estimators.

namespace latticemc {

inline double mean(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

/// Unbiased sample variance.
inline double variance(std::span<const double> v) {
    if (v.size() < 2) return 0.0;
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

inline double pearson_correlation(std::span<const double> x, std::span<const double> y) {
    const double mx = mean(x), my = mean(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

/// Solve A x = b in place by Gaussian elimination with partial pivoting.
/// A is n x n row-major. Returns false if the system is singular.
inline bool solve_linear(std::vector<double>& a, std::vector<double>& b, std::size_t n) {
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::fabs(a[r * n + col]) > std::fabs(a[piv * n + col])) piv = r;
        if (std::fabs(a[piv * n + col]) < 1e-300) return false;
        if (piv != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a[col * n + c], a[piv * n + c]);
            std::swap(b[col], b[piv]);
        }
        const double d = a[col * n + col];
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r * n + col] / d;
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
            b[r] -= f * b[col];
        }
    }
    for (std::size_t ri = n; ri-- > 0;) {
        double s = b[ri];
        for (std::size_t c = ri + 1; c < n; ++c) s -= a[ri * n + c] * b[c];
        b[ri] = s / a[ri * n + ri];
    }
    return true;
}

/// Invert a small symmetric positive matrix (for parameter covariances).
/// Returns an empty vector if singular.
inline std::vector<double> invert_matrix(std::vector<double> a, std::size_t n) {
    std::vector<double> inv(n * n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> acopy = a;
        std::vector<double> e(n, 0.0);
        e[j] = 1.0;
        if (!solve_linear(acopy, e, n)) return {};
        for (std::size_t i = 0; i < n; ++i) inv[i * n + j] = e[i];
    }
    return inv;
}

struct PolyFit {
    std::vector<double> coeff;  ///< c[0] + c[1] u + c[2] u^2 + ...
    std::vector<double> cov;    ///< parameter covariance, (deg+1)^2 row-major
};

/// Weighted polynomial least squares. Weights w_i multiply the squared
/// residuals; pass 1 for unweighted points. When `scale_cov_by_residual` the
/// covariance is scaled by chi^2/dof (used when the y errors are unknown).
inline PolyFit polyfit(std::span<const double> x, std::span<const double> y,
                       std::span<const double> w, int degree,
                       bool scale_cov_by_residual = false) {
    const std::size_t n = x.size();
    const std::size_t m = static_cast<std::size_t>(degree) + 1;
    if (n < m) throw Error(Errc::insufficient_data, "polyfit: fewer points than coefficients");
    std::vector<double> ata(m * m, 0.0), atb(m, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double pow_j = 1.0;
        std::vector<double> row(m);
        for (std::size_t j = 0; j < m; ++j) {
            row[j] = pow_j;
            pow_j *= x[i];
        }
        for (std::size_t j = 0; j < m; ++j) {
            atb[j] += w[i] * row[j] * y[i];
            for (std::size_t k = 0; k <= j; ++k) ata[j * m + k] += w[i] * row[j] * row[k];
        }
    }
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t k = j + 1; k < m; ++k) ata[j * m + k] = ata[k * m + j];

    PolyFit out;
    out.cov = invert_matrix(ata, m);
    if (out.cov.empty())
        throw Error(Errc::insufficient_data, "polyfit: singular normal equations");
    out.coeff.assign(m, 0.0);
    std::vector<double> a = ata, b = atb;
    solve_linear(a, b, m);
    out.coeff = b;
    if (scale_cov_by_residual && n > m) {
        double chi2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double fit = 0.0, pw = 1.0;
            for (std::size_t j = 0; j < m; ++j) {
                fit += out.coeff[j] * pw;
                pw *= x[i];
            }
            chi2 += w[i] * (y[i] - fit) * (y[i] - fit);
        }
        const double s2 = chi2 / static_cast<double>(n - m);
        for (double& c : out.cov) c *= s2;
    }
    return out;
}

}  // namespace latticemc
