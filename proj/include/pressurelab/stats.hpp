#pragma once

#include <cmath>
#include <vector>

#include "pressurelab/errors.hpp"

namespace pressurelab {

namespace detail {

/// Regularized lower incomplete gamma P(a, x) by series expansion (x < a+1)
/// or continued fraction (otherwise).
inline double regularized_gamma_p(double a, double x) {
    if (x <= 0.0) return 0.0;
    const double lg = std::lgamma(a);
    if (x < a + 1.0) {
        double ap = a, sum = 1.0 / a, del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-15) break;
        }
        return sum * std::exp(-x + a * std::log(x) - lg);
    }
    double b = x + 1.0 - a, c = 1e308, d = 1.0 / b, h = d;
    for (int i = 1; i < 500; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    return 1.0 - std::exp(-x + a * std::log(x) - lg) * h;
}

}  // namespace detail

/// Survival function of the chi-square distribution (upper tail probability).
inline double chi_square_sf(double x, int dof) {
    if (dof < 1)
        throw RangeError("escape-sim", "chi_square_sf", "need dof >= 1");
    if (x <= 0.0) return 1.0;
    return 1.0 - detail::regularized_gamma_p(0.5 * dof, 0.5 * x);
}

/// Pearson chi-square statistic of observed counts against expected counts;
/// cells with expectation below `min_expected` are pooled into a rest cell.
struct ChiSquareResult {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
};

inline ChiSquareResult chi_square_test(const std::vector<double>& observed,
                                       const std::vector<double>& expected,
                                       double min_expected = 5.0) {
    if (observed.size() != expected.size())
        throw RangeError("escape-sim", "chi_square_test", "size mismatch");
    double stat = 0.0;
    int cells = 0;
    double pooled_obs = 0.0, pooled_exp = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        if (expected[i] >= min_expected) {
            double d = observed[i] - expected[i];
            stat += d * d / expected[i];
            ++cells;
        } else {
            pooled_obs += observed[i];
            pooled_exp += expected[i];
        }
    }
    if (pooled_exp > 0.0) {
        double d = pooled_obs - pooled_exp;
        stat += d * d / pooled_exp;
        ++cells;
    }
    ChiSquareResult r;
    r.statistic = stat;
    r.dof = cells > 1 ? cells - 1 : 1;
    r.p_value = chi_square_sf(stat, r.dof);
    return r;
}

inline double binomial_standard_error(double fraction, int count) {
    if (count <= 0) return 0.0;
    return std::sqrt(std::max(0.0, fraction * (1.0 - fraction)) /
                     static_cast<double>(count));
}

}  // namespace pressurelab
