#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pressurelab/corridor.hpp"
#include "pressurelab/errors.hpp"
#include "pressurelab/potential.hpp"
#include "pressurelab/pressure.hpp"

namespace pressurelab {

struct FibrePressureResult {
    enum class Regime { interior, boundary_lower, boundary_upper, empty };

    double value = -std::numeric_limits<double>::infinity();
    Regime regime = Regime::empty;
    std::optional<double> minimizer;              // t(f), interior regime only
    std::optional<double> drift_at_minimizer;     // residual of the inner solve
    std::optional<double> variance_at_minimizer;  // d^2/ds^2 P(s psi + f) > 0
    std::optional<SubAlphabet> boundary_alphabet; // I0 on the boundary

    bool is_finite() const { return std::isfinite(value); }
};

namespace detail {

constexpr double kRegimeTol = 1e-12;

/// Minimize the strictly convex H(s) = P(s psi + f) by Newton on the drift
/// H'(s) = mu_{s psi + f}(psi), safeguarded by bisection on a bracket that is
/// expanded from [-1, 1] until the drift changes sign. The expansion is
/// capped so exp(s * psi) stays representable.
struct ConvexMinimum {
    double argmin = 0.0;
    double value = 0.0;
    double drift = 0.0;
    double variance = 0.0;
};

inline ConvexMinimum minimize_pressure_line(const CylinderPotential& f,
                                            const CylinderPotential& psi) {
    auto drift_at = [&](double s) {
        GibbsMeasure mu = gibbs_measure(s * psi + f);
        return gibbs_expectation(mu, psi);
    };
    double psi_mag = std::max(std::abs(psi.min_value()), std::abs(psi.max_value()));
    double s_cap = psi_mag > 0.0 ? 700.0 / psi_mag : 1.0;
    double lo = -1.0, hi = 1.0;
    double d_lo = drift_at(lo), d_hi = drift_at(hi);
    while (d_lo > 0.0 && lo > -s_cap) {
        lo = std::max(-s_cap, 2.0 * lo);
        d_lo = drift_at(lo);
    }
    while (d_hi < 0.0 && hi < s_cap) {
        hi = std::min(s_cap, 2.0 * hi);
        d_hi = drift_at(hi);
    }
    if (d_lo > 0.0 || d_hi < 0.0)
        throw ConvergenceError("fibre-pressure", "minimizer_t",
                               "drift derivative never changes sign inside the "
                               "representable bracket");
    double s = 0.5 * (lo + hi);
    double drift = 0.0, variance = 0.0;
    for (int it = 0; it < 200; ++it) {
        GibbsMeasure mu = gibbs_measure(s * psi + f);
        drift = gibbs_expectation(mu, psi);
        variance = asymptotic_variance(mu, psi);
        if (std::abs(drift) < 1e-13) break;
        if (drift > 0.0) hi = s; else lo = s;
        double cand = variance > 0.0 ? s - drift / variance : s;
        s = (cand > lo && cand < hi) ? cand : 0.5 * (lo + hi);
        if (hi - lo < 1e-15 * (1.0 + std::abs(s))) break;
    }
    ConvexMinimum m;
    m.argmin = s;
    m.drift = drift;
    m.variance = variance;
    m.value = classical_pressure(s * psi + f).value;
    return m;
}

}  // namespace detail

/// The fibre-induced pressure P(f, psi). In the interior regime (0 strictly
/// between the extreme step averages) it equals min_s P(s psi + f), attained
/// at the unique t(f) with zero drift; on the boundary it is the classical
/// pressure restricted to the zero-step sub-alphabet I0; outside it is
/// -infinity.
inline FibrePressureResult fibre_pressure(const CylinderPotential& f,
                                          const CylinderPotential& psi) {
    const char* op = "fibre_pressure";
    if (f.alphabet_size() != psi.alphabet_size())
        throw AlphabetError("fibre-pressure", op, "mismatched alphabets");
    PsiBounds b = psi_bounds(psi);
    FibrePressureResult r;
    if (b.lower > detail::kRegimeTol || b.upper < -detail::kRegimeTol) {
        r.regime = FibrePressureResult::Regime::empty;
        return r;
    }
    if (b.strictly_contains(0.0, detail::kRegimeTol)) {
        auto m = detail::minimize_pressure_line(f, psi);
        r.regime = FibrePressureResult::Regime::interior;
        r.value = m.value;
        r.minimizer = m.argmin;
        r.drift_at_minimizer = m.drift;
        r.variance_at_minimizer = m.variance;
        return r;
    }
    // 0 sits on the boundary of [psi_lower, psi_upper]
    if (psi.depth() != 1)
        throw BoundaryDepthError("fibre-pressure", op,
                                 "boundary regime requires a step potential "
                                 "constant on one-cylinders");
    std::vector<int> zero_syms;
    for (int i = 1; i <= psi.alphabet_size(); ++i)
        if (std::abs(psi.value_at(static_cast<std::size_t>(i - 1))) <=
            detail::kRegimeTol)
            zero_syms.push_back(i);
    SubAlphabet I0(zero_syms);
    r.regime = std::abs(b.lower) <= detail::kRegimeTol
                   ? FibrePressureResult::Regime::boundary_lower
                   : FibrePressureResult::Regime::boundary_upper;
    r.value = classical_pressure(f, I0).value;
    r.boundary_alphabet = I0;
    return r;
}

/// t(f): the unique minimizer of s -> P(s psi + f) in the interior regime,
/// together with the curvature there. RegimeError elsewhere.
struct MinimizerResult {
    double t = 0.0;
    double drift = 0.0;
    double variance = 0.0;
};

inline MinimizerResult minimizer_t(const CylinderPotential& f,
                                   const CylinderPotential& psi) {
    PsiBounds b = psi_bounds(psi);
    if (!b.strictly_contains(0.0, detail::kRegimeTol))
        throw RegimeError("fibre-pressure", "minimizer_t",
                          "zero is not inside the open interval of step averages");
    auto m = detail::minimize_pressure_line(f, psi);
    return {m.argmin, m.drift, m.variance};
}

/// Finite-horizon estimates ((1/n) log zeta_n) of the fibre-induced pressure,
/// for cross-validation against the variational value.
inline std::vector<std::pair<int, double>> fibre_pressure_estimate(
    const CylinderPotential& f, const CylinderPotential& psi, double K,
    int n_max) {
    const char* op = "fibre_pressure_estimate";
    if (n_max < 1) throw RangeError("fibre-pressure", op, "need n_max >= 1");
    if (!(K > 0.0)) throw RangeError("fibre-pressure", op, "need K > 0");
    auto steps = detail::integer_steps(psi, "fibre-pressure", op);
    detail::LatticeWalkDp dp(f, steps);
    std::vector<std::pair<int, double>> out;
    out.reserve(static_cast<std::size_t>(n_max));
    int first = std::max(1, f.depth());
    while (dp.horizon() < n_max) {
        dp.step();
        int n = dp.horizon();
        if (n >= first)
            out.push_back({n, dp.log_corridor_sum(0.0, K) / static_cast<double>(n)});
    }
    return out;
}

/// Partial sums of the recurrence series sum_w exp(S_w f - |w| P) over the
/// corridor C(K), plus a heuristic growth classification from the fitted
/// term-decay exponent.
struct SeriesDiagnostic {
    enum class Growth { log_like, linear_like, bounded_suspect };
    int first_horizon = 1;
    std::vector<double> partial_sums;  // index n - first_horizon
    Growth growth = Growth::bounded_suspect;
    double term_exponent = 0.0;  // q fitted from t_n ~ n^{-q}
    double total() const { return partial_sums.empty() ? 0.0 : partial_sums.back(); }
};

inline SeriesDiagnostic recurrence_series(const CylinderPotential& f,
                                          const CylinderPotential& psi,
                                          double K, int N) {
    const char* op = "recurrence_series";
    if (N < 1) throw RangeError("fibre-pressure", op, "need N >= 1");
    FibrePressureResult P = fibre_pressure(f, psi);
    SeriesDiagnostic d;
    d.first_horizon = std::max(1, f.depth());
    if (!P.is_finite()) {
        // empty corridor: every term vanishes
        d.partial_sums.assign(static_cast<std::size_t>(N - d.first_horizon + 1), 0.0);
        return d;
    }
    auto steps = detail::integer_steps(psi, "fibre-pressure", op);
    detail::LatticeWalkDp dp(f, steps);
    std::vector<double> terms;
    double running = 0.0;
    while (dp.horizon() < N) {
        dp.step();
        int n = dp.horizon();
        if (n < d.first_horizon) continue;
        double lz = dp.log_corridor_sum(0.0, K);
        double term = std::isfinite(lz)
                          ? std::exp(lz - static_cast<double>(n) * P.value)
                          : 0.0;
        terms.push_back(term);
        running += term;
        d.partial_sums.push_back(running);
    }
    // fit t_n ~ c n^{-q} on the tail by least squares in log-log coordinates
    std::size_t lo = terms.size() / 4;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t cnt = 0;
    for (std::size_t i = lo; i < terms.size(); ++i) {
        if (terms[i] <= 0.0) continue;
        double x = std::log(static_cast<double>(i + d.first_horizon));
        double y = std::log(terms[i]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++cnt;
    }
    if (cnt >= 2) {
        double slope = (static_cast<double>(cnt) * sxy - sx * sy) /
                       (static_cast<double>(cnt) * sxx - sx * sx);
        d.term_exponent = -slope;
    } else {
        d.term_exponent = std::numeric_limits<double>::infinity();
    }
    if (d.term_exponent > 1.15)
        d.growth = SeriesDiagnostic::Growth::bounded_suspect;
    else if (d.term_exponent >= 0.85)
        d.growth = SeriesDiagnostic::Growth::log_like;
    else
        d.growth = SeriesDiagnostic::Growth::linear_like;
    return d;
}

/// Finite-n proxy for the symmetric-on-average criterion: the largest ratio
/// between the +m and -m level sums of exp(S_w f - |w| P) accumulated over
/// all word lengths up to n. Stays near 1 exactly when the drift vanishes.
inline double symmetry_on_average_ratio(const CylinderPotential& f,
                                        const CylinderPotential& psi, int n,
                                        int m_cap = 8) {
    const char* op = "symmetry_on_average_ratio";
    if (n < 1) throw RangeError("fibre-pressure", op, "need n >= 1");
    FibrePressureResult P = fibre_pressure(f, psi);
    if (!P.is_finite())
        throw RegimeError("fibre-pressure", op,
                          "fibre-induced pressure is not finite");
    auto steps = detail::integer_steps(psi, "fibre-pressure", op);
    detail::LatticeWalkDp dp(f, steps);
    std::vector<double> acc(static_cast<std::size_t>(2 * m_cap + 1), 0.0);
    while (dp.horizon() < n) {
        dp.step();
        int j = dp.horizon();
        if (j < f.depth()) continue;
        double scale = std::exp(dp.log_scale() - static_cast<double>(j) * P.value);
        for (int m = -m_cap; m <= m_cap; ++m) {
            double v = dp.level_mass(m);
            if (v > 0.0) acc[static_cast<std::size_t>(m + m_cap)] += v * scale;
        }
    }
    double ratio = 1.0;
    for (int m = 1; m <= m_cap; ++m) {
        double plus = acc[static_cast<std::size_t>(m + m_cap)];
        double minus = acc[static_cast<std::size_t>(-m + m_cap)];
        if (plus == 0.0 && minus == 0.0) continue;
        if (plus == 0.0 || minus == 0.0)
            return std::numeric_limits<double>::infinity();
        ratio = std::max(ratio, std::max(plus / minus, minus / plus));
    }
    return ratio;
}

}  // namespace pressurelab
