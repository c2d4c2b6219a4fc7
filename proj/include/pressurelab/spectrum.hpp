#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "pressurelab/branch_model.hpp"
#include "pressurelab/errors.hpp"
#include "pressurelab/fibre_pressure.hpp"
#include "pressurelab/parallel.hpp"
#include "pressurelab/potential.hpp"
#include "pressurelab/pressure.hpp"

namespace pressurelab {

namespace detail {

constexpr double kRootTol = 1e-13;

/// Root of the strictly decreasing s -> P(s phi, psi_alpha) (fibre-induced),
/// by bisection plus Newton with the envelope derivative mu(phi) < 0.
/// `fibre_at` must evaluate the pressure and expose the Gibbs mean of phi at
/// the current minimizer.
template <typename PressureFn, typename SlopeFn>
double decreasing_root(PressureFn&& pressure_at, SlopeFn&& slope_at) {
    double lo = 0.0;
    double p_lo = pressure_at(lo);
    if (p_lo <= 0.0) return 0.0;  // boundary case: root pinned at zero
    double hi = 1.0;
    while (pressure_at(hi) > 0.0) {
        hi *= 2.0;
        if (hi > 1e6)
            throw ConvergenceError("spectrum", "delta_alpha_root",
                                   "pressure never becomes negative");
    }
    double s = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        double p = pressure_at(s);
        if (std::abs(p) < kRootTol) return s;
        if (p > 0.0) lo = s; else hi = s;
        double d = slope_at(s);
        double cand = d < 0.0 ? s - p / d : s;
        s = (cand > lo && cand < hi) ? cand : 0.5 * (lo + hi);
        if (hi - lo < 1e-16 * (1.0 + std::abs(s))) break;
    }
    return s;
}

}  // namespace detail

/// delta_alpha through characterization (i): the unique zero of
/// s -> P(s phi, psi - alpha). Returns 0 outside [psi_lower, psi_upper].
/// Potential-level overload; phi must be negative on every cylinder.
inline double delta_alpha_root(const CylinderPotential& phi,
                               const CylinderPotential& psi, double alpha) {
    if (phi.max_value() >= 0.0)
        throw RangeError("spectrum", "delta_alpha_root",
                         "geometric potential must be negative");
    PsiBounds b = psi_bounds(psi);
    if (!b.contains(alpha, detail::kRegimeTol)) return 0.0;
    CylinderPotential psi_alpha = psi - alpha;
    auto pressure_at = [&](double s) {
        return fibre_pressure(s * phi, psi_alpha).value;
    };
    auto slope_at = [&](double s) {
        FibrePressureResult r = fibre_pressure(s * phi, psi_alpha);
        if (r.regime == FibrePressureResult::Regime::interior) {
            GibbsMeasure mu = gibbs_measure(*r.minimizer * psi_alpha + s * phi);
            return gibbs_expectation(mu, phi);
        }
        GibbsMeasure mu = gibbs_measure(s * phi, *r.boundary_alphabet);
        return gibbs_expectation(mu, phi);
    };
    return detail::decreasing_root(pressure_at, slope_at);
}

inline double delta_alpha_root(const BranchModel& model, double alpha) {
    return delta_alpha_root(model.geometric_potential(), model.step_potential(),
                            alpha);
}

struct NewtonSolution {
    double delta = 0.0;
    double q = 0.0;
    double residual = 0.0;  // infinity norm of (pressure, drift)
};

/// delta_alpha through characterization (ii): the joint zero of
/// P(s phi + q psi_alpha) and its q-derivative, by damped 2-D Newton with the
/// analytic Jacobian from Gibbs expectations and covariance rates, falling
/// back to nested 1-D solves near a singular Jacobian.
inline NewtonSolution delta_alpha_newton(const CylinderPotential& phi,
                                         const CylinderPotential& psi,
                                         double alpha) {
    const char* op = "delta_alpha_newton";
    if (phi.max_value() >= 0.0)
        throw RangeError("spectrum", op, "geometric potential must be negative");
    PsiBounds b = psi_bounds(psi);
    if (!b.strictly_contains(alpha, detail::kRegimeTol))
        throw RegimeError("spectrum", op,
                          "alpha must lie strictly between the extreme step averages");
    CylinderPotential psi_alpha = psi - alpha;

    auto residual_at = [&](double s, double q, double& pres, double& drift) {
        CylinderPotential pot = s * phi + q * psi_alpha;
        pres = classical_pressure(pot).value;
        GibbsMeasure mu = gibbs_measure(pot);
        drift = gibbs_expectation(mu, psi_alpha);
    };

    // start from the Bowen root of phi with q = 0
    double s = detail::decreasing_root(
        [&](double t) { return classical_pressure(t * phi).value; },
        [&](double t) {
            GibbsMeasure mu = gibbs_measure(t * phi);
            return gibbs_expectation(mu, phi);
        });
    double q = 0.0;
    double pres, drift;
    residual_at(s, q, pres, drift);
    double res = std::max(std::abs(pres), std::abs(drift));
    bool newton_ok = true;
    for (int it = 0; it < 100 && res >= 1e-12; ++it) {
        CylinderPotential pot = s * phi + q * psi_alpha;
        GibbsMeasure mu = gibbs_measure(pot);
        double j11 = gibbs_expectation(mu, phi);        // dP/ds
        double j12 = gibbs_expectation(mu, psi_alpha);  // dP/dq
        double j21 = asymptotic_covariance(mu, psi_alpha, phi);
        double j22 = asymptotic_variance(mu, psi_alpha);
        double det = j11 * j22 - j12 * j21;
        double scale = std::max({std::abs(j11), std::abs(j12), std::abs(j21),
                                 std::abs(j22), 1e-300});
        if (std::abs(det) < 1e-13 * scale * scale) {
            newton_ok = false;
            break;
        }
        double ds = (pres * j22 - drift * j12) / det;
        double dq = (drift * j11 - pres * j21) / det;
        // trust-region damping: halve until the residual decreases
        double step = 1.0;
        bool improved = false;
        for (int h = 0; h < 40; ++h) {
            double s2 = s - step * ds, q2 = q - step * dq;
            double p2, d2;
            residual_at(s2, q2, p2, d2);
            double r2 = std::max(std::abs(p2), std::abs(d2));
            if (r2 < res) {
                s = s2; q = q2; pres = p2; drift = d2; res = r2;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if (!improved) {
            newton_ok = res < 1e-10;
            break;
        }
    }
    if (res < 1e-12) return {s, q, res};
    if (!newton_ok || res >= 1e-12) {
        // nested fallback: inner minimization over q, outer root in s
        try {
            auto pressure_at = [&](double t) {
                return fibre_pressure(t * phi, psi_alpha).value;
            };
            auto slope_at = [&](double t) {
                FibrePressureResult r = fibre_pressure(t * phi, psi_alpha);
                GibbsMeasure mu = gibbs_measure(*r.minimizer * psi_alpha + t * phi);
                return gibbs_expectation(mu, phi);
            };
            double s_n = detail::decreasing_root(pressure_at, slope_at);
            FibrePressureResult r = fibre_pressure(s_n * phi, psi_alpha);
            double p2, d2;
            residual_at(s_n, *r.minimizer, p2, d2);
            return {s_n, *r.minimizer, std::max(std::abs(p2), std::abs(d2))};
        } catch (const Error&) {
            throw SingularJacobianError("spectrum", op,
                                        "both the joint Newton and the nested "
                                        "solve failed");
        }
    }
    return {s, q, res};
}

inline NewtonSolution delta_alpha_newton(const BranchModel& model, double alpha) {
    return delta_alpha_newton(model.geometric_potential(),
                              model.step_potential(), alpha);
}

/// delta_alpha through characterization (iii): the infimum over r of the
/// implicit zero-pressure surface s(q, a) along the ray (r, -alpha r). Each
/// surface evaluation is a one-dimensional Bowen-type root; the ray infimum
/// is bracketed by golden-section and polished by Newton on the stationarity
/// condition mu(psi) = alpha.
inline double delta_alpha_legendre(const CylinderPotential& phi,
                                   const CylinderPotential& psi, double alpha) {
    const char* op = "delta_alpha_legendre";
    if (phi.max_value() >= 0.0)
        throw RangeError("spectrum", op, "geometric potential must be negative");
    PsiBounds b = psi_bounds(psi);
    if (!b.strictly_contains(alpha, detail::kRegimeTol))
        throw RegimeError("spectrum", op,
                          "alpha must lie strictly between the extreme step averages");

    // s(r): P(s phi + r psi) = alpha * r, monotone decreasing in s
    auto surface = [&](double r) {
        CylinderPotential tilt = r * psi;
        auto pressure_at = [&](double s) {
            return classical_pressure(s * phi + tilt).value -
                   alpha * r;
        };
        auto slope_at = [&](double s) {
            GibbsMeasure mu = gibbs_measure(s * phi + tilt);
            return gibbs_expectation(mu, phi);
        };
        // the surface can require s < 0 for strongly negative a; extend the
        // decreasing-root bracket to the left when needed
        double lo = -1.0, hi = 1.0;
        while (pressure_at(lo) < 0.0) lo *= 2.0;
        while (pressure_at(hi) > 0.0) hi *= 2.0;
        double s = 0.5 * (lo + hi);
        for (int it = 0; it < 200; ++it) {
            double p = pressure_at(s);
            if (std::abs(p) < detail::kRootTol) break;
            if (p > 0.0) lo = s; else hi = s;
            double d = slope_at(s);
            double cand = d < 0.0 ? s - p / d : s;
            s = (cand > lo && cand < hi) ? cand : 0.5 * (lo + hi);
            if (hi - lo < 1e-16 * (1.0 + std::abs(s))) break;
        }
        return s;
    };
    auto stationarity = [&](double r, double s) {
        GibbsMeasure mu = gibbs_measure(s * phi + r * psi);
        return gibbs_expectation(mu, psi) - alpha;
    };

    double psi_mag = std::max(std::abs(psi.min_value()), std::abs(psi.max_value()));
    double r_cap = psi_mag > 0.0 ? 700.0 / psi_mag : 1.0;
    // bracket the stationary point: the drift along the surface increases
    // from psi_lower - alpha (< 0) to psi_upper - alpha (> 0)
    double lo = -1.0, hi = 1.0;
    while (stationarity(lo, surface(lo)) > 0.0 && lo > -r_cap) lo = std::max(-r_cap, 2.0 * lo);
    while (stationarity(hi, surface(hi)) < 0.0 && hi < r_cap) hi = std::min(r_cap, 2.0 * hi);
    // golden-section shrink of the bracket, then Newton on the stationarity
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a1 = hi - gr * (hi - lo), a2 = lo + gr * (hi - lo);
    double f1 = surface(a1), f2 = surface(a2);
    for (int it = 0; it < 40 && hi - lo > 1e-4; ++it) {
        if (f1 < f2) {
            hi = a2; a2 = a1; f2 = f1;
            a1 = hi - gr * (hi - lo); f1 = surface(a1);
        } else {
            lo = a1; a1 = a2; f1 = f2;
            a2 = lo + gr * (hi - lo); f2 = surface(a2);
        }
    }
    double r = 0.5 * (lo + hi);
    double s = surface(r);
    for (int it = 0; it < 100; ++it) {
        CylinderPotential pot = s * phi + r * psi;
        GibbsMeasure mu = gibbs_measure(pot);
        double w = gibbs_expectation(mu, psi) - alpha;
        if (std::abs(w) < 1e-13) break;
        double mu_phi = gibbs_expectation(mu, phi);
        double s_prime = -w / mu_phi;  // ds/dr along the surface
        double dw = asymptotic_covariance(mu, psi, phi) * s_prime +
                    asymptotic_variance(mu, psi);
        if (!(dw > 0.0)) break;
        r -= w / dw;
        s = surface(r);
    }
    return s;
}

inline double delta_alpha_legendre(const BranchModel& model, double alpha) {
    return delta_alpha_legendre(model.geometric_potential(),
                                model.step_potential(), alpha);
}

/// Analytic spectrum slope d delta_alpha / d alpha = q_alpha / mu(phi) at the
/// solution measure of characterization (ii).
inline double spectrum_slope(const BranchModel& model, double alpha) {
    CylinderPotential phi = model.geometric_potential();
    CylinderPotential psi = model.step_potential();
    NewtonSolution sol = delta_alpha_newton(phi, psi, alpha);
    GibbsMeasure mu = gibbs_measure(sol.delta * phi + sol.q * (psi - alpha));
    return sol.q / gibbs_expectation(mu, phi);
}

/// Young's-formula dimension of the solution Gibbs measure: entropy over
/// Lyapunov exponent; coincides with delta_alpha in the interior.
inline double gibbs_dimension(const BranchModel& model, double alpha) {
    CylinderPotential phi = model.geometric_potential();
    CylinderPotential psi = model.step_potential();
    NewtonSolution sol = delta_alpha_newton(phi, psi, alpha);
    GibbsMeasure mu = gibbs_measure(sol.delta * phi + sol.q * (psi - alpha));
    double lyapunov = -gibbs_expectation(mu, phi);
    return mu.entropy() / lyapunov;
}

/// One evaluated spectrum point; NaN marks methods that do not apply at the
/// point (outside support, boundary).
struct SpectrumPoint {
    double alpha = 0.0;
    double delta_root = std::numeric_limits<double>::quiet_NaN();
    double delta_newton = std::numeric_limits<double>::quiet_NaN();
    double delta_legendre = std::numeric_limits<double>::quiet_NaN();
    std::optional<double> q;
    std::optional<double> slope;
    double discrepancy = 0.0;  // max pairwise gap between available methods
    std::optional<std::string> error;

    double delta() const { return delta_root; }
};

struct GapReport {
    double delta = 0.0;
    double delta0 = 0.0;
    double gap = 0.0;
    double drift = 0.0;  // mu_{delta phi}(psi)
    double dim_recurrent = 0.0;
    double dim_transient_plus = 0.0;
    double dim_transient_minus = 0.0;
};

/// Bowen dimension, recurrent-set dimension, drift and the transient-set
/// assignments that follow from the sign of the drift.
inline GapReport drift_and_gap(const BranchModel& model) {
    GapReport g;
    g.delta = bowen_delta(model);
    CylinderPotential phi = model.geometric_potential();
    CylinderPotential psi = model.step_potential();
    GibbsMeasure mu = gibbs_measure(g.delta * phi);
    g.drift = gibbs_expectation(mu, psi);
    g.delta0 = delta_alpha_root(phi, psi, 0.0);
    g.gap = g.delta - g.delta0;
    g.dim_recurrent = g.delta0;
    if (g.drift >= 0.0) {
        g.dim_transient_plus = g.delta;
        g.dim_transient_minus = g.delta0;
    } else {
        g.dim_transient_plus = g.delta0;
        g.dim_transient_minus = g.delta;
    }
    return g;
}

struct SpectrumCurve {
    std::vector<SpectrumPoint> points;  // ordered by alpha
    PsiBounds bounds;
    double delta = 0.0;
    double delta0 = 0.0;
    double alpha_max = 0.0;
    double gap = 0.0;
};

/// Default grid: interior points inset by 1e-3 of the span (the slope blows
/// up at the endpoints), endpoints appended for the boundary formula.
inline std::vector<double> default_alpha_grid(const PsiBounds& b,
                                              int interior_points = 201) {
    std::vector<double> grid;
    double span = b.upper - b.lower;
    if (span <= 0.0) return {b.lower};
    double eps = 1e-3 * span;
    grid.push_back(b.lower);
    for (int i = 0; i < interior_points; ++i) {
        double t = interior_points == 1
                       ? 0.5
                       : static_cast<double>(i) / (interior_points - 1);
        grid.push_back(b.lower + eps + t * (span - 2.0 * eps));
    }
    grid.push_back(b.upper);
    return grid;
}

/// Evaluate every characterization on the grid. Per-point failures are
/// recorded and the sweep continues; grid points run concurrently.
inline SpectrumCurve spectrum_sweep(const BranchModel& model,
                                    const std::vector<double>& alphas) {
    CylinderPotential phi = model.geometric_potential();
    CylinderPotential psi = model.step_potential();
    SpectrumCurve curve;
    curve.bounds = psi_bounds(psi);
    GapReport g = drift_and_gap(model);
    curve.delta = g.delta;
    curve.delta0 = g.delta0;
    curve.alpha_max = g.drift;
    curve.gap = g.gap;

    std::vector<double> sorted(alphas);
    std::sort(sorted.begin(), sorted.end());
    curve.points.resize(sorted.size());
    parallel_for(sorted.size(), [&](std::size_t i) {
        double a = sorted[i];
        SpectrumPoint& pt = curve.points[i];
        pt.alpha = a;
        try {
            pt.delta_root = delta_alpha_root(phi, psi, a);
            if (curve.bounds.strictly_contains(a, detail::kRegimeTol)) {
                NewtonSolution sol = delta_alpha_newton(phi, psi, a);
                pt.delta_newton = sol.delta;
                pt.q = sol.q;
                pt.delta_legendre = delta_alpha_legendre(phi, psi, a);
                GibbsMeasure mu = gibbs_measure(sol.delta * phi + sol.q * (psi - a));
                pt.slope = sol.q / gibbs_expectation(mu, phi);
                double d1 = std::abs(pt.delta_root - pt.delta_newton);
                double d2 = std::abs(pt.delta_root - pt.delta_legendre);
                double d3 = std::abs(pt.delta_newton - pt.delta_legendre);
                pt.discrepancy = std::max({d1, d2, d3});
            }
        } catch (const Error& e) {
            pt.error = std::string(e.kind()) + ": " + e.what();
        }
    });
    return curve;
}

inline SpectrumCurve spectrum_sweep(const BranchModel& model,
                                    int interior_points = 201) {
    PsiBounds b = psi_bounds(model.step_potential());
    return spectrum_sweep(model, default_alpha_grid(b, interior_points));
}

// ---------------------------------------------------------------------------
// Closed-form spectra for the worked example families; test oracles only.
// The printed formulas fix which branch carries the +1 step, which need not
// match a model's step table, so each family takes an explicit orientation.
// ---------------------------------------------------------------------------

/// Which sign the first branch (block) carries in the model being compared.
enum class StepOrientation { first_branch_negative, first_branch_positive };

namespace detail {
inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }
}

/// Family A: two branches (c1, c2), unit steps of opposite sign.
/// As printed the weight (1+alpha)/2 multiplies log(1/c1), i.e. branch 1
/// carries +1; `first_branch_negative` swaps the pairing.
inline double oracle_family_a(double c1, double c2, double alpha,
                              StepOrientation o) {
    const char* op = "closed_form_oracle";
    if (!(c1 > 0.0 && c1 < 1.0 && c2 > 0.0 && c2 < 1.0))
        throw RangeError("spectrum", op, "contractions must lie in (0,1)");
    if (alpha < -1.0 || alpha > 1.0)
        throw RangeError("spectrum", op, "family A needs alpha in [-1,1]");
    if (o == StepOrientation::first_branch_negative) std::swap(c1, c2);
    double p = 0.5 * (1.0 + alpha), q = 0.5 * (1.0 - alpha);
    double num = -(detail::xlogx(p) + detail::xlogx(q));
    double den = p * std::log(1.0 / c1) + q * std::log(1.0 / c2);
    return num / den;
}

/// Family B: equal contraction c, steps m1 < m2 on branches 1, 2. The equal
/// contractions make the value orientation-free.
inline double oracle_family_b(double c, int m1, int m2, double alpha) {
    const char* op = "closed_form_oracle";
    if (!(c > 0.0 && c < 1.0))
        throw RangeError("spectrum", op, "contraction must lie in (0,1)");
    if (m1 >= m2) throw RangeError("spectrum", op, "family B needs m1 < m2");
    if (alpha < m1 || alpha > m2)
        throw RangeError("spectrum", op, "alpha outside [m1, m2]");
    double u = (alpha - static_cast<double>(m1)) / static_cast<double>(m2 - m1);
    double v = (static_cast<double>(m2) - alpha) / static_cast<double>(m2 - m1);
    return -(detail::xlogx(u) + detail::xlogx(v)) / std::log(1.0 / c);
}

/// Family C: g1 + g2 branches of common contraction c with 1/c >= g1 + g2;
/// as printed the g1 block carries -1. `first_branch_positive` flips the
/// sign convention (swap blocks and negate alpha).
inline double oracle_family_c(double c, int g1, int g2, double alpha,
                              StepOrientation o) {
    const char* op = "closed_form_oracle";
    if (!(c > 0.0 && c < 1.0))
        throw RangeError("spectrum", op, "contraction must lie in (0,1)");
    if (g1 < 1 || g2 < 1) throw RangeError("spectrum", op, "need g1, g2 >= 1");
    if (1.0 / c < static_cast<double>(g1 + g2))
        throw RangeError("spectrum", op, "need slope 1/c >= g1 + g2");
    if (alpha < -1.0 || alpha > 1.0)
        throw RangeError("spectrum", op, "family C needs alpha in [-1,1]");
    if (o == StepOrientation::first_branch_positive) {
        std::swap(g1, g2);
        alpha = -alpha;
    }
    double u = (1.0 - alpha) / (2.0 * static_cast<double>(g1));
    double v = (1.0 + alpha) / (2.0 * static_cast<double>(g2));
    double num = -(static_cast<double>(g1) * detail::xlogx(u) +
                   static_cast<double>(g2) * detail::xlogx(v));
    return num / std::log(1.0 / c);
}

}  // namespace pressurelab
