#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pressurelab/branch_model.hpp"
#include "pressurelab/corridor.hpp"
#include "pressurelab/escape_sim.hpp"
#include "pressurelab/fibre_pressure.hpp"
#include "pressurelab/potential.hpp"
#include "pressurelab/pressure.hpp"
#include "pressurelab/rng.hpp"
#include "pressurelab/spectrum.hpp"

namespace pressurelab {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;  // worst-case numbers observed
};

namespace verify_detail {

constexpr std::uint64_t kVerifySeed = 0x5052455353u;  // fixed for reproducibility

inline std::vector<std::pair<double, double>> random_contraction_pairs(int count) {
    std::vector<std::pair<double, double>> out;
    CounterRng rng(kVerifySeed, 1);
    while (static_cast<int>(out.size()) < count) {
        double c1 = 0.05 + 0.9 * rng.next_double();
        double c2 = 0.05 + 0.9 * rng.next_double();
        if (c1 + c2 <= 1.0) out.push_back({c1, c2});
    }
    return out;
}

inline std::vector<double> interior_grid(const PsiBounds& b, int points) {
    std::vector<double> g;
    double span = b.upper - b.lower;
    double eps = 1e-3 * span;
    for (int i = 0; i < points; ++i) {
        double t = points == 1 ? 0.5 : static_cast<double>(i) / (points - 1);
        g.push_back(b.lower + eps + t * (span - 2.0 * eps));
    }
    return g;
}

struct Worst {
    double value = 0.0;
    std::string where;
    void update(double v, const std::string& w) {
        if (v > value) {
            value = v;
            where = w;
        }
    }
};

inline std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

}  // namespace verify_detail

/// Criterion 1: fibre-induced pressure of the random-walk models matches the
/// closed form log 2 + t (log c1 + log c2) / 2 to 1e-9.
inline CriterionResult verify_random_walk_fibre_pressure() {
    using namespace verify_detail;
    Worst worst;
    const double pairs[3][2] = {{0.5, 0.5}, {0.4, 0.6}, {0.3, 0.7}};
    const double ts[4] = {0.0, 0.5, 1.0, 2.0};
    for (auto& p : pairs) {
        BranchModel model = make_random_walk_model(p[0], p[1]);
        CylinderPotential phi = model.geometric_potential();
        CylinderPotential psi = model.step_potential();
        for (double t : ts) {
            double got = fibre_pressure(t * phi, psi).value;
            double want = std::log(2.0) + t * (std::log(p[0]) + std::log(p[1])) / 2.0;
            worst.update(std::abs(got - want),
                         "c=(" + fmt(p[0]) + "," + fmt(p[1]) + "), t=" + fmt(t));
        }
    }
    return {1, "random-walk fibre pressure vs closed form (1e-9)",
            worst.value <= 1e-9, "max |error| = " + fmt(worst.value) + " at " + worst.where};
}

/// Criterion 2: recurrent-set dimension delta_0 matches
/// log 4 / (log(1/c1) + log(1/c2)) to 1e-8 on 20 random models.
inline CriterionResult verify_recurrent_dimension(int model_count = 20) {
    using namespace verify_detail;
    Worst worst;
    for (auto& [c1, c2] : random_contraction_pairs(model_count)) {
        BranchModel model = make_random_walk_model(c1, c2);
        double got = delta_alpha_root(model, 0.0);
        double want = std::log(4.0) / (std::log(1.0 / c1) + std::log(1.0 / c2));
        worst.update(std::abs(got - want),
                     "c=(" + fmt(c1) + "," + fmt(c2) + ")");
    }
    return {2, "recurrent-set dimension vs closed form (1e-8)",
            worst.value <= 1e-8, "max |error| = " + fmt(worst.value) + " at " + worst.where};
}

/// Criterion 3: a dimension gap occurs exactly when the drift is non-zero;
/// the symmetric model has zero gap to 1e-12.
inline CriterionResult verify_gap_criterion(int model_count = 20) {
    using namespace verify_detail;
    bool ok = true;
    std::ostringstream detail;
    for (auto& [c1, c2] : random_contraction_pairs(model_count)) {
        GapReport g = drift_and_gap(make_random_walk_model(c1, c2));
        bool gap_pos = g.gap > 1e-10;
        bool drift_pos = std::abs(g.drift) > 1e-10;
        if (gap_pos != drift_pos) {
            ok = false;
            detail << "mismatch at c=(" << fmt(c1) << "," << fmt(c2)
                   << "): gap=" << fmt(g.gap) << " drift=" << fmt(g.drift) << "; ";
        }
    }
    GapReport sym = drift_and_gap(make_random_walk_model(0.5, 0.5));
    if (std::abs(sym.gap) > 1e-12) {
        ok = false;
        detail << "symmetric gap " << fmt(sym.gap) << " exceeds 1e-12; ";
    }
    if (ok)
        detail << "gap<=>drift equivalence held on all models; symmetric gap = "
               << fmt(std::abs(sym.gap));
    return {3, "dimension gap iff non-zero drift", ok, detail.str()};
}

struct SpectrumFamilyCase {
    std::string name;
    BranchModel model;
    // closed form with orientation already calibrated so oracle(alpha_max)=delta
    std::function<double(double)> oracle;
};

inline std::vector<SpectrumFamilyCase> acceptance_families() {
    std::vector<SpectrumFamilyCase> cases;
    auto push_family_a = [&](double c1, double c2) {
        BranchModel m = make_random_walk_model(c1, c2);
        GapReport g = drift_and_gap(m);
        StepOrientation o = StepOrientation::first_branch_negative;
        if (std::abs(oracle_family_a(c1, c2, g.drift, o) - g.delta) >
            std::abs(oracle_family_a(c1, c2, g.drift,
                                     StepOrientation::first_branch_positive) -
                     g.delta))
            o = StepOrientation::first_branch_positive;
        cases.push_back({"family A (" + verify_detail::fmt(c1) + "," +
                             verify_detail::fmt(c2) + ")",
                         m, [c1, c2, o](double a) {
                             return oracle_family_a(c1, c2, a, o);
                         }});
    };
    push_family_a(0.5, 0.5);
    push_family_a(0.3, 0.7);
    cases.push_back({"family B (c=1/2, m=(0,1))", make_stepped_model(0.5, 0, 1),
                     [](double a) { return oracle_family_b(0.5, 0, 1, a); }});
    {
        BranchModel m = make_multibranch_model(1.0 / 3.0, 1, 2);
        GapReport g = drift_and_gap(m);
        StepOrientation o = StepOrientation::first_branch_negative;
        if (std::abs(oracle_family_c(1.0 / 3.0, 1, 2, g.drift, o) - g.delta) >
            std::abs(oracle_family_c(1.0 / 3.0, 1, 2, g.drift,
                                     StepOrientation::first_branch_positive) -
                     g.delta))
            o = StepOrientation::first_branch_positive;
        cases.push_back({"family C (c=1/3, g=(1,2))", m, [o](double a) {
                             return oracle_family_c(1.0 / 3.0, 1, 2, a, o);
                         }});
    }
    return cases;
}

/// Criterion 4: swept spectra match the published closed forms to 1e-7 on 41
/// interior points per family; the family-C endpoint comes out of the
/// boundary formula at 1e-9.
inline CriterionResult verify_spectrum_closed_forms() {
    using namespace verify_detail;
    Worst worst;
    for (auto& fam : acceptance_families()) {
        PsiBounds b = psi_bounds(fam.model.step_potential());
        SpectrumCurve curve = spectrum_sweep(fam.model, interior_grid(b, 41));
        for (const auto& pt : curve.points) {
            if (pt.error)
                return {4, "spectrum closed forms (1e-7)", false,
                        fam.name + " failed at alpha=" + fmt(pt.alpha) + ": " +
                            *pt.error};
            worst.update(std::abs(pt.delta_root - fam.oracle(pt.alpha)),
                         fam.name + " alpha=" + fmt(pt.alpha));
        }
    }
    double endpoint = delta_alpha_root(make_multibranch_model(1.0 / 3.0, 1, 2), 1.0);
    double cantor = std::log(2.0) / std::log(3.0);
    bool endpoint_ok = std::abs(endpoint - cantor) <= 1e-9;
    bool ok = worst.value <= 1e-7 && endpoint_ok;
    return {4, "spectrum closed forms (1e-7) + family-C endpoint (1e-9)", ok,
            "max |error| = " + fmt(worst.value) + " at " + worst.where +
                "; endpoint |error| = " + fmt(std::abs(endpoint - cantor))};
}

/// Criterion 5: root, Newton and Legendre characterizations agree pairwise to
/// 1e-6 on the criterion-4 grids.
inline CriterionResult verify_three_method_agreement() {
    using namespace verify_detail;
    Worst worst;
    for (auto& fam : acceptance_families()) {
        PsiBounds b = psi_bounds(fam.model.step_potential());
        SpectrumCurve curve = spectrum_sweep(fam.model, interior_grid(b, 41));
        for (const auto& pt : curve.points) {
            if (pt.error)
                return {5, "three-method agreement (1e-6)", false,
                        fam.name + " failed at alpha=" + fmt(pt.alpha) + ": " +
                            *pt.error};
            worst.update(pt.discrepancy, fam.name + " alpha=" + fmt(pt.alpha));
        }
    }
    return {5, "three-method agreement (1e-6)", worst.value <= 1e-6,
            "max discrepancy = " + fmt(worst.value) + " at " + worst.where};
}

/// Criterion 6: the direct corridor series at the alpha-Poincare root stays
/// within the local-limit envelope 0.7 log(n)/n + 1e-3 at the full horizon.
inline CriterionResult verify_direct_series(int horizon = 4000) {
    using namespace verify_detail;
    BranchModel model = make_random_walk_model(0.4, 0.6);
    CylinderPotential phi = model.geometric_potential();
    CylinderPotential psi = model.step_potential();
    GapReport g = drift_and_gap(model);
    Worst worst;
    for (double alpha : {0.0, g.drift}) {
        double delta = delta_alpha_root(model, alpha);
        auto steps = detail::integer_steps(psi, "spectrum", "verify");
        detail::LatticeWalkDp dp(delta * phi, steps);
        while (dp.horizon() < horizon) dp.step();
        double est = dp.log_corridor_sum(alpha, 2.0) / horizon;
        worst.update(std::abs(est), "alpha=" + fmt(alpha));
    }
    double bound = 0.7 * std::log(static_cast<double>(horizon)) / horizon + 1e-3;
    return {6, "direct corridor series at the Poincare root", worst.value <= bound,
            "max |(1/n) log zeta_n| = " + fmt(worst.value) + " at " + worst.where +
                " (bound " + fmt(bound) + ", n=" + std::to_string(horizon) + ")"};
}

/// Criterion 7: analytic spectrum slope vs central differences at h = 1e-4.
inline CriterionResult verify_slope_identity() {
    using namespace verify_detail;
    Worst worst;
    const double h = 1e-4;
    for (auto& cs : {std::pair<double, double>{0.5, 0.5}, {0.3, 0.7}}) {
        BranchModel model = make_random_walk_model(cs.first, cs.second);
        PsiBounds b = psi_bounds(model.step_potential());
        for (double alpha : interior_grid({b.lower + 0.05, b.upper - 0.05}, 10)) {
            double analytic = spectrum_slope(model, alpha);
            double up = delta_alpha_newton(model, alpha + h).delta;
            double dn = delta_alpha_newton(model, alpha - h).delta;
            double fd = (up - dn) / (2.0 * h);
            worst.update(std::abs(analytic - fd),
                         "c=(" + fmt(cs.first) + "," + fmt(cs.second) +
                             "), alpha=" + fmt(alpha));
        }
    }
    return {7, "slope identity vs central differences (1e-5)",
            worst.value <= 1e-5, "max |error| = " + fmt(worst.value) + " at " + worst.where};
}

/// Criterion 8: the module property suites. Each sub-check reports its own
/// worst case; the criterion passes when all of them do.
inline CriterionResult verify_property_suites(bool quick = false) {
    using namespace verify_detail;
    std::ostringstream detail;
    bool ok = true;
    auto fail = [&](const std::string& msg) {
        ok = false;
        detail << "FAIL " << msg << "; ";
    };

    // pressure: convexity of s -> P(s psi + f) on a randomized grid
    {
        CounterRng rng(kVerifySeed, 2);
        double worst = -1e300;
        for (int trial = 0; trial < 20; ++trial) {
            double c1 = 0.05 + 0.6 * rng.next_double();
            double c2 = std::min(0.95 - c1, 0.05 + 0.6 * rng.next_double());
            if (c2 <= 0.05) c2 = 0.05;
            BranchModel m = make_random_walk_model(c1, c2);
            CylinderPotential phi = m.geometric_potential();
            CylinderPotential psi = m.step_potential();
            double t = 0.2 + rng.next_double();
            double s1 = -2.0 + 4.0 * rng.next_double();
            double s2 = s1 + 0.1 + 2.0 * rng.next_double();
            double pm = classical_pressure(0.5 * (s1 + s2) * psi + t * phi).value;
            double pe = 0.5 * (classical_pressure(s1 * psi + t * phi).value +
                               classical_pressure(s2 * psi + t * phi).value);
            worst = std::max(worst, pm - pe);
        }
        if (worst > 1e-10) fail("pressure convexity margin " + fmt(worst));
        else detail << "convexity margin " << fmt(worst) << "; ";
    }

    // pressure: analytic derivative vs central differences with Richardson
    {
        BranchModel m = make_random_walk_model(0.3, 0.7);
        CylinderPotential phi = m.geometric_potential();
        CylinderPotential psi = m.step_potential();
        CylinderPotential f = 1.0 * phi;
        double exact = gibbs_expectation(gibbs_measure(f), psi);
        auto fd = [&](double h) {
            return (classical_pressure(f + h * psi).value -
                    classical_pressure(f + (-h) * psi).value) /
                   (2.0 * h);
        };
        double e3 = std::abs(fd(1e-3) - exact);
        double e4 = std::abs(fd(1e-4) - exact);
        double ratio = e4 > 0.0 ? e3 / e4 : 100.0;
        if (e3 > 1e-5 || e4 > 1e-7 || ratio < 30.0 || ratio > 300.0)
            fail("derivative check e3=" + fmt(e3) + " e4=" + fmt(e4) +
                 " ratio=" + fmt(ratio));
        else
            detail << "derivative Richardson ratio " << fmt(ratio) << "; ";
    }

    // fibre: DP row sum against the closed-form partition sum
    {
        BranchModel m = make_random_walk_model(0.4, 0.6);
        CylinderPotential phi = m.geometric_potential();
        CylinderPotential psi = m.step_potential();
        CorridorTable t = corridor_partition(phi, psi, 0.0, 1.0, 30);
        double want = 30.0 * classical_pressure(phi).value;
        double err = std::abs(t.log_row_sum_final() - want);
        if (err > 1e-10) fail("DP row-sum log error " + fmt(err));
        else detail << "row-sum log error " << fmt(err) << "; ";
    }

    // fibre: K-independence of the finite-horizon estimates
    {
        int n = quick ? 1500 : 4000;
        BranchModel m = make_random_walk_model(0.4, 0.6);
        CylinderPotential phi = m.geometric_potential();
        CylinderPotential psi = m.step_potential();
        double d0 = delta_alpha_root(m, 0.0);
        std::vector<double> finals;
        for (double K : {1.0, 2.0, 5.0}) {
            auto est = fibre_pressure_estimate(d0 * phi, psi, K, n);
            finals.push_back(est.back().second);
        }
        double spread = *std::max_element(finals.begin(), finals.end()) -
                        *std::min_element(finals.begin(), finals.end());
        if (spread > 2e-2) fail("K-independence spread " + fmt(spread));
        else detail << "K spread " << fmt(spread) << "; ";
    }

    // spectrum: unimodality and zero outside the support
    {
        BranchModel m = make_random_walk_model(0.3, 0.7);
        PsiBounds b = psi_bounds(m.step_potential());
        SpectrumCurve curve = spectrum_sweep(m, interior_grid(b, 41));
        GapReport g = drift_and_gap(m);
        std::size_t argmax = 0;
        for (std::size_t i = 1; i < curve.points.size(); ++i)
            if (curve.points[i].delta_root > curve.points[argmax].delta_root)
                argmax = i;
        double grid_step = curve.points[1].alpha - curve.points[0].alpha;
        bool unimodal = std::abs(curve.points[argmax].alpha - g.drift) <=
                        grid_step + 1e-9;
        for (std::size_t i = 1; i < curve.points.size(); ++i) {
            bool rising = curve.points[i].delta_root >
                          curve.points[i - 1].delta_root - 1e-12;
            bool falling = curve.points[i].delta_root <
                           curve.points[i - 1].delta_root + 1e-12;
            if (i <= argmax && !rising) unimodal = false;
            if (i > argmax && !falling) unimodal = false;
        }
        if (!unimodal) fail("unimodality violated");
        else detail << "unimodal with argmax near drift; ";
        if (delta_alpha_root(m, 2.0) != 0.0 || delta_alpha_root(m, -2.0) != 0.0)
            fail("outside-support value not exactly zero");
    }

    // escape-sim: conjugacy on random prefixes over the example models
    {
        CounterRng rng(kVerifySeed, 3);
        double worst = 0.0;
        int prefixes = quick ? 20 : 100;
        std::vector<BranchModel> models;
        models.push_back(make_random_walk_model(0.5, 0.5));
        models.push_back(make_random_walk_model(0.4, 0.6));
        models.push_back(make_multibranch_model(1.0 / 3.0, 1, 2));
        for (const auto& m : models) {
            for (int p = 0; p < prefixes; ++p) {
                Word prefix(60);
                for (auto& s : prefix)
                    s = 1 + static_cast<int>(rng.next_double() * m.alphabet_size());
                long long ell = static_cast<long long>(rng.next_double() * 7.0) - 3;
                worst = std::max(worst, conjugacy_check(m, prefix, ell, 12));
            }
        }
        if (worst > 1e-9) fail("conjugacy deviation " + fmt(worst));
        else detail << "conjugacy max dev " << fmt(worst) << "; ";
    }

    // escape-sim: seeded drift against the Gibbs expectation
    {
        int count = quick ? 2000 : 10000;
        int n = quick ? 2000 : 10000;
        BranchModel m = make_random_walk_model(0.4, 0.6);
        GibbsMeasure mu = gibbs_measure(bowen_delta(m) * m.geometric_potential());
        double want = gibbs_expectation(mu, m.step_potential());
        OrbitBatch batch = sample_orbits(mu, m, n, count, kVerifySeed + 11);
        double err = std::abs(batch.drift_hat() - want);
        double se = batch.drift_se();
        if (err > 4.0 * se)
            fail("drift error " + fmt(err) + " exceeds 4 SE (" + fmt(se) + ")");
        else
            detail << "drift err/SE " << fmt(se > 0 ? err / se : 0.0) << "; ";
    }

    // escape-sim: chi-square of the sampled level histogram vs the exact law
    {
        int count = quick ? 20000 : 100000;
        int n = 64;
        BranchModel m = make_random_walk_model(0.4, 0.6);
        GibbsMeasure mu = gibbs_measure(bowen_delta(m) * m.geometric_potential());
        OrbitBatch batch = sample_orbits(mu, m, n, count, kVerifySeed + 12);
        LevelDistribution law = exact_level_distribution(mu, m, n);
        std::vector<double> observed(law.mass.size(), 0.0);
        for (long long lev : batch.final_levels()) {
            long long off = lev - law.level_lo;
            if (off >= 0 && off < static_cast<long long>(observed.size()))
                observed[static_cast<std::size_t>(off)] += 1.0;
        }
        std::vector<double> expected(law.mass.size(), 0.0);
        for (std::size_t i = 0; i < law.mass.size(); ++i)
            expected[i] = law.mass[i] * count;
        ChiSquareResult chi = chi_square_test(observed, expected);
        if (chi.p_value <= 0.001)
            fail("chi-square p " + fmt(chi.p_value));
        else
            detail << "chi-square p " << fmt(chi.p_value) << "; ";
    }

    return {8, "module property suites", ok, detail.str()};
}

/// Criterion 9: symmetric-on-average diagnostic ratios.
inline CriterionResult verify_symmetry_diagnostic() {
    using namespace verify_detail;
    BranchModel sym = make_random_walk_model(0.5, 0.5);
    BranchModel asym = make_random_walk_model(0.4, 0.6);
    double r_sym = symmetry_on_average_ratio(sym.geometric_potential(),
                                             sym.step_potential(), 500);
    double r_asym = symmetry_on_average_ratio(asym.geometric_potential(),
                                              asym.step_potential(), 500);
    bool ok = std::abs(r_sym - 1.0) <= 0.1 && r_asym > 10.0;
    return {9, "symmetry-on-average ratios", ok,
            "symmetric ratio = " + fmt(r_sym) + ", drifted ratio = " + fmt(r_asym)};
}

inline std::vector<CriterionResult> run_acceptance_criteria(bool quick = false) {
    std::vector<CriterionResult> results;
    results.push_back(verify_random_walk_fibre_pressure());
    results.push_back(verify_recurrent_dimension(quick ? 6 : 20));
    results.push_back(verify_gap_criterion(quick ? 6 : 20));
    results.push_back(verify_spectrum_closed_forms());
    results.push_back(verify_three_method_agreement());
    results.push_back(verify_direct_series(quick ? 1500 : 4000));
    results.push_back(verify_slope_identity());
    results.push_back(verify_property_suites(quick));
    results.push_back(verify_symmetry_diagnostic());
    return results;
}

}  // namespace pressurelab
