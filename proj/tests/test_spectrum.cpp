#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "pressurelab/rng.hpp"
#include "pressurelab/spectrum.hpp"

using namespace pressurelab;
using Catch::Approx;

namespace {
const double kLog2Log3 = 0.6309297535714574;  // dimension of the 1/3-Cantor set
}

TEST_CASE("delta_alpha by the fibre-pressure root") {
    CHECK(delta_alpha_root(make_random_walk_model(0.5, 0.5), 0.0) ==
          Approx(1.0).margin(1e-10));
    CHECK(delta_alpha_root(make_random_walk_model(0.4, 0.6), 0.0) ==
          Approx(0.9713954686603362).margin(1e-9));
    // outside the step range the exponent vanishes identically
    BranchModel rw = make_random_walk_model(0.5, 0.5);
    CHECK(delta_alpha_root(rw, 2.0) == 0.0);
    CHECK(delta_alpha_root(rw, -1.5) == 0.0);
    // boundary alpha with a singleton I0 and contraction < 1 forces zero
    CHECK(delta_alpha_root(rw, 1.0) == Approx(0.0).margin(1e-12));
    CHECK(delta_alpha_root(rw, -1.0) == Approx(0.0).margin(1e-12));
}

TEST_CASE("boundary formula: the family-C endpoint is the 1/3-Cantor dimension") {
    BranchModel three = make_multibranch_model(1.0 / 3.0, 1, 2);
    CHECK(delta_alpha_root(three, 1.0) == Approx(kLog2Log3).margin(1e-10));
    // lower endpoint: single -1 branch, so dimension zero
    CHECK(delta_alpha_root(three, -1.0) == Approx(0.0).margin(1e-12));
}

TEST_CASE("delta_alpha by joint Newton matches and certifies the measure") {
    BranchModel sym = make_random_walk_model(0.5, 0.5);
    NewtonSolution s0 = delta_alpha_newton(sym, 0.0);
    CHECK(s0.delta == Approx(1.0).margin(1e-11));
    CHECK(s0.q == Approx(0.0).margin(1e-11));

    // at the drift the exponent is the Bowen dimension with q = 0
    BranchModel m = make_random_walk_model(0.4, 0.6);
    NewtonSolution s1 = delta_alpha_newton(m, 0.2);
    CHECK(s1.delta == Approx(1.0).margin(1e-10));
    CHECK(s1.q == Approx(0.0).margin(1e-9));

    // the solution measure realizes the prescribed mean step
    for (double alpha : {-0.4, 0.1, 0.55}) {
        NewtonSolution s = delta_alpha_newton(m, alpha);
        CylinderPotential pot = s.delta * m.geometric_potential() +
                                s.q * (m.step_potential() - alpha);
        double mean = gibbs_expectation(gibbs_measure(pot), m.step_potential());
        REQUIRE(mean == Approx(alpha).margin(1e-9));
    }

    // interior limit toward the family-C endpoint
    BranchModel three = make_multibranch_model(1.0 / 3.0, 1, 2);
    NewtonSolution s2 = delta_alpha_newton(three, 0.999);
    CHECK(s2.delta == Approx(kLog2Log3).margin(5e-3));

    CHECK_THROWS_AS(delta_alpha_newton(sym, 1.0), RegimeError);
}

TEST_CASE("delta_alpha by the Legendre route") {
    CHECK(delta_alpha_legendre(make_random_walk_model(0.5, 0.5), 0.0) ==
          Approx(1.0).margin(1e-9));

    // at the drift of mu_{delta phi} the Legendre value recovers bowen_delta
    BranchModel uneven = BranchModel::build({{0.1, -1, std::nullopt},
                                             {0.5, 1, std::nullopt}});
    double delta = bowen_delta(uneven);
    CHECK(delta == Approx(oracles::bowen_root_scan({0.1, 0.5})).margin(1e-12));
    GibbsMeasure mu = gibbs_measure(delta * uneven.geometric_potential());
    double drift = gibbs_expectation(mu, uneven.step_potential());
    CHECK(delta_alpha_legendre(uneven, drift) == Approx(delta).margin(1e-8));

    BranchModel m = make_random_walk_model(0.4, 0.6);
    double root = delta_alpha_root(m, 0.0);
    CHECK(delta_alpha_legendre(m, 0.0) == Approx(root).margin(1e-6));
    CHECK(delta_alpha_legendre(m, 0.0) ==
          Approx(0.9713954686603362).margin(1e-8));
}

TEST_CASE("three characterizations agree off the worked examples") {
    BranchModel m = BranchModel::build({{0.15, -2, std::nullopt},
                                        {0.35, 1, std::nullopt},
                                        {0.3, 1, std::nullopt}});
    for (double alpha : {-1.2, -0.3, 0.4, 0.9}) {
        double r = delta_alpha_root(m, alpha);
        NewtonSolution nw = delta_alpha_newton(m, alpha);
        double lg = delta_alpha_legendre(m, alpha);
        CHECK(std::abs(r - nw.delta) < 1e-8);
        CHECK(std::abs(r - lg) < 1e-6);
    }
}

TEST_CASE("spectrum sweep reproduces the closed-form grids") {
    BranchModel sym = make_random_walk_model(0.5, 0.5);
    SpectrumCurve curve = spectrum_sweep(sym, {-1.0, -0.5, 0.0, 0.5, 1.0});
    REQUIRE(curve.points.size() == 5);
    // the family-A formula at p = (1 +- 0.5)/2, computed from the oracle
    double mid = oracle_family_a(0.5, 0.5, 0.5,
                                 StepOrientation::first_branch_negative);
    CHECK(mid == Approx(0.8112781244591328).margin(1e-12));
    CHECK(curve.points[0].delta_root == Approx(0.0).margin(1e-12));
    CHECK(curve.points[1].delta_root == Approx(mid).margin(1e-8));
    CHECK(curve.points[2].delta_root == Approx(1.0).margin(1e-10));
    CHECK(curve.points[3].delta_root == Approx(mid).margin(1e-8));
    CHECK(curve.points[4].delta_root == Approx(0.0).margin(1e-12));

    BranchModel b = make_stepped_model(0.5, 0, 1);
    SpectrumCurve bc = spectrum_sweep(b, {0.0, 0.5, 1.0});
    CHECK(bc.points[0].delta_root == Approx(0.0).margin(1e-12));
    CHECK(bc.points[1].delta_root == Approx(1.0).margin(1e-10));
    CHECK(bc.points[2].delta_root == Approx(0.0).margin(1e-12));

    // a grid point outside the support
    SpectrumCurve outside = spectrum_sweep(sym, std::vector<double>{2.0});
    CHECK(outside.points[0].delta_root == 0.0);
}

TEST_CASE("sweep summary carries the gap data") {
    BranchModel m = make_random_walk_model(0.3, 0.7);
    SpectrumCurve curve = spectrum_sweep(m, {0.0, 0.4});
    CHECK(curve.delta == Approx(1.0).margin(1e-12));
    CHECK(curve.alpha_max == Approx(0.4).margin(1e-12));
    CHECK(curve.delta0 == Approx(0.8882813964018166).margin(1e-9));
    CHECK(curve.gap == Approx(1.0 - 0.8882813964018166).margin(1e-9));
}

TEST_CASE("drift and gap reports") {
    GapReport sym = drift_and_gap(make_random_walk_model(0.5, 0.5));
    CHECK(sym.drift == Approx(0.0).margin(1e-13));
    CHECK(std::abs(sym.gap) < 1e-12);
    CHECK(sym.dim_transient_plus == Approx(1.0).margin(1e-11));
    CHECK(sym.dim_transient_minus == Approx(1.0).margin(1e-11));

    GapReport g = drift_and_gap(make_random_walk_model(0.4, 0.6));
    CHECK(g.drift == Approx(0.2).margin(1e-12));
    CHECK(g.delta == Approx(1.0).margin(1e-12));
    CHECK(g.delta0 == Approx(0.9713954686603362).margin(1e-9));
    CHECK(g.gap == Approx(0.028604531339663786).margin(1e-9));
    CHECK(g.dim_transient_plus == Approx(1.0).margin(1e-12));
    CHECK(g.dim_transient_minus == Approx(g.delta0).margin(1e-12));

    GapReport h = drift_and_gap(make_random_walk_model(0.3, 0.7));
    CHECK(h.drift == Approx(0.4).margin(1e-12));
    CHECK(h.delta0 == Approx(0.8882813964018166).margin(1e-9));

    // negative drift mirrors the transient assignment
    GapReport neg = drift_and_gap(make_random_walk_model(0.6, 0.4));
    CHECK(neg.drift == Approx(-0.2).margin(1e-12));
    CHECK(neg.dim_transient_minus == Approx(1.0).margin(1e-12));
    CHECK(neg.dim_transient_plus == Approx(neg.delta0).margin(1e-12));
}

TEST_CASE("analytic slope: critical point, finite differences, edge blow-up") {
    BranchModel sym = make_random_walk_model(0.5, 0.5);
    CHECK(std::abs(spectrum_slope(sym, 0.0)) < 1e-9);

    const double h = 1e-4;
    for (double alpha : {0.5, -0.3}) {
        double analytic = spectrum_slope(sym, alpha);
        double fd = (delta_alpha_newton(sym, alpha + h).delta -
                     delta_alpha_newton(sym, alpha - h).delta) /
                    (2.0 * h);
        CHECK(analytic == Approx(fd).margin(1e-6));
    }
    // the slope grows (in magnitude) toward the upper endpoint and blows up;
    // at alpha = 0.99 the closed form gives -(1/2) log(199/1) / log 2
    double s99 = spectrum_slope(sym, 0.99);
    CHECK(s99 == Approx(-0.5 * std::log(199.0) / std::log(2.0)).margin(1e-6));
    CHECK(spectrum_slope(sym, 0.9) > s99);
    CHECK(spectrum_slope(sym, 1.0 - 1e-6) < -10.0);
}

TEST_CASE("Young's formula: entropy over Lyapunov equals delta_alpha") {
    CHECK(gibbs_dimension(make_random_walk_model(0.5, 0.5), 0.0) ==
          Approx(1.0).margin(1e-10));
    CHECK(gibbs_dimension(make_random_walk_model(0.4, 0.6), 0.2) ==
          Approx(1.0).margin(1e-10));
    BranchModel three = make_multibranch_model(1.0 / 3.0, 1, 2);
    CHECK(gibbs_dimension(three, 1.0 / 3.0) == Approx(1.0).margin(1e-10));
    for (double alpha : {-0.5, 0.05, 0.6}) {
        BranchModel m = make_random_walk_model(0.35, 0.45);
        CHECK(gibbs_dimension(m, alpha) ==
              Approx(delta_alpha_root(m, alpha)).margin(1e-9));
    }
}

TEST_CASE("closed-form oracles: pinned values and domains") {
    CHECK(oracle_family_a(0.5, 0.5, 0.0,
                          StepOrientation::first_branch_negative) ==
          Approx(1.0).margin(1e-15));
    CHECK(oracle_family_b(0.5, 0, 1, 0.5) == Approx(1.0).margin(1e-15));
    CHECK(oracle_family_c(1.0 / 3.0, 1, 2, 1.0,
                          StepOrientation::first_branch_negative) ==
          Approx(kLog2Log3).margin(1e-14));
    // endpoints of family A vanish (0 log 0 = 0 convention)
    CHECK(oracle_family_a(0.3, 0.7, 1.0,
                          StepOrientation::first_branch_negative) == 0.0);

    CHECK_THROWS_AS(oracle_family_a(1.2, 0.5, 0.0,
                                    StepOrientation::first_branch_negative),
                    RangeError);
    CHECK_THROWS_AS(oracle_family_a(0.5, 0.5, 1.5,
                                    StepOrientation::first_branch_negative),
                    RangeError);
    CHECK_THROWS_AS(oracle_family_b(0.5, 1, 1, 1.0), RangeError);
    CHECK_THROWS_AS(oracle_family_c(0.5, 1, 2, 0.0,
                                    StepOrientation::first_branch_negative),
                    RangeError);
}

TEST_CASE("orientation calibration picks the step-respecting pairing") {
    BranchModel m = make_random_walk_model(0.3, 0.7);
    GapReport g = drift_and_gap(m);
    double matched = oracle_family_a(0.3, 0.7, g.drift,
                                     StepOrientation::first_branch_negative);
    double printed = oracle_family_a(0.3, 0.7, g.drift,
                                     StepOrientation::first_branch_positive);
    CHECK(matched == Approx(g.delta).margin(1e-12));
    CHECK(std::abs(printed - g.delta) > 1e-2);

    // with the calibrated orientation the oracle tracks the solver
    for (double alpha : {-0.6, 0.0, 0.4, 0.8}) {
        CHECK(delta_alpha_root(m, alpha) ==
              Approx(oracle_family_a(0.3, 0.7, alpha,
                                     StepOrientation::first_branch_negative))
                  .margin(1e-8));
    }
}

TEST_CASE("unimodality of the swept curve") {
    BranchModel m = make_random_walk_model(0.3, 0.7);
    PsiBounds b = psi_bounds(m.step_potential());
    SpectrumCurve curve = spectrum_sweep(m, default_alpha_grid(b, 41));
    std::size_t argmax = 0;
    for (std::size_t i = 0; i < curve.points.size(); ++i)
        if (curve.points[i].delta_root > curve.points[argmax].delta_root)
            argmax = i;
    // the exponent stays pinched between 0 and the Bowen dimension
    for (const auto& pt : curve.points) {
        REQUIRE(pt.delta_root >= 0.0);
        REQUIRE(pt.delta_root <= curve.delta + 1e-9);
    }
    double grid_step = curve.points[2].alpha - curve.points[1].alpha;
    CHECK(std::abs(curve.points[argmax].alpha - 0.4) <= grid_step + 1e-9);
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        if (i <= argmax)
            REQUIRE(curve.points[i].delta_root >=
                    curve.points[i - 1].delta_root - 1e-12);
        else
            REQUIRE(curve.points[i].delta_root <=
                    curve.points[i - 1].delta_root + 1e-12);
    }
}

TEST_CASE("scaling the geometric potential rescales the spectrum only") {
    BranchModel m = make_random_walk_model(0.4, 0.6);
    CylinderPotential phi = m.geometric_potential();
    CylinderPotential psi = m.step_potential();
    const double lambda = 2.5;
    for (double alpha : {-0.5, 0.0, 0.2, 0.6}) {
        double base = delta_alpha_root(phi, psi, alpha);
        double scaled = delta_alpha_root(lambda * phi, psi, alpha);
        REQUIRE(scaled == Approx(base / lambda).margin(1e-9));
    }
    // the argmax (drift of the dimension-maximizing measure) is unchanged:
    // Bowen root rescales, Gibbs weights c_i^delta do not
    auto bowen_root = [&](const CylinderPotential& p) {
        return detail::decreasing_root(
            [&](double s) { return classical_pressure(s * p).value; },
            [&](double s) {
                GibbsMeasure mu = gibbs_measure(s * p);
                return gibbs_expectation(mu, p);
            });
    };
    double d1 = bowen_root(phi);
    double d2 = bowen_root(lambda * phi);
    CHECK(d2 == Approx(d1 / lambda).margin(1e-12));
    double drift1 = gibbs_expectation(gibbs_measure(d1 * phi), psi);
    double drift2 = gibbs_expectation(gibbs_measure(d2 * (lambda * phi)), psi);
    CHECK(drift1 == Approx(drift2).margin(1e-12));
}

TEST_CASE("per-point errors are recorded without aborting the sweep") {
    BranchModel m = make_random_walk_model(0.4, 0.6);
    SpectrumCurve curve = spectrum_sweep(m, {0.0, 0.3});
    for (const auto& pt : curve.points) CHECK_FALSE(pt.error.has_value());
}

TEST_CASE("the gap vanishes only at the symmetric contraction") {
    for (double c : {0.1, 0.25, 0.4, 0.49, 0.5, 0.51, 0.75, 0.9}) {
        GapReport g = drift_and_gap(make_random_walk_model(c, 1.0 - c));
        if (c == 0.5)
            REQUIRE(std::abs(g.gap) <= 1e-10);
        else
            REQUIRE(g.gap > 1e-10);
    }
}

TEST_CASE("randomized models: methods agree and respect the gap criterion") {
    CounterRng rng(86420, 0);
    for (int trial = 0; trial < 12; ++trial) {
        // 2 to 4 branches, contractions summing below 1, steps in [-3, 3]
        int branches = 2 + static_cast<int>(rng.next_double() * 3);
        std::vector<BranchSpec> specs;
        double budget = 0.95;
        for (int b = 0; b < branches; ++b) {
            double room = budget / (branches - b);
            double c = room * (0.3 + 0.65 * rng.next_double());
            budget -= c;
            int step = static_cast<int>(rng.next_double() * 7) - 3;
            specs.push_back({c, step, std::nullopt});
        }
        BranchModel m = BranchModel::build(specs);
        PsiBounds b = psi_bounds(m.step_potential());
        if (b.upper - b.lower < 0.5) continue;  // constant-ish steps: skip
        GapReport g = drift_and_gap(m);
        bool gap_pos = g.gap > 1e-10;
        bool drift_pos = std::abs(g.drift) > 1e-10;
        REQUIRE(gap_pos == drift_pos);
        REQUIRE(g.delta0 <= g.delta + 1e-12);
        // three-method agreement at a random interior alpha
        double span = b.upper - b.lower;
        double alpha = b.lower + span * (0.1 + 0.8 * rng.next_double());
        double root = delta_alpha_root(m, alpha);
        NewtonSolution nw = delta_alpha_newton(m, alpha);
        double lg = delta_alpha_legendre(m, alpha);
        REQUIRE(std::abs(root - nw.delta) < 1e-7);
        REQUIRE(std::abs(root - lg) < 1e-6);
        REQUIRE(root >= 0.0);
        REQUIRE(root <= g.delta + 1e-9);
        // Young consistency at the same point
        REQUIRE(gibbs_dimension(m, alpha) == Approx(root).margin(1e-8));
    }
}
