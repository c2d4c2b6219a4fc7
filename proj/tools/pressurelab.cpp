// Command-line front end: parse a model file (or built-in name), dispatch one
// subcommand, emit CSV/JSON. Outputs are deterministic for a fixed config and
// are written atomically (temp file + rename).

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pressurelab/pressurelab.hpp"

namespace {

using nlohmann::json;
using namespace pressurelab;

struct OutputSink {
    std::optional<std::string> path;
    void emit(const std::string& content) const {
        if (path) {
            write_file_atomic(*path, content);
        } else {
            std::fputs(content.c_str(), stdout);
        }
    }
};

std::string csv_number(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.15g", v);
    return buf;
}

json pressure_to_json(const PressureValue& p) {
    const char* method = "exact-depth1";
    if (p.method == PressureValue::Method::spectral_depthk) method = "spectral-depthk";
    if (p.method == PressureValue::Method::empirical_n) method = "empirical-n";
    return json{{"value", p.value}, {"method", method}, {"residual", p.residual}};
}

std::string spectrum_csv(const SpectrumCurve& curve) {
    std::ostringstream out;
    out << "alpha,delta_root,delta_newton,delta_legendre,q_alpha,slope,discrepancy\n";
    for (const auto& pt : curve.points) {
        out << csv_number(pt.alpha) << ',' << csv_number(pt.delta_root) << ','
            << csv_number(pt.delta_newton) << ',' << csv_number(pt.delta_legendre)
            << ',' << csv_number(pt.q.value_or(std::nan(""))) << ','
            << csv_number(pt.slope.value_or(std::nan(""))) << ','
            << csv_number(pt.discrepancy) << '\n';
    }
    return out.str();
}

json spectrum_json(const SpectrumCurve& curve) {
    json pts = json::array();
    for (const auto& pt : curve.points) {
        json j{{"alpha", pt.alpha},
               {"delta_root", pt.delta_root},
               {"delta_newton", pt.delta_newton},
               {"delta_legendre", pt.delta_legendre},
               {"discrepancy", pt.discrepancy}};
        if (pt.q) j["q_alpha"] = *pt.q;
        if (pt.slope) j["slope"] = *pt.slope;
        if (pt.error) j["error"] = *pt.error;
        pts.push_back(j);
    }
    return json{{"points", pts},
                {"summary",
                 {{"delta", curve.delta},
                  {"delta0", curve.delta0},
                  {"alpha_max", curve.alpha_max},
                  {"gap", curve.gap},
                  {"psi_lower", curve.bounds.lower},
                  {"psi_upper", curve.bounds.upper}}}};
}

GibbsMeasure measure_from_spec(const std::string& spec, const BranchModel& model) {
    if (spec == "uniform") {
        std::vector<double> zeros(static_cast<std::size_t>(model.alphabet_size()), 0.0);
        return gibbs_measure(CylinderPotential::depth1(zeros));
    }
    if (spec == "bowen")
        return gibbs_measure(bowen_delta(model) * model.geometric_potential());
    if (spec.rfind("phi:", 0) == 0) {
        double s = std::stod(spec.substr(4));
        return gibbs_measure(s * model.geometric_potential());
    }
    if (spec.rfind("weights:", 0) == 0) {
        std::vector<double> w;
        std::stringstream ss(spec.substr(8));
        std::string item;
        while (std::getline(ss, item, ',')) w.push_back(std::stod(item));
        if (static_cast<int>(w.size()) != model.alphabet_size())
            throw RangeError("cli", "simulate", "weight count does not match model");
        double sum = 0.0;
        for (double v : w) sum += v;
        if (sum <= 0.0) throw RangeError("cli", "simulate", "weights must be positive");
        std::vector<double> logw;
        for (double v : w) {
            if (v <= 0.0) throw RangeError("cli", "simulate", "weights must be positive");
            logw.push_back(std::log(v / sum));
        }
        return gibbs_measure(CylinderPotential::depth1(logw));
    }
    throw RangeError("cli", "simulate",
                     "unknown measure '" + spec +
                         "' (use uniform | bowen | phi:<s> | weights:p1,p2,...)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pressurelab: pressures, dimension spectra and escape "
                 "statistics for skew-periodic lifts of expanding interval maps"};
    app.require_subcommand(1);
    app.fallthrough();  // global options may follow the subcommand

    std::string model_spec;
    std::optional<std::string> out_path;
    std::string format = "json";
    bool echo_config = false;
    app.add_option("--model", model_spec,
                   "model file (JSON) or built-in name, e.g. rw_0.5_0.5");
    app.add_option("--out", out_path, "output path (written atomically)");
    auto* format_opt =
        app.add_option("--format", format,
                       "output format: json | csv (spectrum defaults to csv)")
            ->check(CLI::IsMember({"json", "csv"}));
    app.add_flag("--echo-config", echo_config,
                 "echo the parsed configuration to stderr before running");

    // pressure --s --q --a
    auto* cmd_pressure = app.add_subcommand(
        "pressure", "classical pressure P(s*phi + q*psi + a)");
    double ps = 1.0, pq = 0.0, pa = 0.0;
    cmd_pressure->add_option("--s", ps, "coefficient of the geometric potential");
    cmd_pressure->add_option("--q", pq, "coefficient of the step potential");
    cmd_pressure->add_option("--a", pa, "additive constant");

    // fibre --t
    auto* cmd_fibre = app.add_subcommand(
        "fibre", "fibre-induced pressure P(t*phi, psi)");
    double ft = 1.0;
    cmd_fibre->add_option("--t", ft, "coefficient of the geometric potential");

    // spectrum --grid | --alphas
    auto* cmd_spectrum = app.add_subcommand(
        "spectrum", "alpha-Poincare exponent sweep (three characterizations)");
    int grid_points = 201;
    std::vector<double> alphas;
    std::optional<std::string> svg_path;
    cmd_spectrum->add_option("--grid", grid_points,
                             "number of interior grid points");
    cmd_spectrum->add_option("--alphas", alphas,
                             "explicit alpha values (overrides --grid)");
    cmd_spectrum->add_option("--svg", svg_path,
                             "additionally write a static SVG of the curve");

    // gap
    auto* cmd_gap = app.add_subcommand(
        "gap", "Bowen dimension, recurrent dimension, drift and gap");

    // gap-sweep --cmin --cmax --steps
    auto* cmd_gap_sweep = app.add_subcommand(
        "gap-sweep", "sweep c -> (delta0(c,1-c), delta, gap) for two-branch walks");
    double cmin = 0.1, cmax = 0.9;
    int csteps = 17;
    cmd_gap_sweep->add_option("--cmin", cmin, "lower contraction bound");
    cmd_gap_sweep->add_option("--cmax", cmax, "upper contraction bound");
    cmd_gap_sweep->add_option("--steps", csteps, "number of sweep points");

    // zeta --alpha --K --n --s
    auto* cmd_zeta = app.add_subcommand(
        "zeta", "corridor partition sum zeta_n(s*phi, psi - alpha, K)");
    double za = 0.0, zK = 0.0, zs = 1.0;
    int zn = 10;
    cmd_zeta->add_option("--alpha", za, "drift offset");
    auto* zeta_k_opt =
        cmd_zeta->add_option("--K", zK, "corridor half-width (default max|m|+1)");
    cmd_zeta->add_option("--n", zn, "horizon");
    cmd_zeta->add_option("--s", zs, "exponent of the geometric potential");

    // simulate --measure --n --count --seed --alpha --K
    auto* cmd_simulate = app.add_subcommand(
        "simulate", "sample Gibbs-distributed orbits and recurrence statistics");
    std::string measure_spec = "bowen";
    int sim_n = 1000, sim_count = 1000;
    std::uint64_t sim_seed = 1;
    double sim_alpha = 0.0, sim_K = 5.0;
    cmd_simulate->add_option("--measure", measure_spec,
                             "uniform | bowen | phi:<s> | weights:p1,p2,...");
    cmd_simulate->add_option("--n", sim_n, "orbit horizon");
    cmd_simulate->add_option("--count", sim_count, "number of orbits");
    cmd_simulate->add_option("--seed", sim_seed, "stream seed");
    cmd_simulate->add_option("--alpha", sim_alpha, "drift offset for the proxies");
    cmd_simulate->add_option("--K", sim_K, "corridor half-width for the proxies");

    // verify [--quick]
    auto* cmd_verify = app.add_subcommand(
        "verify", "run the cross-method invariant suite");
    bool quick = false;
    cmd_verify->add_flag("--quick", quick, "reduced horizons and model counts");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    OutputSink sink{out_path};
    int potential_depth = 1;
    auto needs_model = [&]() -> BranchModel {
        if (model_spec.empty())
            throw RangeError("cli", "run", "this subcommand needs --model");
        if (std::filesystem::exists(model_spec)) {
            ModelFile mf = load_model_file(model_spec);
            potential_depth = mf.potential_depth;
            return mf.model;
        }
        return resolve_model(model_spec);
    };

    try {
        if (echo_config) {
            json cfg{{"model", model_spec}, {"format", format}};
            if (out_path) cfg["out"] = *out_path;
            std::fprintf(stderr, "%s\n", cfg.dump().c_str());
        }

        if (cmd_pressure->parsed()) {
            BranchModel model = needs_model();
            CylinderPotential pot =
                ps * model.geometric_potential() + pq * model.step_potential() + pa;
            // a model file may request deeper cylinder tables; for affine
            // branches the value is unchanged but the spectral route runs
            if (potential_depth > 1) pot = pot.lifted(potential_depth);
            PressureValue p = classical_pressure(pot);
            json j = pressure_to_json(p);
            j["s"] = ps; j["q"] = pq; j["a"] = pa;
            sink.emit(j.dump(2) + "\n");
        } else if (cmd_fibre->parsed()) {
            BranchModel model = needs_model();
            FibrePressureResult r = fibre_pressure(
                ft * model.geometric_potential(), model.step_potential());
            json j;
            j["t"] = ft;
            j["value"] = r.is_finite() ? json(r.value) : json("-inf");
            switch (r.regime) {
                case FibrePressureResult::Regime::interior: j["regime"] = "interior"; break;
                case FibrePressureResult::Regime::boundary_lower: j["regime"] = "boundary-lower"; break;
                case FibrePressureResult::Regime::boundary_upper: j["regime"] = "boundary-upper"; break;
                case FibrePressureResult::Regime::empty: j["regime"] = "empty"; break;
            }
            if (r.minimizer) j["minimizer_t"] = *r.minimizer;
            if (r.variance_at_minimizer) j["variance"] = *r.variance_at_minimizer;
            if (r.boundary_alphabet) {
                json syms = json::array();
                for (int s : r.boundary_alphabet->symbols()) syms.push_back(s);
                j["I0"] = syms;
            }
            sink.emit(j.dump(2) + "\n");
        } else if (cmd_spectrum->parsed()) {
            BranchModel model = needs_model();
            SpectrumCurve curve =
                alphas.empty() ? spectrum_sweep(model, grid_points)
                               : spectrum_sweep(model, alphas);
            if (svg_path) write_file_atomic(*svg_path, spectrum_svg(curve));
            bool as_json = format_opt->count() > 0 && format == "json";
            if (as_json) sink.emit(spectrum_json(curve).dump(2) + "\n");
            else sink.emit(spectrum_csv(curve));
        } else if (cmd_gap->parsed()) {
            BranchModel model = needs_model();
            GapReport g = drift_and_gap(model);
            json j{{"delta", g.delta},
                   {"delta0", g.delta0},
                   {"gap", g.gap},
                   {"drift", g.drift},
                   {"dim_recurrent", g.dim_recurrent},
                   {"dim_transient_plus", g.dim_transient_plus},
                   {"dim_transient_minus", g.dim_transient_minus}};
            sink.emit(j.dump(2) + "\n");
        } else if (cmd_gap_sweep->parsed()) {
            if (!(cmin > 0.0 && cmax < 1.0 && cmin <= cmax) || csteps < 1)
                throw RangeError("cli", "gap_sweep",
                                 "need 0 < cmin <= cmax < 1 and steps >= 1");
            std::ostringstream out;
            out << "c,delta0,delta,gap\n";
            for (int i = 0; i < csteps; ++i) {
                double t = csteps == 1 ? 0.5
                                       : static_cast<double>(i) / (csteps - 1);
                double c = cmin + t * (cmax - cmin);
                GapReport g = drift_and_gap(make_random_walk_model(c, 1.0 - c));
                out << csv_number(c) << ',' << csv_number(g.delta0) << ','
                    << csv_number(g.delta) << ',' << csv_number(g.gap) << '\n';
            }
            sink.emit(out.str());
        } else if (cmd_zeta->parsed()) {
            BranchModel model = needs_model();
            CylinderPotential psi = model.step_potential();
            double K = zeta_k_opt->count() > 0 ? zK : default_corridor_width(psi);
            CorridorTable t = corridor_partition(
                zs * model.geometric_potential(), psi, za, K, zn,
                /*keep_history=*/false);
            json j{{"alpha", za},      {"K", K},
                   {"n", zn},          {"s", zs},
                   {"zeta", t.zeta()}, {"log_zeta", t.log_zeta()},
                   {"normalized", t.log_zeta() / zn}};
            sink.emit(j.dump(2) + "\n");
        } else if (cmd_simulate->parsed()) {
            BranchModel model = needs_model();
            GibbsMeasure mu = measure_from_spec(measure_spec, model);
            OrbitBatch batch = sample_orbits(mu, model, sim_n, sim_count, sim_seed);
            RecurrenceStats st = recurrence_statistics(batch, sim_alpha, sim_K);
            json j{{"seed", sim_seed},
                   {"n", sim_n},
                   {"count", sim_count},
                   {"measure", measure_spec},
                   {"drift_hat", batch.drift_hat()},
                   {"drift_se", batch.drift_se()},
                   {"recur_frac", st.recurrent_fraction},
                   {"unif_frac", st.uniform_fraction}};
            sink.emit(j.dump(2) + "\n");
        } else if (cmd_verify->parsed()) {
            auto results = run_acceptance_criteria(quick);
            bool all_ok = true;
            std::ostringstream out;
            for (const auto& r : results) {
                all_ok = all_ok && r.passed;
                out << (r.passed ? "PASS" : "FAIL") << " criterion-" << r.id
                    << " " << r.name << " -- " << r.detail << "\n";
            }
            sink.emit(out.str());
            if (!all_ok) return 1;
        }
    } catch (const Error& e) {
        json err{{"module", e.module()},
                 {"operation", e.operation()},
                 {"error", e.kind()},
                 {"message", e.what()}};
        std::fprintf(stderr, "%s\n", err.dump().c_str());
        return e.module() == "cli" ? 2 : 3;
    } catch (const std::exception& e) {
        json err{{"module", "cli"}, {"operation", "run"},
                 {"error", "Unexpected"}, {"message", e.what()}};
        std::fprintf(stderr, "%s\n", err.dump().c_str());
        return 3;
    }
    return 0;
}
