#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "pressurelab/model_io.hpp"
#include "pressurelab/stats.hpp"

using namespace pressurelab;
using Catch::Approx;

TEST_CASE("model files round-trip exactly") {
    BranchModel m = BranchModel::build({{0.123456789012345678, -2, std::nullopt},
                                        {0.4, 3, 0.2}});
    nlohmann::json j = model_to_json(m, 2);
    ModelFile back = parse_model_json(j);
    REQUIRE(back.model.alphabet_size() == 2);
    CHECK(back.potential_depth == 2);
    for (int i = 1; i <= 2; ++i) {
        CHECK(back.model.contraction(i) == m.contraction(i));  // bit-exact
        CHECK(back.model.step(i) == m.step(i));
        CHECK(back.model.branch(i).left == m.branch(i).left);
    }
}

TEST_CASE("model file parsing reports schema violations") {
    CHECK_THROWS_AS(parse_model_json(nlohmann::json::object()), RangeError);
    nlohmann::json bad = {{"branches", {{{"c", 0.5}}}}};
    CHECK_THROWS_AS(parse_model_json(bad), RangeError);
    nlohmann::json fractional_step = {
        {"branches",
         {{{"c", 0.5}, {"step", 1.5}}, {{"c", 0.4}, {"step", 1}}}}};
    CHECK_THROWS_AS(parse_model_json(fractional_step), RangeError);
    nlohmann::json bad_depth = {{"branches",
                                 {{{"c", 0.5}, {"step", -1}},
                                  {{"c", 0.4}, {"step", 1}}}},
                                {"potential_depth", 0}};
    CHECK_THROWS_AS(parse_model_json(bad_depth), RangeError);
}

TEST_CASE("model loading from disk and atomic writes") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "pressurelab_test_io";
    fs::create_directories(dir);
    fs::path model_path = dir / "model.json";
    write_file_atomic(model_path.string(),
                      model_to_json(make_random_walk_model(0.4, 0.6)).dump(2));
    CHECK_FALSE(fs::exists(model_path.string() + ".tmp"));
    ModelFile mf = load_model_file(model_path.string());
    CHECK(mf.model.contraction(1) == 0.4);
    CHECK(mf.model.step(1) == -1);

    CHECK_THROWS_AS(load_model_file((dir / "missing.json").string()), RangeError);
    std::ofstream garbage(dir / "garbage.json");
    garbage << "not json at all {";
    garbage.close();
    CHECK_THROWS_AS(load_model_file((dir / "garbage.json").string()), RangeError);
    fs::remove_all(dir);
}

TEST_CASE("built-in model registry") {
    auto rw = builtin_model("rw_0.5_0.5");
    REQUIRE(rw.has_value());
    CHECK(rw->alphabet_size() == 2);
    CHECK(rw->step(1) == -1);

    auto stepped = builtin_model("stepped_0.5_0_1");
    REQUIRE(stepped.has_value());
    CHECK(stepped->step(1) == 0);
    CHECK(stepped->step(2) == 1);

    auto multi = builtin_model("multi_0.333333333333333_1_2");
    REQUIRE(multi.has_value());
    CHECK(multi->alphabet_size() == 3);

    CHECK_FALSE(builtin_model("nonsense").has_value());
    CHECK_FALSE(builtin_model("rw_half_half").has_value());
    CHECK_THROWS_AS(resolve_model("definitely_not_a_model"), RangeError);
}

TEST_CASE("17-digit formatting round-trips doubles") {
    for (double v : {0.1, 1.0 / 3.0, 0.9713954686603362, -2.5e-13}) {
        std::string s = format_double(v);
        CHECK(std::stod(s) == v);
    }
}

TEST_CASE("chi-square survival function against pinned values") {
    // classical table values: P(X^2_1 > 3.841) ~ 0.05, P(X^2_10 > 18.307) ~ 0.05
    CHECK(chi_square_sf(3.841458820694124, 1) == Approx(0.05).margin(1e-9));
    CHECK(chi_square_sf(18.307038053275146, 10) == Approx(0.05).margin(1e-9));
    CHECK(chi_square_sf(0.0, 5) == 1.0);
    // the test statistic for identical observed/expected is zero
    ChiSquareResult r = chi_square_test({10, 20, 30}, {10, 20, 30});
    CHECK(r.statistic == 0.0);
    CHECK(r.p_value == Approx(1.0).margin(1e-12));
}
