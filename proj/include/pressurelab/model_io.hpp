#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pressurelab/branch_model.hpp"
#include "pressurelab/errors.hpp"

namespace pressurelab {

/// Numbers in files are serialized with 17 significant digits so doubles
/// round-trip exactly.
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct ModelFile {
    BranchModel model;
    int potential_depth = 1;
};

/// Model file grammar (JSON):
///   { "branches": [ {"c": <float>, "step": <int>, "left": <float, optional>},
///                   ... ],
///     "potential_depth": <int, optional, default 1> }
inline ModelFile parse_model_json(const nlohmann::json& j) {
    const char* op = "parse_model";
    if (!j.is_object() || !j.contains("branches") || !j["branches"].is_array())
        throw RangeError("cli", op, "model file needs a 'branches' array");
    std::vector<BranchSpec> specs;
    for (const auto& b : j["branches"]) {
        if (!b.is_object() || !b.contains("c") || !b.contains("step"))
            throw RangeError("cli", op, "each branch needs fields 'c' and 'step'");
        BranchSpec s;
        s.contraction = b["c"].get<double>();
        if (!b["step"].is_number_integer())
            throw RangeError("cli", op, "branch 'step' must be an integer");
        s.step = b["step"].get<int>();
        if (b.contains("left")) s.left = b["left"].get<double>();
        specs.push_back(s);
    }
    int depth = 1;
    if (j.contains("potential_depth")) {
        if (!j["potential_depth"].is_number_integer())
            throw RangeError("cli", op, "'potential_depth' must be an integer");
        depth = j["potential_depth"].get<int>();
        if (depth < 1) throw RangeError("cli", op, "'potential_depth' must be >= 1");
    }
    return {BranchModel::build(specs), depth};
}

inline ModelFile load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw RangeError("cli", "parse_model", "cannot open model file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw RangeError("cli", "parse_model",
                         "model file is not valid JSON: " + std::string(e.what()));
    }
    return parse_model_json(j);
}

inline nlohmann::json model_to_json(const BranchModel& model,
                                    int potential_depth = 1) {
    nlohmann::json j;
    j["branches"] = nlohmann::json::array();
    for (const auto& b : model.branches()) {
        nlohmann::json jb;
        jb["c"] = b.contraction;
        jb["step"] = b.step;
        jb["left"] = b.left;
        j["branches"].push_back(jb);
    }
    j["potential_depth"] = potential_depth;
    return j;
}

/// Built-in model names for quick CLI runs:
///   rw_<c1>_<c2>          two branches, steps (-1, +1)
///   stepped_<c>_<m1>_<m2> equal contractions, explicit steps
///   multi_<c>_<g1>_<g2>   g1 branches of step -1 then g2 of step +1
inline std::optional<BranchModel> builtin_model(const std::string& name) {
    auto split = [](const std::string& s) {
        std::vector<std::string> parts;
        std::stringstream ss(s);
        std::string item;
        while (std::getline(ss, item, '_')) parts.push_back(item);
        return parts;
    };
    auto parts = split(name);
    try {
        if (parts.size() == 3 && parts[0] == "rw")
            return make_random_walk_model(std::stod(parts[1]), std::stod(parts[2]));
        if (parts.size() == 4 && parts[0] == "stepped")
            return make_stepped_model(std::stod(parts[1]), std::stoi(parts[2]),
                                      std::stoi(parts[3]));
        if (parts.size() == 4 && parts[0] == "multi")
            return make_multibranch_model(std::stod(parts[1]), std::stoi(parts[2]),
                                          std::stoi(parts[3]));
    } catch (const std::invalid_argument&) {
        return std::nullopt;
    } catch (const std::out_of_range&) {
        return std::nullopt;
    }
    return std::nullopt;
}

/// Resolve --model arguments: an existing file path wins, otherwise the
/// built-in registry is consulted.
inline BranchModel resolve_model(const std::string& spec) {
    if (std::filesystem::exists(spec)) return load_model_file(spec).model;
    if (auto m = builtin_model(spec)) return *m;
    throw RangeError("cli", "parse_model",
                     "'" + spec + "' is neither a model file nor a built-in name");
}

/// Atomic output: write to a sibling temp file, then rename over the target,
/// so a failed run never leaves a partial artifact.
inline void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp);
        if (!out)
            throw RangeError("cli", "write_output", "cannot open " + tmp.string());
        out << content;
        if (!out.good())
            throw RangeError("cli", "write_output", "failed writing " + tmp.string());
    }
    fs::rename(tmp, target);
}

}  // namespace pressurelab
