#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "pressurelab/errors.hpp"
#include "pressurelab/word.hpp"

namespace pressurelab {

class CylinderPotential;  // potential.hpp

/// One affine full branch of the interval map: h_i(x) = left + contraction*x
/// maps [0,1] onto the branch interval, the map itself expands it back.
struct Branch {
    double contraction = 0.0;  // c_i in (0,1)
    int step = 0;              // integer displacement m_i of the lift
    double left = 0.0;         // left endpoint a_i of the branch interval
};

struct BranchSpec {
    double contraction = 0.0;
    int step = 0;
    std::optional<double> left;  // auto-packed left-to-right when absent
};

/// An expanding interval map with affine full branches together with the
/// integer step values of its lift. Immutable after construction; every
/// derived quantity (geometric potential, step potential, cylinder geometry)
/// is a pure function of this data.
class BranchModel {
public:
    static constexpr double kPackTolerance = 1e-12;

    static BranchModel build(const std::vector<BranchSpec>& specs) {
        const char* op = "build_model";
        if (specs.size() < 2)
            throw AlphabetError("symbolic-core", op,
                                "need at least 2 branches, got " +
                                    std::to_string(specs.size()));
        std::vector<Branch> branches;
        branches.reserve(specs.size());
        double packed = 0.0;  // next auto-pack position
        double csum = 0.0;
        for (const auto& s : specs) {
            if (!(s.contraction > 0.0) || !(s.contraction < 1.0))
                throw RangeError("symbolic-core", op,
                                 "contraction " + std::to_string(s.contraction) +
                                     " outside (0,1)");
            Branch b;
            b.contraction = s.contraction;
            b.step = s.step;
            b.left = s.left.value_or(packed);
            branches.push_back(b);
            packed = b.left + b.contraction;
            csum += s.contraction;
        }
        if (csum > 1.0 + kPackTolerance)
            throw RangeError("symbolic-core", op,
                             "contractions sum to " + std::to_string(csum) +
                                 " > 1");
        // Branch intervals [a_i, a_i + c_i] must have disjoint interiors and
        // stay inside [0,1]. Sort by left endpoint for the overlap scan but
        // keep the user's branch order for the alphabet.
        std::vector<const Branch*> sorted;
        for (const auto& b : branches) sorted.push_back(&b);
        std::sort(sorted.begin(), sorted.end(),
                  [](const Branch* a, const Branch* b) { return a->left < b->left; });
        double prev_right = 0.0;
        for (const Branch* b : sorted) {
            if (b->left < -kPackTolerance ||
                b->left + b->contraction > 1.0 + kPackTolerance)
                throw OverlapError("symbolic-core", op,
                                   "branch interval exceeds [0,1]");
            if (b->left < prev_right - kPackTolerance)
                throw OverlapError("symbolic-core", op,
                                   "branch intervals overlap near x = " +
                                       std::to_string(b->left));
            prev_right = b->left + b->contraction;
        }
        return BranchModel(std::move(branches));
    }

    int alphabet_size() const { return static_cast<int>(branches_.size()); }
    const std::vector<Branch>& branches() const { return branches_; }
    const Branch& branch(int symbol) const {
        return branches_[static_cast<std::size_t>(symbol - 1)];
    }
    double contraction(int symbol) const { return branch(symbol).contraction; }
    int step(int symbol) const { return branch(symbol).step; }

    /// |pi[w]| and the left endpoint of h_{w_1} o ... o h_{w_n}([0,1]).
    /// The composite of affine maps is affine; we fold offset and scale
    /// forward so length is exactly the product of contractions.
    struct CylinderGeometry {
        double length = 1.0;
        double left = 0.0;
    };
    CylinderGeometry cylinder_geometry(const Word& word) const {
        validate_word(word, alphabet_size(), "symbolic-core", "cylinder_geometry");
        CylinderGeometry g;
        for (int s : word) {
            const Branch& b = branch(s);
            g.left += g.length * b.left;
            g.length *= b.contraction;
        }
        return g;
    }

    // Potentials derived from the model (defined in potential.hpp to avoid a
    // circular include): phi([i]) = log c_i and psi([i]) = m_i.
    inline CylinderPotential geometric_potential() const;
    inline CylinderPotential step_potential() const;

    bool has_gaps() const {
        double csum = 0.0;
        for (const auto& b : branches_) csum += b.contraction;
        return csum < 1.0 - kPackTolerance;
    }

private:
    explicit BranchModel(std::vector<Branch> branches)
        : branches_(std::move(branches)) {}
    std::vector<Branch> branches_;
};

/// Convenience builders used throughout the tests and the CLI model registry.
inline BranchModel make_random_walk_model(double c1, double c2) {
    return BranchModel::build({{c1, -1, std::nullopt}, {c2, +1, std::nullopt}});
}

inline BranchModel make_stepped_model(double c, int m1, int m2) {
    return BranchModel::build({{c, m1, std::nullopt}, {c, m2, std::nullopt}});
}

/// g1 branches of step -1 followed by g2 branches of step +1, all with the
/// same contraction c (requires c*(g1+g2) <= 1).
inline BranchModel make_multibranch_model(double c, int g1, int g2) {
    if (g1 < 1 || g2 < 1)
        throw RangeError("symbolic-core", "build_model", "need g1, g2 >= 1");
    std::vector<BranchSpec> specs;
    for (int i = 0; i < g1; ++i) specs.push_back({c, -1, std::nullopt});
    for (int i = 0; i < g2; ++i) specs.push_back({c, +1, std::nullopt});
    return BranchModel::build(specs);
}

}  // namespace pressurelab
