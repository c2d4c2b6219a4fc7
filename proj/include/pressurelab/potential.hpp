#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "pressurelab/branch_model.hpp"
#include "pressurelab/errors.hpp"
#include "pressurelab/word.hpp"

namespace pressurelab {

/// A real-valued potential on the full shift that is constant on cylinders of
/// a fixed depth k. The value table is total: one finite entry per word in
/// I^k, indexed base-|I|. Depth-1 potentials are functions of the first
/// symbol only and have distortion constant zero.
class CylinderPotential {
public:
    CylinderPotential(int alphabet_size, int depth, std::vector<double> values)
        : alphabet_(alphabet_size), depth_(depth), values_(std::move(values)) {
        const char* op = "CylinderPotential";
        if (alphabet_ < 1)
            throw AlphabetError("symbolic-core", op, "alphabet must be >= 1");
        if (depth_ < 1)
            throw DepthError("symbolic-core", op, "depth must be >= 1");
        if (values_.size() != pow_size(alphabet_, depth_))
            throw RangeError("symbolic-core", op,
                             "value table needs " +
                                 std::to_string(pow_size(alphabet_, depth_)) +
                                 " entries, got " + std::to_string(values_.size()));
        for (double v : values_)
            if (!std::isfinite(v))
                throw RangeError("symbolic-core", op, "non-finite table entry");
    }

    static CylinderPotential depth1(std::vector<double> values) {
        int a = static_cast<int>(values.size());
        return CylinderPotential(a, 1, std::move(values));
    }

    int alphabet_size() const { return alphabet_; }
    int depth() const { return depth_; }
    const std::vector<double>& values() const { return values_; }

    double value_at(std::size_t index) const { return values_[index]; }

    /// Value on the cylinder of `word`; requires |word| == depth.
    double value(const Word& word) const {
        if (static_cast<int>(word.size()) != depth_)
            throw DepthError("symbolic-core", "value",
                             "cylinder word length " + std::to_string(word.size()) +
                                 " != depth " + std::to_string(depth_));
        validate_word(word, alphabet_, "symbolic-core", "value");
        return values_[word_index(word, alphabet_)];
    }

    double min_value() const {
        return *std::min_element(values_.begin(), values_.end());
    }
    double max_value() const {
        return *std::max_element(values_.begin(), values_.end());
    }

    /// sup over completions: max of the table over k-words starting with the
    /// given prefix (|prefix| <= depth).
    double sup_over_prefix(const Word& prefix) const {
        validate_word(prefix, alphabet_, "symbolic-core", "sup_over_prefix");
        int missing = depth_ - static_cast<int>(prefix.size());
        if (missing < 0)
            throw DepthError("symbolic-core", "sup_over_prefix",
                             "prefix longer than depth");
        std::size_t base = word_index(prefix, alphabet_) * pow_size(alphabet_, missing);
        std::size_t count = pow_size(alphabet_, missing);
        double m = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < count; ++i) m = std::max(m, values_[base + i]);
        return m;
    }

    /// Same potential viewed on deeper cylinders: the value on a K-cylinder is
    /// the value on its depth-k prefix.
    CylinderPotential lifted(int new_depth) const {
        if (new_depth < depth_)
            throw DepthError("symbolic-core", "lifted",
                             "cannot lower depth from " + std::to_string(depth_) +
                                 " to " + std::to_string(new_depth));
        if (new_depth == depth_) return *this;
        std::size_t reps = pow_size(alphabet_, new_depth - depth_);
        std::vector<double> out;
        out.reserve(values_.size() * reps);
        for (double v : values_)
            for (std::size_t r = 0; r < reps; ++r) out.push_back(v);
        return CylinderPotential(alphabet_, new_depth, std::move(out));
    }

    CylinderPotential& operator+=(double c) {
        for (double& v : values_) v += c;
        return *this;
    }
    CylinderPotential& operator*=(double s) {
        for (double& v : values_) v *= s;
        return *this;
    }
    friend CylinderPotential operator+(CylinderPotential f, double c) {
        f += c;
        return f;
    }
    friend CylinderPotential operator-(CylinderPotential f, double c) {
        f += -c;
        return f;
    }
    friend CylinderPotential operator*(double s, CylinderPotential f) {
        f *= s;
        return f;
    }
    friend CylinderPotential operator+(const CylinderPotential& f,
                                       const CylinderPotential& g) {
        if (f.alphabet_ != g.alphabet_)
            throw AlphabetError("symbolic-core", "operator+",
                                "mismatched alphabets");
        int d = std::max(f.depth_, g.depth_);
        CylinderPotential a = f.lifted(d);
        CylinderPotential b = g.lifted(d);
        for (std::size_t i = 0; i < a.values_.size(); ++i)
            a.values_[i] += b.values_[i];
        return a;
    }

    /// True when every table entry is within `tol` of an integer.
    bool is_integer_valued(double tol = 1e-9) const {
        for (double v : values_)
            if (std::abs(v - std::round(v)) > tol) return false;
        return true;
    }

private:
    int alphabet_;
    int depth_;
    std::vector<double> values_;
};

inline CylinderPotential BranchModel::geometric_potential() const {
    std::vector<double> v;
    v.reserve(branches_.size());
    for (const auto& b : branches_) v.push_back(std::log(b.contraction));
    return CylinderPotential::depth1(std::move(v));
}

inline CylinderPotential BranchModel::step_potential() const {
    std::vector<double> v;
    v.reserve(branches_.size());
    for (const auto& b : branches_) v.push_back(static_cast<double>(b.step));
    return CylinderPotential::depth1(std::move(v));
}

/// Birkhoff sum S_w f over the word w with the sup-over-cylinder convention:
/// windows that fit entirely inside w contribute exact table values, the
/// final depth-1 truncated suffixes contribute the maximum over completions.
/// Undefined (DepthError) for 1 <= |w| < depth; S over the empty word is 0.
inline double birkhoff_sum(const CylinderPotential& f, const Word& word) {
    const char* op = "birkhoff_sum";
    if (word.empty()) return 0.0;
    validate_word(word, f.alphabet_size(), "symbolic-core", op);
    int n = static_cast<int>(word.size());
    int k = f.depth();
    if (n < k)
        throw DepthError("symbolic-core", op,
                         "word length " + std::to_string(n) +
                             " below potential depth " + std::to_string(k));
    double sum = 0.0;
    if (k == 1) {
        for (int s : word) sum += f.value_at(static_cast<std::size_t>(s - 1));
        return sum;
    }
    Word window(word.begin(), word.begin() + k);
    sum += f.value(window);
    for (int j = 1; j + k <= n; ++j) {
        window.assign(word.begin() + j, word.begin() + j + k);
        sum += f.value(window);
    }
    for (int j = n - k + 1; j < n; ++j) {
        Word suffix(word.begin() + j, word.end());
        sum += f.sup_over_prefix(suffix);
    }
    return sum;
}

/// The closed range [psi_lower, psi_upper] of asymptotic Birkhoff averages
/// S_n psi / n over the full shift.
struct PsiBounds {
    double lower = 0.0;
    double upper = 0.0;
    bool contains(double a, double tol = 0.0) const {
        return a >= lower - tol && a <= upper + tol;
    }
    bool strictly_contains(double a, double tol = 0.0) const {
        return a > lower + tol && a < upper - tol;
    }
};

namespace detail {

/// Karp's minimum mean cycle on a strongly connected graph given by successor
/// lists with edge weights. Returns min over cycles of (cycle weight)/(cycle
/// length). The de Bruijn graph of a full shift is strongly connected, so the
/// single-source formulation applies directly.
inline double karp_min_mean_cycle(std::size_t n_states,
                                  const std::vector<std::vector<std::pair<std::size_t, double>>>& out_edges) {
    const double inf = std::numeric_limits<double>::infinity();
    // D[t][v]: minimum weight of a t-edge walk from state 0 to v.
    std::vector<std::vector<double>> D(n_states + 1,
                                       std::vector<double>(n_states, inf));
    D[0][0] = 0.0;
    for (std::size_t t = 0; t < n_states; ++t) {
        for (std::size_t u = 0; u < n_states; ++u) {
            if (D[t][u] == inf) continue;
            for (const auto& [v, w] : out_edges[u]) {
                double cand = D[t][u] + w;
                if (cand < D[t + 1][v]) D[t + 1][v] = cand;
            }
        }
    }
    double best = inf;
    for (std::size_t v = 0; v < n_states; ++v) {
        if (D[n_states][v] == inf) continue;
        double worst = -inf;
        for (std::size_t t = 0; t < n_states; ++t) {
            if (D[t][v] == inf) continue;
            worst = std::max(worst, (D[n_states][v] - D[t][v]) /
                                        static_cast<double>(n_states - t));
        }
        if (worst > -inf) best = std::min(best, worst);
    }
    return best;
}

}  // namespace detail

/// Extreme asymptotic step averages. Depth 1: min/max of the value table.
/// Depth k: extreme mean cycle weights in the de Bruijn graph on I^k states
/// (each k-word carries its own table value; shift-successor edges), since the
/// Birkhoff-average extremes of a cylinder-constant potential are realized on
/// periodic orbits.
inline PsiBounds psi_bounds(const CylinderPotential& psi) {
    if (psi.depth() == 1) return {psi.min_value(), psi.max_value()};
    int a = psi.alphabet_size();
    int k = psi.depth();
    std::size_t n_states = pow_size(a, k);
    std::size_t suffix_span = pow_size(a, k - 1);
    // Edge u -> v when v is a shift-successor of u; weight = value at the
    // target so an L-cycle accumulates each visited state's value once.
    std::vector<std::vector<std::pair<std::size_t, double>>> lo_edges(n_states);
    std::vector<std::vector<std::pair<std::size_t, double>>> hi_edges(n_states);
    for (std::size_t u = 0; u < n_states; ++u) {
        std::size_t suffix = u % suffix_span;
        for (int s = 0; s < a; ++s) {
            std::size_t v = suffix * static_cast<std::size_t>(a) +
                            static_cast<std::size_t>(s);
            lo_edges[u].push_back({v, psi.value_at(v)});
            hi_edges[u].push_back({v, -psi.value_at(v)});
        }
    }
    double lo = detail::karp_min_mean_cycle(n_states, lo_edges);
    double hi = -detail::karp_min_mean_cycle(n_states, hi_edges);
    return {lo, hi};
}

}  // namespace pressurelab
