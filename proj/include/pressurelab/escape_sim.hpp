#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "pressurelab/branch_model.hpp"
#include "pressurelab/corridor.hpp"
#include "pressurelab/errors.hpp"
#include "pressurelab/parallel.hpp"
#include "pressurelab/potential.hpp"
#include "pressurelab/pressure.hpp"
#include "pressurelab/rng.hpp"
#include "pressurelab/stats.hpp"

namespace pressurelab {

/// A reproducible batch of Gibbs-distributed symbol sequences with their lift
/// paths. Per-orbit streams are counter-based substreams of (seed, orbit
/// index), so the batch regenerates any orbit on demand: large batches keep
/// only summaries and statistics replay the streams instead of storing paths.
class OrbitBatch {
public:
    OrbitBatch(const GibbsMeasure& mu, const std::vector<int>& steps, int horizon,
               int count, std::uint64_t seed)
        : mu_(mu), steps_(steps), horizon_(horizon), count_(count), seed_(seed) {
        const char* op = "sample_orbits";
        if (horizon_ < 1 || count_ < 1)
            throw RangeError("escape-sim", op, "need horizon >= 1 and count >= 1");
        if (mu_.depth() > horizon_)
            throw DepthError("escape-sim", op, "horizon below measure depth");
        if (static_cast<long long>(mu_.alphabet_size()) !=
            static_cast<long long>(steps_.size()))
            throw AlphabetError("escape-sim", op, "step table size mismatch");
        // cumulative weights for the initial draw
        cumulative_.reserve(mu_.weights().size());
        double acc = 0.0;
        for (double w : mu_.weights()) {
            acc += w;
            cumulative_.push_back(acc);
        }
        constexpr long long kPathBudget = 1LL << 22;
        store_paths_ =
            static_cast<long long>(horizon_) * static_cast<long long>(count_) <=
            kPathBudget;
        final_levels_.assign(static_cast<std::size_t>(count_), 0);
        if (store_paths_)
            paths_.assign(static_cast<std::size_t>(count_),
                          std::vector<std::int8_t>());
        parallel_for(static_cast<std::size_t>(count_), [&](std::size_t o) {
            long long level = 0;
            std::vector<std::int8_t>* path =
                store_paths_ ? &paths_[o] : nullptr;
            if (path) path->reserve(static_cast<std::size_t>(horizon_));
            visit_orbit(static_cast<int>(o), [&](int, int symbol, long long lev) {
                level = lev;
                if (path)
                    path->push_back(static_cast<std::int8_t>(symbol));
            });
            final_levels_[o] = level;
        });
    }

    int horizon() const { return horizon_; }
    int count() const { return count_; }
    std::uint64_t seed() const { return seed_; }
    bool stores_paths() const { return store_paths_; }
    const GibbsMeasure& measure() const { return mu_; }
    const std::vector<long long>& final_levels() const { return final_levels_; }

    double drift_hat() const {
        double s = 0.0;
        for (long long v : final_levels_) s += static_cast<double>(v);
        return s / (static_cast<double>(count_) * static_cast<double>(horizon_));
    }

    /// Standard error of drift_hat from the sample variance of S_n / n.
    double drift_se() const {
        double mean = drift_hat() * horizon_;
        double ss = 0.0;
        for (long long v : final_levels_) {
            double d = static_cast<double>(v) - mean;
            ss += d * d;
        }
        double var = ss / (static_cast<double>(count_) - 1.0);
        return std::sqrt(var / static_cast<double>(count_)) /
               static_cast<double>(horizon_);
    }

    /// Replay one orbit through a visitor fn(j, symbol, level_after_j) for
    /// j = 1..horizon. Uses the stored path when available, otherwise the
    /// counter-based stream regenerates it bit-identically.
    template <typename Visitor>
    void visit_orbit(int orbit_index, Visitor&& fn) const {
        if (store_paths_ && !paths_.empty() &&
            !paths_[static_cast<std::size_t>(orbit_index)].empty()) {
            long long level = 0;
            const auto& p = paths_[static_cast<std::size_t>(orbit_index)];
            for (int j = 1; j <= horizon_; ++j) {
                int sym = p[static_cast<std::size_t>(j - 1)];
                level += steps_[static_cast<std::size_t>(sym - 1)];
                fn(j, sym, level);
            }
            return;
        }
        CounterRng rng(seed_, static_cast<std::uint64_t>(orbit_index));
        long long level = 0;
        if (mu_.depth() == 1) {
            for (int j = 1; j <= horizon_; ++j) {
                int sym = draw_from_cumulative(rng.next_double());
                level += steps_[static_cast<std::size_t>(sym - 1)];
                fn(j, sym, level);
            }
            return;
        }
        // Markov sampling: initial k-word from the stationary marginal, then
        // kernel steps
        std::size_t word = static_cast<std::size_t>(draw_from_cumulative(rng.next_double())) - 1;
        // emit the k initial symbols
        {
            Word w = word_from_index(word, mu_.depth(), mu_.alphabet_size());
            int j = 0;
            for (int sym : w) {
                ++j;
                level += steps_[static_cast<std::size_t>(sym - 1)];
                fn(j, sym, level);
            }
        }
        for (int j = mu_.depth() + 1; j <= horizon_; ++j) {
            double u = rng.next_double();
            auto succ = mu_.successors(word);
            double acc = 0.0;
            std::size_t chosen = succ.empty() ? word : succ.back().first;
            for (const auto& [nxt, q] : succ) {
                acc += q;
                if (u <= acc) {
                    chosen = nxt;
                    break;
                }
            }
            word = chosen;
            int sym = static_cast<int>(word % static_cast<std::size_t>(mu_.alphabet_size())) + 1;
            level += steps_[static_cast<std::size_t>(sym - 1)];
            fn(j, sym, level);
        }
    }

private:
    int draw_from_cumulative(double u) const {
        // linear scan; alphabets (and k-word tables) are small
        for (std::size_t i = 0; i < cumulative_.size(); ++i)
            if (u <= cumulative_[i]) return static_cast<int>(i) + 1;
        return static_cast<int>(cumulative_.size());
    }

    GibbsMeasure mu_;
    std::vector<int> steps_;
    int horizon_;
    int count_;
    std::uint64_t seed_;
    std::vector<double> cumulative_;
    bool store_paths_ = false;
    std::vector<std::vector<std::int8_t>> paths_;
    std::vector<long long> final_levels_;
};

inline OrbitBatch sample_orbits(const GibbsMeasure& mu, const BranchModel& model,
                                int horizon, int count, std::uint64_t seed) {
    std::vector<int> steps;
    for (const auto& b : model.branches()) steps.push_back(b.step);
    return OrbitBatch(mu, steps, horizon, count, seed);
}

/// Finite-horizon proxies for the escaping-set membership tests. Both flags
/// are declared proxies: "recurrent" asks for a corridor visit in the second
/// half of the horizon, "uniform" for the corridor to hold throughout.
struct RecurrenceStats {
    double recurrent_fraction = 0.0;
    double recurrent_se = 0.0;
    double uniform_fraction = 0.0;
    double uniform_se = 0.0;
    double mean_min_deviation = 0.0;  // mean over orbits of min_j |S_j - j a|
    int count = 0;
};

inline RecurrenceStats recurrence_statistics(const OrbitBatch& batch,
                                             double alpha, double K) {
    if (!(K >= 1.0))
        throw RangeError("escape-sim", "recurrence_statistics", "need K >= 1");
    const int n = batch.horizon();
    const int half = n / 2;
    std::vector<std::uint8_t> recur(static_cast<std::size_t>(batch.count()), 0);
    std::vector<std::uint8_t> unif(static_cast<std::size_t>(batch.count()), 0);
    std::vector<double> min_dev(static_cast<std::size_t>(batch.count()), 0.0);
    parallel_for(static_cast<std::size_t>(batch.count()), [&](std::size_t o) {
        bool hit_late = false;
        bool stayed = true;
        double mind = std::numeric_limits<double>::infinity();
        batch.visit_orbit(static_cast<int>(o), [&](int j, int, long long lev) {
            double dev = std::abs(static_cast<double>(lev) -
                                  static_cast<double>(j) * alpha);
            mind = std::min(mind, dev);
            if (dev > K) stayed = false;
            if (j >= half && dev <= K) hit_late = true;
        });
        recur[o] = hit_late ? 1 : 0;
        unif[o] = stayed ? 1 : 0;
        min_dev[o] = mind;
    });
    RecurrenceStats st;
    st.count = batch.count();
    double rsum = 0.0, usum = 0.0, msum = 0.0;
    for (std::size_t o = 0; o < recur.size(); ++o) {
        rsum += recur[o];
        usum += unif[o];
        msum += min_dev[o];
    }
    st.recurrent_fraction = rsum / st.count;
    st.uniform_fraction = usum / st.count;
    st.mean_min_deviation = msum / st.count;
    st.recurrent_se = binomial_standard_error(st.recurrent_fraction, st.count);
    st.uniform_se = binomial_standard_error(st.uniform_fraction, st.count);
    return st;
}

/// Fraction of orbits whose closest approach to the drift line is within
/// `threshold`; the statistical shadow of liminf |S_l psi| = 0 for zero-drift
/// measures.
inline double fraction_min_deviation_within(const OrbitBatch& batch, double alpha,
                                            double threshold) {
    std::vector<std::uint8_t> hit(static_cast<std::size_t>(batch.count()), 0);
    parallel_for(static_cast<std::size_t>(batch.count()), [&](std::size_t o) {
        double mind = std::numeric_limits<double>::infinity();
        batch.visit_orbit(static_cast<int>(o), [&](int j, int, long long lev) {
            mind = std::min(mind, std::abs(static_cast<double>(lev) -
                                           static_cast<double>(j) * alpha));
        });
        hit[o] = mind <= threshold ? 1 : 0;
    });
    double s = 0.0;
    for (auto h : hit) s += h;
    return s / batch.count();
}

/// Exact law of the lift level S_n psi under the Gibbs measure: the corridor
/// DP run with probability weights. Depth-1 measures walk i.i.d. symbols;
/// deeper measures walk the k-word kernel from the stationary marginal.
struct LevelDistribution {
    int horizon = 0;
    long long level_lo = 0;
    std::vector<double> mass;  // index level - level_lo

    double mass_at(long long level) const {
        if (level < level_lo ||
            level >= level_lo + static_cast<long long>(mass.size()))
            return 0.0;
        return mass[static_cast<std::size_t>(level - level_lo)];
    }
    double total() const {
        double s = 0.0;
        for (double v : mass) s += v;
        return s;
    }
};

inline LevelDistribution exact_level_distribution(const GibbsMeasure& mu,
                                                  const std::vector<int>& steps,
                                                  int n) {
    const char* op = "exact_level_distribution";
    if (n < 1) throw RangeError("escape-sim", op, "need n >= 1");
    if (static_cast<std::size_t>(mu.alphabet_size()) != steps.size())
        throw AlphabetError("escape-sim", op, "step table size mismatch");
    int min_step = *std::min_element(steps.begin(), steps.end());
    int max_step = *std::max_element(steps.begin(), steps.end());
    const std::size_t width =
        static_cast<std::size_t>(static_cast<long long>(n) * (max_step - min_step) + 1);
    constexpr std::size_t kEntryCap = std::size_t{1} << 24;
    const int k = mu.depth();
    if (k == 1) {
        if (width > kEntryCap)
            throw WidthError("escape-sim", op, "level range exceeds memory cap");
        LevelDistribution d;
        d.horizon = n;
        d.level_lo = static_cast<long long>(n) * min_step;
        std::vector<double> cur(1, 1.0);
        long long lo = 0;
        const auto& p = mu.weights();
        for (int j = 0; j < n; ++j) {
            std::vector<double> nxt(cur.size() + static_cast<std::size_t>(max_step - min_step), 0.0);
            long long nlo = lo + min_step;
            for (std::size_t i = 0; i < cur.size(); ++i) {
                if (cur[i] == 0.0) continue;
                long long lev = lo + static_cast<long long>(i);
                for (std::size_t s = 0; s < p.size(); ++s) {
                    if (p[s] == 0.0) continue;
                    nxt[static_cast<std::size_t>(lev + steps[s] - nlo)] +=
                        cur[i] * p[s];
                }
            }
            cur = std::move(nxt);
            lo = nlo;
        }
        d.mass = std::move(cur);
        d.level_lo = lo;
        return d;
    }
    if (n < k) throw DepthError("escape-sim", op, "horizon below measure depth");
    const std::size_t n_words = mu.weights().size();
    if (width * n_words > kEntryCap)
        throw WidthError("escape-sim", op, "level range exceeds memory cap");
    // state: (level, current k-word); seed at j = k from the marginal
    long long lo = static_cast<long long>(k) * min_step;
    std::size_t w0 = static_cast<std::size_t>(static_cast<long long>(k) *
                                              (max_step - min_step) + 1);
    std::vector<double> cur(w0 * n_words, 0.0);
    for (std::size_t w = 0; w < n_words; ++w) {
        if (mu.weights()[w] == 0.0) continue;
        Word word = word_from_index(w, k, mu.alphabet_size());
        long long lev = 0;
        for (int s : word) lev += steps[static_cast<std::size_t>(s - 1)];
        cur[static_cast<std::size_t>(lev - lo) * n_words + w] += mu.weights()[w];
    }
    for (int j = k; j < n; ++j) {
        std::size_t wj = static_cast<std::size_t>(static_cast<long long>(j) *
                                                  (max_step - min_step) + 1);
        std::size_t wn = wj + static_cast<std::size_t>(max_step - min_step);
        long long nlo = lo + min_step;
        std::vector<double> nxt(wn * n_words, 0.0);
        for (std::size_t idx = 0; idx < cur.size(); ++idx) {
            double v = cur[idx];
            if (v == 0.0) continue;
            std::size_t w = idx % n_words;
            long long lev = lo + static_cast<long long>(idx / n_words);
            for (const auto& [nw, q] : mu.successors(w)) {
                int sym = static_cast<int>(nw % static_cast<std::size_t>(mu.alphabet_size())) + 1;
                long long nl = lev + steps[static_cast<std::size_t>(sym - 1)];
                nxt[static_cast<std::size_t>(nl - nlo) * n_words + nw] += v * q;
            }
        }
        cur = std::move(nxt);
        lo = nlo;
    }
    LevelDistribution d;
    d.horizon = n;
    d.level_lo = lo;
    std::size_t wfinal = cur.size() / n_words;
    d.mass.assign(wfinal, 0.0);
    for (std::size_t i = 0; i < wfinal; ++i) {
        double s = 0.0;
        for (std::size_t w = 0; w < n_words; ++w) s += cur[i * n_words + w];
        d.mass[i] = s;
    }
    return d;
}

inline LevelDistribution exact_level_distribution(const GibbsMeasure& mu,
                                                  const BranchModel& model,
                                                  int n) {
    std::vector<int> steps;
    for (const auto& b : model.branches()) steps.push_back(b.step);
    return exact_level_distribution(mu, steps, n);
}

/// Iterate the skew-periodic lift: x -> floor(x) + F(frac) + step. The
/// excluded countable set of branch endpoints is operationalized as a 1e-12
/// guard band; falling into a gap of the repeller or into the band raises
/// EscapeFromRepellerError.
inline std::vector<double> iterate_interval_map(const BranchModel& model,
                                                double x0, int n) {
    const char* op = "iterate_interval_map";
    if (n < 0) throw RangeError("escape-sim", op, "need n >= 0");
    constexpr double kBand = 1e-12;
    std::vector<double> orbit;
    orbit.reserve(static_cast<std::size_t>(n) + 1);
    orbit.push_back(x0);
    double x = x0;
    for (int j = 0; j < n; ++j) {
        double base = std::floor(x);
        double frac = x - base;
        const Branch* hit = nullptr;
        for (const auto& b : model.branches()) {
            if (frac > b.left + kBand && frac < b.left + b.contraction - kBand) {
                hit = &b;
                break;
            }
        }
        if (hit == nullptr)
            throw EscapeFromRepellerError(
                "escape-sim", op,
                "point " + std::to_string(x) +
                    " is in a gap or within 1e-12 of a branch boundary");
        x = base + (frac - hit->left) / hit->contraction +
            static_cast<double>(hit->step);
        orbit.push_back(x);
    }
    return orbit;
}

/// Floating-point conjugacy check between the interval-map lift and the
/// symbolic skew product: max_j |F^j(pi(w) + l) - (pi(sigma^j w) + l + S_j psi)|.
/// Cylinder widths must reach 1e-13 so the coding points are sharp.
inline double conjugacy_check(const BranchModel& model, const Word& prefix,
                              long long ell, int n) {
    const char* op = "conjugacy_check";
    validate_word(prefix, model.alphabet_size(), "escape-sim", op);
    if (n < 0) throw RangeError("escape-sim", op, "need n >= 0");
    if (static_cast<std::size_t>(n) >= prefix.size())
        throw PrecisionError("escape-sim", op, "prefix shorter than the horizon");
    // the initial coding point must be pinned to 1e-13; the shifted suffixes
    // only need enough width headroom below the 1e-9 deviation target
    auto coding_point = [&](int shift, double width_cap) {
        Word suffix(prefix.begin() + shift, prefix.end());
        auto g = model.cylinder_geometry(suffix);
        if (g.length >= width_cap)
            throw PrecisionError("escape-sim", op,
                                 "cylinder width " + std::to_string(g.length) +
                                     " cannot pin the coding point within the "
                                     "available prefix");
        return g.left + 0.5 * g.length;
    };
    double x0 = coding_point(0, 1e-13) + static_cast<double>(ell);
    std::vector<double> orbit = iterate_interval_map(model, x0, n);
    double dev = 0.0;
    long long lift = ell;
    for (int j = 0; j <= n; ++j) {
        if (j > 0)
            lift += model.step(prefix[static_cast<std::size_t>(j - 1)]);
        double expected = coding_point(j, 1e-10) + static_cast<double>(lift);
        dev = std::max(dev, std::abs(orbit[static_cast<std::size_t>(j)] - expected));
    }
    return dev;
}

/// Hausdorff-cover sum over the corridor: sum of |pi[w]|^s for words in
/// C_n(psi - alpha, K); decays for s above the alpha-Poincare exponent and
/// grows below it.
inline double log_cover_sum(const BranchModel& model, double alpha, double K,
                            int n, double s) {
    if (s < 0.0)
        throw RangeError("escape-sim", "cover_sum", "need s >= 0");
    CylinderPotential f = s * model.geometric_potential();
    CylinderPotential psi = model.step_potential();
    auto steps = detail::integer_steps(psi, "escape-sim", "cover_sum");
    detail::LatticeWalkDp dp(f, steps);
    while (dp.horizon() < n) dp.step();
    return dp.log_corridor_sum(alpha, K);
}

inline double cover_sum(const BranchModel& model, double alpha, double K, int n,
                        double s) {
    return std::exp(log_cover_sum(model, alpha, K, n, s));
}

}  // namespace pressurelab
