#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "pressurelab/errors.hpp"
#include "pressurelab/potential.hpp"
#include "pressurelab/word.hpp"

namespace pressurelab {

namespace detail {

/// Dynamic program over integer lift levels: advances the weighted word
/// counts Z_j(m) one symbol at a time, never enumerating I^n. Levels stay
/// integral; a real drift offset alpha only enters through the corridor test
/// |m - j*alpha| <= K at readout. Rows are kept normalized to max 1 with an
/// accumulated log scale so long horizons cannot overflow.
///
/// Depth-k weight potentials add a (k-1)-suffix component to the state; the
/// sup-over-cylinder tail corrections enter at readout only.
class LatticeWalkDp {
public:
    LatticeWalkDp(const CylinderPotential& f, const std::vector<int>& steps)
        : alphabet_(static_cast<int>(steps.size())),
          depth_(f.depth()),
          steps_(steps),
          shift_(f.max_value()) {
        if (f.alphabet_size() != alphabet_)
            throw AlphabetError("fibre-pressure", "corridor_partition",
                                "step count does not match potential alphabet");
        min_step_ = *std::min_element(steps_.begin(), steps_.end());
        max_step_ = *std::max_element(steps_.begin(), steps_.end());
        n_states_ = pow_size(alphabet_, depth_ - 1);
        // edge weight for appending symbol s after suffix u
        edge_.assign(n_states_ * static_cast<std::size_t>(alphabet_), 0.0);
        for (std::size_t u = 0; u < n_states_; ++u)
            for (int s = 0; s < alphabet_; ++s) {
                std::size_t w = u * static_cast<std::size_t>(alphabet_) +
                                static_cast<std::size_t>(s);
                edge_[w] = std::exp(f.value_at(w) - shift_);
            }
        // tail corrections per final suffix state
        tail_.assign(n_states_, 1.0);
        if (depth_ >= 2) {
            for (std::size_t u = 0; u < n_states_; ++u) {
                Word w = word_from_index(u, depth_ - 1, alphabet_);
                double t = 0.0;
                for (int drop = 0; drop < depth_ - 1; ++drop) {
                    Word suffix(w.begin() + drop, w.end());
                    t += f.sup_over_prefix(suffix) - shift_;
                }
                tail_[u] = std::exp(t);
            }
        }
        reset();
    }

    void reset() {
        j_ = depth_ - 1;
        log_scale_ = static_cast<double>(j_) * shift_;
        // consume the first depth-1 symbols: they carry steps but no window
        lo_ = 0;
        if (depth_ == 1) {
            row_.assign(1, 1.0);
        } else {
            lo_ = static_cast<long long>(j_) * min_step_;
            std::size_t width =
                static_cast<std::size_t>(static_cast<long long>(j_) *
                                             (max_step_ - min_step_) + 1);
            row_.assign(width * n_states_, 0.0);
            std::size_t count = pow_size(alphabet_, depth_ - 1);
            for (std::size_t u = 0; u < count; ++u) {
                Word w = word_from_index(u, depth_ - 1, alphabet_);
                long long lev = 0;
                for (int s : w) lev += steps_[static_cast<std::size_t>(s - 1)];
                at(lev, u) += 1.0;
            }
        }
    }

    int horizon() const { return j_; }
    long long level_lo() const { return lo_; }
    long long level_hi() const {
        return lo_ + static_cast<long long>(width()) - 1;
    }
    std::size_t width() const { return row_.size() / n_states_; }
    double log_scale() const { return log_scale_; }

    /// Advance one symbol. Throws WidthError past the configured memory cap.
    void step() {
        constexpr std::size_t kEntryCap = std::size_t{1} << 24;
        long long new_lo = lo_ + min_step_;
        std::size_t new_width = width() + static_cast<std::size_t>(max_step_ - min_step_);
        if (new_width * n_states_ > kEntryCap)
            throw WidthError("fibre-pressure", "corridor_partition",
                             "level range exceeds the memory cap");
        std::vector<double> next(new_width * n_states_, 0.0);
        const std::size_t a = static_cast<std::size_t>(alphabet_);
        const std::size_t suffix_span =
            depth_ >= 2 ? pow_size(alphabet_, depth_ - 2) : 1;
        for (std::size_t idx = 0; idx < row_.size(); ++idx) {
            double val = row_[idx];
            if (val == 0.0) continue;
            std::size_t u = idx % n_states_;
            long long lev = lo_ + static_cast<long long>(idx / n_states_);
            for (std::size_t s = 0; s < a; ++s) {
                std::size_t w = u * a + s;
                double we = edge_[w];
                if (we == 0.0) continue;
                std::size_t v = depth_ == 1 ? 0 : (u % suffix_span) * a + s;
                long long nl = lev + steps_[s];
                next[static_cast<std::size_t>(nl - new_lo) * n_states_ + v] +=
                    val * we;
            }
        }
        row_ = std::move(next);
        lo_ = new_lo;
        ++j_;
        log_scale_ += shift_;
        double mx = 0.0;
        for (double v : row_) mx = std::max(mx, v);
        if (mx > 0.0 && (mx > 1e100 || mx < 1e-100)) {
            for (double& v : row_) v /= mx;
            log_scale_ += std::log(mx);
        }
    }

    /// Zero all mass outside |m - j*alpha| <= K (per-step corridor policy).
    void apply_corridor(double alpha, double K) {
        double center = static_cast<double>(j_) * alpha;
        for (std::size_t idx = 0; idx < row_.size(); ++idx) {
            long long lev = lo_ + static_cast<long long>(idx / n_states_);
            if (std::abs(static_cast<double>(lev) - center) > K + 1e-12)
                row_[idx] = 0.0;
        }
    }

    /// Level marginal including tail corrections, as value * exp(log_scale).
    double level_mass(long long level) const {
        if (level < lo_ || level > level_hi()) return 0.0;
        std::size_t base = static_cast<std::size_t>(level - lo_) * n_states_;
        double s = 0.0;
        for (std::size_t u = 0; u < n_states_; ++u) s += row_[base + u] * tail_[u];
        return s;
    }

    /// log of the corridor partition sum zeta_j at the current horizon;
    /// -infinity when the corridor holds no mass.
    double log_corridor_sum(double alpha, double K) const {
        double center = static_cast<double>(j_) * alpha;
        double s = 0.0;
        for (long long lev = lo_; lev <= level_hi(); ++lev) {
            if (std::abs(static_cast<double>(lev) - center) <= K + 1e-12)
                s += level_mass(lev);
        }
        return s > 0.0 ? std::log(s) + log_scale_
                       : -std::numeric_limits<double>::infinity();
    }

    double log_total() const {
        double s = 0.0;
        for (long long lev = lo_; lev <= level_hi(); ++lev) s += level_mass(lev);
        return s > 0.0 ? std::log(s) + log_scale_
                       : -std::numeric_limits<double>::infinity();
    }

private:
    double& at(long long level, std::size_t state) {
        return row_[static_cast<std::size_t>(level - lo_) * n_states_ + state];
    }

    int alphabet_;
    int depth_;
    std::vector<int> steps_;
    double shift_;
    long long min_step_ = 0, max_step_ = 0;
    std::size_t n_states_ = 1;
    std::vector<double> edge_;
    std::vector<double> tail_;
    std::vector<double> row_;
    long long lo_ = 0;
    int j_ = 0;
    double log_scale_ = 0.0;
};

inline std::vector<int> integer_steps(const CylinderPotential& psi,
                                      const char* module, const char* op) {
    if (psi.depth() != 1)
        throw DepthError(module, op, "step potential must have depth 1");
    if (!psi.is_integer_valued())
        throw RangeError(module, op, "step potential must be integer-valued");
    std::vector<int> steps;
    steps.reserve(psi.values().size());
    for (double v : psi.values()) steps.push_back(static_cast<int>(std::llround(v)));
    return steps;
}

}  // namespace detail

/// DP table of weighted word counts at integer lift levels, with the corridor
/// filter |S_w psi - n alpha| <= K applied at the final horizon only
/// (intermediate rows keep every reachable level). Snapshot rows are stored
/// normalized; row_value restores the true scale.
class CorridorTable {
public:
    int horizon() const { return horizon_; }
    double alpha() const { return alpha_; }
    double corridor_width() const { return K_; }
    long long level_lo() const { return level_lo_; }
    long long level_hi() const { return level_hi_; }

    /// log zeta_j for j = first_horizon(), ..., n.
    const std::vector<double>& log_zeta_series() const { return log_zeta_; }
    int first_horizon() const { return first_horizon_; }
    double log_zeta_at(int j) const {
        return log_zeta_[static_cast<std::size_t>(j - first_horizon_)];
    }

    double log_zeta() const { return log_zeta_.empty() ? -std::numeric_limits<double>::infinity() : log_zeta_.back(); }
    double zeta() const { return std::exp(log_zeta()); }

    bool has_history() const { return !rows_.empty(); }

    /// Z_j(m): weighted count of length-j words with S psi = m (history mode;
    /// rows exist from j = depth(f)-1 on, earlier horizons are empty).
    double row_value(int j, long long level) const {
        if (!has_history())
            throw WidthError("fibre-pressure", "corridor_partition",
                             "table built without row history");
        if (j < row_first_j_ ||
            j >= row_first_j_ + static_cast<int>(rows_.size()))
            throw RangeError("fibre-pressure", "corridor_partition",
                             "row index outside stored history");
        std::size_t jj = static_cast<std::size_t>(j - row_first_j_);
        const auto& r = rows_[jj];
        long long lo = row_lo_[jj];
        long long hi = lo + static_cast<long long>(r.size()) - 1;
        if (level < lo || level > hi) return 0.0;
        return r[static_cast<std::size_t>(level - lo)] * std::exp(row_scale_[jj]);
    }

    /// log of the unconstrained row sum at the final horizon.
    double log_row_sum_final() const { return log_row_sum_final_; }

    friend CorridorTable corridor_partition(const CylinderPotential&,
                                            const CylinderPotential&, double,
                                            double, int, bool);

private:
    int horizon_ = 0;
    int first_horizon_ = 1;
    int row_first_j_ = 0;
    double alpha_ = 0.0;
    double K_ = 0.0;
    long long level_lo_ = 0, level_hi_ = 0;
    std::vector<double> log_zeta_;
    double log_row_sum_final_ = 0.0;
    std::vector<std::vector<double>> rows_;  // level marginals per j (normalized)
    std::vector<long long> row_lo_;
    std::vector<double> row_scale_;
};

/// Partition sums over the corridor: zeta_n(f, psi - alpha, K). The step
/// potential must be integer-valued of depth 1; f may be deeper. History rows
/// are retained when keep_history and the horizon is small enough.
inline CorridorTable corridor_partition(const CylinderPotential& f,
                                        const CylinderPotential& psi,
                                        double alpha, double K, int n,
                                        bool keep_history = true) {
    const char* op = "corridor_partition";
    if (n < 1) throw RangeError("fibre-pressure", op, "need horizon n >= 1");
    if (!(K > 0.0)) throw RangeError("fibre-pressure", op, "need K > 0");
    if (f.depth() > n)
        throw DepthError("fibre-pressure", op, "horizon below potential depth");
    auto steps = detail::integer_steps(psi, "fibre-pressure", op);
    if (psi.alphabet_size() != f.alphabet_size())
        throw AlphabetError("fibre-pressure", op, "mismatched alphabets");
    detail::LatticeWalkDp dp(f, steps);

    CorridorTable table;
    table.horizon_ = n;
    table.alpha_ = alpha;
    table.K_ = K;
    table.first_horizon_ = std::max(1, f.depth());
    constexpr std::size_t kHistoryCap = std::size_t{1} << 22;
    std::size_t history_entries = 0;

    auto snapshot = [&](const detail::LatticeWalkDp& d) {
        std::size_t w = static_cast<std::size_t>(d.level_hi() - d.level_lo() + 1);
        history_entries += w;
        if (history_entries > kHistoryCap)
            throw WidthError("fibre-pressure", op, "row history exceeds memory cap");
        std::vector<double> marg(w, 0.0);
        double mx = 0.0;
        for (long long lev = d.level_lo(); lev <= d.level_hi(); ++lev) {
            double v = d.level_mass(lev);
            marg[static_cast<std::size_t>(lev - d.level_lo())] = v;
            mx = std::max(mx, v);
        }
        double scale = d.log_scale();
        if (mx > 0.0) {
            for (double& v : marg) v /= mx;
            scale += std::log(mx);
        }
        table.rows_.push_back(std::move(marg));
        table.row_lo_.push_back(d.level_lo());
        table.row_scale_.push_back(scale);
    };

    table.row_first_j_ = dp.horizon();
    if (keep_history) {
        // row 0 is the DP seed Z_0(0) = 1 for depth-1 weights; deeper
        // potentials start at j = depth-1
        snapshot(dp);
    }
    for (int j = dp.horizon(); j < n; ) {
        dp.step();
        j = dp.horizon();
        if (j >= table.first_horizon_)
            table.log_zeta_.push_back(dp.log_corridor_sum(alpha, K));
        if (keep_history) snapshot(dp);
    }
    table.level_lo_ = dp.level_lo();
    table.level_hi_ = dp.level_hi();
    table.log_row_sum_final_ = dp.log_total();
    return table;
}

/// Default width: wide enough that the corridor around n*alpha contains at
/// least two lattice levels for every n (and exceeds the distortion
/// constant, which is zero for cylinder-constant steps).
inline double default_corridor_width(const CylinderPotential& psi) {
    auto steps = detail::integer_steps(psi, "fibre-pressure", "default_corridor_width");
    int m = 0;
    for (int s : steps) m = std::max(m, std::abs(s));
    return static_cast<double>(m) + 1.0;
}

}  // namespace pressurelab
