#pragma once

// Test-only oracles: brute-force enumerations kept deliberately independent
// of the implementation paths they check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace oracles {

using Word = std::vector<int>;

inline std::vector<Word> all_words(int alphabet, int length) {
    std::vector<Word> out;
    Word w(static_cast<std::size_t>(length), 1);
    std::function<void(int)> rec = [&](int pos) {
        if (pos == length) {
            out.push_back(w);
            return;
        }
        for (int s = 1; s <= alphabet; ++s) {
            w[static_cast<std::size_t>(pos)] = s;
            rec(pos + 1);
        }
    };
    rec(0);
    return out;
}

/// Birkhoff sum with the sup-over-cylinder convention, straight from the
/// depth-k value table (index base-alphabet over symbols-1).
inline double birkhoff_sup(const std::vector<double>& table, int alphabet,
                           int depth, const Word& word) {
    auto table_index = [&](const Word& w, std::size_t from, std::size_t len) {
        std::size_t idx = 0;
        for (std::size_t i = from; i < from + len; ++i)
            idx = idx * static_cast<std::size_t>(alphabet) +
                  static_cast<std::size_t>(w[i] - 1);
        return idx;
    };
    const int n = static_cast<int>(word.size());
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
        int have = std::min(depth, n - j);
        if (have == depth) {
            sum += table[table_index(word, static_cast<std::size_t>(j),
                                     static_cast<std::size_t>(depth))];
        } else {
            // maximize over the missing suffix symbols
            std::size_t base = table_index(word, static_cast<std::size_t>(j),
                                           static_cast<std::size_t>(have));
            std::size_t span = 1;
            for (int m = 0; m < depth - have; ++m)
                span *= static_cast<std::size_t>(alphabet);
            double best = -std::numeric_limits<double>::infinity();
            for (std::size_t t = 0; t < span; ++t)
                best = std::max(best, table[base * span + t]);
            sum += best;
        }
    }
    return sum;
}

/// Finite-n partition sum by full enumeration.
inline double partition_sum(const std::vector<double>& table, int alphabet,
                            int depth, int n) {
    double s = 0.0;
    for (const Word& w : all_words(alphabet, n))
        s += std::exp(birkhoff_sup(table, alphabet, depth, w));
    return s;
}

/// Corridor partition sum zeta_n by enumeration (depth-1 weights).
inline double zeta_enumerated(const std::vector<double>& f_values,
                              const std::vector<int>& steps, double alpha,
                              double K, int n) {
    int alphabet = static_cast<int>(f_values.size());
    double total = 0.0;
    for (const Word& w : all_words(alphabet, n)) {
        long long lift = 0;
        double sum = 0.0;
        for (int s : w) {
            lift += steps[static_cast<std::size_t>(s - 1)];
            sum += f_values[static_cast<std::size_t>(s - 1)];
        }
        if (std::abs(static_cast<double>(lift) - n * alpha) <= K + 1e-12)
            total += std::exp(sum);
    }
    return total;
}

/// Extreme cycle means of a depth-k table by exhaustive simple-cycle
/// enumeration over the de Bruijn graph on alphabet^depth states.
struct CycleMeans {
    double min_mean = 0.0;
    double max_mean = 0.0;
};

inline CycleMeans cycle_means_enumerated(const std::vector<double>& table,
                                         int alphabet, int depth) {
    std::size_t n_states = 1;
    for (int i = 0; i < depth; ++i) n_states *= static_cast<std::size_t>(alphabet);
    std::size_t suffix_span = n_states / static_cast<std::size_t>(alphabet);
    CycleMeans out{std::numeric_limits<double>::infinity(),
                   -std::numeric_limits<double>::infinity()};
    std::vector<std::size_t> path;
    std::vector<bool> on_path(n_states, false);
    std::function<void(std::size_t, std::size_t)> dfs = [&](std::size_t start,
                                                            std::size_t cur) {
        for (int s = 0; s < alphabet; ++s) {
            std::size_t nxt = (cur % suffix_span) * static_cast<std::size_t>(alphabet) +
                              static_cast<std::size_t>(s);
            if (nxt == start) {
                double sum = 0.0;
                for (std::size_t v : path) sum += table[v];
                double mean = sum / static_cast<double>(path.size());
                out.min_mean = std::min(out.min_mean, mean);
                out.max_mean = std::max(out.max_mean, mean);
            } else if (!on_path[nxt] && nxt > start) {
                // only enumerate cycles whose smallest state is `start`
                on_path[nxt] = true;
                path.push_back(nxt);
                dfs(start, nxt);
                path.pop_back();
                on_path[nxt] = false;
            }
        }
    };
    for (std::size_t start = 0; start < n_states; ++start) {
        path.assign(1, start);
        on_path.assign(n_states, false);
        on_path[start] = true;
        dfs(start, start);
    }
    return out;
}

/// High-precision Bowen root of sum c_i^s = 1 by long-double bisection.
inline double bowen_root_scan(const std::vector<double>& contractions) {
    auto f = [&](long double s) {
        long double v = -1.0L;
        for (double c : contractions) v += std::pow(static_cast<long double>(c), s);
        return v;
    };
    long double lo = 0.0L, hi = 1.0L;
    while (f(hi) > 0.0L) hi *= 2.0L;
    for (int i = 0; i < 200; ++i) {
        long double mid = 0.5L * (lo + hi);
        if (f(mid) > 0.0L) lo = mid; else hi = mid;
    }
    return static_cast<double>(0.5L * (lo + hi));
}

}  // namespace oracles
