#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "pressurelab/branch_model.hpp"
#include "pressurelab/errors.hpp"
#include "pressurelab/potential.hpp"
#include "pressurelab/word.hpp"

namespace pressurelab {

/// Non-empty subset J of the alphabet; pressures and Gibbs measures restrict
/// to the compact sub-shift J^N.
class SubAlphabet {
public:
    explicit SubAlphabet(std::vector<int> symbols) : symbols_(std::move(symbols)) {
        std::sort(symbols_.begin(), symbols_.end());
        symbols_.erase(std::unique(symbols_.begin(), symbols_.end()), symbols_.end());
        if (symbols_.empty())
            throw AlphabetError("pressure", "SubAlphabet", "sub-alphabet is empty");
        if (symbols_.front() < 1)
            throw RangeError("pressure", "SubAlphabet", "symbols are 1-based");
    }
    static SubAlphabet full(int alphabet_size) {
        std::vector<int> s(static_cast<std::size_t>(alphabet_size));
        for (int i = 0; i < alphabet_size; ++i) s[static_cast<std::size_t>(i)] = i + 1;
        return SubAlphabet(std::move(s));
    }
    const std::vector<int>& symbols() const { return symbols_; }
    std::size_t size() const { return symbols_.size(); }
    bool is_singleton() const { return symbols_.size() == 1; }
    bool contains(int symbol) const {
        return std::binary_search(symbols_.begin(), symbols_.end(), symbol);
    }

private:
    std::vector<int> symbols_;
};

struct PressureValue {
    enum class Method { exact_depth1, spectral_depthk, empirical_n };
    double value = 0.0;
    Method method = Method::exact_depth1;
    double residual = 0.0;  // convergence estimate; 0 for the exact route
};

namespace detail {

inline double log_sum_exp(const std::vector<double>& xs) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : xs) m = std::max(m, x);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double x : xs) s += std::exp(x - m);
    return m + std::log(s);
}

/// States of the depth-k transfer operator: words of length k-1 over J.
/// Returns the J-local state count and fills the global k-word index for the
/// edge (state u, appended symbol j).
struct TransferMatrix {
    Eigen::MatrixXd m;     // entries exp(f - shift) on de Bruijn transitions
    double shift = 0.0;    // subtracted from f before exponentiating
    std::vector<std::size_t> state_words;  // global (k-1)-word index per state
};

inline TransferMatrix build_transfer_matrix(const CylinderPotential& f,
                                            const SubAlphabet& J) {
    const int k = f.depth();
    const int a = f.alphabet_size();
    const auto& js = J.symbols();
    if (js.back() > a)
        throw RangeError("pressure", "classical_pressure",
                         "sub-alphabet symbol exceeds alphabet size");
    const std::size_t m = pow_size(static_cast<int>(js.size()), k - 1);
    constexpr std::size_t kStateCap = 1024;
    if (m > kStateCap)
        throw BudgetError("pressure", "classical_pressure",
                          "transfer matrix would need " + std::to_string(m) +
                              " states (cap " + std::to_string(kStateCap) + ")");
    TransferMatrix tm;
    tm.shift = f.max_value();
    tm.m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m),
                                 static_cast<Eigen::Index>(m));
    tm.state_words.assign(m, 0);
    const std::size_t jn = js.size();
    // local index <-> global (k-1)-word over J
    for (std::size_t u = 0; u < m; ++u) {
        std::size_t rem = u, gw = 0;
        std::vector<int> syms(static_cast<std::size_t>(k - 1));
        for (int pos = k - 2; pos >= 0; --pos) {
            syms[static_cast<std::size_t>(pos)] = js[rem % jn];
            rem /= jn;
        }
        for (int pos = 0; pos < k - 1; ++pos)
            gw = gw * static_cast<std::size_t>(a) +
                 static_cast<std::size_t>(syms[static_cast<std::size_t>(pos)] - 1);
        tm.state_words[u] = gw;
    }
    const std::size_t suffix_span = (k >= 2) ? pow_size(static_cast<int>(jn), k - 2) : 1;
    for (std::size_t u = 0; u < m; ++u) {
        std::size_t suffix = u % suffix_span;
        for (std::size_t t = 0; t < jn; ++t) {
            std::size_t v = suffix * jn + t;
            // k-word = (k-1)-word of u followed by the appended symbol
            std::size_t w = tm.state_words[u] * static_cast<std::size_t>(a) +
                            static_cast<std::size_t>(js[t] - 1);
            tm.m(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) =
                std::exp(f.value_at(w) - tm.shift);
        }
    }
    return tm;
}

struct PowerIterationResult {
    double lambda = 0.0;   // spectral radius of the shifted matrix
    double residual = 0.0; // last Rayleigh-quotient increment
    Eigen::VectorXd right;
    Eigen::VectorXd left;
};

/// Power iteration on a primitive nonnegative matrix. Convergence is
/// geometric; the iteration cap only guards plumbing bugs.
inline PowerIterationResult power_iteration(const Eigen::MatrixXd& M,
                                            double tol = 1e-14,
                                            long max_iter = 100000) {
    const Eigen::Index n = M.rows();
    PowerIterationResult r;
    r.right = Eigen::VectorXd::Ones(n);
    r.left = Eigen::VectorXd::Ones(n);
    double lambda_prev = 0.0;
    for (long it = 0; it < max_iter; ++it) {
        Eigen::VectorXd xr = M * r.right;
        Eigen::VectorXd xl = M.transpose() * r.left;
        double lambda = r.right.dot(xr) / r.right.squaredNorm();
        xr /= xr.norm();
        xl /= xl.norm();
        r.residual = std::abs(lambda - lambda_prev);
        r.right = xr;
        r.left = xl;
        if (it > 0 && r.residual <= tol * std::max(1.0, std::abs(lambda))) {
            r.lambda = lambda;
            return r;
        }
        lambda_prev = lambda;
    }
    throw ConvergenceError("pressure", "classical_pressure",
                           "power iteration did not reach residual " +
                               std::to_string(tol));
}

}  // namespace detail

/// Classical topological pressure of a cylinder-constant potential on J^N.
/// Depth 1 is the exact log-sum-exp closed form; deeper potentials go through
/// the spectral radius of the de Bruijn transfer matrix. A singleton J gives
/// the value on the constant sequence (the Dirac case).
inline PressureValue classical_pressure(const CylinderPotential& f,
                                        const SubAlphabet& J) {
    if (J.symbols().back() > f.alphabet_size())
        throw RangeError("pressure", "classical_pressure",
                         "sub-alphabet symbol exceeds alphabet size");
    if (f.depth() == 1) {
        std::vector<double> vals;
        vals.reserve(J.size());
        for (int i : J.symbols())
            vals.push_back(f.value_at(static_cast<std::size_t>(i - 1)));
        return {detail::log_sum_exp(vals), PressureValue::Method::exact_depth1, 0.0};
    }
    auto tm = detail::build_transfer_matrix(f, J);
    if (tm.m.rows() == 1) {
        // Dirac: single admissible sequence
        return {std::log(tm.m(0, 0)) + tm.shift,
                PressureValue::Method::spectral_depthk, 0.0};
    }
    auto pi = detail::power_iteration(tm.m);
    return {std::log(pi.lambda) + tm.shift, PressureValue::Method::spectral_depthk,
            pi.residual / std::max(1.0, pi.lambda)};
}

inline PressureValue classical_pressure(const CylinderPotential& f) {
    return classical_pressure(f, SubAlphabet::full(f.alphabet_size()));
}

/// The shift-invariant Gibbs measure of a cylinder-constant potential,
/// restricted to J^N. Stored as the stationary k-word marginal plus the
/// row-stochastic transition kernel between overlapping k-words; depth-1
/// measures are Bernoulli and the kernel rows all equal the weight vector.
class GibbsMeasure {
public:
    int alphabet_size() const { return alphabet_; }
    int depth() const { return depth_; }
    const std::vector<double>& weights() const { return weights_; }
    const SubAlphabet& sub_alphabet() const { return sub_; }
    double pressure() const { return pressure_; }

    /// Transition probability between overlapping k-words (by global index).
    double transition(std::size_t from_word, std::size_t to_word) const {
        if (depth_ == 1) return weights_[to_word];
        auto it = trans_index_.find(encode_edge(from_word, to_word));
        return it == trans_index_.end() ? 0.0 : it->second;
    }

    /// Successors of a k-word with positive transition probability.
    std::vector<std::pair<std::size_t, double>> successors(std::size_t word) const {
        std::vector<std::pair<std::size_t, double>> out;
        const std::size_t a = static_cast<std::size_t>(alphabet_);
        if (depth_ == 1) {
            for (std::size_t i = 0; i < a; ++i)
                if (weights_[i] > 0.0) out.push_back({i, weights_[i]});
            return out;
        }
        std::size_t suffix = word % pow_size(alphabet_, depth_ - 1);
        for (std::size_t s = 0; s < a; ++s) {
            std::size_t nxt = suffix * a + s;
            double q = transition(word, nxt);
            if (q > 0.0) out.push_back({nxt, q});
        }
        return out;
    }

    /// Exact mass of the cylinder [w]; for |w| >= depth this is the marginal
    /// times the chain of transition probabilities, for shorter words the sum
    /// over completions.
    double cylinder_mass(const Word& word) const {
        validate_word(word, alphabet_, "pressure", "cylinder_mass");
        const int n = static_cast<int>(word.size());
        if (n == 0) return 1.0;
        if (n < depth_) {
            std::size_t missing = static_cast<std::size_t>(depth_ - n);
            std::size_t base = word_index(word, alphabet_) * pow_size(alphabet_, static_cast<int>(missing));
            double s = 0.0;
            for (std::size_t i = 0; i < pow_size(alphabet_, static_cast<int>(missing)); ++i)
                s += weights_[base + i];
            return s;
        }
        Word head(word.begin(), word.begin() + depth_);
        std::size_t cur = word_index(head, alphabet_);
        double mass = weights_[cur];
        for (int j = depth_; j < n && mass > 0.0; ++j) {
            std::size_t suffix = cur % pow_size(alphabet_, depth_ - 1 > 0 ? depth_ - 1 : 0);
            std::size_t nxt = depth_ == 1
                                  ? static_cast<std::size_t>(word[static_cast<std::size_t>(j)] - 1)
                                  : suffix * static_cast<std::size_t>(alphabet_) +
                                        static_cast<std::size_t>(word[static_cast<std::size_t>(j)] - 1);
            mass *= transition(cur, nxt);
            cur = nxt;
        }
        return mass;
    }

    /// Expectation of a cylinder-constant g. If g is deeper than the measure,
    /// the marginal is extended through the transition kernel.
    double expectation(const CylinderPotential& g) const {
        if (g.alphabet_size() != alphabet_)
            throw AlphabetError("pressure", "gibbs_expectation", "mismatched alphabets");
        if (g.depth() <= depth_) {
            CylinderPotential gl = g.lifted(depth_);
            double s = 0.0;
            for (std::size_t w = 0; w < weights_.size(); ++w)
                if (weights_[w] > 0.0) s += weights_[w] * gl.value_at(w);
            return s;
        }
        // extend marginals past the measure depth through the kernel
        std::vector<std::pair<std::size_t, double>> frontier;
        for (std::size_t w = 0; w < weights_.size(); ++w)
            if (weights_[w] > 0.0) frontier.push_back({w, weights_[w]});
        int cur_depth = depth_;
        std::vector<std::pair<std::size_t, double>> deeper;  // (extended word idx, mass)
        std::vector<std::pair<std::size_t, double>> cur;     // (last k-word idx, mass) aligned
        // carry both the full extended index and the trailing k-word
        struct Node { std::size_t ext; std::size_t tail; double mass; };
        std::vector<Node> nodes;
        for (auto& [w, p] : frontier) nodes.push_back({w, w, p});
        constexpr std::size_t kCap = 1 << 22;
        while (cur_depth < g.depth()) {
            std::vector<Node> next;
            next.reserve(nodes.size() * static_cast<std::size_t>(alphabet_));
            if (nodes.size() * static_cast<std::size_t>(alphabet_) > kCap)
                throw BudgetError("pressure", "gibbs_expectation",
                                  "marginal extension exceeds state cap");
            for (const Node& nd : nodes) {
                for (auto& [nxt, q] : successors(nd.tail)) {
                    std::size_t sym = nxt % static_cast<std::size_t>(alphabet_);
                    next.push_back({nd.ext * static_cast<std::size_t>(alphabet_) + sym,
                                    nxt, nd.mass * q});
                }
            }
            nodes = std::move(next);
            ++cur_depth;
        }
        double s = 0.0;
        for (const Node& nd : nodes) s += nd.mass * g.value_at(nd.ext);
        return s;
    }

    /// Entropy rate of the stationary chain: depth-1 gives -sum p log p, the
    /// Markov case the usual conditional-entropy formula.
    double entropy() const {
        double h = 0.0;
        if (depth_ == 1) {
            for (double p : weights_)
                if (p > 0.0) h -= p * std::log(p);
            return h;
        }
        for (std::size_t w = 0; w < weights_.size(); ++w) {
            if (weights_[w] <= 0.0) continue;
            for (auto& [nxt, q] : successors(w))
                if (q > 0.0) h -= weights_[w] * q * std::log(q);
        }
        return h;
    }

    /// Empirical Gibbs constant: sup over all cylinders up to max_length of
    /// the two-sided ratio mu[w] / exp(S_w f - n P). Depth-1 measures satisfy
    /// c = 1 exactly; deeper approximants report what enumeration finds.
    double empirical_gibbs_constant(const CylinderPotential& f, int max_length) const {
        double c = 1.0;
        for (int n = std::max(depth_, f.depth()); n <= max_length; ++n) {
            std::size_t count = pow_size(alphabet_, n);
            if (count > (1u << 20))
                throw BudgetError("pressure", "empirical_gibbs_constant",
                                  "enumeration exceeds budget");
            for (std::size_t i = 0; i < count; ++i) {
                Word w = word_from_index(i, n, alphabet_);
                bool in_support = true;
                for (int s : w)
                    if (!sub_.contains(s)) { in_support = false; break; }
                if (!in_support) continue;
                double mass = cylinder_mass(w);
                if (mass <= 0.0) continue;
                double gibbs = std::exp(birkhoff_sum(f, w) - n * pressure_);
                double ratio = mass / gibbs;
                c = std::max(c, std::max(ratio, 1.0 / ratio));
            }
        }
        return c;
    }

    friend GibbsMeasure gibbs_measure(const CylinderPotential&, const SubAlphabet&);

private:
    GibbsMeasure(int alphabet, int depth, std::vector<double> weights,
                 SubAlphabet sub, double pressure)
        : alphabet_(alphabet), depth_(depth), weights_(std::move(weights)),
          sub_(std::move(sub)), pressure_(pressure) {}

    static std::uint64_t encode_edge(std::size_t from, std::size_t to) {
        return (static_cast<std::uint64_t>(from) << 32) | static_cast<std::uint64_t>(to);
    }

    int alphabet_;
    int depth_;
    std::vector<double> weights_;  // stationary marginal over I^depth
    SubAlphabet sub_;
    double pressure_;
    std::unordered_map<std::uint64_t, double> trans_index_;  // depth >= 2 only
};

/// Gibbs measure of f on J^N. Depth-1 weights are exp(f_i - P) exactly
/// (Gibbs property with constant 1); depth-k uses the left/right principal
/// eigenvectors of the transfer matrix. Singleton J yields the Dirac measure
/// on the constant sequence.
inline GibbsMeasure gibbs_measure(const CylinderPotential& f, const SubAlphabet& J) {
    const int a = f.alphabet_size();
    const int k = f.depth();
    PressureValue P = classical_pressure(f, J);
    std::vector<double> weights(pow_size(a, k), 0.0);
    if (k == 1) {
        for (int i : J.symbols())
            weights[static_cast<std::size_t>(i - 1)] =
                std::exp(f.value_at(static_cast<std::size_t>(i - 1)) - P.value);
        return GibbsMeasure(a, k, std::move(weights), J, P.value);
    }
    auto tm = detail::build_transfer_matrix(f, J);
    const auto& js = J.symbols();
    const std::size_t jn = js.size();
    const std::size_t m = static_cast<std::size_t>(tm.m.rows());
    Eigen::VectorXd right, left;
    double lambda;
    if (m == 1) {
        right = Eigen::VectorXd::Ones(1);
        left = Eigen::VectorXd::Ones(1);
        lambda = tm.m(0, 0);
    } else {
        auto pi = detail::power_iteration(tm.m);
        right = pi.right;
        left = pi.left;
        lambda = pi.lambda;
    }
    // stationary marginal over (k-1)-word states and kernel between them
    Eigen::VectorXd state_pi = left.cwiseProduct(right);
    state_pi /= state_pi.sum();
    GibbsMeasure mu(a, k, std::move(weights), J, P.value);
    const std::size_t suffix_span = (k >= 2) ? pow_size(static_cast<int>(jn), k - 2) : 1;
    for (std::size_t u = 0; u < m; ++u) {
        std::size_t suffix = u % suffix_span;
        for (std::size_t t = 0; t < jn; ++t) {
            std::size_t v = suffix * jn + t;
            double q = tm.m(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) *
                       right(static_cast<Eigen::Index>(v)) /
                       (lambda * right(static_cast<Eigen::Index>(u)));
            // k-word for the edge u -> v
            std::size_t w = tm.state_words[u] * static_cast<std::size_t>(a) +
                            static_cast<std::size_t>(js[t] - 1);
            mu.weights_[w] = state_pi(static_cast<Eigen::Index>(u)) * q;
        }
    }
    // kernel between overlapping k-words: (u -> v) then (v -> z) moves with
    // the (k-1)-state kernel out of v
    for (std::size_t u = 0; u < m; ++u) {
        std::size_t suffix_u = u % suffix_span;
        for (std::size_t t = 0; t < jn; ++t) {
            std::size_t v = suffix_u * jn + t;
            std::size_t w_uv = tm.state_words[u] * static_cast<std::size_t>(a) +
                               static_cast<std::size_t>(js[t] - 1);
            std::size_t suffix_v = v % suffix_span;
            for (std::size_t t2 = 0; t2 < jn; ++t2) {
                std::size_t z = suffix_v * jn + t2;
                double q = tm.m(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(z)) *
                           right(static_cast<Eigen::Index>(z)) /
                           (lambda * right(static_cast<Eigen::Index>(v)));
                std::size_t w_vz = tm.state_words[v] * static_cast<std::size_t>(a) +
                                   static_cast<std::size_t>(js[t2] - 1);
                mu.trans_index_[GibbsMeasure::encode_edge(w_uv, w_vz)] = q;
            }
        }
    }
    return mu;
}

inline GibbsMeasure gibbs_measure(const CylinderPotential& f) {
    return gibbs_measure(f, SubAlphabet::full(f.alphabet_size()));
}

/// mu(g); equals d/dt P(f + t g) at t = 0 for mu = mu_f.
inline double gibbs_expectation(const GibbsMeasure& mu, const CylinderPotential& g) {
    return mu.expectation(g);
}

/// Asymptotic covariance rate lim Cov(S_n g, S_n h)/n under the stationary
/// chain of mu; this is the mixed second derivative of the pressure. The
/// depth-1 case collapses to the plain covariance; deeper measures solve the
/// Poisson equation (I - Q) u = g_centered on the support.
inline double asymptotic_covariance(const GibbsMeasure& mu,
                                    const CylinderPotential& g,
                                    const CylinderPotential& h) {
    const int k = mu.depth();
    CylinderPotential gl = g.lifted(std::max(k, g.depth()));
    CylinderPotential hl = h.lifted(std::max(k, h.depth()));
    if (gl.depth() > k || hl.depth() > k)
        throw DepthError("pressure", "asymptotic_covariance",
                         "observable deeper than the measure");
    double eg = mu.expectation(gl);
    double eh = mu.expectation(hl);
    const auto& wts = mu.weights();
    if (k == 1) {
        double s = 0.0;
        for (std::size_t i = 0; i < wts.size(); ++i)
            s += wts[i] * (gl.value_at(i) - eg) * (hl.value_at(i) - eh);
        return s;
    }
    // support states
    std::vector<std::size_t> support;
    for (std::size_t w = 0; w < wts.size(); ++w)
        if (wts[w] > 0.0) support.push_back(w);
    const std::size_t m = support.size();
    std::vector<std::size_t> local(wts.size(), SIZE_MAX);
    for (std::size_t i = 0; i < m; ++i) local[support[i]] = i;
    Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m),
                                              static_cast<Eigen::Index>(m));
    Eigen::VectorXd pi(static_cast<Eigen::Index>(m)),
        gc(static_cast<Eigen::Index>(m)), hc(static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) {
        pi(static_cast<Eigen::Index>(i)) = wts[support[i]];
        gc(static_cast<Eigen::Index>(i)) = gl.value_at(support[i]) - eg;
        hc(static_cast<Eigen::Index>(i)) = hl.value_at(support[i]) - eh;
        for (auto& [nxt, q] : mu.successors(support[i]))
            Q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(local[nxt])) = q;
    }
    // (I - Q + 1 pi^T) u = centered observable gives the Poisson solution
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(m),
                                                  static_cast<Eigen::Index>(m)) -
                        Q + Eigen::VectorXd::Ones(static_cast<Eigen::Index>(m)) *
                                pi.transpose();
    Eigen::VectorXd ug = A.partialPivLu().solve(gc);
    Eigen::VectorXd uh = A.partialPivLu().solve(hc);
    double s = (pi.array() * gc.array() * hc.array()).sum();
    s += (pi.array() * gc.array() * (Q * uh).array()).sum();
    s += (pi.array() * hc.array() * (Q * ug).array()).sum();
    return s;
}

inline double asymptotic_variance(const GibbsMeasure& mu, const CylinderPotential& g) {
    return asymptotic_covariance(mu, g, g);
}

/// Bowen root: the unique s with P(s*phi) = 0, located by bisection plus
/// Newton with the analytic derivative mu_{s phi}(phi) < 0.
inline double bowen_delta(const BranchModel& model) {
    CylinderPotential phi = model.geometric_potential();
    auto pressure_at = [&](double s) {
        return classical_pressure(s * phi).value;
    };
    auto derivative_at = [&](double s) {
        GibbsMeasure mu = gibbs_measure(s * phi);
        return gibbs_expectation(mu, phi);
    };
    double lo = 0.0, hi = 1.0;
    while (pressure_at(hi) > 0.0) hi *= 2.0;
    double s = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        double p = pressure_at(s);
        if (std::abs(p) < 1e-14) return s;
        if (p > 0.0) lo = s; else hi = s;
        double step = p / derivative_at(s);
        double cand = s - step;
        s = (cand > lo && cand < hi) ? cand : 0.5 * (lo + hi);
    }
    return s;
}

/// Finite-horizon pressure quotient (1/n) log sum_{w in I^n} exp(S_w f),
/// evaluated through transfer-matrix powers (never by enumerating I^n).
/// Serves as an independent check of the spectral route.
inline PressureValue empirical_pressure(const CylinderPotential& f, int n) {
    if (n < 1)
        throw RangeError("pressure", "empirical_pressure", "need n >= 1");
    const int k = f.depth();
    double exact = classical_pressure(f).value;
    if (k == 1) {
        // per-word weights factorize, so the quotient telescopes
        std::vector<double> vals(f.values());
        double v = detail::log_sum_exp(vals);
        return {v, PressureValue::Method::empirical_n, std::abs(v - exact)};
    }
    if (n < k)
        throw DepthError("pressure", "empirical_pressure",
                         "horizon below potential depth");
    auto tm = detail::build_transfer_matrix(f, SubAlphabet::full(f.alphabet_size()));
    const std::size_t m = static_cast<std::size_t>(tm.m.rows());
    // tail corrections: sup over completions for the final k-1 shifts
    Eigen::VectorXd y(static_cast<Eigen::Index>(m));
    for (std::size_t v = 0; v < m; ++v) {
        Word w = word_from_index(tm.state_words[v], k - 1, f.alphabet_size());
        double tail = 0.0;
        for (int drop = 0; drop < k - 1; ++drop) {
            Word suffix(w.begin() + drop, w.end());
            tail += f.sup_over_prefix(suffix) - tm.shift;
        }
        y(static_cast<Eigen::Index>(v)) = std::exp(tail);
    }
    double log_scale = 0.0;
    for (int step = 0; step < n - k + 1; ++step) {
        y = tm.m * y;
        double mx = y.maxCoeff();
        y /= mx;
        log_scale += std::log(mx);
    }
    double v = (std::log(y.sum()) + log_scale +
                static_cast<double>(n) * tm.shift) /
               static_cast<double>(n);
    return {v, PressureValue::Method::empirical_n, std::abs(v - exact)};
}

}  // namespace pressurelab
