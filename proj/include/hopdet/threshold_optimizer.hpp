#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "detection_math.hpp"

// Quantizer threshold search: multi-start coordinate ascent with a
// golden-section line search per threshold, maximizing Chernoff information
// or KL divergence for a Gaussian hypothesis pair.

namespace hopdet {

struct ThresholdSolution {
    Quantizer quantizer;
    double value = 0.0;
    Metric metric = Metric::chernoff;
};

namespace detail {

// Coordinate-ascent state. Thresholds t[0..K-1] induce K+1 cells; cell j
// spans (t[j-1], t[j]) with outer edges at -inf/+inf, so moving t[i] only
// changes cells i and i+1. Edge CDFs are cached per hypothesis.
//
// For KL the per-coordinate line search evaluates the exact objective
// incrementally (two cell terms plus a frozen remainder). For Chernoff the
// exact objective needs the inner s-minimization, so the line search runs on
// the surrogate with s frozen at the current inner minimizer; each move is
// then re-checked against the exact metric and either accepted (s re-solved)
// or retried with an exact-metric line search. Near the optimum the surrogate
// gradient matches the exact one, so convergence is unaffected.
class ThresholdAscent {
  public:
    ThresholdAscent(const GaussianHypothesisPair& h, Metric metric, int K)
        : h_(h), metric_(metric), K_(K) {
        double lo = std::min(h.mu0, h.mu1) - 10.0 * h.sigma;
        double hi = std::max(h.mu0, h.mu1) + 10.0 * h.sigma;
        lo_ = lo;
        hi_ = hi;
        sep_ = 1e-9 * (hi - lo);
        t_tol_ = 1e-7 * (hi - lo);
        t_.resize(K);
        e0_.resize(K);
        e1_.resize(K);
        c0_.resize(K + 1);
        c1_.resize(K + 1);
    }

    void run(const std::vector<double>& init) {
        rebuild(init);
        for (int sweep = 0; sweep < 200; ++sweep) {
            double before = value_;
            for (int i = 0; i < K_; ++i) update_coordinate(i);
            if (value_ - before < 1e-9) break;
        }
    }

    const std::vector<double>& thresholds() const { return t_; }
    double value() const { return value_; }

  private:
    static constexpr double kInnerSTol = 1e-6;

    double cdf0(double t) const { return normal_cdf((t - h_.mu0) / h_.sigma); }
    double cdf1(double t) const { return normal_cdf((t - h_.mu1) / h_.sigma); }

    void rebuild(const std::vector<double>& init) {
        t_ = init;
        for (int j = 0; j < K_; ++j) {
            e0_[j] = cdf0(t_[j]);
            e1_[j] = cdf1(t_[j]);
        }
        refresh_cells();
        refresh_value();
    }

    void refresh_cells() {
        for (int j = 0; j <= K_; ++j) {
            double lo0 = j == 0 ? 0.0 : e0_[j - 1];
            double hi0 = j == K_ ? 1.0 : e0_[j];
            c0_[j] = std::max(0.0, hi0 - lo0);
            double lo1 = j == 0 ? 0.0 : e1_[j - 1];
            double hi1 = j == K_ ? 1.0 : e1_[j];
            c1_[j] = std::max(0.0, hi1 - lo1);
        }
    }

    void refresh_value() {
        if (metric_ == Metric::chernoff) {
            auto [s, v] = chernoff_min_point(c0_, c1_, kInnerSTol);
            s_ = s;
            value_ = v;
        } else {
            value_ = kl_sum(c0_, c1_);
        }
    }

    static double kl_term(double a, double b) {
        if (a < kProbFloor) return 0.0;
        if (b < kProbFloor) return std::numeric_limits<double>::infinity();
        return a * std::log(a / b);
    }

    double weight(double a, double b) const {
        if (a < kProbFloor || b < kProbFloor) return 0.0;
        return std::exp(s_ * std::log(a) + (1.0 - s_) * std::log(b));
    }

    // Returns the two candidate cells produced by placing threshold i at tv.
    struct CellPair {
        double a0, a1;  // cell i under H0/H1
        double b0, b1;  // cell i+1
    };
    CellPair cells_at(int i, double tv) const {
        double lo0 = i == 0 ? 0.0 : e0_[i - 1];
        double hi0 = i == K_ - 1 ? 1.0 : e0_[i + 1];
        double lo1 = i == 0 ? 0.0 : e1_[i - 1];
        double hi1 = i == K_ - 1 ? 1.0 : e1_[i + 1];
        double m0 = cdf0(tv), m1 = cdf1(tv);
        return {std::max(0.0, m0 - lo0), std::max(0.0, m1 - lo1),
                std::max(0.0, hi0 - m0), std::max(0.0, hi1 - m1)};
    }

    void apply_move(int i, double tv) {
        t_[i] = tv;
        e0_[i] = cdf0(tv);
        e1_[i] = cdf1(tv);
        CellPair cp = cells_at(i, tv);
        c0_[i] = cp.a0;
        c1_[i] = cp.a1;
        c0_[i + 1] = cp.b0;
        c1_[i + 1] = cp.b1;
    }

    void update_coordinate(int i) {
        double lo = (i == 0 ? lo_ : t_[i - 1] + sep_);
        double hi = (i == K_ - 1 ? hi_ : t_[i + 1] - sep_);
        if (hi - lo < 4.0 * sep_) return;

        if (metric_ == Metric::kl) {
            double rest = 0.0;
            for (int j = 0; j <= K_; ++j)
                if (j != i && j != i + 1) rest += kl_term(c0_[j], c1_[j]);
            auto objective = [&](double tv) {
                CellPair cp = cells_at(i, tv);
                return -(rest + kl_term(cp.a0, cp.a1) + kl_term(cp.b0, cp.b1));
            };
            double tv = golden_min(objective, lo, hi, t_tol_);
            double candidate = -objective(tv);
            if (candidate > value_) {
                apply_move(i, tv);
                value_ = candidate;
            }
            return;
        }

        // Chernoff: line search at frozen s, then verify against the exact value.
        double w_rest = 0.0;
        for (int j = 0; j <= K_; ++j)
            if (j != i && j != i + 1) w_rest += weight(c0_[j], c1_[j]);
        auto surrogate = [&](double tv) {
            CellPair cp = cells_at(i, tv);
            return w_rest + weight(cp.a0, cp.a1) + weight(cp.b0, cp.b1);
        };
        double tv = golden_min(surrogate, lo, hi, t_tol_);
        if (try_exact_move(i, tv)) return;

        // Surrogate move did not improve the exact metric (s was too stale);
        // fall back to a line search on the exact objective.
        std::vector<double> q0 = c0_, q1 = c1_;
        auto exact_objective = [&](double tw) {
            CellPair cp = cells_at(i, tw);
            q0[i] = cp.a0;
            q1[i] = cp.a1;
            q0[i + 1] = cp.b0;
            q1[i + 1] = cp.b1;
            return -chernoff_min_point(q0, q1, 1e-4).second;
        };
        try_exact_move(i, golden_min(exact_objective, lo, hi, t_tol_));
    }

    bool try_exact_move(int i, double tv) {
        CellPair cp = cells_at(i, tv);
        std::vector<double> q0 = c0_, q1 = c1_;
        q0[i] = cp.a0;
        q1[i] = cp.a1;
        q0[i + 1] = cp.b0;
        q1[i + 1] = cp.b1;
        auto [s, v] = chernoff_min_point(q0, q1, kInnerSTol);
        if (v <= value_) return false;
        apply_move(i, tv);
        s_ = s;
        value_ = v;
        return true;
    }

    GaussianHypothesisPair h_;
    Metric metric_;
    int K_;
    double lo_ = 0.0, hi_ = 0.0, sep_ = 0.0, t_tol_ = 0.0;
    std::vector<double> t_, e0_, e1_, c0_, c1_;
    double value_ = 0.0;
    double s_ = 0.5;
};

inline std::vector<double> quantile_start(const GaussianHypothesisPair& h, int K, double w) {
    double mid = 0.5 * (h.mu0 + h.mu1);
    double spread = w * (h.sigma + 0.5 * std::abs(h.mu1 - h.mu0));
    std::vector<double> t(K);
    for (int i = 0; i < K; ++i)
        t[i] = mid + spread * normal_quantile(double(i + 1) / double(K + 1));
    return t;
}

}  // namespace detail

/// Thresholds (length 2^M - 1, strictly increasing) locally maximizing the
/// metric, restarted from 5 quantile-spaced initializations so the small-M
/// optima are global. Equal-value restarts resolve to the lexicographically
/// smallest threshold vector. The reported value is a re-evaluation of the
/// metric on the returned quantizer.
inline ThresholdSolution optimize_thresholds(const GaussianHypothesisPair& h, int M,
                                             Metric metric, int max_bits = kMaxBits) {
    h.validate();
    if (h.mu0 == h.mu1)
        throw std::invalid_argument("optimize_thresholds: equal means carry no information");
    if (max_bits < 1) throw std::invalid_argument("optimize_thresholds: max_bits must be >= 1");
    if (M < 1 || M > max_bits)
        throw std::invalid_argument("optimize_thresholds: M must lie in [1, max_bits]");

    const int K = (1 << M) - 1;
    static constexpr double kWidths[] = {0.6, 0.8, 1.0, 1.3, 1.7};

    std::vector<double> best_t;
    double best_v = -1.0;
    for (double w : kWidths) {
        detail::ThresholdAscent ascent(h, metric, K);
        ascent.run(detail::quantile_start(h, K, w));
        double v = ascent.value();
        bool better = v > best_v + 1e-12 ||
                      (std::abs(v - best_v) <= 1e-12 && ascent.thresholds() < best_t);
        if (best_t.empty() || better) {
            best_t = ascent.thresholds();
            best_v = v;
        }
    }

    ThresholdSolution sol;
    sol.metric = metric;
    sol.quantizer = Quantizer::from_thresholds(std::move(best_t));
    ConditionalPMF pmf = cell_probabilities(h, sol.quantizer);
    sol.value = (metric == Metric::chernoff) ? chernoff_information(pmf) : kl_divergence(pmf);
    return sol;
}

/// Optimized quantizers for every bit count up to max_bits, plus the curve of
/// achieved values. quantizers[0] is the empty rule.
struct RuleSet {
    InfoCurve curve;
    std::vector<Quantizer> quantizers;
};

inline RuleSet build_rule_set(const GaussianHypothesisPair& h, int max_bits, Metric metric) {
    if (max_bits < 1) throw std::invalid_argument("build_rule_set: max_bits must be >= 1");
    RuleSet rs;
    rs.curve.metric = metric;
    rs.curve.upper_bound = info_upper_bound(h, metric);
    rs.curve.values.assign(max_bits + 1, 0.0);
    rs.quantizers.resize(max_bits + 1);
    for (int M = 1; M <= max_bits; ++M) {
        ThresholdSolution sol = optimize_thresholds(h, M, metric, max_bits);
        rs.curve.values[M] = sol.value;
        rs.quantizers[M] = std::move(sol.quantizer);
    }
    rs.curve.validate();
    return rs;
}

/// Per-bit information values [0, v(1), ..., v(max_bits)] with the metric's
/// infinite-resolution ceiling attached.
inline InfoCurve build_info_curve(const GaussianHypothesisPair& h, int max_bits, Metric metric) {
    return build_rule_set(h, max_bits, metric).curve;
}

}  // namespace hopdet
