#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

// Numerical core for binary hypothesis detection with quantized sensor
// messages: Gaussian cell probabilities, Chernoff information, KL divergence,
// and their analytic upper bounds for the equal-variance Gaussian pair.

namespace hopdet {

enum class Metric { chernoff, kl };

/// Default cap on per-sensor message size, in bits.
inline constexpr int kMaxBits = 8;

/// Cell probabilities below this are treated as exactly zero so logs stay
/// out of the denormal range.
inline constexpr double kProbFloor = 1e-300;

/// Standard normal CDF. erfc-based, absolute error well below 1e-10.
inline double normal_cdf(double x) {
    constexpr double inv_sqrt2 = 0.70710678118654752440;
    return 0.5 * std::erfc(-x * inv_sqrt2);
}

// ============================================================================
// Domain types
// ============================================================================

/// The two conditional observation densities f(y|H0) ~ N(mu0, sigma^2) and
/// f(y|H1) ~ N(mu1, sigma^2), plus the prior of H0.
struct GaussianHypothesisPair {
    double mu0 = -1.0;
    double mu1 = 1.0;
    double sigma = 1.0;
    double pi0 = 0.5;

    void validate() const {
        if (!std::isfinite(mu0) || !std::isfinite(mu1) || !std::isfinite(sigma) ||
            !std::isfinite(pi0))
            throw std::invalid_argument("hypothesis pair: non-finite field");
        if (!(sigma > 0.0))
            throw std::invalid_argument("hypothesis pair: sigma must be positive");
        if (pi0 < 0.0 || pi0 > 1.0)
            throw std::invalid_argument("hypothesis pair: pi0 must lie in [0,1]");
    }
};

/// Interval decision rule with 2^bits cells. An M-bit rule is described by
/// 2^M - 1 strictly increasing thresholds; bits = 0 is the empty rule of a
/// sensor that sends nothing.
struct Quantizer {
    std::vector<double> thresholds;
    int bits = 0;

    static Quantizer from_thresholds(std::vector<double> t) {
        Quantizer q;
        std::size_t n = t.size() + 1;
        if (!std::has_single_bit(n))
            throw std::invalid_argument("quantizer: threshold count must be 2^M - 1");
        q.bits = std::bit_width(n) - 1;
        q.thresholds = std::move(t);
        q.validate();
        return q;
    }

    void validate() const {
        if (bits < 0) throw std::invalid_argument("quantizer: negative bit count");
        if (thresholds.size() != (std::size_t{1} << bits) - 1)
            throw std::invalid_argument("quantizer: threshold count does not match bits");
        for (std::size_t i = 0; i < thresholds.size(); ++i) {
            if (!std::isfinite(thresholds[i]))
                throw std::invalid_argument("quantizer: non-finite threshold");
            if (i > 0 && !(thresholds[i - 1] < thresholds[i]))
                throw std::invalid_argument("quantizer: thresholds must strictly increase");
        }
    }

    int cells() const { return 1 << bits; }

    /// Index of the cell an observation falls into.
    int cell_of(double y) const {
        return static_cast<int>(
            std::upper_bound(thresholds.begin(), thresholds.end(), y) - thresholds.begin());
    }
};

/// Discrete message distributions p(u|H0), p(u|H1) induced by a quantizer.
struct ConditionalPMF {
    std::vector<double> p0;
    std::vector<double> p1;

    void validate() const {
        if (p0.empty() || p0.size() != p1.size())
            throw std::invalid_argument("pmf: vectors must be non-empty and equal length");
        double s0 = 0.0, s1 = 0.0;
        for (std::size_t k = 0; k < p0.size(); ++k) {
            if (!(p0[k] >= 0.0) || !(p1[k] >= 0.0))
                throw std::invalid_argument("pmf: negative entry");
            s0 += p0[k];
            s1 += p1[k];
        }
        if (std::abs(s0 - 1.0) > 1e-12 || std::abs(s1 - 1.0) > 1e-12)
            throw std::invalid_argument("pmf: vectors must sum to 1");
    }
};

/// Per-sensor information contribution as a function of allocated bits M,
/// together with the infinite-resolution ceiling it approaches.
struct InfoCurve {
    Metric metric = Metric::chernoff;
    std::vector<double> values;  // indexed by M = 0..max_bits
    double upper_bound = 0.0;

    int max_bits() const { return static_cast<int>(values.size()) - 1; }

    void validate() const {
        if (values.empty() || values[0] != 0.0)
            throw std::invalid_argument("info curve: values[0] must be 0");
        for (std::size_t m = 0; m < values.size(); ++m) {
            if (!(values[m] >= 0.0) || !(values[m] < upper_bound) ||
                (m > 0 && values[m] < values[m - 1]))
                throw std::invalid_argument("info curve: values must be nondecreasing and below the bound");
        }
    }
};

// ============================================================================
// Internals
// ============================================================================

namespace detail {

/// Golden-section minimizer of a unimodal function on [lo, hi].
template <class F>
inline double golden_min(F&& f, double lo, double hi, double tol) {
    constexpr double inv_phi = 0.61803398874989484820;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

/// ln sum_k p0^s p1^(1-s) over cells positive under both hypotheses.
inline double chernoff_exponent_at(const std::vector<double>& p0,
                                   const std::vector<double>& p1, double s) {
    double sum = 0.0;
    for (std::size_t k = 0; k < p0.size(); ++k) {
        if (p0[k] < kProbFloor || p1[k] < kProbFloor) continue;
        sum += std::exp(s * std::log(p0[k]) + (1.0 - s) * std::log(p1[k]));
    }
    return std::log(sum);
}

/// Minimizing s and the Chernoff value at a caller-chosen search tolerance.
inline std::pair<double, double> chernoff_min_point(const std::vector<double>& p0,
                                                    const std::vector<double>& p1,
                                                    double s_tol) {
    double s = golden_min([&](double v) { return chernoff_exponent_at(p0, p1, v); },
                          0.0, 1.0, s_tol);
    double value = -chernoff_exponent_at(p0, p1, s);
    return {s, std::max(0.0, value)};
}

inline double kl_sum(const std::vector<double>& p0, const std::vector<double>& p1) {
    double sum = 0.0;
    for (std::size_t k = 0; k < p0.size(); ++k) {
        if (p0[k] < kProbFloor) continue;  // 0 * ln(0/q) = 0
        if (p1[k] < kProbFloor) return std::numeric_limits<double>::infinity();
        sum += p0[k] * std::log(p0[k] / p1[k]);
    }
    return std::max(0.0, sum);
}

/// Inverse standard normal CDF by bisection; plenty accurate for start points.
inline double normal_quantile(double p) {
    double lo = -12.0, hi = 12.0;
    for (int i = 0; i < 80; ++i) {
        double mid = 0.5 * (lo + hi);
        (normal_cdf(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

// ============================================================================
// Operations
// ============================================================================

/// Message distributions under both hypotheses for an M >= 1 bit quantizer:
/// p_i[k] = Phi((t_{k+1}-mu_i)/sigma) - Phi((t_k-mu_i)/sigma) with the outer
/// edges at -inf and +inf.
inline ConditionalPMF cell_probabilities(const GaussianHypothesisPair& h, const Quantizer& q) {
    h.validate();
    q.validate();  // rejects unsorted thresholds
    if (q.bits < 1) throw std::invalid_argument("cell_probabilities: need at least 1 bit");

    ConditionalPMF pmf;
    for (double mu : {h.mu0, h.mu1}) {
        std::vector<double>& p = (mu == h.mu0) ? pmf.p0 : pmf.p1;
        p.resize(q.cells());
        double prev = 0.0;
        for (std::size_t k = 0; k < q.thresholds.size(); ++k) {
            double edge = normal_cdf((q.thresholds[k] - mu) / h.sigma);
            p[k] = std::max(0.0, edge - prev);
            prev = edge;
        }
        p.back() = std::max(0.0, 1.0 - prev);
        for (double& v : p)
            if (v < kProbFloor) v = 0.0;
    }
    // mu0 == mu1 would alias the branches above; fill p1 explicitly then.
    if (h.mu0 == h.mu1) pmf.p1 = pmf.p0;
    return pmf;
}

/// Chernoff information: -min over s in [0,1] of ln sum_k p0^s p1^(1-s).
/// The exponent is convex in s; golden-section search to |ds| <= 1e-8.
inline double chernoff_information(const ConditionalPMF& pmf) {
    pmf.validate();
    if (pmf.p0 == pmf.p1) return 0.0;
    return detail::chernoff_min_point(pmf.p0, pmf.p1, 1e-8).second;
}

/// KL divergence sum_k p0 ln(p0/p1), with 0 ln(0/q) = 0. Returns +infinity
/// when some cell has p0 > 0 but p1 = 0 (divergence-infinite case).
inline double kl_divergence(const ConditionalPMF& pmf) {
    pmf.validate();
    if (pmf.p0 == pmf.p1) return 0.0;
    return detail::kl_sum(pmf.p0, pmf.p1);
}

/// Infinite-resolution ceiling of the per-sensor contribution for the
/// equal-variance Gaussian pair.
inline double info_upper_bound(const GaussianHypothesisPair& h, Metric metric) {
    h.validate();
    double delta = h.mu1 - h.mu0;
    double denom = (metric == Metric::chernoff) ? 8.0 : 2.0;
    return delta * delta / (denom * h.sigma * h.sigma);
}

}  // namespace hopdet
