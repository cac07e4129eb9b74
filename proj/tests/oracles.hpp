#ifndef MOM_TESTS_ORACLES_HPP
#define MOM_TESTS_ORACLES_HPP

// Independent oracle routes used by the tests: closed forms evaluated from
// their published per-mapping simplifications, and exact enumerations over
// small discrete distributions.  Nothing here calls the library paths under
// test.

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace oracles {

struct ConstantsRow {
    double alpha, beta, gamma, cap_gamma, delta, eta;
};

/// Per-mapping simplified closed forms (valid for 0 < e < 1/2).
inline ConstantsRow arithmetic_row(double e) {
    ConstantsRow r{};
    r.alpha = (1.0 + 2.0 * e) / 2.0;
    r.beta = 2.0 * (1.0 + 2.0 * e) / (1.0 - 2.0 * e);
    r.gamma = std::sqrt(1.0 + 2.0 * e) / std::pow(1.0 - 2.0 * e, 1.5);
    r.cap_gamma = std::sqrt(1.0 + 2.0 * e) / std::sqrt(1.0 - 2.0 * e);
    r.delta = std::sqrt((1.0 + 2.0 * e) / (2.0 * e));
    r.eta = 1.0 / (1.0 + 2.0 * e);
    return r;
}

inline ConstantsRow geometric_row(double e) {
    ConstantsRow r{};
    const double s = std::sqrt(2.0 * e);
    r.alpha = s;
    r.beta = 2.0 * (1.0 + s) / (1.0 - 2.0 * e);
    r.gamma = (2.0 - s) * std::pow(1.0 + s, 1.5) / (2.0 * std::pow(1.0 - 2.0 * e, 1.5));
    r.cap_gamma = std::sqrt(1.0 + s) / std::sqrt(1.0 - 2.0 * e);
    r.delta = std::pow(2.0 / e, 0.25);
    r.eta = (2.0 - s) / 2.0;
    return r;
}

inline ConstantsRow harmonic_row(double e) {
    ConstantsRow r{};
    r.alpha = 4.0 * e / (1.0 + 2.0 * e);
    r.beta = 4.0 / (1.0 - 2.0 * e);
    r.gamma = (3.0 - 2.0 * e) / (std::sqrt(2.0) * std::pow(1.0 - 2.0 * e, 1.5));
    r.cap_gamma = std::sqrt(2.0) / std::sqrt(1.0 - 2.0 * e);
    r.delta = std::sqrt(4.0 / (1.0 + 2.0 * e));
    r.eta = (3.0 - 2.0 * e) / 4.0;
    return r;
}

inline ConstantsRow polynomial_row(double e) {
    ConstantsRow r{};
    r.alpha = e * (2.5 - e);
    r.beta = 2.0 * (5.0 - 2.0 * e) / (1.0 - 2.0 * e);
    r.gamma = (3.0 - 2.0 * e) * std::sqrt(5.0 - 2.0 * e) / std::pow(1.0 - 2.0 * e, 1.5);
    r.cap_gamma = std::sqrt(5.0 - 2.0 * e) / std::sqrt(1.0 - 2.0 * e);
    r.delta = std::sqrt((5.0 - 2.0 * e) / 2.0);
    r.eta = (3.0 - 2.0 * e) / (5.0 - 2.0 * e);
    return r;
}

/// Finite scalar distribution given by atoms and probabilities.
struct Discrete {
    std::vector<double> atoms;
    std::vector<double> probs;
};

inline long double discrete_mean(const Discrete& d, const std::function<long double(double)>& f) {
    long double acc = 0.0L;
    for (std::size_t i = 0; i < d.atoms.size(); ++i) {
        acc += static_cast<long double>(d.probs[i]) * f(d.atoms[i]);
    }
    return acc;
}

/// Exact moments of a statistic of B i.i.d. draws, by enumerating all
/// |atoms|^B outcomes with product weights.
inline void enumerate_statistic(const Discrete& d, int b,
                                const std::function<long double(const std::vector<double>&)>& stat,
                                long double& mean, long double& var) {
    const std::size_t k = d.atoms.size();
    std::vector<std::size_t> digit(static_cast<std::size_t>(b), 0);
    std::vector<double> draw(static_cast<std::size_t>(b));
    long double e1 = 0.0L;
    long double e2 = 0.0L;
    for (;;) {
        long double w = 1.0L;
        for (int i = 0; i < b; ++i) {
            draw[static_cast<std::size_t>(i)] = d.atoms[digit[static_cast<std::size_t>(i)]];
            w *= static_cast<long double>(d.probs[digit[static_cast<std::size_t>(i)]]);
        }
        const long double s = stat(draw);
        e1 += w * s;
        e2 += w * s * s;
        int pos = 0;
        while (pos < b) {
            if (++digit[static_cast<std::size_t>(pos)] < k) break;
            digit[static_cast<std::size_t>(pos)] = 0;
            ++pos;
        }
        if (pos == b) break;
    }
    mean = e1;
    var = e2 - e1 * e1;
}

/// Exact moments of a two-sample statistic of (n, m) i.i.d. draws from
/// independent discrete distributions.
inline void enumerate_two_sample(const Discrete& dx, const Discrete& dy, int n, int m,
                                 const std::function<long double(const std::vector<double>&,
                                                                 const std::vector<double>&)>& stat,
                                 long double& mean, long double& var) {
    const int total = n + m;
    const std::size_t kx = dx.atoms.size();
    const std::size_t ky = dy.atoms.size();
    std::vector<std::size_t> digit(static_cast<std::size_t>(total), 0);
    std::vector<double> xs(static_cast<std::size_t>(n));
    std::vector<double> ys(static_cast<std::size_t>(m));
    long double e1 = 0.0L;
    long double e2 = 0.0L;
    for (;;) {
        long double w = 1.0L;
        for (int i = 0; i < n; ++i) {
            xs[static_cast<std::size_t>(i)] = dx.atoms[digit[static_cast<std::size_t>(i)]];
            w *= static_cast<long double>(dx.probs[digit[static_cast<std::size_t>(i)]]);
        }
        for (int j = 0; j < m; ++j) {
            ys[static_cast<std::size_t>(j)] = dy.atoms[digit[static_cast<std::size_t>(n + j)]];
            w *= static_cast<long double>(dy.probs[digit[static_cast<std::size_t>(n + j)]]);
        }
        const long double s = stat(xs, ys);
        e1 += w * s;
        e2 += w * s * s;
        int pos = 0;
        while (pos < total) {
            const std::size_t limit = pos < n ? kx : ky;
            if (++digit[static_cast<std::size_t>(pos)] < limit) break;
            digit[static_cast<std::size_t>(pos)] = 0;
            ++pos;
        }
        if (pos == total) break;
    }
    mean = e1;
    var = e2 - e1 * e1;
}

/// CDF of the median of k i.i.d. draws (k odd) at threshold t, from the
/// binomial order-statistic identity P(med <= t) = P(Bin(k, F(t)) > k/2).
inline long double median_cdf_odd(int k, long double cdf_at_t) {
    long double acc = 0.0L;
    const int need = (k + 1) / 2;
    for (int j = need; j <= k; ++j) {
        long double coeff = 1.0L;
        for (int i = 0; i < j; ++i) {
            coeff *= static_cast<long double>(k - i) / static_cast<long double>(i + 1);
        }
        acc += coeff * std::pow(cdf_at_t, static_cast<long double>(j)) *
               std::pow(1.0L - cdf_at_t, static_cast<long double>(k - j));
    }
    return acc;
}

/// One-sided binomial acceptance threshold: the largest failure count whose
/// upper tail probability under Bin(runs, p) stays above the level.
inline long binomial_acceptance_threshold(long runs, double p, double level) {
    // walk the pmf in log space to avoid underflow
    long double log_pmf = static_cast<long double>(runs) * std::log1p(-static_cast<long double>(p));
    long double cdf = std::exp(log_pmf);
    long c = 0;
    while (c < runs && 1.0L - cdf > level) {
        ++c;
        log_pmf += std::log(static_cast<long double>(runs - c + 1)) -
                   std::log(static_cast<long double>(c)) +
                   std::log(static_cast<long double>(p)) -
                   std::log1p(-static_cast<long double>(p));
        cdf += std::exp(log_pmf);
    }
    return c;
}

}  // namespace oracles

#endif
