#include "mom/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mom {

namespace {

const double kFourSqrtE = 4.0 * std::exp(0.5);
const double kTwelveSqrt3 = 12.0 * std::sqrt(3.0);
const double kEightSqrt2 = 8.0 * std::sqrt(2.0);
const double kSqrtPi = std::sqrt(3.14159265358979323846);

void check_scale(double scale, const char* what) {
    if (!(scale >= 0.0)) throw Error(std::string(what) + " must be nonnegative");
}

void check_assumption3(double c_o, double alpha_o) {
    if (!(c_o >= 1.0)) throw Error("outlier-growth constant c_o must be >= 1");
    if (!(alpha_o >= 0.0) || !(alpha_o < 1.0)) {
        throw Error("outlier-growth exponent alpha_o must lie in [0, 1)");
    }
}

void check_log_delta(double log_delta) {
    if (!(log_delta < 0.0)) throw DeltaOutOfRange("delta must lie strictly inside (0, 1)", 0, 0);
}

double require_in_range(const DeltaRange& range, double log_delta) {
    if (!range.contains_log(log_delta)) {
        throw DeltaOutOfRange("log(delta) = " + std::to_string(log_delta) +
                                  " outside admissible [" + std::to_string(range.log_lower) +
                                  ", " + std::to_string(range.log_upper) + "]",
                              range.log_lower, range.log_upper);
    }
    return log_delta;
}

double require_log(double delta, const DeltaRange& range) {
    if (!(delta > 0.0) || !(delta < 1.0)) {
        throw DeltaOutOfRange("delta must lie in (0, 1)", range.log_lower, range.log_upper);
    }
    return std::log(delta);
}

void check_sum_breakdown(double eps_x, double eps_y) {
    if (!(eps_x >= 0.0) || !(eps_y >= 0.0)) {
        throw EpsilonOutOfRange("outlier fractions must be nonnegative");
    }
    if (eps_x + eps_y >= 0.5) {
        throw SumBreakdownExceeded("e_x + e_y = " + std::to_string(eps_x + eps_y) +
                                   " is at or above 1/2");
    }
}

/// Diagonal blocks need 2(n_o + m_o) sane-block slack inside the smaller sample.
long diag_effective_size(long n, long m, double eps_x, double eps_y) {
    const long n_min = std::min(n, m);
    if (n != m) {
        const double corrupted = 2.0 * (eps_x * static_cast<double>(n) +
                                        eps_y * static_cast<double>(m));
        if (corrupted > static_cast<double>(n_min)) {
            throw SumBreakdownExceeded("unequal sizes admissible only while 2(n_o + m_o) <= min(n, m)");
        }
    }
    return n_min;
}

}  // namespace

const char* to_string(BoundKind kind) {
    switch (kind) {
        case BoundKind::Chebyshev: return "chebyshev";
        case BoundKind::SubGaussian: return "subgaussian";
        case BoundKind::Expectation: return "expectation";
        case BoundKind::Generalization: return "generalization";
    }
    return "unknown";
}

namespace display {

double chebyshev(double scale, double gamma, double log_delta, long n) {
    return kFourSqrtE * scale * gamma * std::sqrt((1.0 - log_delta) / static_cast<double>(n));
}

double subgaussian(double scale, double cap_gamma, double log_delta, long n) {
    return 4.0 * scale * cap_gamma * std::sqrt(-log_delta / static_cast<double>(n));
}

double expectation(double scale, double cap_gamma, double delta_const, long n, double c_o,
                   double alpha_o) {
    const double rate = std::pow(static_cast<double>(n), (1.0 - alpha_o) / 2.0);
    return 2.0 * scale * cap_gamma *
           (4.0 * c_o * delta_const / rate + kSqrtPi / std::sqrt(static_cast<double>(n)));
}

double cross_block(double sigma_cap, double gamma_tilde, double log_delta, long n_min) {
    const double log_two_over_delta = std::log(2.0) - log_delta;
    return kTwelveSqrt3 * sigma_cap * gamma_tilde *
           std::sqrt((1.0 + log_two_over_delta) / static_cast<double>(n_min));
}

double generalization(double m_bound, double cap_gamma, long vc_dim, long n, double log_delta) {
    const double numer = static_cast<double>(vc_dim) * (1.0 + std::log(static_cast<double>(n))) -
                         log_delta;
    return kEightSqrt2 * m_bound * cap_gamma * std::sqrt(numer / static_cast<double>(n));
}

}  // namespace display

// ---- MoM -------------------------------------------------------------

double mom_bound_chebyshev_log(double sigma, long n, double log_delta, double epsilon,
                               const AlphaMapping& mapping) {
    check_scale(sigma, "sigma");
    check_log_delta(log_delta);
    require_in_range(delta_range_chebyshev(mapping, epsilon, n), log_delta);
    const DerivedConstants c = derived_constants(mapping, epsilon);
    return display::chebyshev(sigma, c.gamma, log_delta, n);
}

double mom_bound_chebyshev(double sigma, long n, double delta, double epsilon,
                           const AlphaMapping& mapping) {
    const DeltaRange range = delta_range_chebyshev(mapping, epsilon, n);
    return mom_bound_chebyshev_log(sigma, n, require_log(delta, range), epsilon, mapping);
}

double mom_bound_subgaussian_log(double rho, long n, double log_delta, double epsilon,
                                 const AlphaMapping& mapping) {
    check_scale(rho, "rho");
    check_log_delta(log_delta);
    const DeltaRange range = delta_range_subgaussian(mapping, epsilon, n);
    if (log_delta > range.log_upper + 1e-9) {
        throw DeltaOutOfRange("log(delta) above the subgaussian admissible limit " +
                                  std::to_string(range.log_upper),
                              range.log_lower, range.log_upper);
    }
    const DerivedConstants c = derived_constants(mapping, epsilon);
    return display::subgaussian(rho, c.cap_gamma, log_delta, n);
}

double mom_bound_subgaussian(double rho, long n, double delta, double epsilon,
                             const AlphaMapping& mapping) {
    const DeltaRange range = delta_range_subgaussian(mapping, epsilon, n);
    return mom_bound_subgaussian_log(rho, n, require_log(delta, range), epsilon, mapping);
}

double mom_expectation_bound(double rho, long n, double epsilon, double c_o, double alpha_o,
                             const AlphaMapping& mapping) {
    check_scale(rho, "rho");
    check_assumption3(c_o, alpha_o);
    if (epsilon == 0.0) {
        throw EpsilonZero("expectation bound undefined at epsilon = 0; use the clean variant");
    }
    const DerivedConstants c = derived_constants(mapping, epsilon);
    return display::expectation(rho, c.cap_gamma, *c.delta_const, n, c_o, alpha_o);
}

double mom_expectation_bound_clean(double rho, long n) {
    check_scale(rho, "rho");
    return 2.0 * rho * kSqrtPi / std::sqrt(static_cast<double>(n));
}

// ---- MoU (one sample) --------------------------------------------------

double mou_bound_chebyshev_log(double sigma_cap, long n, double log_delta, double epsilon,
                               const AlphaMapping& mapping) {
    check_scale(sigma_cap, "Sigma(h)");
    check_log_delta(log_delta);
    require_in_range(delta_range_chebyshev(mapping, epsilon, n), log_delta);
    const DerivedConstants c = derived_constants(mapping, epsilon);
    return display::chebyshev(sigma_cap, c.gamma, log_delta, n);
}

double mou_bound_chebyshev(double sigma_cap, long n, double delta, double epsilon,
                           const AlphaMapping& mapping) {
    const DeltaRange range = delta_range_chebyshev(mapping, epsilon, n);
    return mou_bound_chebyshev_log(sigma_cap, n, require_log(delta, range), epsilon, mapping);
}

double mou_bound_bounded_log(int degree, double m_bound, long n, double log_delta, double epsilon,
                             const AlphaMapping& mapping) {
    if (degree < 1) throw UnsupportedKernelDegree("kernel degree must be positive");
    check_scale(m_bound, "M");
    const double scale = std::sqrt(static_cast<double>(degree)) * m_bound;
    return mom_bound_subgaussian_log(scale, n, log_delta, epsilon, mapping);
}

double mou_bound_bounded(int degree, double m_bound, long n, double delta, double epsilon,
                         const AlphaMapping& mapping) {
    const DeltaRange range = delta_range_subgaussian(mapping, epsilon, n);
    return mou_bound_bounded_log(degree, m_bound, n, require_log(delta, range), epsilon, mapping);
}

double mou_expectation_bound(int degree, double m_bound, long n, double epsilon, double c_o,
                             double alpha_o, const AlphaMapping& mapping) {
    if (degree < 1) throw UnsupportedKernelDegree("kernel degree must be positive");
    const double scale = std::sqrt(static_cast<double>(degree)) * m_bound;
    return mom_expectation_bound(scale, n, epsilon, c_o, alpha_o, mapping);
}

double mou_expectation_bound_clean(int degree, double m_bound, long n) {
    if (degree < 1) throw UnsupportedKernelDegree("kernel degree must be positive");
    const double scale = std::sqrt(static_cast<double>(degree)) * m_bound;
    return mom_expectation_bound_clean(scale, n);
}

// ---- MoU2 (cross blocks) -------------------------------------------------

double mou2_bound_log(double sigma_cap, long n, long m, double log_delta, double eps_x,
                      double eps_y, const AlphaMapping& mapping) {
    check_scale(sigma_cap, "Sigma(H)");
    check_log_delta(log_delta);
    const TwoSampleConstants constants = two_sample_constants(mapping, eps_x, eps_y);
    const DeltaRange range = two_sample_delta_range(constants, n, m);
    require_in_range(range, log_delta);
    const DerivedConstants c = derived_constants(mapping, constants.epsilon_tilde);
    return display::cross_block(sigma_cap, c.gamma, log_delta, std::min(n, m));
}

double mou2_bound(double sigma_cap, long n, long m, double delta, double eps_x, double eps_y,
                  const AlphaMapping& mapping) {
    const TwoSampleConstants constants = two_sample_constants(mapping, eps_x, eps_y);
    const DeltaRange range = two_sample_delta_range(constants, n, m);
    return mou2_bound_log(sigma_cap, n, m, require_log(delta, range), eps_x, eps_y, mapping);
}

// ---- MoU2 diagonal ---------------------------------------------------------

double mou2_diag_bound_chebyshev_log(double sigma_cap, long n, long m, double log_delta,
                                     double eps_x, double eps_y, const AlphaMapping& mapping) {
    check_scale(sigma_cap, "Sigma(H)");
    check_log_delta(log_delta);
    check_sum_breakdown(eps_x, eps_y);
    const long n_eff = diag_effective_size(n, m, eps_x, eps_y);
    const double eps_sum = eps_x + eps_y;
    require_in_range(delta_range_chebyshev(mapping, eps_sum, n_eff), log_delta);
    const DerivedConstants c = derived_constants(mapping, eps_sum);
    return display::chebyshev(sigma_cap, c.gamma, log_delta, n_eff);
}

double mou2_diag_bound_chebyshev(double sigma_cap, long n, long m, double delta, double eps_x,
                                 double eps_y, const AlphaMapping& mapping) {
    check_sum_breakdown(eps_x, eps_y);
    const DeltaRange range =
        delta_range_chebyshev(mapping, eps_x + eps_y, diag_effective_size(n, m, eps_x, eps_y));
    return mou2_diag_bound_chebyshev_log(sigma_cap, n, m, require_log(delta, range), eps_x, eps_y,
                                         mapping);
}

double mou2_diag_bound_bounded_log(double m_bound, long n, long m, double log_delta, double eps_x,
                                   double eps_y, const AlphaMapping& mapping) {
    check_scale(m_bound, "M");
    check_log_delta(log_delta);
    check_sum_breakdown(eps_x, eps_y);
    const long n_eff = diag_effective_size(n, m, eps_x, eps_y);
    const double eps_sum = eps_x + eps_y;
    const DeltaRange range = delta_range_subgaussian(mapping, eps_sum, n_eff);
    if (log_delta > range.log_upper + 1e-9) {
        throw DeltaOutOfRange("log(delta) above the subgaussian admissible limit",
                              range.log_lower, range.log_upper);
    }
    const DerivedConstants c = derived_constants(mapping, eps_sum);
    return 8.0 * m_bound * c.cap_gamma * std::sqrt(-log_delta / static_cast<double>(n_eff));
}

double mou2_diag_bound_bounded(double m_bound, long n, long m, double delta, double eps_x,
                               double eps_y, const AlphaMapping& mapping) {
    check_sum_breakdown(eps_x, eps_y);
    const DeltaRange range =
        delta_range_subgaussian(mapping, eps_x + eps_y, diag_effective_size(n, m, eps_x, eps_y));
    return mou2_diag_bound_bounded_log(m_bound, n, m, require_log(delta, range), eps_x, eps_y,
                                       mapping);
}

double mou2_diag_expectation_bound(double m_bound, long n, long m, double eps_x, double eps_y,
                                   double c_o, double alpha_o, const AlphaMapping& mapping) {
    check_scale(m_bound, "M");
    check_assumption3(c_o, alpha_o);
    check_sum_breakdown(eps_x, eps_y);
    const double eps_sum = eps_x + eps_y;
    if (eps_sum == 0.0) {
        throw EpsilonZero("expectation bound undefined at epsilon = 0; use the clean variant");
    }
    const long n_eff = diag_effective_size(n, m, eps_x, eps_y);
    const DerivedConstants c = derived_constants(mapping, eps_sum);
    const double rate = std::pow(static_cast<double>(n_eff), (1.0 - alpha_o) / 2.0);
    return 4.0 * m_bound * c.cap_gamma *
           (4.0 * std::sqrt(2.0) * c_o * *c.delta_const / rate +
            kSqrtPi / std::sqrt(static_cast<double>(n_eff)));
}

double mou2_diag_expectation_bound_clean(double m_bound, long n) {
    check_scale(m_bound, "M");
    return 4.0 * m_bound * kSqrtPi / std::sqrt(static_cast<double>(n));
}

// ---- Generalization ---------------------------------------------------------

double generalization_bound_log(double m_bound, long vc_dim, long n, double log_delta,
                                double epsilon, const AlphaMapping& mapping) {
    check_scale(m_bound, "M");
    if (vc_dim < 1) throw Error("VC dimension must be positive");
    check_log_delta(log_delta);
    const DeltaRange range = delta_range_subgaussian(mapping, epsilon, n);
    if (log_delta > range.log_upper + 1e-9) {
        throw DeltaOutOfRange("log(delta) above the admissible limit for the excess-risk bound",
                              range.log_lower, range.log_upper);
    }
    const DerivedConstants c = derived_constants(mapping, epsilon);
    return display::generalization(m_bound, c.cap_gamma, vc_dim, n, log_delta);
}

double generalization_bound(double m_bound, long vc_dim, long n, double delta, double epsilon,
                            const AlphaMapping& mapping) {
    const DeltaRange range = delta_range_subgaussian(mapping, epsilon, n);
    return generalization_bound_log(m_bound, vc_dim, n, require_log(delta, range), epsilon,
                                    mapping);
}

// ---- Variance proxies ----------------------------------------------------

double VarianceProxy::sigma_cap() const { return std::sqrt(sigma_sq_cap); }
double CrossVarianceProxy::sigma_cap() const { return std::sqrt(sigma_sq_cap); }

namespace {

double binomial_coeff(long n, long k) {
    if (k < 0 || k > n) return 0.0;
    double out = 1.0;
    for (long i = 0; i < k; ++i) {
        out *= static_cast<double>(n - i) / static_cast<double>(i + 1);
    }
    return out;
}

struct RunningVariance {
    long count = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++count;
        const double d = x - mean;
        mean += d / static_cast<double>(count);
        m2 += d * (x - mean);
    }
    /// Unbiased sample variance.
    double variance() const { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }
};

double clamp_component(double v, bool& clamped) {
    if (v < 0.0) {
        clamped = true;
        return 0.0;
    }
    return v;
}

}  // namespace

VarianceProxy estimate_variance_proxy(const Sample& sample, const UKernel& kernel, Rng& rng,
                                      long completions) {
    const int d = kernel.degree;
    if (d < 1 || d > 3) {
        throw UnsupportedKernelDegree("variance proxy limited to degrees 1..3");
    }
    const long n = sample.size();
    if (n < 2 * d) {
        throw SampleTooSmall("variance proxy needs at least 2d observations");
    }
    const auto& z = sample.values;
    const auto draw = [&](long exclude_a, long exclude_b) {
        for (;;) {
            const long j = static_cast<long>(rng.uniform_int(static_cast<std::uint64_t>(n)));
            if (j != exclude_a && j != exclude_b) return j;
        }
    };

    VarianceProxy proxy;
    proxy.zeta.assign(static_cast<std::size_t>(d), 0.0);
    double args[3];
    for (int c = 1; c <= d; ++c) {
        RunningVariance var;
        // Fixed-argument tuples: every point for c = 1, a capped random set
        // of distinct tuples otherwise.
        const long tuples = (c == 1) ? n : std::min<long>(2000, n * (n - 1) / 2);
        for (long t = 0; t < tuples; ++t) {
            long i0 = (c == 1) ? t : static_cast<long>(rng.uniform_int(static_cast<std::uint64_t>(n)));
            long i1 = -1;
            if (c >= 2) i1 = draw(i0, -1);
            args[0] = z[static_cast<std::size_t>(i0)];
            if (c >= 2) args[1] = z[static_cast<std::size_t>(i1)];
            if (c == d) {
                if (d == 3) args[2] = z[static_cast<std::size_t>(draw(i0, i1))];
                var.add(kernel.eval(std::span<const double>(args, static_cast<std::size_t>(d))));
                continue;
            }
            // Conditional mean h_c: average the kernel over resampled completions.
            double acc = 0.0;
            for (long r = 0; r < completions; ++r) {
                long j0 = draw(i0, i1);
                args[c] = z[static_cast<std::size_t>(j0)];
                if (d - c == 2) {
                    const long j1 = draw(i0, j0);
                    args[c + 1] = z[static_cast<std::size_t>(j1)];
                }
                acc += kernel.eval(std::span<const double>(args, static_cast<std::size_t>(d)));
            }
            var.add(acc / static_cast<double>(completions));
        }
        proxy.zeta[static_cast<std::size_t>(c - 1)] = clamp_component(var.variance(), proxy.clamped);
    }
    double factorial = 1.0;
    for (int i = 2; i <= d; ++i) factorial *= i;
    double total = 0.0;
    for (int c = 1; c <= d; ++c) {
        total += binomial_coeff(d, c) * proxy.zeta[static_cast<std::size_t>(c - 1)];
    }
    proxy.sigma_sq_cap = factorial * total;
    return proxy;
}

CrossVarianceProxy estimate_variance_proxy(const Sample& x, const Sample& y,
                                           const CrossKernel& kernel, Rng& rng,
                                           long completions) {
    const long n = x.size();
    const long m = y.size();
    if (n < 2 || m < 2) throw SampleTooSmall("cross variance proxy needs two observations per sample");
    CrossVarianceProxy proxy;

    RunningVariance h1;
    for (long i = 0; i < n; ++i) {
        double acc = 0.0;
        for (long r = 0; r < completions; ++r) {
            const long j = static_cast<long>(rng.uniform_int(static_cast<std::uint64_t>(m)));
            acc += kernel.eval(x.values[static_cast<std::size_t>(i)],
                               y.values[static_cast<std::size_t>(j)]);
        }
        h1.add(acc / static_cast<double>(completions));
    }
    RunningVariance h2;
    for (long j = 0; j < m; ++j) {
        double acc = 0.0;
        for (long r = 0; r < completions; ++r) {
            const long i = static_cast<long>(rng.uniform_int(static_cast<std::uint64_t>(n)));
            acc += kernel.eval(x.values[static_cast<std::size_t>(i)],
                               y.values[static_cast<std::size_t>(j)]);
        }
        h2.add(acc / static_cast<double>(completions));
    }
    RunningVariance full;
    const long pairs = std::min<long>(4000, n * m);
    for (long t = 0; t < pairs; ++t) {
        const long i = static_cast<long>(rng.uniform_int(static_cast<std::uint64_t>(n)));
        const long j = static_cast<long>(rng.uniform_int(static_cast<std::uint64_t>(m)));
        full.add(kernel.eval(x.values[static_cast<std::size_t>(i)],
                             y.values[static_cast<std::size_t>(j)]));
    }
    proxy.sigma1_sq = clamp_component(h1.variance(), proxy.clamped);
    proxy.sigma2_sq = clamp_component(h2.variance(), proxy.clamped);
    proxy.sigma_sq = clamp_component(full.variance(), proxy.clamped);
    proxy.sigma_sq_cap = proxy.sigma_sq + proxy.sigma1_sq + proxy.sigma2_sq;
    return proxy;
}

double u_statistic_variance(long b, int degree, std::span<const double> zeta) {
    if (degree < 1 || static_cast<std::size_t>(degree) != zeta.size()) {
        throw Error("need one zeta component per kernel degree");
    }
    if (b < degree) throw BlockTooSmall("block smaller than the kernel degree");
    double acc = 0.0;
    for (int c = 1; c <= degree; ++c) {
        acc += binomial_coeff(degree, c) * binomial_coeff(b - degree, degree - c) *
               zeta[static_cast<std::size_t>(c - 1)];
    }
    return acc / binomial_coeff(b, degree);
}

double two_sample_u_variance(long n, long m, double sigma_sq, double sigma1_sq, double sigma2_sq) {
    if (n < 1 || m < 1) throw EmptySample("two-sample variance needs nonempty samples");
    const double nm = static_cast<double>(n) * static_cast<double>(m);
    return sigma_sq / nm + static_cast<double>(m - 1) * sigma1_sq / nm +
           static_cast<double>(n - 1) * sigma2_sq / nm;
}

// ---- Reports ---------------------------------------------------------------

EstimateReport mom_report_chebyshev(const Sample& sample, double sigma, double log_delta,
                                    double epsilon, const AlphaMapping& mapping) {
    const long n = sample.size();
    EstimateReport report;
    report.k_used = block_count_chebyshev_log(mapping, epsilon, log_delta, n);
    report.estimate = median_of_means(sample, partition_contiguous(n, report.k_used));
    report.bound_width = mom_bound_chebyshev_log(sigma, n, log_delta, epsilon, mapping);
    report.log_delta = log_delta;
    report.delta = std::exp(log_delta);
    report.kind = BoundKind::Chebyshev;
    report.mapping = mapping.kind();
    report.epsilon = epsilon;
    return report;
}

EstimateReport mom_report_subgaussian(const Sample& sample, double rho, double log_delta,
                                      double epsilon, const AlphaMapping& mapping) {
    const long n = sample.size();
    EstimateReport report;
    report.k_used = block_count_subgaussian(mapping, epsilon, n);
    report.estimate = median_of_means(sample, partition_contiguous(n, report.k_used));
    report.bound_width = mom_bound_subgaussian_log(rho, n, log_delta, epsilon, mapping);
    report.log_delta = log_delta;
    report.delta = std::exp(log_delta);
    report.kind = BoundKind::SubGaussian;
    report.mapping = mapping.kind();
    report.epsilon = epsilon;
    return report;
}

}  // namespace mom
