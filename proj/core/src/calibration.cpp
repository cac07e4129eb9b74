#include "mom/calibration.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

namespace mom {

namespace {

constexpr double kLogSlack = 1e-9;  // tolerance for inclusive range ends in log space

std::string fmt(double x) {
    std::ostringstream os;
    os << x;
    return os.str();
}

void check_epsilon_fraction(double epsilon) {
    if (!(epsilon >= 0.0) || !(epsilon <= 0.5)) {
        throw EpsilonOutOfRange("epsilon must lie in [0, 1/2], got " + fmt(epsilon));
    }
}

void check_below_breakdown(double epsilon) {
    if (!(epsilon >= 0.0)) throw EpsilonOutOfRange("epsilon must be nonnegative, got " + fmt(epsilon));
    if (epsilon >= 0.5) {
        throw BreakdownExceeded("outlier fraction " + fmt(epsilon) +
                                " is at or above the 1/2 breakdown point");
    }
}

void check_sample_size(long n) {
    if (n < 1) throw Error("sample size must be positive, got " + fmt(static_cast<double>(n)));
}

}  // namespace

const char* to_string(MappingKind kind) {
    switch (kind) {
        case MappingKind::Arithmetic: return "arithmetic";
        case MappingKind::Geometric: return "geometric";
        case MappingKind::Harmonic: return "harmonic";
        case MappingKind::Polynomial: return "polynomial";
        case MappingKind::Custom: return "custom";
    }
    return "unknown";
}

AlphaMapping::AlphaMapping(MappingKind kind) : kind_(kind), name_(to_string(kind)) {}

AlphaMapping AlphaMapping::named(MappingKind kind) {
    if (kind == MappingKind::Custom) {
        throw InvalidMapping("custom mappings require an explicit function");
    }
    return AlphaMapping(kind);
}

AlphaMapping AlphaMapping::custom(std::function<double(double)> fn, std::string name) {
    AlphaMapping mapping(MappingKind::Custom);
    mapping.fn_ = std::move(fn);
    mapping.name_ = std::move(name);
    return mapping;
}

double AlphaMapping::operator()(double epsilon) const {
    check_epsilon_fraction(epsilon);
    double alpha = 0.0;
    switch (kind_) {
        case MappingKind::Arithmetic: alpha = (1.0 + 2.0 * epsilon) / 2.0; break;
        case MappingKind::Geometric: alpha = std::sqrt(2.0 * epsilon); break;
        case MappingKind::Harmonic: alpha = 4.0 * epsilon / (1.0 + 2.0 * epsilon); break;
        case MappingKind::Polynomial: alpha = epsilon * (2.5 - epsilon); break;
        case MappingKind::Custom: {
            alpha = fn_(epsilon);
            if (!std::isfinite(alpha)) {
                throw InvalidMapping("custom mapping returned a non-finite value at epsilon = " +
                                     fmt(epsilon));
            }
            // Admissibility is open-interval only; boundary values may touch
            // the limits (alpha(0) = 0 or alpha(1/2) = 1 are fine).
            if (epsilon > 0.0 && epsilon < 0.5 &&
                !(alpha > 2.0 * epsilon && alpha < 1.0)) {
                throw InvalidMapping("custom mapping violates 2e < alpha(e) < 1 at epsilon = " +
                                     fmt(epsilon) + " (alpha = " + fmt(alpha) + ")");
            }
            if (!(alpha >= 0.0 && alpha <= 1.0)) {
                throw InvalidMapping("custom mapping left [0, 1] at epsilon = " + fmt(epsilon));
            }
            break;
        }
    }
    return alpha;
}

double alpha_value(const AlphaMapping& mapping, double epsilon) { return mapping(epsilon); }

DerivedConstants derived_constants(const AlphaMapping& mapping, double epsilon) {
    check_below_breakdown(epsilon);
    DerivedConstants out;
    out.alpha = mapping(epsilon);
    if (epsilon == 0.0) {
        // No outliers: every block is sane.  eta = 1 gives beta = 2 and
        // gamma = Gamma = 1 for any mapping; Delta is not applicable.
        out.beta = 2.0;
        out.gamma = 1.0;
        out.cap_gamma = 1.0;
        out.eta = 1.0;
        out.delta_const = std::nullopt;
        return out;
    }
    const double alpha = out.alpha;
    const double gap = alpha - 2.0 * epsilon;
    if (!(gap > 0.0)) {
        throw InvalidMapping("mapping does not dominate 2e at epsilon = " + fmt(epsilon));
    }
    out.beta = 2.0 * alpha / gap;
    out.gamma = std::sqrt(alpha) * (alpha - epsilon) / (gap * std::sqrt(gap));
    out.cap_gamma = std::sqrt(alpha / gap);
    out.delta_const = std::sqrt(alpha / epsilon);
    out.eta = (alpha - epsilon) / alpha;
    return out;
}

double gamma_sq_at(double alpha, double epsilon) {
    const double gap = alpha - 2.0 * epsilon;
    return alpha * (alpha - epsilon) * (alpha - epsilon) / (gap * gap * gap);
}

double DeltaRange::lower() const { return std::exp(log_lower); }
double DeltaRange::upper() const { return std::exp(log_upper); }

bool DeltaRange::contains_log(double log_delta) const {
    return log_delta >= log_lower - kLogSlack && log_delta <= log_upper + kLogSlack;
}

bool DeltaRange::contains(double delta) const {
    if (!(delta > 0.0) || !(delta < 1.0)) return false;
    return contains_log(std::log(delta));
}

DeltaRange delta_range_chebyshev(const AlphaMapping& mapping, double epsilon, long n) {
    check_below_breakdown(epsilon);
    check_sample_size(n);
    const DerivedConstants c = derived_constants(mapping, epsilon);
    DeltaRange range;
    range.log_lower = -static_cast<double>(n) / c.beta;
    range.log_upper = -static_cast<double>(n) * c.alpha / c.beta;
    // With no outliers the K >= alpha n cap is vacuous for most mappings;
    // delta <= 1/e stands in for it.
    if (epsilon == 0.0) range.log_upper = std::min(range.log_upper, -1.0);
    if (range.log_lower > range.log_upper + kLogSlack) {
        throw DegenerateRange("no admissible delta for n = " + fmt(static_cast<double>(n)) +
                              ", epsilon = " + fmt(epsilon));
    }
    return range;
}

DeltaRange delta_range_subgaussian(const AlphaMapping& mapping, double epsilon, long n) {
    check_below_breakdown(epsilon);
    check_sample_size(n);
    DeltaRange range;
    if (epsilon == 0.0) {
        range.log_upper = -1.0;
    } else {
        const double alpha = mapping(epsilon);
        range.log_upper = -4.0 * static_cast<double>(n) * alpha;
    }
    const double log_dbl_min = std::log(std::numeric_limits<double>::min());
    range.log_lower = std::min(log_dbl_min, range.log_upper);
    return range;
}

long detail::ceil_guard(double x) {
    return static_cast<long>(std::ceil(x - 1e-9));
}

long block_count_chebyshev_log(const AlphaMapping& mapping, double epsilon, double log_delta,
                               long n) {
    const DeltaRange range = delta_range_chebyshev(mapping, epsilon, n);
    if (!range.contains_log(log_delta)) {
        throw DeltaOutOfRange("log(delta) = " + fmt(log_delta) +
                                  " outside admissible [" + fmt(range.log_lower) + ", " +
                                  fmt(range.log_upper) + "]",
                              range.log_lower, range.log_upper);
    }
    const DerivedConstants c = derived_constants(mapping, epsilon);
    long k = detail::ceil_guard(c.beta * (-log_delta));
    if (k < 1) k = 1;
    if (k > n) k = n;
    return k;
}

long block_count_chebyshev(const AlphaMapping& mapping, double epsilon, double delta, long n) {
    if (!(delta > 0.0) || !(delta < 1.0)) {
        throw DeltaOutOfRange("delta must lie in (0, 1), got " + fmt(delta),
                              0.0, 0.0);
    }
    return block_count_chebyshev_log(mapping, epsilon, std::log(delta), n);
}

long block_count_subgaussian(const AlphaMapping& mapping, double epsilon, long n) {
    check_below_breakdown(epsilon);
    check_sample_size(n);
    if (epsilon == 0.0) return 1;
    const double alpha = mapping(epsilon);
    long k = detail::ceil_guard(alpha * static_cast<double>(n));
    if (k < 1) k = 1;
    if (k > n) k = n;
    return k;
}

TwoSampleConstants two_sample_constants(const AlphaMapping& mapping, double eps_x, double eps_y) {
    if (!(eps_x >= 0.0) || !(eps_y >= 0.0)) {
        throw EpsilonOutOfRange("outlier fractions must be nonnegative");
    }
    TwoSampleConstants out;
    out.epsilon_x = eps_x;
    out.epsilon_y = eps_y;
    out.epsilon_tilde = eps_x + eps_y - eps_x * eps_y;
    if (out.epsilon_tilde >= 0.5) {
        throw JointBreakdownExceeded("joint fraction e_x + e_y - e_x e_y = " +
                                     fmt(out.epsilon_tilde) + " is at or above 1/2");
    }
    const DerivedConstants c = derived_constants(mapping, out.epsilon_tilde);
    out.alpha_tilde = c.alpha;
    out.eta_xy = c.eta;
    const double sqrt_alpha = std::sqrt(out.alpha_tilde);
    out.eta_x = (eps_x == 0.0) ? 1.0 : 1.0 - eps_x / sqrt_alpha;
    out.eta_y = (eps_y == 0.0) ? 1.0 : 1.0 - eps_y / sqrt_alpha;
    const double margin = 2.0 * out.eta_xy - 1.0;
    out.beta_x = 18.0 * out.eta_xy * out.eta_xy / (out.eta_x * margin * margin);
    out.beta_y = 18.0 * out.eta_xy * out.eta_xy / (out.eta_y * margin * margin);
    return out;
}

DeltaRange two_sample_delta_range(const TwoSampleConstants& constants, long n, long m) {
    check_sample_size(n);
    check_sample_size(m);
    const double log2 = std::log(2.0);
    const double sqrt_alpha = std::sqrt(constants.alpha_tilde);
    // K_z = beta_z log(2/delta) must fit in [sqrt(alpha~) size, size].
    const double lo_x = log2 - static_cast<double>(n) / constants.beta_x;
    const double lo_y = log2 - static_cast<double>(m) / constants.beta_y;
    const double hi_x = log2 - sqrt_alpha * static_cast<double>(n) / constants.beta_x;
    const double hi_y = log2 - sqrt_alpha * static_cast<double>(m) / constants.beta_y;
    DeltaRange range;
    range.log_lower = std::max(lo_x, lo_y);
    range.log_upper = std::min(hi_x, hi_y);
    // delta is a probability; keep the reported upper end strictly below 1.
    const double log_below_one = std::log(std::nextafter(1.0, 0.0));
    if (range.log_upper > log_below_one) range.log_upper = log_below_one;
    return range;
}

TwoSampleBlockCounts two_sample_block_counts_log(const TwoSampleConstants& constants,
                                                 double log_delta, long n, long m) {
    const DeltaRange range = two_sample_delta_range(constants, n, m);
    const double log_two_over_delta = std::log(2.0) - log_delta;
    TwoSampleBlockCounts counts;
    counts.k_x = detail::ceil_guard(constants.beta_x * log_two_over_delta);
    counts.k_y = detail::ceil_guard(constants.beta_y * log_two_over_delta);
    const double sqrt_alpha = std::sqrt(constants.alpha_tilde);
    const bool ok_x = counts.k_x >= detail::ceil_guard(sqrt_alpha * static_cast<double>(n)) &&
                      counts.k_x <= n && counts.k_x >= 1;
    const bool ok_y = counts.k_y >= detail::ceil_guard(sqrt_alpha * static_cast<double>(m)) &&
                      counts.k_y <= m && counts.k_y >= 1;
    if (!ok_x || !ok_y) {
        throw DeltaOutOfRange("log(delta) = " + fmt(log_delta) +
                                  " gives block counts outside [sqrt(alpha~) size, size]; "
                                  "admissible log-delta interval is [" +
                                  fmt(range.log_lower) + ", " + fmt(range.log_upper) + "]",
                              range.log_lower, range.log_upper);
    }
    return counts;
}

TwoSampleBlockCounts two_sample_block_counts(const TwoSampleConstants& constants, double delta,
                                             long n, long m) {
    if (!(delta > 0.0) || !(delta < 1.0)) {
        const DeltaRange range = two_sample_delta_range(constants, n, m);
        throw DeltaOutOfRange("delta must lie in (0, 1), got " + fmt(delta), range.log_lower,
                              range.log_upper);
    }
    return two_sample_block_counts_log(constants, std::log(delta), n, m);
}

}  // namespace mom
