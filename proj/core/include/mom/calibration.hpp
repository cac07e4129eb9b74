#ifndef MOM_CALIBRATION_HPP
#define MOM_CALIBRATION_HPP

#include <functional>
#include <optional>
#include <string>

#include "mom/errors.hpp"

namespace mom {

enum class MappingKind { Arithmetic, Geometric, Harmonic, Polynomial, Custom };

const char* to_string(MappingKind kind);

/// An admissible upper bound alpha(e) of e -> 2e on [0, 1/2], used to pick
/// the number of blocks K ~ alpha(e) * n so that blocks free of outliers stay
/// in strict majority.  The four named mappings are
///
///   arithmetic   (1 + 2e) / 2
///   geometric    sqrt(2e)
///   harmonic     4e / (1 + 2e)
///   polynomial   e (5/2 - e)
///
/// A custom mapping is any scalar function on [0, 1/2]; it is validated
/// pointwise at each evaluation (2e < alpha(e) < 1 on the open interval).
class AlphaMapping {
public:
    static AlphaMapping arithmetic() { return AlphaMapping(MappingKind::Arithmetic); }
    static AlphaMapping geometric() { return AlphaMapping(MappingKind::Geometric); }
    static AlphaMapping harmonic() { return AlphaMapping(MappingKind::Harmonic); }
    static AlphaMapping polynomial() { return AlphaMapping(MappingKind::Polynomial); }
    static AlphaMapping named(MappingKind kind);
    static AlphaMapping custom(std::function<double(double)> fn, std::string name = "custom");

    MappingKind kind() const { return kind_; }
    const std::string& name() const { return name_; }

    /// alpha(e).  Throws EpsilonOutOfRange outside [0, 1/2] and
    /// InvalidMapping when a custom mapping breaks admissibility at e.
    double operator()(double epsilon) const;

private:
    explicit AlphaMapping(MappingKind kind);

    MappingKind kind_;
    std::function<double(double)> fn_;
    std::string name_;
};

double alpha_value(const AlphaMapping& mapping, double epsilon);

/// The functions of the mapping that shape every bound:
///   beta  = 2 alpha / (alpha - 2e)         block-count factor
///   gamma = sqrt(alpha)(alpha - e) / (alpha - 2e)^{3/2}
///   Gamma = sqrt(alpha / (alpha - 2e))
///   Delta = sqrt(alpha / e)                undefined at e = 0
///   eta   = (alpha - e) / alpha            guaranteed sane-block fraction
///
/// At e = 0 every block is sane (eta = 1), so beta = 2 and
/// gamma = cap_gamma = 1 independently of the mapping, and Delta is reported
/// as not applicable.
struct DerivedConstants {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    double cap_gamma = 0.0;
    std::optional<double> delta_const;
    double eta = 0.0;
};

DerivedConstants derived_constants(const AlphaMapping& mapping, double epsilon);

/// gamma^2 as a function of a free alpha at fixed epsilon; exposed so the
/// monotonicity of the constant in alpha can be probed numerically.
double gamma_sq_at(double alpha, double epsilon);

/// Admissible confidence interval, stored in natural-log space because the
/// end points underflow doubles already for moderate n (e.g. exp(-4 n alpha)).
struct DeltaRange {
    double log_lower = 0.0;
    double log_upper = 0.0;

    double lower() const;
    double upper() const;
    bool contains_log(double log_delta) const;
    bool contains(double delta) const;
};

/// [exp(-n/beta), exp(-n alpha/beta)]; K = ceil(beta log(1/delta)) then lands
/// in [alpha n, n].  At e = 0 the upper end is capped at 1/e.
DeltaRange delta_range_chebyshev(const AlphaMapping& mapping, double epsilon, long n);

/// (0, exp(-4 n alpha)]; at e = 0 the upper end is 1/e.  The reported lower
/// end is the smallest positive double (the interval is open at zero).
DeltaRange delta_range_subgaussian(const AlphaMapping& mapping, double epsilon, long n);

long block_count_chebyshev(const AlphaMapping& mapping, double epsilon, double delta, long n);
long block_count_chebyshev_log(const AlphaMapping& mapping, double epsilon, double log_delta,
                               long n);

/// K = ceil(alpha(e) n), except K = 1 when e = 0 (a single block, i.e. the
/// plain empirical mean, is optimal on clean data).
long block_count_subgaussian(const AlphaMapping& mapping, double epsilon, long n);

/// Constants of the cross-block two-sample estimator.  With
/// e~ = e_x + e_y - e_x e_y:
///   eta_xy = 1 - e~ / alpha(e~)
///   eta_z  = 1 - e_z / sqrt(alpha(e~))          for z = x, y
///   beta_z = 18 eta_xy^2 / (eta_z (2 eta_xy - 1)^2)
struct TwoSampleConstants {
    double epsilon_x = 0.0;
    double epsilon_y = 0.0;
    double epsilon_tilde = 0.0;
    double alpha_tilde = 0.0;
    double eta_xy = 0.0;
    double eta_x = 0.0;
    double eta_y = 0.0;
    double beta_x = 0.0;
    double beta_y = 0.0;
};

TwoSampleConstants two_sample_constants(const AlphaMapping& mapping, double eps_x, double eps_y);

struct TwoSampleBlockCounts {
    long k_x = 0;
    long k_y = 0;
};

/// Admissible delta interval implied by the decoupled constraints
/// sqrt(alpha(e~)) n <= K_x <= n and sqrt(alpha(e~)) m <= K_y <= m.
DeltaRange two_sample_delta_range(const TwoSampleConstants& constants, long n, long m);

/// K_z = ceil(beta_z log(2/delta)); throws DeltaOutOfRange (with the
/// admissible interval attached) when either count leaves its constraint.
TwoSampleBlockCounts two_sample_block_counts(const TwoSampleConstants& constants, double delta,
                                             long n, long m);
TwoSampleBlockCounts two_sample_block_counts_log(const TwoSampleConstants& constants,
                                                 double log_delta, long n, long m);

namespace detail {
/// ceil with a tiny slack so values that are integers up to float roundoff
/// do not get bumped to the next integer.
long ceil_guard(double x);
}  // namespace detail

}  // namespace mom

#endif
