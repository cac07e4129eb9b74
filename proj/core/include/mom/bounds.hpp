#ifndef MOM_BOUNDS_HPP
#define MOM_BOUNDS_HPP

#include <span>
#include <vector>

#include "mom/calibration.hpp"
#include "mom/estimators.hpp"
#include "mom/rng.hpp"

namespace mom {

enum class BoundKind { Chebyshev, SubGaussian, Expectation, Generalization };

const char* to_string(BoundKind kind);

/// An estimate together with the certificate that produced it.
struct EstimateReport {
    double estimate = 0.0;
    long k_used = 0;
    double delta = 0.0;      // may underflow to 0; log_delta is authoritative
    double log_delta = 0.0;
    double bound_width = 0.0;
    BoundKind kind = BoundKind::Chebyshev;
    MappingKind mapping = MappingKind::Harmonic;
    double epsilon = 0.0;
};

/// Raw right-hand sides of the deviation displays, with no admissibility
/// gating.  The gated operations below compose these with the delta-range
/// checks; confidence levels enter as log(delta) so that values like
/// exp(-4 n alpha) stay representable.
namespace display {

/// 4 sqrt(e) scale gamma sqrt((1 + log(1/delta)) / n)
double chebyshev(double scale, double gamma, double log_delta, long n);

/// 4 scale Gamma sqrt(log(1/delta) / n)
double subgaussian(double scale, double cap_gamma, double log_delta, long n);

/// 2 scale Gamma (4 c_o Delta / n^{(1-alpha_o)/2} + sqrt(pi/n))
double expectation(double scale, double cap_gamma, double delta_const, long n, double c_o,
                   double alpha_o);

/// 12 sqrt(3) sigma_cap gamma~ sqrt((1 + log(2/delta)) / min(n, m))
double cross_block(double sigma_cap, double gamma_tilde, double log_delta, long n_min);

/// 8 sqrt(2) m_bound Gamma sqrt((vc (1 + log n) + log(1/delta)) / n)
double generalization(double m_bound, double cap_gamma, long vc_dim, long n, double log_delta);

}  // namespace display

// ---- Median-of-means deviation and expectation bounds -----------------

double mom_bound_chebyshev(double sigma, long n, double delta, double epsilon,
                           const AlphaMapping& mapping);
double mom_bound_chebyshev_log(double sigma, long n, double log_delta, double epsilon,
                               const AlphaMapping& mapping);

double mom_bound_subgaussian(double rho, long n, double delta, double epsilon,
                             const AlphaMapping& mapping);
double mom_bound_subgaussian_log(double rho, long n, double log_delta, double epsilon,
                                 const AlphaMapping& mapping);

/// Requires epsilon > 0 (throws EpsilonZero otherwise: use the clean variant).
double mom_expectation_bound(double rho, long n, double epsilon, double c_o, double alpha_o,
                             const AlphaMapping& mapping);

/// Clean-sample (K = 1) expectation bound: 2 rho sqrt(pi/n).
double mom_expectation_bound_clean(double rho, long n);

// ---- One-sample median-of-U bounds -------------------------------------

double mou_bound_chebyshev(double sigma_cap, long n, double delta, double epsilon,
                           const AlphaMapping& mapping);
double mou_bound_chebyshev_log(double sigma_cap, long n, double log_delta, double epsilon,
                               const AlphaMapping& mapping);

/// 4 sqrt(d) M Gamma sqrt(log(1/delta)/n) for an ess-sup bounded kernel.
double mou_bound_bounded(int degree, double m_bound, long n, double delta, double epsilon,
                         const AlphaMapping& mapping);
double mou_bound_bounded_log(int degree, double m_bound, long n, double log_delta, double epsilon,
                             const AlphaMapping& mapping);

double mou_expectation_bound(int degree, double m_bound, long n, double epsilon, double c_o,
                             double alpha_o, const AlphaMapping& mapping);
double mou_expectation_bound_clean(int degree, double m_bound, long n);

// ---- Two-sample bounds --------------------------------------------------

/// Cross-block estimator; gated by the decoupled two-sample delta range.
double mou2_bound(double sigma_cap, long n, long m, double delta, double eps_x, double eps_y,
                  const AlphaMapping& mapping);
double mou2_bound_log(double sigma_cap, long n, long m, double log_delta, double eps_x,
                      double eps_y, const AlphaMapping& mapping);

/// Diagonal estimator; constants evaluated at eps_x + eps_y.  n != m is
/// accepted as long as 2 (n_o + m_o) fits inside min(n, m).
double mou2_diag_bound_chebyshev(double sigma_cap, long n, long m, double delta, double eps_x,
                                 double eps_y, const AlphaMapping& mapping);
double mou2_diag_bound_chebyshev_log(double sigma_cap, long n, long m, double log_delta,
                                     double eps_x, double eps_y, const AlphaMapping& mapping);
double mou2_diag_bound_bounded(double m_bound, long n, long m, double delta, double eps_x,
                               double eps_y, const AlphaMapping& mapping);
double mou2_diag_bound_bounded_log(double m_bound, long n, long m, double log_delta, double eps_x,
                                   double eps_y, const AlphaMapping& mapping);
double mou2_diag_expectation_bound(double m_bound, long n, long m, double eps_x, double eps_y,
                                   double c_o, double alpha_o, const AlphaMapping& mapping);
double mou2_diag_expectation_bound_clean(double m_bound, long n);

// ---- Excess-risk bound for median-of-U minimization ---------------------

double generalization_bound(double m_bound, long vc_dim, long n, double delta, double epsilon,
                            const AlphaMapping& mapping);
double generalization_bound_log(double m_bound, long vc_dim, long n, double log_delta,
                                double epsilon, const AlphaMapping& mapping);

// ---- Variance proxies ----------------------------------------------------

/// One-sample proxy: zeta_c = Var(h_c(Z_1..Z_c)) for c = 1..d and the
/// aggregate Sigma^2(h) = d! sum_c C(d,c) zeta_c.
struct VarianceProxy {
    std::vector<double> zeta;
    double sigma_sq_cap = 0.0;
    bool clamped = false;  // some negative plug-in component was clamped to 0

    double sigma_cap() const;
};

/// Cross-kernel proxy: Sigma^2(H) = sigma^2 + sigma_1^2 + sigma_2^2.
struct CrossVarianceProxy {
    double sigma_sq = 0.0;
    double sigma1_sq = 0.0;
    double sigma2_sq = 0.0;
    double sigma_sq_cap = 0.0;
    bool clamped = false;

    double sigma_cap() const;
};

/// Plug-in estimation from a clean calibration sample.  Conditional means
/// h_c are approximated by averaging over `completions` resampled
/// completions; negative variance components are clamped to zero.
VarianceProxy estimate_variance_proxy(const Sample& sample, const UKernel& kernel, Rng& rng,
                                      long completions = 200);
CrossVarianceProxy estimate_variance_proxy(const Sample& x, const Sample& y,
                                           const CrossKernel& kernel, Rng& rng,
                                           long completions = 200);

/// Exact variance of a one-sample U-statistic on a block of size b:
/// (1 / C(b,d)) sum_c C(d,c) C(b-d, d-c) zeta_c.
double u_statistic_variance(long b, int degree, std::span<const double> zeta);

/// Exact variance of the two-sample U-statistic of degrees (1, 1):
/// sigma^2/(nm) + (m-1) sigma_1^2/(nm) + (n-1) sigma_2^2/(nm).
double two_sample_u_variance(long n, long m, double sigma_sq, double sigma1_sq, double sigma2_sq);

// ---- Report assembly ------------------------------------------------------

/// Runs the estimator end to end on a contiguous partition: picks K from the
/// stated rule, estimates, and attaches the deviation half-width.
EstimateReport mom_report_chebyshev(const Sample& sample, double sigma, double log_delta,
                                    double epsilon, const AlphaMapping& mapping);
EstimateReport mom_report_subgaussian(const Sample& sample, double rho, double log_delta,
                                      double epsilon, const AlphaMapping& mapping);

}  // namespace mom

#endif
