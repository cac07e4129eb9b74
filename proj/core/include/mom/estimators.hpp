#ifndef MOM_ESTIMATORS_HPP
#define MOM_ESTIMATORS_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mom/errors.hpp"
#include "mom/partitioning.hpp"

namespace mom {

enum class Tag : std::uint8_t { Inlier, Outlier };

/// Scalar observations with an optional ground-truth contamination mask.
/// The mask exists for simulation bookkeeping only; no estimator reads it.
struct Sample {
    std::vector<double> values;
    std::vector<Tag> mask;

    long size() const { return static_cast<long>(values.size()); }
    bool has_mask() const { return !mask.empty(); }
};

/// Symmetric kernel of degree d (1 <= d <= 3) for one-sample U-statistics.
struct UKernel {
    int degree = 0;
    std::function<double(std::span<const double>)> eval;
    std::string name;
};

UKernel identity_kernel();           // d = 1, h(z) = z
UKernel variance_kernel();           // d = 2, h(z, z') = (z - z')^2 / 2

/// Two-argument kernel for two-sample U-statistics of degrees (1, 1).
struct CrossKernel {
    std::function<double(double, double)> eval;
    std::string name;
};

CrossKernel mann_whitney_kernel();   // H(x, y) = 1{x <= y}
CrossKernel product_kernel();        // H(x, y) = x * y

/// Midpoint convention throughout: for an even count the median is the
/// average of the two central order statistics.
double median_of(std::vector<double> values);

double empirical_mean(const Sample& sample);
double empirical_median(const Sample& sample);

/// Mean after removing floor(trim * n) smallest and largest values.
double trimmed_mean(const Sample& sample, double trim_fraction);

/// Median of the per-block means.
double median_of_means(const Sample& sample, const BlockPartition& partition);

/// Exact average of the kernel over all size-d index combinations.
double u_statistic(const Sample& sample, const UKernel& kernel);

/// Median of the per-block U-statistics; requires B >= d.
double median_of_u(const Sample& sample, const UKernel& kernel, const BlockPartition& partition);

/// Exact average of H over the full n x m grid.
double two_sample_u(const Sample& x, const Sample& y, const CrossKernel& kernel);

/// Median over all K_x * K_y cross-block two-sample U-statistics.
double median_of_u2(const Sample& x, const Sample& y, const CrossKernel& kernel,
                    const BlockPartition& px, const BlockPartition& py);

/// Median over the K diagonal block statistics only.
double median_of_u2_diag(const Sample& x, const Sample& y, const CrossKernel& kernel,
                         const DiagonalPairing& pairing);

}  // namespace mom

#endif
