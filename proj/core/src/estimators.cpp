#include "mom/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mom {

namespace {

double checked(double value, const char* what) {
    if (!std::isfinite(value)) {
        throw NonFiniteKernel(std::string(what) + " evaluation produced a non-finite value");
    }
    return value;
}

/// U-statistic of the kernel restricted to the given indices.  Loops are
/// explicit per degree; degrees above 3 are rejected at the call sites.
double u_stat_on(const std::vector<double>& values, const UKernel& kernel,
                 std::span<const long> idx) {
    const long b = static_cast<long>(idx.size());
    const int d = kernel.degree;
    double acc = 0.0;
    double args[3];
    long count = 0;
    switch (d) {
        case 1:
            for (long i = 0; i < b; ++i) {
                args[0] = values[static_cast<std::size_t>(idx[i])];
                acc += checked(kernel.eval(std::span<const double>(args, 1)), "kernel");
            }
            count = b;
            break;
        case 2:
            for (long i = 0; i < b; ++i) {
                args[0] = values[static_cast<std::size_t>(idx[i])];
                for (long j = i + 1; j < b; ++j) {
                    args[1] = values[static_cast<std::size_t>(idx[j])];
                    acc += checked(kernel.eval(std::span<const double>(args, 2)), "kernel");
                }
            }
            count = b * (b - 1) / 2;
            break;
        case 3:
            for (long i = 0; i < b; ++i) {
                args[0] = values[static_cast<std::size_t>(idx[i])];
                for (long j = i + 1; j < b; ++j) {
                    args[1] = values[static_cast<std::size_t>(idx[j])];
                    for (long l = j + 1; l < b; ++l) {
                        args[2] = values[static_cast<std::size_t>(idx[l])];
                        acc += checked(kernel.eval(std::span<const double>(args, 3)), "kernel");
                    }
                }
            }
            count = b * (b - 1) * (b - 2) / 6;
            break;
        default:
            throw UnsupportedKernelDegree("kernel degree must be 1, 2, or 3, got " +
                                          std::to_string(d));
    }
    return acc / static_cast<double>(count);
}

double block_mean(const std::vector<double>& values, const std::vector<long>& block) {
    double acc = 0.0;
    for (long i : block) acc += values[static_cast<std::size_t>(i)];
    return acc / static_cast<double>(block.size());
}

double cross_block_stat(const std::vector<double>& xs, const std::vector<double>& ys,
                        const CrossKernel& kernel, const std::vector<long>& bx,
                        const std::vector<long>& by) {
    double acc = 0.0;
    for (long i : bx) {
        const double xi = xs[static_cast<std::size_t>(i)];
        for (long j : by) {
            acc += checked(kernel.eval(xi, ys[static_cast<std::size_t>(j)]), "cross kernel");
        }
    }
    return acc / (static_cast<double>(bx.size()) * static_cast<double>(by.size()));
}

void check_partition(const Sample& sample, const BlockPartition& partition) {
    if (partition.n != sample.size()) {
        throw PartitionMismatch("partition built for n = " + std::to_string(partition.n) +
                                ", sample has n = " + std::to_string(sample.size()));
    }
}

}  // namespace

UKernel identity_kernel() {
    return UKernel{1, [](std::span<const double> z) { return z[0]; }, "identity"};
}

UKernel variance_kernel() {
    return UKernel{2,
                   [](std::span<const double> z) {
                       const double diff = z[0] - z[1];
                       return diff * diff / 2.0;
                   },
                   "variance"};
}

CrossKernel mann_whitney_kernel() {
    return CrossKernel{[](double x, double y) { return x <= y ? 1.0 : 0.0; }, "mann-whitney"};
}

CrossKernel product_kernel() {
    return CrossKernel{[](double x, double y) { return x * y; }, "product"};
}

double median_of(std::vector<double> values) {
    if (values.empty()) throw EmptySample("median of an empty collection");
    const std::size_t n = values.size();
    const auto mid = values.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(values.begin(), mid, values.end());
    if (n % 2 == 1) return *mid;
    const double hi = *mid;
    const double lo = *std::max_element(values.begin(), mid);
    return (lo + hi) / 2.0;
}

double empirical_mean(const Sample& sample) {
    if (sample.values.empty()) throw EmptySample("mean of an empty sample");
    double acc = 0.0;
    for (double v : sample.values) acc += v;
    return acc / static_cast<double>(sample.values.size());
}

double empirical_median(const Sample& sample) {
    if (sample.values.empty()) throw EmptySample("median of an empty sample");
    return median_of(sample.values);
}

double trimmed_mean(const Sample& sample, double trim_fraction) {
    if (sample.values.empty()) throw EmptySample("trimmed mean of an empty sample");
    if (!(trim_fraction >= 0.0) || !(trim_fraction < 0.5)) {
        throw Error("trim fraction must lie in [0, 1/2)");
    }
    std::vector<double> sorted = sample.values;
    std::sort(sorted.begin(), sorted.end());
    const long n = static_cast<long>(sorted.size());
    const long cut = static_cast<long>(trim_fraction * static_cast<double>(n));
    if (2 * cut >= n) throw Error("trimming removes the whole sample");
    double acc = 0.0;
    for (long i = cut; i < n - cut; ++i) acc += sorted[static_cast<std::size_t>(i)];
    return acc / static_cast<double>(n - 2 * cut);
}

double median_of_means(const Sample& sample, const BlockPartition& partition) {
    if (sample.values.empty()) throw EmptySample("median-of-means of an empty sample");
    check_partition(sample, partition);
    std::vector<double> means;
    means.reserve(partition.blocks.size());
    for (const auto& block : partition.blocks) means.push_back(block_mean(sample.values, block));
    return median_of(std::move(means));
}

double u_statistic(const Sample& sample, const UKernel& kernel) {
    if (kernel.degree < 1 || kernel.degree > 3) {
        throw UnsupportedKernelDegree("kernel degree must be 1, 2, or 3, got " +
                                      std::to_string(kernel.degree));
    }
    if (sample.size() < kernel.degree) {
        throw SampleTooSmall("need at least d = " + std::to_string(kernel.degree) +
                             " observations, got " + std::to_string(sample.size()));
    }
    std::vector<long> idx(static_cast<std::size_t>(sample.size()));
    for (long i = 0; i < sample.size(); ++i) idx[static_cast<std::size_t>(i)] = i;
    return u_stat_on(sample.values, kernel, idx);
}

double median_of_u(const Sample& sample, const UKernel& kernel, const BlockPartition& partition) {
    check_partition(sample, partition);
    if (partition.block_size < kernel.degree) {
        throw BlockTooSmall("block size " + std::to_string(partition.block_size) +
                            " below kernel degree " + std::to_string(kernel.degree));
    }
    std::vector<double> stats;
    stats.reserve(partition.blocks.size());
    for (const auto& block : partition.blocks) {
        stats.push_back(u_stat_on(sample.values, kernel, block));
    }
    return median_of(std::move(stats));
}

double two_sample_u(const Sample& x, const Sample& y, const CrossKernel& kernel) {
    if (x.values.empty() || y.values.empty()) {
        throw EmptySample("two-sample U-statistic of an empty sample");
    }
    double acc = 0.0;
    for (double xi : x.values) {
        for (double yj : y.values) acc += checked(kernel.eval(xi, yj), "cross kernel");
    }
    return acc / (static_cast<double>(x.values.size()) * static_cast<double>(y.values.size()));
}

double median_of_u2(const Sample& x, const Sample& y, const CrossKernel& kernel,
                    const BlockPartition& px, const BlockPartition& py) {
    check_partition(x, px);
    check_partition(y, py);
    std::vector<double> stats;
    stats.reserve(px.blocks.size() * py.blocks.size());
    for (const auto& bx : px.blocks) {
        for (const auto& by : py.blocks) {
            stats.push_back(cross_block_stat(x.values, y.values, kernel, bx, by));
        }
    }
    return median_of(std::move(stats));
}

double median_of_u2_diag(const Sample& x, const Sample& y, const CrossKernel& kernel,
                         const DiagonalPairing& pairing) {
    check_partition(x, pairing.x);
    check_partition(y, pairing.y);
    std::vector<double> stats;
    stats.reserve(static_cast<std::size_t>(pairing.k));
    for (long j = 0; j < pairing.k; ++j) {
        stats.push_back(cross_block_stat(x.values, y.values, kernel,
                                         pairing.x.blocks[static_cast<std::size_t>(j)],
                                         pairing.y.blocks[static_cast<std::size_t>(j)]));
    }
    return median_of(std::move(stats));
}

}  // namespace mom
