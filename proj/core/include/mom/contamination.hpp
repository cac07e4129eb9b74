#ifndef MOM_CONTAMINATION_HPP
#define MOM_CONTAMINATION_HPP

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "mom/estimators.hpp"

namespace mom {

struct Gaussian {
    double mean = 0.0;
    double sd = 1.0;
};
struct Bernoulli {
    double p = 0.5;
};
struct Uniform {
    double lo = 0.0;
    double hi = 1.0;
};
struct StudentT {
    int dof = 3;
};
struct Empirical {
    std::vector<double> values;
};

using InlierDist = std::variant<Gaussian, Bernoulli, Uniform, StudentT, Empirical>;

/// Point mass at n^exponent, so the corruption scales with the sample size.
struct DiracPower {
    double exponent = 0.5;
};
struct DiracAt {
    double value = 0.0;
};
struct UniformBox {
    double lo = 0.0;
    double hi = 1.0;
};

using OutlierRule = std::variant<DiracPower, DiracAt, UniformBox>;

enum class PlacementKind { Append, Shuffle };

struct Placement {
    PlacementKind kind = PlacementKind::Append;
    /// Shuffle stream; derived from the generation seed when unset.
    std::optional<std::uint64_t> shuffle_seed;
};

/// Recipe for a contaminated sample: n - n_o i.i.d. inliers and
/// n_o = ceil(c_o^2 n^{alpha_o}) outliers placed per the rule.  An absent
/// outlier rule produces a clean sample (n_o = 0).
struct ContaminationSpec {
    InlierDist inlier_dist = Gaussian{};
    std::optional<OutlierRule> outlier_rule;
    double c_o = 1.0;       // >= 1
    double alpha_o = 0.5;   // in [0, 1)
    Placement placement;
};

long outlier_count(const ContaminationSpec& spec, long n);
double epsilon_of(const ContaminationSpec& spec, long n);

/// Mean / standard deviation of the inlier distribution, used as the known
/// target and scale when instantiating bounds.
double inlier_mean(const InlierDist& dist);
double inlier_sd(const InlierDist& dist);

/// Fully seed-deterministic; the mask records the ground truth.
/// Throws BreakdownExceeded when n_o / n would reach 1/2.
Sample generate(const ContaminationSpec& spec, long n, std::uint64_t seed);

}  // namespace mom

#endif
