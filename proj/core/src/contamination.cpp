#include "mom/contamination.hpp"

#include <cmath>
#include <string>

#include "mom/calibration.hpp"
#include "mom/rng.hpp"

namespace mom {

namespace {

void check_spec(const ContaminationSpec& spec) {
    if (!(spec.c_o >= 1.0)) throw Error("c_o must be >= 1");
    if (!(spec.alpha_o >= 0.0) || !(spec.alpha_o < 1.0)) throw Error("alpha_o must lie in [0, 1)");
    if (const auto* e = std::get_if<Empirical>(&spec.inlier_dist)) {
        if (e->values.empty()) throw EmptySample("empirical inlier distribution has no atoms");
    }
    if (const auto* u = std::get_if<Uniform>(&spec.inlier_dist)) {
        if (!(u->lo <= u->hi)) throw Error("uniform inlier bounds are inverted");
    }
    if (const auto* t = std::get_if<StudentT>(&spec.inlier_dist)) {
        if (t->dof < 1) throw Error("Student-t needs at least one degree of freedom");
    }
}

double draw_inlier(const InlierDist& dist, Rng& rng) {
    return std::visit(
        [&rng](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Gaussian>) {
                return rng.normal(d.mean, d.sd);
            } else if constexpr (std::is_same_v<T, Bernoulli>) {
                return rng.bernoulli(d.p) ? 1.0 : 0.0;
            } else if constexpr (std::is_same_v<T, Uniform>) {
                return rng.uniform(d.lo, d.hi);
            } else if constexpr (std::is_same_v<T, StudentT>) {
                return rng.student_t(d.dof);
            } else {
                return d.values[rng.uniform_int(d.values.size())];
            }
        },
        dist);
}

double draw_outlier(const OutlierRule& rule, long n, Rng& rng) {
    return std::visit(
        [&](const auto& r) -> double {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, DiracPower>) {
                return std::pow(static_cast<double>(n), r.exponent);
            } else if constexpr (std::is_same_v<T, DiracAt>) {
                return r.value;
            } else {
                return rng.uniform(r.lo, r.hi);
            }
        },
        rule);
}

}  // namespace

long outlier_count(const ContaminationSpec& spec, long n) {
    if (n < 1) throw Error("sample size must be positive");
    if (!spec.outlier_rule.has_value()) return 0;
    const double raw = spec.c_o * spec.c_o * std::pow(static_cast<double>(n), spec.alpha_o);
    return detail::ceil_guard(raw);
}

double epsilon_of(const ContaminationSpec& spec, long n) {
    return static_cast<double>(outlier_count(spec, n)) / static_cast<double>(n);
}

double inlier_mean(const InlierDist& dist) {
    return std::visit(
        [](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Gaussian>) {
                return d.mean;
            } else if constexpr (std::is_same_v<T, Bernoulli>) {
                return d.p;
            } else if constexpr (std::is_same_v<T, Uniform>) {
                return (d.lo + d.hi) / 2.0;
            } else if constexpr (std::is_same_v<T, StudentT>) {
                if (d.dof < 2) throw Error("Student-t mean undefined for dof < 2");
                return 0.0;
            } else {
                double acc = 0.0;
                for (double v : d.values) acc += v;
                return acc / static_cast<double>(d.values.size());
            }
        },
        dist);
}

double inlier_sd(const InlierDist& dist) {
    return std::visit(
        [](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Gaussian>) {
                return d.sd;
            } else if constexpr (std::is_same_v<T, Bernoulli>) {
                return std::sqrt(d.p * (1.0 - d.p));
            } else if constexpr (std::is_same_v<T, Uniform>) {
                return (d.hi - d.lo) / std::sqrt(12.0);
            } else if constexpr (std::is_same_v<T, StudentT>) {
                if (d.dof < 3) throw Error("Student-t variance undefined for dof < 3");
                return std::sqrt(static_cast<double>(d.dof) / static_cast<double>(d.dof - 2));
            } else {
                double mean = 0.0;
                for (double v : d.values) mean += v;
                mean /= static_cast<double>(d.values.size());
                double acc = 0.0;
                for (double v : d.values) acc += (v - mean) * (v - mean);
                return std::sqrt(acc / static_cast<double>(d.values.size()));
            }
        },
        dist);
}

Sample generate(const ContaminationSpec& spec, long n, std::uint64_t seed) {
    check_spec(spec);
    if (n < 1) throw Error("sample size must be positive");
    const long n_o = outlier_count(spec, n);
    if (2 * n_o >= n) {
        throw BreakdownExceeded("n_o = " + std::to_string(n_o) + " of n = " + std::to_string(n) +
                                " reaches the 1/2 breakdown point");
    }
    Sample sample;
    sample.values.reserve(static_cast<std::size_t>(n));
    sample.mask.reserve(static_cast<std::size_t>(n));

    Rng inlier_rng(derive_seed(seed, 0x1));
    for (long i = 0; i < n - n_o; ++i) {
        sample.values.push_back(draw_inlier(spec.inlier_dist, inlier_rng));
        sample.mask.push_back(Tag::Inlier);
    }
    if (n_o > 0) {
        Rng outlier_rng(derive_seed(seed, 0x2));
        for (long i = 0; i < n_o; ++i) {
            sample.values.push_back(draw_outlier(*spec.outlier_rule, n, outlier_rng));
            sample.mask.push_back(Tag::Outlier);
        }
    }
    if (spec.placement.kind == PlacementKind::Shuffle) {
        const std::uint64_t shuffle_seed =
            spec.placement.shuffle_seed.value_or(derive_seed(seed, 0x3));
        Rng shuffle_rng(shuffle_seed);
        // One permutation applied jointly to values and mask.
        std::vector<long> order(static_cast<std::size_t>(n));
        for (long i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
        shuffle_values(order, shuffle_rng);
        Sample shuffled;
        shuffled.values.resize(sample.values.size());
        shuffled.mask.resize(sample.mask.size());
        for (long i = 0; i < n; ++i) {
            shuffled.values[static_cast<std::size_t>(i)] =
                sample.values[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
            shuffled.mask[static_cast<std::size_t>(i)] =
                sample.mask[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
        }
        return shuffled;
    }
    return sample;
}

}  // namespace mom
