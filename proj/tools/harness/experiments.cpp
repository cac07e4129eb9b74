#include "harness/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mom/bounds.hpp"
#include "mom/contamination.hpp"
#include "mom/estimators.hpp"
#include "mom/learning.hpp"
#include "mom/partitioning.hpp"
#include "mom/rng.hpp"

namespace mom::harness {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct RunningStat {
    long count = 0;
    double mean = 0.0;
    double m2 = 0.0;
    long exact_half = 0;

    void add(double x) {
        ++count;
        const double d = x - mean;
        mean += d / static_cast<double>(count);
        m2 += d * (x - mean);
        if (x == 0.5) ++exact_half;
    }
    double std_err() const {
        if (count < 2) return kNaN;
        return std::sqrt(m2 / static_cast<double>(count - 1) / static_cast<double>(count));
    }
    double half_fraction() const {
        return static_cast<double>(exact_half) / static_cast<double>(count);
    }
};

const char* mapping_name(MappingKind kind) { return mom::to_string(kind); }

std::uint64_t run_seed(const ExperimentConfig& config, long n, long run) {
    return derive_seed(config.seed, static_cast<std::uint64_t>(n),
                       static_cast<std::uint64_t>(run));
}

}  // namespace

double variance_u_stat(const Sample& sample) {
    const long n = sample.size();
    if (n < 2) throw SampleTooSmall("variance needs two observations");
    double mean = 0.0;
    for (double v : sample.values) mean += v;
    mean /= static_cast<double>(n);
    double acc = 0.0;
    for (double v : sample.values) acc += (v - mean) * (v - mean);
    return acc / static_cast<double>(n - 1);
}

double mann_whitney_u_stat(const Sample& x, const Sample& y) {
    if (x.values.empty() || y.values.empty()) throw EmptySample("empty sample");
    std::vector<double> sorted = y.values;
    std::sort(sorted.begin(), sorted.end());
    double acc = 0.0;
    for (double xi : x.values) {
        const auto it = std::lower_bound(sorted.begin(), sorted.end(), xi);
        acc += static_cast<double>(sorted.end() - it);  // count of y >= xi
    }
    return acc / (static_cast<double>(x.values.size()) * static_cast<double>(y.values.size()));
}

// ---- Break experiments ------------------------------------------------

ResultTable run_break_experiment(const ExperimentConfig& config) {
    if (config.n_grid.empty()) throw ConfigError("n_grid must not be empty");
    const AlphaMapping mapping = AlphaMapping::named(config.mapping);

    ResultTable table;
    table.columns = {"command",  "n",       "estimator", "runs",          "mean_abs_error",
                     "std_err",  "frac_abs_err_half",    "k",             "epsilon",
                     "n_outliers", "mapping", "log_delta"};

    const bool two_sample = config.command == Command::MannWhitney;
    const bool variance = config.command == Command::BreakVariance;

    for (long n : config.n_grid) {
        const double epsilon = epsilon_of(config.contamination, n);
        const long n_o = outlier_count(config.contamination, n);
        double theta = inlier_mean(config.contamination.inlier_dist);
        if (variance) {
            const double sd = inlier_sd(config.contamination.inlier_dist);
            theta = sd * sd;
        }
        if (two_sample) theta = 0.5;

        long k = 0;
        if (config.k_override) {
            k = *config.k_override;
        } else if (two_sample) {
            if (2.0 * epsilon >= 0.5) {
                throw SumBreakdownExceeded("per-sample fraction too large for diagonal blocks");
            }
            k = block_count_subgaussian(mapping, 2.0 * epsilon, n);
        } else {
            k = block_count_subgaussian(mapping, epsilon, n);
        }
        if (k < 1 || k > n) throw InvalidBlockCount("k outside [1, n]");

        std::vector<std::string> names;
        if (two_sample) {
            names = {"ustat2", "mou2_diag"};
        } else if (variance) {
            names = {"ustat", "mou"};
        } else {
            names = {"mean", "median", "trimmed", "mom"};
        }
        std::vector<RunningStat> stats(names.size());

        const BlockPartition part = two_sample ? BlockPartition{} : partition_contiguous(n, k);
        const DiagonalPairing pairing =
            two_sample ? diagonal_pairing(n, n, k) : DiagonalPairing{};
        const UKernel var_kernel = variance_kernel();
        const CrossKernel mw_kernel = mann_whitney_kernel();

        for (long run = 0; run < config.runs; ++run) {
            const std::uint64_t seed = run_seed(config, n, run);
            if (two_sample) {
                const Sample xs = generate(config.contamination, n, derive_seed(seed, 0xa));
                const Sample ys = generate(config.contamination, n, derive_seed(seed, 0xb));
                stats[0].add(std::abs(mann_whitney_u_stat(xs, ys) - theta));
                stats[1].add(std::abs(median_of_u2_diag(xs, ys, mw_kernel, pairing) - theta));
            } else {
                const Sample s = generate(config.contamination, n, seed);
                if (variance) {
                    stats[0].add(std::abs(variance_u_stat(s) - theta));
                    stats[1].add(std::abs(median_of_u(s, var_kernel, part) - theta));
                } else {
                    stats[0].add(std::abs(empirical_mean(s) - theta));
                    stats[1].add(std::abs(empirical_median(s) - theta));
                    stats[2].add(std::abs(trimmed_mean(s, config.trim) - theta));
                    stats[3].add(std::abs(median_of_means(s, part) - theta));
                }
            }
        }

        for (std::size_t e = 0; e < names.size(); ++e) {
            const bool robust = names[e] == "mom" || names[e] == "mou" || names[e] == "mou2_diag";
            table.rows.push_back({std::string(to_string(config.command)), n, names[e],
                                  config.runs, stats[e].mean, stats[e].std_err(),
                                  stats[e].half_fraction(), robust ? k : 1L, epsilon, n_o,
                                  std::string(mapping_name(config.mapping)), kNaN});
        }
    }
    return table;
}

// ---- Coverage ----------------------------------------------------------

ResultTable run_coverage(const ExperimentConfig& config) {
    if (config.n_grid.empty()) throw ConfigError("n_grid must not be empty");
    const AlphaMapping mapping = AlphaMapping::named(config.mapping);
    const bool chebyshev = config.coverage.path == BoundKind::Chebyshev;

    ResultTable table;
    table.columns = {"command", "n",      "epsilon",  "path",           "log_delta",
                     "delta",   "k",      "bound_width", "runs",        "failures",
                     "failure_fraction", "log_delta_lo", "log_delta_hi", "mapping", "status"};

    for (long n : config.n_grid) {
        const double epsilon = epsilon_of(config.contamination, n);
        const double theta = inlier_mean(config.contamination.inlier_dist);
        const double scale =
            config.coverage.scale.value_or(inlier_sd(config.contamination.inlier_dist));
        const DeltaRange range = chebyshev ? delta_range_chebyshev(mapping, epsilon, n)
                                           : delta_range_subgaussian(mapping, epsilon, n);

        std::vector<double> points = config.coverage.log_deltas;
        if (points.empty()) {
            const int count = config.coverage.delta_points;
            for (int i = 0; i < count; ++i) {
                const double frac = count == 1 ? 1.0 : static_cast<double>(i) / (count - 1);
                points.push_back(range.log_lower + (range.log_upper - range.log_lower) * frac);
            }
        }

        for (double log_delta : points) {
            const std::string path_name = chebyshev ? "Chebyshev" : "SubGaussian";
            const bool admissible = chebyshev ? range.contains_log(log_delta)
                                              : log_delta <= range.log_upper + 1e-9;
            if (!admissible || !(log_delta < 0.0)) {
                table.rows.push_back({std::string(to_string(config.command)), n, epsilon,
                                      path_name, log_delta, std::exp(log_delta), 0L, kNaN, 0L, 0L,
                                      kNaN, range.log_lower, range.log_upper,
                                      std::string(mapping_name(config.mapping)),
                                      std::string("DeltaOutOfRange")});
                continue;
            }
            const long k = chebyshev ? block_count_chebyshev_log(mapping, epsilon, log_delta, n)
                                     : block_count_subgaussian(mapping, epsilon, n);
            const double width =
                chebyshev ? mom_bound_chebyshev_log(scale, n, log_delta, epsilon, mapping)
                          : mom_bound_subgaussian_log(scale, n, log_delta, epsilon, mapping);
            const BlockPartition part = partition_contiguous(n, k);
            long failures = 0;
            for (long run = 0; run < config.runs; ++run) {
                const Sample s =
                    generate(config.contamination, n, run_seed(config, n, run));
                if (std::abs(median_of_means(s, part) - theta) > width) ++failures;
            }
            table.rows.push_back({std::string(to_string(config.command)), n, epsilon, path_name,
                                  log_delta, std::exp(log_delta), k, width, config.runs, failures,
                                  static_cast<double>(failures) / config.runs, range.log_lower,
                                  range.log_upper, std::string(mapping_name(config.mapping)),
                                  std::string("ok")});
        }
    }
    return table;
}

// ---- Learning -----------------------------------------------------------

namespace {

PairwiseDataset ranking_instance(const Eigen::VectorXd& w_star, long n, double noise_sd,
                                 Rng& rng) {
    PairwiseDataset data;
    const long p = w_star.size();
    data.features.resize(n, p);
    data.labels.resize(n);
    for (long i = 0; i < n; ++i) {
        for (long j = 0; j < p; ++j) data.features(i, j) = rng.normal();
        data.labels[i] = data.features.row(i).dot(w_star) + noise_sd * rng.normal();
    }
    return data;
}

PairwiseDataset cluster_instance(long n, long q, Rng& rng) {
    // three spherical classes on a normalized scale, so the [0, 5]^q outlier
    // box sits far outside the data range
    std::vector<Eigen::VectorXd> centers;
    for (int c = 0; c < 3; ++c) {
        Eigen::VectorXd center(q);
        for (long j = 0; j < q; ++j) center[j] = 1.2 * rng.normal();
        centers.push_back(center);
    }
    PairwiseDataset data;
    data.features.resize(n, q);
    data.labels.resize(n);
    for (long i = 0; i < n; ++i) {
        const int c = static_cast<int>(i % 3);
        for (long j = 0; j < q; ++j) data.features(i, j) = centers[c][j] + 0.3 * rng.normal();
        data.labels[i] = c;
    }
    return data;
}

PairwiseDataset contaminate_metric(const PairwiseDataset& data, double fraction, Rng& rng) {
    // box outliers with a legitimate class label, per the flower recipe
    const long n = data.size();
    const long q = data.dim();
    const long count = static_cast<long>(std::ceil(fraction * static_cast<double>(n) - 1e-9));
    PairwiseDataset out;
    out.features.resize(n + count, q);
    out.labels.resize(n + count);
    out.features.topRows(n) = data.features;
    out.labels.head(n) = data.labels;
    out.mask.assign(static_cast<std::size_t>(n), Tag::Inlier);
    for (long r = 0; r < count; ++r) {
        for (long j = 0; j < q; ++j) out.features(n + r, j) = rng.uniform(0.0, 5.0);
        out.labels[n + r] = 2.0;
        out.mask.push_back(Tag::Outlier);
    }
    return out;
}

/// Median-block descent with seeded restarts: a stalled run (the robust
/// block objective has not even halved) is rerun from a fresh initial
/// parameter.  The decision uses training quantities only.
GdResult mou_gd_with_restarts(const PairwiseDataset& train, const PairwiseLoss& loss,
                              const GdConfig& base, const PairwiseDataset* test, long restarts,
                              double init_scale, bool random_init) {
    GdConfig config = base;
    GdResult result;
    for (long attempt = 0; attempt <= restarts; ++attempt) {
        if (attempt > 0) {
            config.seed = derive_seed(base.seed, 0x8e57a87, static_cast<std::uint64_t>(attempt));
            if (random_init) {
                Rng init_rng(derive_seed(config.seed, 0x10));
                for (long j = 0; j < config.u0.size(); ++j) {
                    config.u0[j] = init_scale * init_rng.normal();
                }
            }
        }
        result = mou_gd(train, loss, config, test);
        if (result.trace.empty()) return result;
        const BlockPartition first_part = partition_random(
            train.size(), config.k_blocks, derive_seed(config.seed, 0x6d, 0));
        const double initial = mou_risk(config.u0, train, loss, first_part, RiskFace::Train);
        const double trivial = mou_risk(Eigen::VectorXd::Zero(config.u0.size()), train, loss,
                                        first_part, RiskFace::Train);
        const double bar = 0.5 * std::min(initial, trivial);
        if (result.trace.back().median_block_risk <= bar) return result;
    }
    return result;
}

ResultTable trace_table(const std::vector<GdTraceRow>& trace) {
    ResultTable table;
    table.columns = {"epoch", "median_block_risk", "train_risk", "test_risk"};
    for (const auto& row : trace) {
        table.rows.push_back({row.epoch, row.median_block_risk, row.train_risk, row.test_risk});
    }
    return table;
}

}  // namespace

RunOutput run_learning(const ExperimentConfig& config) {
    const bool ranking = config.command == Command::LearnRanking;
    const LearningParams& params = config.learning;
    const PairwiseLoss loss =
        ranking ? PairwiseLoss::ranking_hinge() : PairwiseLoss::metric_hinge();

    RunOutput output;
    output.table.columns = {"command", "setting",   "algo",  "runs", "mean_test_risk",
                            "std_err", "k",         "epochs", "step0", "fraction",
                            "epsilon", "mapping"};

    PairwiseDataset csv_train;
    PairwiseDataset csv_test;
    if (params.dataset_csv) {
        if (!params.test_csv) throw ConfigError("dataset_csv requires test_csv");
        csv_train = read_csv_dataset(*params.dataset_csv);
        csv_test = read_csv_dataset(*params.test_csv);
    }

    Eigen::VectorXd w_star(params.dim);
    {
        Rng star_rng(derive_seed(config.seed, 0x57a5));
        for (long j = 0; j < params.dim; ++j) w_star[j] = star_rng.normal();
        w_star.normalize();
        w_star *= 2.0;
    }

    const long contaminated_n =
        params.dataset_csv
            ? csv_train.size() +
                  static_cast<long>(std::ceil(params.fraction * csv_train.size() - 1e-9))
            : params.n_train +
                  static_cast<long>(std::ceil(params.fraction * params.n_train - 1e-9));
    const double epsilon =
        static_cast<double>(contaminated_n - (params.dataset_csv ? csv_train.size()
                                                                 : params.n_train)) /
        static_cast<double>(contaminated_n);
    const AlphaMapping mapping = AlphaMapping::named(config.mapping);
    const long k = params.k_blocks.value_or(
        epsilon > 0.0 ? block_count_subgaussian(mapping, epsilon, contaminated_n) : 1L);

    RunningStat cells[4];  // sane gd, sane mou, cont gd, cont mou
    const char* setting_name[4] = {"sane", "sane", "contaminated", "contaminated"};
    const char* algo_name[4] = {"gd", "mou_gd", "gd", "mou_gd"};

    for (long run = 0; run < config.runs; ++run) {
        const std::uint64_t seed = derive_seed(config.seed, 0x1e, static_cast<std::uint64_t>(run));
        PairwiseDataset train;
        PairwiseDataset test;
        if (params.dataset_csv) {
            train = csv_train;
            test = csv_test;
        } else if (ranking) {
            Rng rng(derive_seed(seed, 0xda));
            train = ranking_instance(w_star, params.n_train, params.noise_sd, rng);
            test = ranking_instance(w_star, params.n_test, params.noise_sd, rng);
        } else {
            Rng rng(derive_seed(seed, 0xdb));
            train = cluster_instance(params.n_train, params.dim, rng);
            test = cluster_instance(params.n_test, params.dim, rng);
        }

        GdConfig gd;
        gd.epochs = params.epochs;
        gd.step0 = params.step0;
        gd.step_tau = params.step_tau;
        gd.seed = derive_seed(seed, 0x9d);
        gd.psd_project = !ranking;
        if (ranking) {
            // a tiny random init keeps the first block risks informative
            // (at u = 0 every surrogate pair loss is exactly 1)
            Rng init_rng(derive_seed(seed, 0x10));
            gd.u0.resize(train.dim());
            for (long j = 0; j < train.dim(); ++j) {
                gd.u0[j] = params.init_scale * init_rng.normal();
            }
        } else {
            Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(train.dim(), train.dim());
            gd.u0 = Eigen::Map<Eigen::VectorXd>(identity.data(), identity.size());
        }
        GdConfig mou = gd;
        mou.k_blocks = k;
        mou.epochs = params.mou_epochs.value_or(params.epochs);
        mou.step0 = params.mou_step0.value_or(params.step0);
        mou.step_tau = params.mou_step_tau;
        mou.warmup = params.mou_warmup;
        // full traces are only persisted for run 0; later runs just need the
        // final test risk
        mou.trace_every = run == 0 ? std::max<long>(1, mou.epochs / 100) : mou.epochs;
        gd.trace_every = run == 0 ? std::max<long>(1, gd.epochs / 100) : gd.epochs;

        const GdResult sane_gd = pairwise_gd(train, loss, gd, &test);
        const GdResult sane_mou = mou_gd_with_restarts(train, loss, mou, &test,
                                                       params.mou_restarts, params.init_scale,
                                                       ranking);

        PairwiseDataset contaminated;
        if (ranking) {
            contaminated = contaminate_pairwise(train, params.fraction, params.lambda, sane_gd.u,
                                                derive_seed(seed, 0xc7), params.box_width);
        } else {
            Rng rng(derive_seed(seed, 0xc8));
            contaminated = contaminate_metric(train, params.fraction, rng);
        }
        const GdResult cont_gd = pairwise_gd(contaminated, loss, gd, &test);
        const GdResult cont_mou = mou_gd_with_restarts(contaminated, loss, mou, &test,
                                                       params.mou_restarts, params.init_scale,
                                                       ranking);

        const GdResult* results[4] = {&sane_gd, &sane_mou, &cont_gd, &cont_mou};
        for (int cell = 0; cell < 4; ++cell) {
            const double risk = results[cell]->trace.empty()
                                    ? pairwise_risk(gd.u0, test, loss)
                                    : results[cell]->trace.back().test_risk;
            cells[cell].add(risk);
        }
        if (run == 0 && params.epochs > 0 && params.mou_epochs.value_or(params.epochs) > 0) {
            output.extra.emplace_back("trace_sane_gd", trace_table(sane_gd.trace));
            output.extra.emplace_back("trace_sane_mou_gd", trace_table(sane_mou.trace));
            output.extra.emplace_back("trace_cont_gd", trace_table(cont_gd.trace));
            output.extra.emplace_back("trace_cont_mou_gd", trace_table(cont_mou.trace));
        }
    }

    for (int cell = 0; cell < 4; ++cell) {
        output.table.rows.push_back({std::string(to_string(config.command)),
                                     std::string(setting_name[cell]), std::string(algo_name[cell]),
                                     config.runs, cells[cell].mean, cells[cell].std_err(), k,
                                     params.epochs, params.step0, params.fraction, epsilon,
                                     std::string(mapping_name(config.mapping))});
    }
    return output;
}

// ---- Calibration table ----------------------------------------------------

ResultTable run_calibrate(const ExperimentConfig& config) {
    if (config.n_grid.empty()) throw ConfigError("n_grid must not be empty");
    const AlphaMapping mapping = AlphaMapping::named(config.mapping);
    ResultTable table;
    table.columns = {"n",         "epsilon",  "mapping",        "alpha",
                     "beta",      "gamma",    "cap_gamma",      "delta_const",
                     "eta",       "k_subgaussian", "log_delta_lo_chebyshev",
                     "log_delta_hi_chebyshev", "log_delta_hi_subgaussian"};
    for (long n : config.n_grid) {
        const double epsilon = epsilon_of(config.contamination, n);
        const DerivedConstants c = derived_constants(mapping, epsilon);
        const DeltaRange cheb = delta_range_chebyshev(mapping, epsilon, n);
        const DeltaRange subg = delta_range_subgaussian(mapping, epsilon, n);
        table.rows.push_back({n, epsilon, std::string(mapping_name(config.mapping)), c.alpha,
                              c.beta, c.gamma, c.cap_gamma,
                              c.delta_const ? *c.delta_const : kNaN, c.eta,
                              block_count_subgaussian(mapping, epsilon, n), cheb.log_lower,
                              cheb.log_upper, subg.log_upper});
    }
    return table;
}

RunOutput run_experiment(const ExperimentConfig& config) {
    switch (config.command) {
        case Command::BreakMean:
        case Command::BreakMedian:
        case Command::BreakVariance:
        case Command::MannWhitney:
            return RunOutput{run_break_experiment(config), {}};
        case Command::Coverage:
            return RunOutput{run_coverage(config), {}};
        case Command::LearnRanking:
        case Command::LearnMetric:
            return run_learning(config);
        case Command::Calibrate:
            return RunOutput{run_calibrate(config), {}};
    }
    throw ConfigError("unhandled command");
}

}  // namespace mom::harness
