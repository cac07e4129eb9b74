#include "mom/learning.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "mom/rng.hpp"

namespace mom {

namespace {

double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

Eigen::MatrixXd unflatten(const Eigen::VectorXd& u) {
    const long q = static_cast<long>(std::lround(std::sqrt(static_cast<double>(u.size()))));
    if (q * q != u.size()) {
        throw Error("metric parameter length " + std::to_string(u.size()) +
                    " is not a square number");
    }
    Eigen::MatrixXd m(q, q);
    for (long r = 0; r < q; ++r) {
        for (long c = 0; c < q; ++c) m(r, c) = u[r * q + c];
    }
    return m;
}

Eigen::VectorXd flatten(const Eigen::MatrixXd& m) {
    Eigen::VectorXd u(m.rows() * m.cols());
    for (long r = 0; r < m.rows(); ++r) {
        for (long c = 0; c < m.cols(); ++c) u[r * m.cols() + c] = m(r, c);
    }
    return u;
}

double metric_margin(const Eigen::VectorXd& u, const Eigen::VectorXd& xi, double yi,
                     const Eigen::VectorXd& xj, double yj) {
    const long q = xi.size();
    if (u.size() != q * q) {
        throw Error("metric parameter must have dimension q^2");
    }
    const Eigen::VectorXd d = xi - xj;
    double dist_sq = 0.0;
    for (long r = 0; r < q; ++r) {
        double acc = 0.0;
        for (long c = 0; c < q; ++c) acc += u[r * q + c] * d[c];
        dist_sq += d[r] * acc;
    }
    const double y_ij = (yi == yj) ? 1.0 : -1.0;
    return 1.0 + y_ij * (dist_sq - 2.0);
}

void rows_of(const PairwiseDataset& data, std::vector<Eigen::VectorXd>& rows) {
    rows.clear();
    rows.reserve(static_cast<std::size_t>(data.size()));
    for (long i = 0; i < data.size(); ++i) rows.push_back(data.features.row(i).transpose());
}

void check_dataset(const PairwiseDataset& data) {
    if (data.features.rows() != data.labels.size()) {
        throw Error("feature and label row counts differ");
    }
    if (!data.features.allFinite() || !data.labels.allFinite()) {
        throw NonFiniteInput("dataset contains non-finite entries");
    }
    if (!data.mask.empty() && static_cast<long>(data.mask.size()) != data.size()) {
        throw Error("mask length differs from the row count");
    }
}

}  // namespace

PairwiseLoss PairwiseLoss::ranking_hinge(double kappa) {
    PairwiseLoss loss;
    loss.kind_ = LossKind::RankingHinge;
    loss.kappa_ = kappa;
    loss.train_ = [kappa](const Eigen::VectorXd& u, const Eigen::VectorXd& xi, double yi,
                          const Eigen::VectorXd& xj, double yj) {
        const double g = std::tanh(kappa * (sigmoid(u.dot(xi)) - sigmoid(u.dot(xj))));
        return std::max(0.0, 1.0 - g * (yi - yj));
    };
    loss.grad_ = [kappa](const Eigen::VectorXd& u, const Eigen::VectorXd& xi, double yi,
                         const Eigen::VectorXd& xj, double yj) -> Eigen::VectorXd {
        const double si = sigmoid(u.dot(xi));
        const double sj = sigmoid(u.dot(xj));
        const double g = std::tanh(kappa * (si - sj));
        const double dy = yi - yj;
        if (1.0 - g * dy <= 0.0) return Eigen::VectorXd::Zero(u.size());
        const double chain = -dy * kappa * (1.0 - g * g);
        return chain * (si * (1.0 - si) * xi - sj * (1.0 - sj) * xj);
    };
    loss.test_ = [](const Eigen::VectorXd& u, const Eigen::VectorXd& xi, double yi,
                    const Eigen::VectorXd& xj, double yj) {
        const double g = (sigmoid(u.dot(xi)) >= sigmoid(u.dot(xj))) ? 1.0 : -1.0;
        return std::max(0.0, 1.0 - g * (yi - yj));
    };
    return loss;
}

PairwiseLoss PairwiseLoss::metric_hinge() {
    PairwiseLoss loss;
    loss.kind_ = LossKind::MetricHinge;
    loss.train_ = [](const Eigen::VectorXd& u, const Eigen::VectorXd& xi, double yi,
                     const Eigen::VectorXd& xj, double yj) {
        return std::max(0.0, metric_margin(u, xi, yi, xj, yj));
    };
    loss.grad_ = [](const Eigen::VectorXd& u, const Eigen::VectorXd& xi, double yi,
                    const Eigen::VectorXd& xj, double yj) -> Eigen::VectorXd {
        if (metric_margin(u, xi, yi, xj, yj) <= 0.0) return Eigen::VectorXd::Zero(u.size());
        const long q = xi.size();
        const Eigen::VectorXd d = xi - xj;
        const double y_ij = (yi == yj) ? 1.0 : -1.0;
        Eigen::VectorXd grad(q * q);
        for (long r = 0; r < q; ++r) {
            for (long c = 0; c < q; ++c) grad[r * q + c] = y_ij * d[r] * d[c];
        }
        return grad;
    };
    loss.test_ = loss.train_;
    return loss;
}

PairwiseLoss PairwiseLoss::custom(EvalFn train, GradFn grad, EvalFn test) {
    PairwiseLoss loss;
    loss.kind_ = LossKind::Custom;
    loss.train_ = std::move(train);
    loss.grad_ = std::move(grad);
    loss.test_ = std::move(test);
    return loss;
}

double PairwiseLoss::train_loss(const Eigen::VectorXd& u, const Eigen::VectorXd& xi, double yi,
                                const Eigen::VectorXd& xj, double yj) const {
    return train_(u, xi, yi, xj, yj);
}

Eigen::VectorXd PairwiseLoss::train_grad(const Eigen::VectorXd& u, const Eigen::VectorXd& xi,
                                         double yi, const Eigen::VectorXd& xj, double yj) const {
    return grad_(u, xi, yi, xj, yj);
}

double PairwiseLoss::test_loss(const Eigen::VectorXd& u, const Eigen::VectorXd& xi, double yi,
                               const Eigen::VectorXd& xj, double yj) const {
    return test_(u, xi, yi, xj, yj);
}

namespace {

double risk_on_indices(const Eigen::VectorXd& u, const std::vector<Eigen::VectorXd>& rows,
                       const Eigen::VectorXd& labels, const PairwiseLoss& loss,
                       std::span<const long> idx, RiskFace face) {
    const long b = static_cast<long>(idx.size());
    double acc = 0.0;
    for (long a = 0; a < b; ++a) {
        const long i = idx[a];
        for (long c = a + 1; c < b; ++c) {
            const long j = idx[c];
            const double value =
                face == RiskFace::Train
                    ? loss.train_loss(u, rows[static_cast<std::size_t>(i)], labels[i],
                                      rows[static_cast<std::size_t>(j)], labels[j])
                    : loss.test_loss(u, rows[static_cast<std::size_t>(i)], labels[i],
                                     rows[static_cast<std::size_t>(j)], labels[j]);
            if (!std::isfinite(value)) throw NonFiniteKernel("pairwise loss produced a non-finite value");
            acc += value;
        }
    }
    return acc / (static_cast<double>(b) * static_cast<double>(b - 1) / 2.0);
}

}  // namespace

double pairwise_risk(const Eigen::VectorXd& u, const PairwiseDataset& data,
                     const PairwiseLoss& loss, RiskFace face) {
    check_dataset(data);
    if (data.size() < 2) throw DatasetTooSmall("pairwise risk needs at least two rows");
    std::vector<Eigen::VectorXd> rows;
    rows_of(data, rows);
    std::vector<long> idx(static_cast<std::size_t>(data.size()));
    for (long i = 0; i < data.size(); ++i) idx[static_cast<std::size_t>(i)] = i;
    return risk_on_indices(u, rows, data.labels, loss, idx, face);
}

double mou_risk(const Eigen::VectorXd& u, const PairwiseDataset& data, const PairwiseLoss& loss,
                const BlockPartition& partition, RiskFace face) {
    check_dataset(data);
    if (partition.n != data.size()) {
        throw PartitionMismatch("partition size differs from the dataset size");
    }
    if (partition.block_size < 2) throw BlockTooSmall("blocks need at least two rows for pairs");
    std::vector<Eigen::VectorXd> rows;
    rows_of(data, rows);
    std::vector<double> risks;
    risks.reserve(partition.blocks.size());
    for (const auto& block : partition.blocks) {
        risks.push_back(risk_on_indices(u, rows, data.labels, loss, block, face));
    }
    return median_of(std::move(risks));
}

namespace {

Eigen::VectorXd mean_grad_on_block(const Eigen::VectorXd& u,
                                   const std::vector<Eigen::VectorXd>& rows,
                                   const Eigen::VectorXd& labels, const PairwiseLoss& loss,
                                   const std::vector<long>& idx) {
    const long b = static_cast<long>(idx.size());
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(u.size());
    for (long a = 0; a < b; ++a) {
        const long i = idx[static_cast<std::size_t>(a)];
        for (long c = a + 1; c < b; ++c) {
            const long j = idx[static_cast<std::size_t>(c)];
            acc += loss.train_grad(u, rows[static_cast<std::size_t>(i)], labels[i],
                                   rows[static_cast<std::size_t>(j)], labels[j]);
        }
    }
    acc /= static_cast<double>(b) * static_cast<double>(b - 1) / 2.0;
    if (!acc.allFinite()) throw NonFiniteGradient("block gradient contains non-finite entries");
    return acc;
}

/// Index (0-based) of the lower-central order statistic: a concrete block is
/// needed to take a gradient on, so even counts pick the lower of the two.
std::size_t median_block_index(const std::vector<double>& risks) {
    std::vector<std::size_t> order(risks.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (risks[a] != risks[b]) return risks[a] < risks[b];
        return a < b;
    });
    return order[(risks.size() - 1) / 2];
}

GdResult run_descent(const PairwiseDataset& train, const PairwiseLoss& loss,
                     const GdConfig& config, const PairwiseDataset* test, bool median_blocks) {
    check_dataset(train);
    if (test != nullptr) check_dataset(*test);
    if (config.epochs < 0) throw Error("epoch count must be nonnegative");
    if (!(config.step_tau > 0.0)) throw Error("step_tau must be positive");
    if (config.u0.size() == 0) throw Error("initial parameter u0 is empty");
    const long n = train.size();
    const long k = median_blocks ? config.k_blocks : 1;
    if (k < 1 || k > n) throw InvalidBlockCount("block count outside [1, n]");
    if (n / k < 2) throw BlockTooSmall("blocks need at least two rows for pairs");

    std::vector<Eigen::VectorXd> rows;
    rows_of(train, rows);

    GdResult result;
    result.u = config.u0;
    result.trace.reserve(static_cast<std::size_t>(config.epochs / std::max<long>(1, config.trace_every) + 1));

    std::vector<long> all(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;

    for (long t = 0; t < config.epochs; ++t) {
        double median_risk = 0.0;
        const std::vector<long>* step_block = &all;
        BlockPartition part;
        if (median_blocks) {
            part = partition_random(n, k, derive_seed(config.seed, 0x6d, static_cast<std::uint64_t>(t)));
            std::vector<double> risks;
            risks.reserve(part.blocks.size());
            for (const auto& block : part.blocks) {
                risks.push_back(
                    risk_on_indices(result.u, rows, train.labels, loss, block, RiskFace::Train));
            }
            step_block = &part.blocks[median_block_index(risks)];
            median_risk = median_of(std::move(risks));
        } else {
            median_risk = risk_on_indices(result.u, rows, train.labels, loss, all, RiskFace::Train);
        }

        double step = config.step0 / (1.0 + static_cast<double>(t) / config.step_tau);
        if (t < config.warmup) {
            step *= static_cast<double>(t + 1) / static_cast<double>(config.warmup);
        }
        result.u -= step * mean_grad_on_block(result.u, rows, train.labels, loss, *step_block);
        if (config.psd_project) result.u = flatten(psd_project(unflatten(result.u)));

        const long every = std::max<long>(1, config.trace_every);
        if ((t + 1) % every == 0 || t + 1 == config.epochs) {
            GdTraceRow row;
            row.epoch = t + 1;
            row.median_block_risk = median_risk;
            row.train_risk =
                risk_on_indices(result.u, rows, train.labels, loss, all, RiskFace::Test);
            row.test_risk = (test != nullptr)
                                ? pairwise_risk(result.u, *test, loss, RiskFace::Test)
                                : std::numeric_limits<double>::quiet_NaN();
            result.trace.push_back(row);
        }
    }
    return result;
}

}  // namespace

GdResult mou_gd(const PairwiseDataset& train, const PairwiseLoss& loss, const GdConfig& config,
                const PairwiseDataset* test) {
    return run_descent(train, loss, config, test, /*median_blocks=*/true);
}

GdResult pairwise_gd(const PairwiseDataset& train, const PairwiseLoss& loss,
                     const GdConfig& config, const PairwiseDataset* test) {
    return run_descent(train, loss, config, test, /*median_blocks=*/false);
}

Eigen::MatrixXd psd_project(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) throw Error("projection needs a square matrix");
    if (!m.allFinite()) throw NonFiniteInput("matrix contains non-finite entries");
    const Eigen::MatrixXd sym = (m + m.transpose()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
    Eigen::VectorXd values = solver.eigenvalues();
    for (long i = 0; i < values.size(); ++i) values[i] = std::max(0.0, values[i]);
    const Eigen::MatrixXd projected =
        solver.eigenvectors() * values.asDiagonal() * solver.eigenvectors().transpose();
    return (projected + projected.transpose()) / 2.0;
}

PairwiseDataset contaminate_pairwise(const PairwiseDataset& data, double fraction, double lambda,
                                     const Eigen::VectorXd& sane_model, std::uint64_t seed,
                                     std::optional<double> box_width) {
    check_dataset(data);
    if (!(fraction >= 0.0)) throw Error("contamination fraction must be nonnegative");
    if (fraction >= 0.5) {
        throw BreakdownExceeded("contamination fraction at or above the 1/2 breakdown point");
    }
    if (sane_model.size() != data.dim()) {
        throw Error("sane model dimension differs from the feature dimension");
    }
    const long n = data.size();
    const long count = static_cast<long>(std::ceil(fraction * static_cast<double>(n) - 1e-9));
    PairwiseDataset out;
    out.features.resize(n + count, data.dim());
    out.labels.resize(n + count);
    out.features.topRows(n) = data.features;
    out.labels.head(n) = data.labels;
    out.mask.assign(static_cast<std::size_t>(n), Tag::Inlier);
    if (!data.mask.empty()) out.mask = data.mask;
    if (count == 0) return out;

    const double width = box_width.value_or(0.1 * std::abs(lambda));
    Rng rng(derive_seed(seed, 0xc0));
    for (long r = 0; r < count; ++r) {
        for (long c = 0; c < data.dim(); ++c) {
            const double center = -lambda * sane_model[c];
            out.features(n + r, c) = rng.uniform(center - width / 2.0, center + width / 2.0);
        }
        out.labels[n + r] = rng.uniform(lambda - width / 2.0, lambda + width / 2.0);
        out.mask.push_back(Tag::Outlier);
    }
    return out;
}

}  // namespace mom
