#ifndef MOM_LEARNING_HPP
#define MOM_LEARNING_HPP

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "mom/errors.hpp"
#include "mom/estimators.hpp"
#include "mom/partitioning.hpp"

namespace mom {

/// Rows of features with scalar labels; the mask is simulation ground truth.
struct PairwiseDataset {
    Eigen::MatrixXd features;  // n x p
    Eigen::VectorXd labels;    // n
    std::vector<Tag> mask;

    long size() const { return features.rows(); }
    long dim() const { return features.cols(); }
};

enum class LossKind { RankingHinge, MetricHinge, Custom };

/// Symmetric pairwise loss with two faces: `train` is the differentiable
/// objective the descent follows, `test` the evaluation loss.
///
/// RankingHinge scores with s(x) = sigmoid(w'x).  The evaluation loss is
/// max(0, 1 - g_w(x, x')(y - y')) with the hard comparator
/// g_w = 2*1{s(x) >= s(x')} - 1; training replaces g_w by the smooth
/// surrogate tanh(kappa (s(x) - s(x'))).
///
/// MetricHinge learns a PSD matrix M (parameter = row-major flattening):
/// max(0, 1 + y_ij (d_M^2(x_i, x_j) - 2)) with y_ij = +1 when labels match,
/// -1 otherwise.  Train and test faces coincide.
class PairwiseLoss {
public:
    using EvalFn = std::function<double(const Eigen::VectorXd& u, const Eigen::VectorXd& xi,
                                        double yi, const Eigen::VectorXd& xj, double yj)>;
    using GradFn = std::function<Eigen::VectorXd(const Eigen::VectorXd& u,
                                                 const Eigen::VectorXd& xi, double yi,
                                                 const Eigen::VectorXd& xj, double yj)>;

    static PairwiseLoss ranking_hinge(double kappa = 4.0);
    static PairwiseLoss metric_hinge();
    static PairwiseLoss custom(EvalFn train, GradFn grad, EvalFn test);

    LossKind kind() const { return kind_; }
    double kappa() const { return kappa_; }

    double train_loss(const Eigen::VectorXd& u, const Eigen::VectorXd& xi, double yi,
                      const Eigen::VectorXd& xj, double yj) const;
    Eigen::VectorXd train_grad(const Eigen::VectorXd& u, const Eigen::VectorXd& xi, double yi,
                               const Eigen::VectorXd& xj, double yj) const;
    double test_loss(const Eigen::VectorXd& u, const Eigen::VectorXd& xi, double yi,
                     const Eigen::VectorXd& xj, double yj) const;

private:
    LossKind kind_ = LossKind::Custom;
    double kappa_ = 4.0;
    EvalFn train_;
    GradFn grad_;
    EvalFn test_;
};

enum class RiskFace { Train, Test };

/// Mean loss over all unordered pairs of the dataset.
double pairwise_risk(const Eigen::VectorXd& u, const PairwiseDataset& data,
                     const PairwiseLoss& loss, RiskFace face = RiskFace::Test);

/// Median over blocks of the per-block pair-mean loss.
double mou_risk(const Eigen::VectorXd& u, const PairwiseDataset& data, const PairwiseLoss& loss,
                const BlockPartition& partition, RiskFace face = RiskFace::Train);

struct GdConfig {
    long k_blocks = 1;
    long epochs = 100;
    double step0 = 0.1;    // gamma_t = step0 / (1 + t / step_tau)
    double step_tau = 1.0;  // decay delay; 1 gives the plain 1/(1+t) schedule
    long warmup = 0;        // linear step ramp over the first epochs (0 = none)
    Eigen::VectorXd u0;
    std::uint64_t seed = 0;
    bool psd_project = false;  // metric learning: clamp M onto the PSD cone
    long trace_every = 1;      // record full train/test risks every so many epochs
};

struct GdTraceRow {
    long epoch = 0;
    double median_block_risk = 0.0;  // midpoint median of the block risks at u_t
    double train_risk = 0.0;         // test-face risk on the training set after the step
    double test_risk = 0.0;          // NaN when no test set is attached
};

struct GdResult {
    Eigen::VectorXd u;
    std::vector<GdTraceRow> trace;
};

/// Median-block gradient descent: each epoch repartitions the data at random,
/// evaluates the per-block pair risks at the current parameter, selects the
/// block holding the (lower-central) median risk, and steps on that block's
/// mean pair gradient.
GdResult mou_gd(const PairwiseDataset& train, const PairwiseLoss& loss, const GdConfig& config,
                const PairwiseDataset* test = nullptr);

/// Full-batch baseline: every epoch steps on the mean gradient over all
/// pairs.  Identical trace format; k_blocks is ignored.
GdResult pairwise_gd(const PairwiseDataset& train, const PairwiseLoss& loss,
                     const GdConfig& config, const PairwiseDataset* test = nullptr);

/// Nearest PSD matrix: symmetrize, then clamp negative eigenvalues to zero.
Eigen::MatrixXd psd_project(const Eigen::MatrixXd& m);

/// Appends ceil(fraction * n) adversarial rows drawn uniformly from a box of
/// half-width box_width around (-lambda * sane_model, lambda); the mask marks
/// them as outliers.  box_width defaults to 0.1 |lambda|.
PairwiseDataset contaminate_pairwise(const PairwiseDataset& data, double fraction, double lambda,
                                     const Eigen::VectorXd& sane_model, std::uint64_t seed,
                                     std::optional<double> box_width = std::nullopt);

}  // namespace mom

#endif
