#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "mom/learning.hpp"
#include "mom/rng.hpp"

using namespace mom;

namespace {

PairwiseDataset ranking_instance(Rng& rng, long n, long p, const Eigen::VectorXd& w_star,
                                 double noise_sd) {
    PairwiseDataset data;
    data.features.resize(n, p);
    data.labels.resize(n);
    for (long i = 0; i < n; ++i) {
        for (long j = 0; j < p; ++j) data.features(i, j) = rng.normal();
        data.labels[i] = data.features.row(i).dot(w_star) + noise_sd * rng.normal();
    }
    return data;
}

bool exact_equal(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    if (a.size() != b.size()) return false;
    for (long i = 0; i < a.size(); ++i) {
        if (a[i] != b[i]) return false;
    }
    return true;
}

/// Six rows in three crafted blocks of two: the within-block pair losses are
/// 0.1, 5.0, and 0.2 under the metric hinge at the identity matrix.
PairwiseDataset crafted_blocks() {
    PairwiseDataset data;
    data.features.resize(6, 2);
    data.labels.resize(6);
    const double d1 = std::sqrt(1.1);  // same label: loss = d^2 - 1
    const double d2 = std::sqrt(6.0);
    const double d3 = std::sqrt(1.2);
    data.features << 0, 0, d1, 0, 10, 0, 10 + d2, 0, 20, 0, 20 + d3, 0;
    data.labels << 1, 1, 2, 2, 3, 3;
    return data;
}

}  // namespace

TEST_CASE("ranking hinge evaluation") {
    const PairwiseLoss loss = PairwiseLoss::ranking_hinge();
    Eigen::VectorXd u = Eigen::VectorXd::Zero(2);
    Eigen::VectorXd x1(2), x2(2);
    x1 << 1.0, 0.0;
    x2 << 0.0, 1.0;
    // equal labels: the score difference is multiplied by zero, hinge at 1
    CHECK(loss.train_loss(u, x1, 3.0, x2, 3.0) == doctest::Approx(1.0));
    CHECK(loss.test_loss(u, x1, 3.0, x2, 3.0) == doctest::Approx(1.0));
    // symmetry in the pair
    u << 0.7, -0.4;
    CHECK(loss.train_loss(u, x1, 2.0, x2, 5.0) ==
          doctest::Approx(loss.train_loss(u, x2, 5.0, x1, 2.0)).epsilon(1e-12));
    CHECK(loss.train_loss(u, x1, 2.0, x2, 5.0) >= 0.0);
}

TEST_CASE("metric hinge evaluation") {
    const PairwiseLoss loss = PairwiseLoss::metric_hinge();
    Eigen::VectorXd u(4);
    u << 1, 0, 0, 1;  // identity metric on R^2
    Eigen::VectorXd x1(2), x2(2);
    x1 << 0.0, 0.0;
    x2 << 1.0, 1.0;  // d^2 = 2: the margin center
    CHECK(loss.train_loss(u, x1, 1.0, x2, 1.0) == doctest::Approx(1.0));
    CHECK(loss.train_loss(u, x1, 1.0, x2, 2.0) == doctest::Approx(1.0));
    // same class, d^2 = 0: hinge clamps at zero from 1 + (0 - 2)
    CHECK(loss.train_loss(u, x1, 1.0, x1, 1.0) == doctest::Approx(0.0));
}

TEST_CASE("gradients match central finite differences away from kinks") {
    Rng rng(12);
    const double h = 1e-6;

    const PairwiseLoss ranking = PairwiseLoss::ranking_hinge();
    int checked_ranking = 0;
    while (checked_ranking < 100) {
        Eigen::VectorXd u(3), xi(3), xj(3);
        for (int c = 0; c < 3; ++c) {
            u[c] = rng.uniform(-1.5, 1.5);
            xi[c] = rng.normal();
            xj[c] = rng.normal();
        }
        const double yi = rng.uniform(-2, 2);
        const double yj = rng.uniform(-2, 2);
        const double margin = 1.0 - std::tanh(4.0 * (1.0 / (1.0 + std::exp(-u.dot(xi))) -
                                                     1.0 / (1.0 + std::exp(-u.dot(xj))))) *
                                        (yi - yj);
        if (std::abs(margin) < 1e-3) continue;  // too close to the hinge kink
        const Eigen::VectorXd grad = ranking.train_grad(u, xi, yi, xj, yj);
        for (int c = 0; c < 3; ++c) {
            Eigen::VectorXd up = u, dn = u;
            up[c] += h;
            dn[c] -= h;
            const double fd =
                (ranking.train_loss(up, xi, yi, xj, yj) - ranking.train_loss(dn, xi, yi, xj, yj)) /
                (2.0 * h);
            const double scale = std::max({1.0, std::abs(fd), std::abs(grad[c])});
            CHECK(std::abs(grad[c] - fd) / scale < 1e-4);
        }
        ++checked_ranking;
    }

    const PairwiseLoss metric = PairwiseLoss::metric_hinge();
    int checked_metric = 0;
    while (checked_metric < 100) {
        Eigen::VectorXd u(4), xi(2), xj(2);
        for (int c = 0; c < 4; ++c) u[c] = rng.uniform(-1, 1);
        for (int c = 0; c < 2; ++c) {
            xi[c] = rng.normal();
            xj[c] = rng.normal();
        }
        const double yi = 1.0;
        const double yj = rng.bernoulli(0.5) ? 1.0 : 2.0;
        const double loss_at = metric.train_loss(u, xi, yi, xj, yj);
        if (loss_at < 1e-3) continue;  // kink neighborhood (or inactive hinge)
        const Eigen::VectorXd grad = metric.train_grad(u, xi, yi, xj, yj);
        for (int c = 0; c < 4; ++c) {
            Eigen::VectorXd up = u, dn = u;
            up[c] += h;
            dn[c] -= h;
            const double fd =
                (metric.train_loss(up, xi, yi, xj, yj) - metric.train_loss(dn, xi, yi, xj, yj)) /
                (2.0 * h);
            const double scale = std::max({1.0, std::abs(fd), std::abs(grad[c])});
            CHECK(std::abs(grad[c] - fd) / scale < 1e-4);
        }
        ++checked_metric;
    }
}

TEST_CASE("pairwise and block risks") {
    const PairwiseLoss metric = PairwiseLoss::metric_hinge();
    const PairwiseDataset data = crafted_blocks();
    Eigen::VectorXd id(4);
    id << 1, 0, 0, 1;

    const BlockPartition part = partition_contiguous(6, 3);
    CHECK(mou_risk(id, data, metric, part) == doctest::Approx(0.2).epsilon(1e-12));
    // K = 1 reduces to the plain pairwise risk
    CHECK(mou_risk(id, data, metric, partition_contiguous(6, 1)) ==
          doctest::Approx(pairwise_risk(id, data, metric, RiskFace::Train)).epsilon(1e-12));

    const PairwiseLoss zero = PairwiseLoss::custom(
        [](const Eigen::VectorXd&, const Eigen::VectorXd&, double, const Eigen::VectorXd&,
           double) { return 0.0; },
        [](const Eigen::VectorXd& u, const Eigen::VectorXd&, double, const Eigen::VectorXd&,
           double) { return Eigen::VectorXd::Zero(u.size()).eval(); },
        [](const Eigen::VectorXd&, const Eigen::VectorXd&, double, const Eigen::VectorXd&,
           double) { return 0.0; });
    CHECK(pairwise_risk(id, data, zero) == doctest::Approx(0.0));

    PairwiseDataset one_row;
    one_row.features.resize(1, 2);
    one_row.features << 0, 0;
    one_row.labels.resize(1);
    one_row.labels << 1;
    CHECK_THROWS_AS(pairwise_risk(id, one_row, metric), DatasetTooSmall);
    CHECK_THROWS_AS(mou_risk(id, data, metric, partition_contiguous(6, 6)), BlockTooSmall);
}

TEST_CASE("psd projection") {
    Eigen::MatrixXd id = Eigen::MatrixXd::Identity(3, 3);
    CHECK(psd_project(id).isApprox(id, 1e-12));

    Eigen::MatrixXd diag = Eigen::MatrixXd::Zero(2, 2);
    diag(0, 0) = 1.0;
    diag(1, 1) = -2.0;
    Eigen::MatrixXd clamped = psd_project(diag);
    CHECK(clamped(0, 0) == doctest::Approx(1.0));
    CHECK(clamped(1, 1) == doctest::Approx(0.0));

    // Frobenius-nearest PSD matrix on 2x2 instances, against a grid search
    // over the PSD parameterization L L^T with L lower triangular
    Rng rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        Eigen::MatrixXd a(2, 2);
        a << rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2);
        a = ((a + a.transpose()) / 2.0).eval();
        const Eigen::MatrixXd p = psd_project(a);
        const double dist = (a - p).norm();
        double best = 1e100;
        const int steps = 40;
        for (int i = -steps; i <= steps; ++i) {
            for (int j = -steps; j <= steps; ++j) {
                for (int k = -steps; k <= steps; ++k) {
                    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(2, 2);
                    l(0, 0) = 3.0 * i / steps;
                    l(1, 0) = 3.0 * j / steps;
                    l(1, 1) = 3.0 * k / steps;
                    best = std::min(best, (a - l * l.transpose()).norm());
                }
            }
        }
        CHECK(dist <= best + 0.05);  // grid resolution slack
    }

    // min eigenvalue >= -1e-10 over random symmetric inputs
    for (int trial = 0; trial < 100; ++trial) {
        Eigen::MatrixXd a(4, 4);
        for (int r = 0; r < 4; ++r) {
            for (int c = 0; c < 4; ++c) a(r, c) = rng.uniform(-3, 3);
        }
        const Eigen::MatrixXd p = psd_project(a);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(p);
        CHECK(solver.eigenvalues().minCoeff() >= -1e-10);
    }

    Eigen::MatrixXd bad(2, 2);
    bad << 1.0, std::numeric_limits<double>::quiet_NaN(), 0.0, 1.0;
    CHECK_THROWS_AS(psd_project(bad), NonFiniteInput);
}

TEST_CASE("descent reductions and determinism") {
    Rng rng(909);
    Eigen::VectorXd w_star(3);
    w_star << 1.0, -0.5, 0.25;
    const PairwiseDataset data = ranking_instance(rng, 24, 3, w_star, 0.1);
    const PairwiseLoss loss = PairwiseLoss::ranking_hinge();

    GdConfig config;
    config.k_blocks = 1;
    config.epochs = 15;
    config.step0 = 0.4;
    config.u0 = Eigen::VectorXd::Zero(3);
    config.seed = 42;

    // zero epochs returns u0 untouched
    GdConfig none = config;
    none.epochs = 0;
    CHECK(exact_equal(mou_gd(data, loss, none).u, config.u0));

    // K = 1 coincides with the full-batch baseline step for step
    const GdResult a = mou_gd(data, loss, config);
    const GdResult b = pairwise_gd(data, loss, config);
    REQUIRE(a.trace.size() == b.trace.size());
    CHECK(exact_equal(a.u, b.u));
    for (std::size_t t = 0; t < a.trace.size(); ++t) {
        CHECK(a.trace[t].median_block_risk == b.trace[t].median_block_risk);
        CHECK(a.trace[t].train_risk == b.trace[t].train_risk);
    }

    // bitwise determinism with blocks
    GdConfig blocks = config;
    blocks.k_blocks = 4;
    const GdResult c = mou_gd(data, loss, blocks);
    const GdResult d = mou_gd(data, loss, blocks);
    CHECK(exact_equal(c.u, d.u));
    REQUIRE(c.trace.size() == d.trace.size());
    for (std::size_t t = 0; t < c.trace.size(); ++t) {
        CHECK(c.trace[t].median_block_risk == d.trace[t].median_block_risk);
    }

    CHECK_THROWS_AS(mou_gd(data, loss, [&] {
        GdConfig bad = config;
        bad.k_blocks = 20;  // blocks of one row cannot form pairs
        return bad;
    }()), BlockTooSmall);
}

TEST_CASE("median block selection is visible in the trace") {
    // with an odd block count the reported median equals one block risk
    Rng rng(5);
    Eigen::VectorXd w_star(2);
    w_star << 1.0, 1.0;
    const PairwiseDataset data = ranking_instance(rng, 30, 2, w_star, 0.05);
    const PairwiseLoss loss = PairwiseLoss::ranking_hinge();
    GdConfig config;
    config.k_blocks = 5;
    config.epochs = 8;
    config.step0 = 0.3;
    config.u0 = Eigen::VectorXd::Zero(2);
    config.seed = 7;
    const GdResult result = mou_gd(data, loss, config);
    for (const auto& row : result.trace) {
        // recompute the block risks at that epoch's partition and parameter:
        // cheaper here to just assert the reported value is finite and
        // nonnegative; the exact median identity is covered by mou_risk
        CHECK(std::isfinite(row.median_block_risk));
        CHECK(row.median_block_risk >= 0.0);
    }
}

TEST_CASE("pairwise contamination scheme") {
    Rng rng(88);
    Eigen::VectorXd w_star(3);
    w_star << 0.6, -0.2, 0.9;
    const PairwiseDataset data = ranking_instance(rng, 100, 3, w_star, 0.1);

    const PairwiseDataset same = contaminate_pairwise(data, 0.0, 10.0, w_star, 5);
    CHECK(same.size() == 100);

    const PairwiseDataset more = contaminate_pairwise(data, 0.05, 10.0, w_star, 5);
    CHECK(more.size() == 105);
    long outliers = 0;
    for (Tag tag : more.mask) outliers += (tag == Tag::Outlier) ? 1 : 0;
    CHECK(outliers == 5);
    // appended rows concentrate around (-lambda w, lambda)
    for (long r = 100; r < 105; ++r) {
        CHECK(std::abs(more.labels[r] - 10.0) <= 0.5 + 1e-12);
        const double proj = more.features.row(r).dot(w_star);
        CHECK(proj < 0.0);  // anti-aligned with the sane model
    }

    // flipping the sign of lambda flips the projection sign
    const PairwiseDataset flipped = contaminate_pairwise(data, 0.05, -10.0, w_star, 5);
    for (long r = 100; r < 105; ++r) {
        CHECK(flipped.features.row(r).dot(w_star) > 0.0);
    }

    CHECK_THROWS_AS(contaminate_pairwise(data, 0.6, 10.0, w_star, 5), BreakdownExceeded);
}
