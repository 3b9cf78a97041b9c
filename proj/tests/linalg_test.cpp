#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

#include "greenxva/error.hpp"
#include "greenxva/linalg.hpp"

using namespace greenxva;
using namespace greenxva::linalg;

namespace {

Matrix random_spd(int n, unsigned seed, double shift) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> g;
    Eigen::MatrixXd b(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) b(i, j) = g(rng);
    }
    const Eigen::MatrixXd a = b * b.transpose() / n + shift * Eigen::MatrixXd::Identity(n, n);
    Matrix m(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) m(i, j) = a(i, j);
    }
    return m;
}

Eigen::MatrixXd to_eigen(const Matrix& m) {
    Eigen::MatrixXd a(m.size(), m.size());
    for (int i = 0; i < m.size(); ++i) {
        for (int j = 0; j < m.size(); ++j) a(i, j) = m(i, j);
    }
    return a;
}

}  // namespace

TEST(Linalg, CholeskyReproducesMatrix) {
    const Matrix a = random_spd(40, 1, 0.5);
    Matrix l = a;
    cholesky(l);
    const Eigen::MatrixXd le = to_eigen(l);
    EXPECT_LT((le * le.transpose() - to_eigen(a)).norm(), 1e-12 * to_eigen(a).norm());
    EXPECT_EQ(le.triangularView<Eigen::StrictlyUpper>().toDenseMatrix().norm(), 0.0);
}

TEST(Linalg, CholeskyRejectsIndefinite) {
    Matrix a(2);
    a(0, 0) = 1.0;
    a(0, 1) = a(1, 0) = 2.0;
    a(1, 1) = 1.0;
    EXPECT_THROW(cholesky(a), LinearAlgebraError);
}

TEST(Linalg, TridiagonalizationIsSimilarity) {
    const Matrix a = random_spd(60, 2, -0.3);
    const Tridiagonal t(a);
    const int n = a.size();
    // Columns of Q from Q e_j, then check Q T Q^T = A.
    Eigen::MatrixXd q(n, n), tm = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        std::vector<double> e(static_cast<std::size_t>(n), 0.0);
        e[static_cast<std::size_t>(j)] = 1.0;
        t.apply_q(e);
        for (int i = 0; i < n; ++i) q(i, j) = e[static_cast<std::size_t>(i)];
        tm(j, j) = t.diagonal()[static_cast<std::size_t>(j)];
        if (j + 1 < n) tm(j, j + 1) = tm(j + 1, j) = t.off_diagonal()[static_cast<std::size_t>(j)];
    }
    EXPECT_LT((q.transpose() * q - Eigen::MatrixXd::Identity(n, n)).norm(), 1e-13);
    EXPECT_LT((q * tm * q.transpose() - to_eigen(a)).norm(), 1e-12 * to_eigen(a).norm());
}

TEST(Linalg, SymmetricEigenvaluesMatchEigen) {
    const Matrix a = random_spd(80, 3, -0.5);
    const Tridiagonal t(a);
    const auto ev = tridiagonal_eigenvalues(t.diagonal(), t.off_diagonal());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(a));
    for (int i = 0; i < a.size(); ++i) EXPECT_NEAR(ev[static_cast<std::size_t>(i)], es.eigenvalues()(i), 1e-12);
}

TEST(Linalg, TridiagonalEigenvectorsWithClusters) {
    // Block diagonal with an exactly repeated eigenvalue.
    const int n = 30;
    std::vector<double> d(n), e(n - 1);
    for (int i = 0; i < n; ++i) d[static_cast<std::size_t>(i)] = 2.0 + 0.1 * (i % 15);
    for (int i = 0; i + 1 < n; ++i) e[static_cast<std::size_t>(i)] = (i == 14) ? 0.0 : -0.7;
    auto lam = tridiagonal_eigenvalues(d, e);
    lam.resize(8);
    const auto v = tridiagonal_eigenvectors(d, e, lam);
    for (std::size_t k = 0; k < lam.size(); ++k) {
        double res = 0.0;
        for (int i = 0; i < n; ++i) {
            double y = d[static_cast<std::size_t>(i)] * v[k][static_cast<std::size_t>(i)];
            if (i > 0) y += e[static_cast<std::size_t>(i - 1)] * v[k][static_cast<std::size_t>(i - 1)];
            if (i + 1 < n) y += e[static_cast<std::size_t>(i)] * v[k][static_cast<std::size_t>(i + 1)];
            res = std::max(res, std::abs(y - lam[k] * v[k][static_cast<std::size_t>(i)]));
        }
        EXPECT_LT(res, 1e-12);
        for (std::size_t j = 0; j <= k; ++j) {
            double dp = 0.0;
            for (int i = 0; i < n; ++i) dp += v[k][static_cast<std::size_t>(i)] * v[j][static_cast<std::size_t>(i)];
            EXPECT_NEAR(dp, j == k ? 1.0 : 0.0, 1e-12);
        }
    }
    EXPECT_NEAR(lam[0], lam[1], 1e-13);
}

TEST(Linalg, GeneralizedMatchesEigen) {
    const Matrix k = random_spd(70, 4, 0.1);
    const Matrix m = random_spd(70, 5, 1.0);
    const auto p = generalized_eigen(k, m, 12);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(k), to_eigen(m));
    const Eigen::MatrixXd ke = to_eigen(k), me = to_eigen(m);
    for (int i = 0; i < 12; ++i) {
        EXPECT_NEAR(p.values[static_cast<std::size_t>(i)], es.eigenvalues()(i), 1e-12 * es.eigenvalues()(69));
        const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(p.vectors[static_cast<std::size_t>(i)].data(), 70);
        EXPECT_LT((ke * x - p.values[static_cast<std::size_t>(i)] * me * x).norm(), 1e-10 * (ke * x).norm());
        for (int j = 0; j <= i; ++j) {
            const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(p.vectors[static_cast<std::size_t>(j)].data(), 70);
            EXPECT_NEAR(x.dot(me * y), i == j ? 1.0 : 0.0, 1e-12);
        }
    }
    EXPECT_THROW((void)generalized_eigen(k, m, 71), LinearAlgebraError);
}
