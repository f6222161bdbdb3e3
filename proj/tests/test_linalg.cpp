#include <gtest/gtest.h>

#include <cmath>

#include "mcorr/error.hpp"
#include "mcorr/linalg.hpp"
#include "support/generators.hpp"

using namespace mcorr;
using namespace mcorr::gen;

TEST(SampleMeanCov, TwoObservations) {
    Matrix x(2, 2);
    x << 0, 0, 2, 2;
    const MeanCov mc = sample_mean_cov(DataMatrix(x));
    EXPECT_DOUBLE_EQ(mc.mean(0), 1.0);
    EXPECT_DOUBLE_EQ(mc.mean(1), 1.0);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) EXPECT_DOUBLE_EQ(mc.cov(i, j), 2.0);
}

TEST(SampleMeanCov, ConstantColumnGivesZeroVariance) {
    Matrix x(4, 2);
    x << 1, 5, 2, 5, 3, 5, 4, 5;
    const MeanCov mc = sample_mean_cov(DataMatrix(x));
    EXPECT_EQ(mc.cov(1, 1), 0.0);
    EXPECT_THROW(sample_correlation(DataMatrix(x)), DegenerateVariableError);
    try {
        sample_correlation(DataMatrix(x));
    } catch (const DegenerateVariableError& e) {
        EXPECT_EQ(e.column(), 1u);
    }
}

TEST(SampleMeanCov, SingleRowIsRejected) {
    EXPECT_THROW(sample_mean_cov(DataMatrix(Matrix::Ones(1, 3))), InsufficientSampleError);
}

TEST(SampleMeanCov, MatchesReferenceAndSerialEqualsParallel) {
    Rng rng(7);
    for (const auto& [n, p] : {std::pair{50, 3}, std::pair{300, 70}, std::pair{129, 130}}) {
        const DataMatrix data(correlated_data(n, p, rng));
        const MeanCov par = sample_mean_cov(data, Execution::Parallel);
        const MeanCov ser = sample_mean_cov(data, Execution::Serial);
        const MeanCov ref = reference::sample_mean_cov(data);
        EXPECT_TRUE(par.cov.values() == ser.cov.values());
        EXPECT_TRUE(par.mean == ser.mean);
        EXPECT_LT((par.cov.values() - ref.cov.values()).cwiseAbs().maxCoeff(), 1e-10);
        EXPECT_LT((par.mean - ref.mean).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(SampleMeanCov, ErrorShrinksWithN) {
    Rng rng(11);
    const Matrix sigma = random_spd(4, rng, 0.5);
    const Eigen::LLT<Matrix> llt(sigma);
    double previous = 1e9;
    for (const Eigen::Index n : {100, 10000, 400000}) {
        const Matrix x = random_gaussian(n, 4, rng) * llt.matrixU();
        const double err = (sample_mean_cov(DataMatrix(x)).cov.values() - sigma).cwiseAbs().maxCoeff();
        EXPECT_LT(err, previous * 1.5);
        previous = err;
    }
    EXPECT_LT(previous, 0.02);
}

TEST(DataMatrixTest, RejectsNonFiniteAndNamesDefault) {
    Matrix x = Matrix::Ones(3, 2);
    const DataMatrix ok(x);
    EXPECT_EQ(ok.names()[1], "X2");
    x(2, 1) = std::nan("");
    EXPECT_THROW(DataMatrix{x}, Error);
}

TEST(CorrelationFromCov, Examples) {
    EXPECT_TRUE(correlation_from_cov(SymmetricMatrix(Matrix::Identity(3, 3))).values() == Matrix::Identity(3, 3));
    Matrix c(2, 2);
    c << 4, 2, 2, 1;
    const CorrelationMatrix v = correlation_from_cov(SymmetricMatrix(c));
    EXPECT_DOUBLE_EQ(v(0, 1), 1.0);
    EXPECT_DOUBLE_EQ(v(1, 0), 1.0);
    Matrix bad = Matrix::Identity(3, 3);
    bad(2, 2) = 0.0;
    try {
        correlation_from_cov(SymmetricMatrix(bad));
        FAIL();
    } catch (const DegenerateVariableError& e) {
        EXPECT_EQ(e.column(), 2u);
    }
}

TEST(CorrelationFromCov, RandomSpdPropertiesAndIdempotence) {
    Rng rng(3);
    for (int rep = 0; rep < 50; ++rep) {
        const Eigen::Index p = 2 + rep % 9;
        const CorrelationMatrix v = correlation_from_cov(SymmetricMatrix(random_spd(p, rng)));
        EXPECT_TRUE((v.values().diagonal().array() == 1.0).all());
        EXPECT_GE(Eigen::SelfAdjointEigenSolver<Matrix>(v.values()).eigenvalues().minCoeff(), -1e-10);
        EXPECT_LE(v.values().cwiseAbs().maxCoeff(), 1.0);
        const CorrelationMatrix again = correlation_from_cov(v);
        EXPECT_TRUE(again.values() == v.values());
    }
}

TEST(CorrelationMatrixTest, ValidatesInput) {
    Matrix m = Matrix::Identity(2, 2);
    m(0, 0) = 1.1;
    EXPECT_THROW(CorrelationMatrix{m}, Error);
    Matrix indefinite = compound_symmetry(3, -0.9);
    EXPECT_THROW(CorrelationMatrix{indefinite}, Error);
}

TEST(LogDetPsd, Examples) {
    for (const Eigen::Index p : {1, 2, 7, 50}) EXPECT_EQ(log_det_psd(Matrix::Identity(p, p)), 0.0);
    Matrix d = Matrix::Zero(2, 2);
    d.diagonal() << 2, 3;
    EXPECT_NEAR(log_det_psd(d), std::log(6.0), 1e-15);
}

TEST(LogDetPsd, SingularGivesSentinel) {
    Matrix m = Matrix::Ones(3, 3);
    EXPECT_TRUE(std::isinf(log_det_psd(m)) && log_det_psd(m) < 0);
    Matrix near = Matrix::Identity(3, 3);
    near(2, 2) = 1e-14;
    EXPECT_TRUE(std::isinf(log_det_psd(near)));
}

TEST(LogDetPsd, MatchesEigenvaluesAndCofactors) {
    Rng rng(5);
    for (int rep = 0; rep < 100; ++rep) {
        const Eigen::Index p = 1 + rep % 5;
        const Matrix m = random_spd(p, rng, 0.05);
        const double ld = log_det_psd(m);
        const double eig = Eigen::SelfAdjointEigenSolver<Matrix>(m).eigenvalues().array().log().sum();
        EXPECT_NEAR(ld, eig, 1e-10 * std::max(1.0, std::abs(eig)));
        const double cof = cofactor_det(m);
        EXPECT_NEAR(std::exp(ld) / cof, 1.0, 1e-9);
    }
}

TEST(SqrtPsd, Examples) {
    EXPECT_TRUE(sqrt_psd(SymmetricMatrix(Matrix::Identity(4, 4))).values().isApprox(Matrix::Identity(4, 4)));
    Matrix d = Matrix::Zero(2, 2);
    d.diagonal() << 4, 9;
    const Matrix s = sqrt_psd(SymmetricMatrix(d)).values();
    EXPECT_NEAR(s(0, 0), 2.0, 1e-14);
    EXPECT_NEAR(s(1, 1), 3.0, 1e-14);
    EXPECT_NEAR(s(0, 1), 0.0, 1e-14);
}

TEST(SqrtPsd, MultiplyBackAndCommute) {
    Rng rng(9);
    for (int rep = 0; rep < 40; ++rep) {
        const Matrix v = random_correlation(2 + rep % 12, rng).values();
        const Matrix s = sqrt_psd(SymmetricMatrix(v)).values();
        EXPECT_LE((s * s - v).norm(), 1e-8 * v.norm());
        EXPECT_LE((s * v - v * s).norm(), 1e-8 * v.norm());
        EXPECT_TRUE(s.isApprox(s.transpose()));
        EXPECT_GE(Eigen::SelfAdjointEigenSolver<Matrix>(s).eigenvalues().minCoeff(), -1e-12);
    }
}

TEST(SqrtPsd, RejectsIndefinite) {
    Matrix m = Matrix::Identity(2, 2);
    m(1, 1) = -0.5;
    EXPECT_THROW(sqrt_psd(SymmetricMatrix(m)), NotPsdError);
    m(1, 1) = -1e-11;
    EXPECT_NO_THROW(sqrt_psd(SymmetricMatrix(m)));
}

TEST(Hadamard, Helpers) {
    const Matrix i3 = Matrix::Identity(3, 3);
    EXPECT_TRUE(hadamard(i3, i3) == i3);
    EXPECT_EQ(frobenius_norm_sq(Matrix::Identity(6, 6)), 6.0);
    EXPECT_EQ(trace(Matrix::Identity(6, 6)), 6.0);
    const double alpha = 0.35;
    const Eigen::Index p = 7;
    EXPECT_NEAR(frobenius_norm_sq(compound_symmetry(p, alpha) - Matrix::Identity(p, p)),
                static_cast<double>(p * (p - 1)) * alpha * alpha, 1e-13);
    EXPECT_THROW(hadamard(i3, Matrix::Identity(2, 2)), DimensionError);
}
