#include "mcorr/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>

#include "mcorr/error.hpp"

namespace mcorr {

namespace {

constexpr double kSingularRatio = 1e-12;
constexpr double kCholeskyPivotRatio = 1e-8;
constexpr double kPsdTolerance = 1e-10;
constexpr double kSqrtNegativeLimit = -1e-6;
constexpr Eigen::Index kBlock = 64;

void require_square(const Matrix& m, const char* what) {
    if (m.rows() != m.cols()) {
        throw DimensionError(std::string(what) + ": matrix is " + std::to_string(m.rows()) + "x" +
                             std::to_string(m.cols()) + ", expected square");
    }
}

}  // namespace

DataMatrix::DataMatrix(Matrix values, std::vector<std::string> names)
    : values_(std::move(values)), names_(std::move(names)) {
    if (values_.rows() == 0 || values_.cols() == 0) {
        throw DimensionError("data matrix is empty");
    }
    if (!values_.allFinite()) {
        for (Eigen::Index j = 0; j < values_.cols(); ++j) {
            for (Eigen::Index i = 0; i < values_.rows(); ++i) {
                if (!std::isfinite(values_(i, j))) {
                    throw Error(ErrorKind::Data, "non-finite entry at row " + std::to_string(i + 1) +
                                                     ", column " + std::to_string(j + 1));
                }
            }
        }
    }
    if (names_.empty()) {
        names_.reserve(static_cast<std::size_t>(values_.cols()));
        for (Eigen::Index j = 0; j < values_.cols(); ++j) names_.push_back("X" + std::to_string(j + 1));
    } else if (names_.size() != static_cast<std::size_t>(values_.cols())) {
        throw DimensionError("got " + std::to_string(names_.size()) + " column names for " +
                             std::to_string(values_.cols()) + " columns");
    }
}

SymmetricMatrix::SymmetricMatrix(Matrix values) : values_(std::move(values)) {
    require_square(values_, "SymmetricMatrix");
    Matrix sym = 0.5 * (values_ + values_.transpose());
    values_ = std::move(sym);
}

CorrelationMatrix::CorrelationMatrix(Matrix values) : SymmetricMatrix(std::move(values)) {
    const Eigen::Index p = values_.rows();
    for (Eigen::Index i = 0; i < p; ++i) {
        if (std::abs(values_(i, i) - 1.0) > 1e-8) {
            throw InvalidParameterError("correlation matrix diagonal entry " + std::to_string(i + 1) +
                                        " is " + std::to_string(values_(i, i)) + ", expected 1");
        }
        values_(i, i) = 1.0;
    }
    for (Eigen::Index j = 0; j < p; ++j) {
        for (Eigen::Index i = 0; i < p; ++i) {
            if (i == j) continue;
            double& v = values_(i, j);
            if (std::abs(v) > 1.0 + 1e-12) {
                throw InvalidParameterError("correlation entry (" + std::to_string(i + 1) + "," +
                                            std::to_string(j + 1) + ") outside [-1, 1]");
            }
            v = std::clamp(v, -1.0, 1.0);
        }
    }
    if (p > 0) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(values_, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -kPsdTolerance) {
            throw NotPsdError("correlation matrix has eigenvalue " +
                              std::to_string(es.eigenvalues().minCoeff()));
        }
    }
}

CorrelationMatrix::CorrelationMatrix(Matrix values, Unchecked)
    : SymmetricMatrix(std::move(values), Trusted{}) {}

CorrelationMatrix CorrelationMatrix::identity(Eigen::Index p) {
    return CorrelationMatrix(Matrix::Identity(p, p), Unchecked{});
}

MeanCov sample_mean_cov(const DataMatrix& data, Execution exec) {
    const Eigen::Index n = data.n();
    const Eigen::Index p = data.p();
    if (n < 2) {
        throw InsufficientSampleError("need at least 2 observations, got " + std::to_string(n));
    }
    Vector mean = data.values().colwise().mean().transpose();
    Matrix centered = data.values().rowwise() - mean.transpose();

    // Upper-triangular block pairs (bi <= bj) of the cross-product.
    const Eigen::Index nblocks = (p + kBlock - 1) / kBlock;
    std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
    for (Eigen::Index bj = 0; bj < nblocks; ++bj) {
        for (Eigen::Index bi = 0; bi <= bj; ++bi) pairs.emplace_back(bi, bj);
    }
    Matrix cov(p, p);
    const double scale = 1.0 / static_cast<double>(n - 1);
    for_each_index(pairs.size(), exec, [&](std::size_t k) {
        const auto [bi, bj] = pairs[k];
        const Eigen::Index i0 = bi * kBlock, j0 = bj * kBlock;
        const Eigen::Index wi = std::min(kBlock, p - i0), wj = std::min(kBlock, p - j0);
        Matrix block = centered.middleCols(i0, wi).transpose() * centered.middleCols(j0, wj);
        block *= scale;
        cov.block(i0, j0, wi, wj) = block;
        if (bi != bj) cov.block(j0, i0, wj, wi) = block.transpose();
    });
    // Diagonal blocks are symmetric up to rounding; mirror the upper triangle.
    cov.triangularView<Eigen::StrictlyLower>() = cov.transpose().triangularView<Eigen::StrictlyLower>();
    return {std::move(mean), SymmetricMatrix(std::move(cov))};
}

CorrelationMatrix correlation_from_cov(const SymmetricMatrix& cov) {
    const Matrix& c = cov.values();
    const Eigen::Index p = c.rows();
    Vector inv_sd(p);
    for (Eigen::Index j = 0; j < p; ++j) {
        if (!(c(j, j) > 0.0)) {
            throw DegenerateVariableError(static_cast<std::size_t>(j),
                                          "variable " + std::to_string(j + 1) + " has zero variance");
        }
        inv_sd(j) = 1.0 / std::sqrt(c(j, j));
    }
    Matrix v = inv_sd.asDiagonal() * c * inv_sd.asDiagonal();
    for (Eigen::Index j = 0; j < p; ++j) {
        for (Eigen::Index i = 0; i < j; ++i) {
            const double r = std::clamp(0.5 * (v(i, j) + v(j, i)), -1.0, 1.0);
            v(i, j) = r;
            v(j, i) = r;
        }
        v(j, j) = 1.0;
    }
    return CorrelationMatrix(std::move(v), CorrelationMatrix::Unchecked{});
}

CorrelationMatrix sample_correlation(const DataMatrix& data, Execution exec) {
    return correlation_from_cov(sample_mean_cov(data, exec).cov);
}

double log_det_psd(const Matrix& a) {
    require_square(a, "log_det_psd");
    const Eigen::Index p = a.rows();
    if (p == 0) return 0.0;
    constexpr double neg_inf = -std::numeric_limits<double>::infinity();

    const double max_diag = a.diagonal().maxCoeff();
    if (max_diag > 0.0) {
        Eigen::LLT<Matrix> llt(a);
        if (llt.info() == Eigen::Success) {
            const auto d = llt.matrixLLT().diagonal();
            const double min_pivot = d.minCoeff();
            if (min_pivot * min_pivot > kCholeskyPivotRatio * max_diag) {
                return 2.0 * d.array().log().sum();
            }
        }
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
    const Vector& lam = es.eigenvalues();
    const double lmax = lam.maxCoeff();
    if (!(lmax > 0.0)) return neg_inf;
    double sum = 0.0;
    for (Eigen::Index i = 0; i < p; ++i) {
        if (lam(i) <= kSingularRatio * lmax) return neg_inf;
        sum += std::log(lam(i));
    }
    return sum;
}

double log_det_psd(const SymmetricMatrix& m) { return log_det_psd(m.values()); }

SymmetricMatrix sqrt_psd(const SymmetricMatrix& m) {
    const Matrix& a = m.values();
    if (a.rows() == 0) return SymmetricMatrix(Matrix(0, 0));
    Eigen::SelfAdjointEigenSolver<Matrix> es(a);
    if (es.info() != Eigen::Success) throw NumericDegeneracyError("eigendecomposition failed");
    Vector lam = es.eigenvalues();
    if (lam.minCoeff() < kSqrtNegativeLimit) {
        throw NotPsdError("matrix is not PSD: smallest eigenvalue " + std::to_string(lam.minCoeff()));
    }
    lam = lam.cwiseMax(0.0).cwiseSqrt();
    const Matrix& q = es.eigenvectors();
    return SymmetricMatrix(q * lam.asDiagonal() * q.transpose());
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionError("hadamard: dimension mismatch");
    }
    return a.cwiseProduct(b);
}

double frobenius_norm_sq(const Matrix& m) { return m.squaredNorm(); }

double trace(const Matrix& m) {
    require_square(m, "trace");
    return m.trace();
}

namespace reference {

MeanCov sample_mean_cov(const DataMatrix& data) {
    const Eigen::Index n = data.n();
    const Eigen::Index p = data.p();
    if (n < 2) {
        throw InsufficientSampleError("need at least 2 observations, got " + std::to_string(n));
    }
    Vector mean = Vector::Zero(p);
    for (Eigen::Index j = 0; j < p; ++j) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) s += data(i, j);
        mean(j) = s / static_cast<double>(n);
    }
    Matrix cov(p, p);
    for (Eigen::Index j = 0; j < p; ++j) {
        for (Eigen::Index k = 0; k <= j; ++k) {
            double s = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) s += (data(i, j) - mean(j)) * (data(i, k) - mean(k));
            cov(j, k) = cov(k, j) = s / static_cast<double>(n - 1);
        }
    }
    return {std::move(mean), SymmetricMatrix(std::move(cov))};
}

}  // namespace reference

}  // namespace mcorr
