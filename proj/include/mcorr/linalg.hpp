#pragma once

// Dense symmetric-matrix primitives used by the coefficient and its
// inference: sample covariance/correlation, PSD log-determinant, symmetric
// square root and a few Hadamard/trace helpers.

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "mcorr/parallel.hpp"

namespace mcorr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// n x p sample, rows are observations. Entries must be finite; variance
/// checks happen where a correlation is formed so that the offending column
/// can be named.
class DataMatrix {
public:
    explicit DataMatrix(Matrix values, std::vector<std::string> names = {});

    Eigen::Index n() const noexcept { return values_.rows(); }
    Eigen::Index p() const noexcept { return values_.cols(); }
    const Matrix& values() const noexcept { return values_; }
    const std::vector<std::string>& names() const noexcept { return names_; }
    double operator()(Eigen::Index i, Eigen::Index j) const { return values_(i, j); }

private:
    Matrix values_;
    std::vector<std::string> names_;
};

/// Square matrix symmetrized on construction as (A + A^T) / 2.
class SymmetricMatrix {
public:
    explicit SymmetricMatrix(Matrix values);

    Eigen::Index dim() const noexcept { return values_.rows(); }
    const Matrix& values() const noexcept { return values_; }
    double operator()(Eigen::Index i, Eigen::Index j) const { return values_(i, j); }

protected:
    struct Trusted {};
    SymmetricMatrix(Matrix values, Trusted) : values_(std::move(values)) {}

    Matrix values_;
};

/// Symmetric, unit diagonal, entries in [-1, 1], numerically PSD
/// (eigenvalues >= -1e-10). The public constructor validates all of this.
class CorrelationMatrix : public SymmetricMatrix {
public:
    explicit CorrelationMatrix(Matrix values);

    static CorrelationMatrix identity(Eigen::Index p);

private:
    struct Unchecked {};
    CorrelationMatrix(Matrix values, Unchecked);

    friend CorrelationMatrix correlation_from_cov(const SymmetricMatrix& cov);
};

struct MeanCov {
    Vector mean;
    SymmetricMatrix cov;
};

/// Sample mean and covariance with the 1/(n-1) divisor. The cross-product is
/// evaluated block-wise; Serial and Parallel give bit-identical results.
MeanCov sample_mean_cov(const DataMatrix& data, Execution exec = Execution::Parallel);

/// diag(cov)^{-1/2} cov diag(cov)^{-1/2}. Throws DegenerateVariableError on a
/// nonpositive diagonal entry.
CorrelationMatrix correlation_from_cov(const SymmetricMatrix& cov);

CorrelationMatrix sample_correlation(const DataMatrix& data, Execution exec = Execution::Parallel);

/// Sum of log eigenvalues, evaluated in log space. Returns -infinity when any
/// eigenvalue is <= 1e-12 * lambda_max.
double log_det_psd(const SymmetricMatrix& m);
double log_det_psd(const Matrix& m);

/// Symmetric PSD square root by eigendecomposition. Eigenvalues in
/// [-1e-6, 0) are clamped to zero; anything more negative throws NotPsdError.
SymmetricMatrix sqrt_psd(const SymmetricMatrix& m);

Matrix hadamard(const Matrix& a, const Matrix& b);
double frobenius_norm_sq(const Matrix& m);
double trace(const Matrix& m);

namespace reference {

/// Naive two-pass triple loop; kept as the oracle for the blocked kernel.
MeanCov sample_mean_cov(const DataMatrix& data);

}  // namespace reference

}  // namespace mcorr
