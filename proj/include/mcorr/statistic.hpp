#pragma once

#include <cstddef>

#include "mcorr/linalg.hpp"

namespace mcorr {

/// Reusable workspace evaluating log det of a sample correlation matrix.
/// Resampling loops call this millions of times, so buffers are kept
/// between calls. Not thread-safe; use one instance per thread.
class CorrelationLogDet {
public:
    /// log det of the sample correlation of the rows of x. Throws
    /// DegenerateVariableError if a column is constant.
    double operator()(const Matrix& x);

    /// log det of a correlation matrix given in full (both triangles).
    double of_correlation(const Matrix& corr);

private:
    Matrix centered_;
    Matrix gram_;
    Eigen::LLT<Matrix> llt_;
};

/// Null-calibrated z statistic of x, using a thread-local workspace.
double z_of(const Matrix& x);

namespace reference {

/// z through psi_hat and z_statistic, no shared workspace.
double z_of(const DataMatrix& data);

}  // namespace reference

}  // namespace mcorr
