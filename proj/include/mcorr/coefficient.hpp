#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mcorr/linalg.hpp"

namespace mcorr {

using Warnings = std::vector<std::string>;

/// psi in [0, 1]. `singular` marks the log-det sentinel case where the
/// correlation matrix is numerically singular and psi is set to exactly 1.
struct PsiValue {
    double value = 0.0;
    bool singular = false;
};

/// sqrt(1 - det(V)^{2/p}), evaluated as sqrt(1 - exp((2/p) log det V)).
PsiValue psi_from_correlation(const CorrelationMatrix& v);

/// psi of the sample correlation matrix. Appends a warning when p >= n.
PsiValue psi_hat(const DataMatrix& data, Warnings* warnings = nullptr);

/// Same as psi_from_correlation but from an already computed log-determinant.
PsiValue psi_from_log_det(double log_det, Eigen::Index p);

/// Classical multiple correlation with variable `dep` (0-based) as the
/// dependent variable. Both the quadratic form and the determinant ratio are
/// evaluated; they must agree to 1e-10 (on rho^2) and the ratio is returned.
double classical_rho(const CorrelationMatrix& v, std::size_t dep);
double classical_rho(const DataMatrix& data, std::size_t dep);

enum class RhoAggregate { Average, Max };

/// Average or maximum of the p classical coefficients, each from its own
/// determinant ratio.
double rho_aggregate(const CorrelationMatrix& v, RhoAggregate mode);
double rho_aggregate(const DataMatrix& data, RhoAggregate mode);

/// sqrt(1 - det V).
double psi_star(const CorrelationMatrix& v);

}  // namespace mcorr
