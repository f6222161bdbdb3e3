#include "mcorr/coefficient.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mcorr/error.hpp"

namespace mcorr {

namespace {

constexpr double kRouteAgreement = 1e-10;

void require_dimension(Eigen::Index p) {
    if (p < 2) throw DimensionError("need at least 2 variables, got " + std::to_string(p));
}

Matrix drop_index(const Matrix& v, Eigen::Index k) {
    const Eigen::Index p = v.rows();
    std::vector<Eigen::Index> keep(static_cast<std::size_t>(p - 1));
    std::iota(keep.begin(), keep.begin() + k, Eigen::Index{0});
    std::iota(keep.begin() + k, keep.end(), k + 1);
    return v(keep, keep);
}

}  // namespace

PsiValue psi_from_log_det(double log_det, Eigen::Index p) {
    require_dimension(p);
    if (std::isinf(log_det) && log_det < 0) return {1.0, true};
    // 1 - exp(x) via expm1 keeps precision when det V is close to 1.
    const double one_minus = -std::expm1(2.0 * log_det / static_cast<double>(p));
    return {std::sqrt(std::clamp(one_minus, 0.0, 1.0)), false};
}

PsiValue psi_from_correlation(const CorrelationMatrix& v) {
    require_dimension(v.dim());
    return psi_from_log_det(log_det_psd(v), v.dim());
}

PsiValue psi_hat(const DataMatrix& data, Warnings* warnings) {
    require_dimension(data.p());
    if (data.p() >= data.n() && warnings) {
        warnings->push_back("p >= n (" + std::to_string(data.p()) + " >= " + std::to_string(data.n()) +
                            "): the asymptotic theory requires p < n");
    }
    return psi_from_correlation(sample_correlation(data));
}

double classical_rho(const CorrelationMatrix& v, std::size_t dep) {
    const Eigen::Index p = v.dim();
    require_dimension(p);
    if (dep >= static_cast<std::size_t>(p)) {
        throw DimensionError("dependent index " + std::to_string(dep) + " out of range for p = " +
                             std::to_string(p));
    }
    const auto k = static_cast<Eigen::Index>(dep);
    const Matrix& m = v.values();
    const Matrix v22 = drop_index(m, k);
    const double log_det22 = log_det_psd(v22);
    if (std::isinf(log_det22)) {
        throw SingularBlockError("correlation block of the independent variables is singular (dependent " +
                                 std::to_string(dep + 1) + ")");
    }

    Vector v12(p - 1);
    for (Eigen::Index i = 0, r = 0; i < p; ++i) {
        if (i != k) v12(r++) = m(i, k);
    }
    // sigma_11 = 1 for a correlation matrix.
    const Eigen::LDLT<Matrix> ldlt(v22);
    const double quad = v12.dot(ldlt.solve(v12));

    const double log_det = log_det_psd(m);
    const double ratio = std::isinf(log_det) ? 0.0 : std::exp(log_det - log_det22);
    const double rho_sq = std::clamp(1.0 - ratio, 0.0, 1.0);

    if (std::abs(std::clamp(quad, 0.0, 1.0) - rho_sq) > kRouteAgreement) {
        throw NumericDegeneracyError("quadratic-form and determinant-ratio routes disagree: " +
                                     std::to_string(quad) + " vs " + std::to_string(rho_sq));
    }
    return std::sqrt(rho_sq);
}

double classical_rho(const DataMatrix& data, std::size_t dep) {
    return classical_rho(sample_correlation(data), dep);
}

double rho_aggregate(const CorrelationMatrix& v, RhoAggregate mode) {
    const auto p = static_cast<std::size_t>(v.dim());
    require_dimension(v.dim());
    double sum = 0.0;
    double max = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
        const double rho = classical_rho(v, j);
        sum += rho;
        max = std::max(max, rho);
    }
    return mode == RhoAggregate::Average ? sum / static_cast<double>(p) : max;
}

double rho_aggregate(const DataMatrix& data, RhoAggregate mode) {
    return rho_aggregate(sample_correlation(data), mode);
}

double psi_star(const CorrelationMatrix& v) {
    require_dimension(v.dim());
    const double log_det = log_det_psd(v);
    if (std::isinf(log_det)) return 1.0;
    return std::sqrt(std::clamp(-std::expm1(log_det), 0.0, 1.0));
}

}  // namespace mcorr
