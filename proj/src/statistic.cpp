#include "mcorr/statistic.hpp"

#include <cmath>

#include "mcorr/asymptotics.hpp"
#include "mcorr/coefficient.hpp"
#include "mcorr/error.hpp"

namespace mcorr {

double CorrelationLogDet::operator()(const Matrix& x) {
    const Eigen::Index p = x.cols();
    centered_ = x.rowwise() - x.colwise().mean();
    gram_.setZero(p, p);
    gram_.selfadjointView<Eigen::Lower>().rankUpdate(centered_.transpose());
    for (Eigen::Index j = 0; j < p; ++j) {
        if (!(gram_(j, j) > 0.0)) {
            throw DegenerateVariableError(static_cast<std::size_t>(j),
                                          "variable " + std::to_string(j + 1) + " has zero variance");
        }
    }
    const Vector inv_sd = gram_.diagonal().cwiseSqrt().cwiseInverse();
    for (Eigen::Index j = 0; j < p; ++j) {
        for (Eigen::Index i = j + 1; i < p; ++i) {
            const double r = gram_(i, j) * inv_sd(i) * inv_sd(j);
            gram_(i, j) = r;
            gram_(j, i) = r;
        }
        gram_(j, j) = 1.0;
    }
    return of_correlation(gram_);
}

double CorrelationLogDet::of_correlation(const Matrix& corr) {
    llt_.compute(corr);
    if (llt_.info() == Eigen::Success) {
        const auto d = llt_.matrixLLT().diagonal();
        const double min_pivot = d.minCoeff();
        // Same acceptance rule as log_det_psd (max diagonal is 1 here).
        if (min_pivot * min_pivot > 1e-8) return 2.0 * d.array().log().sum();
    }
    return log_det_psd(corr);
}

double z_of(const Matrix& x) {
    thread_local CorrelationLogDet workspace;
    return z_from_log_det(workspace(x), static_cast<std::size_t>(x.rows()), static_cast<std::size_t>(x.cols()));
}

namespace reference {

double z_of(const DataMatrix& data) {
    const PsiValue psi = psi_hat(data);
    return z_statistic(psi.value, static_cast<std::size_t>(data.n()), static_cast<std::size_t>(data.p()));
}

}  // namespace reference

}  // namespace mcorr
