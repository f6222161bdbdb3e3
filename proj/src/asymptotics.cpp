#include "mcorr/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/special_functions/erf.hpp>

#include "mcorr/error.hpp"

namespace mcorr {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;

// log(1 - x) + x for x in [0, 1). The series branch avoids the cancellation
// that log1p(-x) + x suffers when p/n is small.
double log1m_plus_x(double x) {
    if (x < 0.05) {
        double term = x * x;
        double sum = 0.0;
        for (int k = 2; k < 200; ++k) {
            const double add = term / k;
            sum += add;
            if (add < 1e-18 * sum) break;
            term *= x;
        }
        return -sum;
    }
    return std::log1p(-x) + x;
}

void require_regime(double n, double p, const char* what) {
    if (!(p >= 2.0) || !(p < n)) {
        throw DomainError(std::string(what) + " requires 2 <= p < n (got n = " + std::to_string(n) +
                          ", p = " + std::to_string(p) + ")");
    }
}

double kappa_from(const DataMatrix& data, const Matrix& cov, KappaOptions options) {
    const Eigen::Index n = data.n();
    if (n < 3) throw InsufficientSampleError("kappa estimation needs n >= 3");
    const double nd = static_cast<double>(n);

    Matrix x = data.values();
    if (!options.assume_zero_mean) x.rowwise() -= x.colwise().mean();

    const Vector row_sq = x.rowwise().squaredNorm();
    const double nu = (row_sq.array() - row_sq.mean()).square().sum() / (nd - 1.0);

    const double tr = cov.trace();
    const double varsigma = cov.squaredNorm() - tr * tr / nd;

    const double omega = (x.colwise().squaredNorm().array() / nd).square().sum();
    if (!(omega > 0.0)) throw NumericDegeneracyError("kappa estimation: omega is zero");

    return std::max(3.0 + (nu - 2.0 * varsigma) / omega, 1.0);
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double normal_two_sided_tail(double z) { return std::erfc(std::abs(z) / kSqrt2); }

double normal_upper_quantile(double upper) {
    if (!(upper > 0.0 && upper < 1.0)) {
        throw InvalidParameterError("normal quantile needs a probability in (0, 1)");
    }
    return kSqrt2 * boost::math::erfc_inv(2.0 * upper);
}

double estimate_tau(const CorrelationMatrix& v_hat, std::size_t n) {
    const SymmetricMatrix root = sqrt_psd(v_hat);
    const Matrix h = hadamard(root.values(), root.values());
    const double tr = trace(h);
    // h is symmetric, so tr(h^2) is its squared Frobenius norm.
    return frobenius_norm_sq(h) - tr * tr / static_cast<double>(n);
}

double estimate_eta(const CorrelationMatrix& v_hat, std::size_t n) {
    const Matrix d = v_hat.values() - Matrix::Identity(v_hat.dim(), v_hat.dim());
    const double tr = trace(d);
    return std::max(frobenius_norm_sq(d) - tr * tr / static_cast<double>(n), 0.0);
}

double estimate_kappa(const DataMatrix& data, KappaOptions options) {
    return kappa_from(data, sample_mean_cov(data).cov.values(), options);
}

double delta_nu(double n, double p, double kappa, double tau) {
    require_regime(n, p, "delta_nu");
    const double x = p / n;
    // 2[1 - n/p + 3/(2p)] log(1 - x) - 2 rewritten as
    // 2(1 + 3/(2p)) log(1 - x) - (2/x)(log(1 - x) + x).
    return 2.0 * (1.0 + 1.5 / p) * std::log1p(-x) - (2.0 / x) * log1m_plus_x(x) + 2.0 / n +
           (kappa - 3.0) * (tau / p - 1.0) / n;
}

double sigma_nu(double n, double p, double eta) {
    require_regime(n, p, "sigma_nu");
    if (eta < 0.0) throw DomainError("sigma_nu requires eta >= 0");
    const double x = p / n;
    const double var = -8.0 / (p * p) * log1m_plus_x(x) + 8.0 * eta / (n * p * p);
    if (!(var > 0.0)) throw NumericDegeneracyError("sigma_nu: variance is not positive");
    return std::sqrt(var);
}

double bias_corrected_psi(double psi_hat, double delta_hat, bool* clamped) {
    const double bracket = 1.0 - (1.0 - psi_hat * psi_hat) * std::exp(-delta_hat);
    const double c = std::clamp(bracket, 0.0, 1.0);
    if (clamped) *clamped = (c != bracket);
    return std::sqrt(c);
}

ConfidenceInterval asymptotic_ci(double psi_bc, double sigma_hat, double level) {
    if (!(level > 0.0 && level < 1.0)) throw InvalidParameterError("level must lie in (0, 1)");
    if (!(sigma_hat >= 0.0)) throw InvalidParameterError("sigma_hat must be nonnegative");
    const double z = normal_upper_quantile((1.0 - level) / 2.0);
    const double rest = 1.0 - psi_bc * psi_bc;
    const double lo_bracket = 1.0 - rest * std::exp(z * sigma_hat);
    const double hi_bracket = 1.0 - rest * std::exp(-z * sigma_hat);
    ConfidenceInterval ci;
    ci.level = level;
    ci.clamped = lo_bracket < 0.0 || hi_bracket > 1.0;
    ci.lower = std::min(std::sqrt(std::clamp(lo_bracket, 0.0, 1.0)), psi_bc);
    ci.upper = std::max(std::sqrt(std::clamp(hi_bracket, 0.0, 1.0)), psi_bc);
    return ci;
}

double z_statistic(double psi_hat, std::size_t n, std::size_t p) {
    const double nd = static_cast<double>(n), pd = static_cast<double>(p);
    require_regime(nd, pd, "z_statistic");
    if (psi_hat >= 1.0) return -std::numeric_limits<double>::infinity();
    const double log_term = std::log1p(-psi_hat * psi_hat);
    return (log_term - delta_nu(nd, pd, 3.0, pd)) / sigma_nu(nd, pd, 0.0);
}

double z_from_log_det(double log_det, std::size_t n, std::size_t p) {
    const double nd = static_cast<double>(n), pd = static_cast<double>(p);
    require_regime(nd, pd, "z_from_log_det");
    if (std::isinf(log_det) && log_det < 0) return -std::numeric_limits<double>::infinity();
    return (2.0 * log_det / pd - delta_nu(nd, pd, 3.0, pd)) / sigma_nu(nd, pd, 0.0);
}

TestResult z_test_pvalue(double z) {
    if (std::isnan(z)) throw NumericDegeneracyError("test statistic is NaN");
    if (std::isinf(z)) return {z, 0.0, true};
    return {z, normal_two_sided_tail(z), false};
}

PsiEstimate full_estimate(const DataMatrix& data, const EstimateOptions& options) {
    const auto n = static_cast<std::size_t>(data.n());
    const auto p = static_cast<std::size_t>(data.p());
    if (p < 2) throw DimensionError("need at least 2 variables");
    if (p >= n) {
        throw DimensionError("asymptotic inference needs p < n (got n = " + std::to_string(n) +
                             ", p = " + std::to_string(p) + ")");
    }
    const MeanCov mc = sample_mean_cov(data, options.exec);
    const CorrelationMatrix v_hat = correlation_from_cov(mc.cov);
    const PsiValue psi = psi_from_correlation(v_hat);

    PsiEstimate est;
    est.n = n;
    est.p = p;
    est.psi_hat = psi.value;
    est.singular = psi.singular;
    est.kappa_hat = kappa_from(data, mc.cov.values(), options.kappa);
    est.tau_hat = estimate_tau(v_hat, n);
    est.eta_hat = estimate_eta(v_hat, n);
    const double nd = static_cast<double>(n), pd = static_cast<double>(p);
    est.delta_hat = delta_nu(nd, pd, est.kappa_hat, est.tau_hat);
    est.sigma_hat = sigma_nu(nd, pd, est.eta_hat);
    est.psi_bc = bias_corrected_psi(est.psi_hat, est.delta_hat, &est.clamped);
    if (est.singular) {
        est.warnings.push_back("sample correlation matrix is numerically singular; psi_hat set to 1");
    }
    if (est.clamped) {
        est.warnings.push_back("bias-correction bracket clamped into [0, 1]");
    }
    return est;
}

}  // namespace mcorr
