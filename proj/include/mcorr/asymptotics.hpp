#pragma once

// Plug-in inference for psi: estimation of kappa, tau and eta, the centering
// delta_nu and scale sigma_nu of log(1 - psi_hat^2), the bias-corrected
// estimator, the asymptotic confidence interval and the independence z-test.

#include <cstddef>

#include "mcorr/coefficient.hpp"
#include "mcorr/linalg.hpp"

namespace mcorr {

inline constexpr double kDefaultLevel = 0.95;

/// Standard normal CDF and the two-sided tail 2[1 - Phi(|z|)], both via erfc.
double normal_cdf(double x);
double normal_two_sided_tail(double z);
/// Upper-tail quantile: returns z with 1 - Phi(z) = upper.
double normal_upper_quantile(double upper);

struct PsiEstimate {
    double psi_hat = 0.0;
    double psi_bc = 0.0;
    double kappa_hat = 3.0;
    double tau_hat = 0.0;
    double eta_hat = 0.0;
    double delta_hat = 0.0;
    double sigma_hat = 0.0;
    std::size_t n = 0;
    std::size_t p = 0;
    /// psi_hat hit the singular sentinel (set to exactly 1).
    bool singular = false;
    /// The bias-correction bracket had to be clamped into [0, 1].
    bool clamped = false;
    Warnings warnings;
};

struct ConfidenceInterval {
    double lower = 0.0;
    double upper = 1.0;
    double level = kDefaultLevel;
    bool clamped = false;

    bool contains(double psi) const { return lower <= psi && psi <= upper; }
    double length() const { return upper - lower; }
};

struct TestResult {
    double z = 0.0;
    double p_value = 1.0;
    /// z is the -infinity sentinel (psi_hat == 1); p_value is reported as 0.
    bool sentinel = false;
};

double estimate_tau(const CorrelationMatrix& v_hat, std::size_t n);
double estimate_eta(const CorrelationMatrix& v_hat, std::size_t n);

struct KappaOptions {
    /// Use raw x_ij^2 (data asserted to have zero mean) instead of centering
    /// each column by its sample mean.
    bool assume_zero_mean = false;
};

/// max(3 + (nu - 2 varsigma) / omega, 1) from the sample moments.
double estimate_kappa(const DataMatrix& data, KappaOptions options = {});

/// Asymptotic bias of log(1 - psi_hat^2). Requires 2 <= p < n.
double delta_nu(double n, double p, double kappa, double tau);

/// Asymptotic standard deviation of log(1 - psi_hat^2). Requires 2 <= p < n.
double sigma_nu(double n, double p, double eta);

/// [1 - (1 - psi^2) exp(-delta)]^{1/2} with the bracket clamped to [0, 1].
double bias_corrected_psi(double psi_hat, double delta_hat, bool* clamped = nullptr);

ConfidenceInterval asymptotic_ci(double psi_bc, double sigma_hat, double level = kDefaultLevel);

/// Null-calibrated statistic: [log(1 - psi^2) - delta_nu(n, p, 3, p)] / sigma_nu(n, p, 0).
/// psi_hat == 1 yields -infinity.
double z_statistic(double psi_hat, std::size_t n, std::size_t p);

/// Same statistic computed from log det(V_hat) directly, which avoids the
/// round trip through psi (log(1 - psi^2) = (2/p) log det V_hat).
double z_from_log_det(double log_det, std::size_t n, std::size_t p);

TestResult z_test_pvalue(double z);

struct EstimateOptions {
    KappaOptions kappa;
    Execution exec = Execution::Parallel;
};

/// psi_hat, plug-in kappa/tau/eta, delta_hat, sigma_hat and psi_bc in one record.
PsiEstimate full_estimate(const DataMatrix& data, const EstimateOptions& options = {});

}  // namespace mcorr
