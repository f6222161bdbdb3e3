#pragma once

// Permutation / bootstrap inference. The null test resamples every column
// independently (breaking cross-column dependence, keeping marginals); the
// confidence interval resamples whole rows (keeping dependence).

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mcorr/asymptotics.hpp"
#include "mcorr/linalg.hpp"
#include "mcorr/parallel.hpp"

namespace mcorr {

enum class ResampleMethod { PermutationNoReplacement, BootstrapWithReplacement };

struct ResamplePlan {
    ResampleMethod method = ResampleMethod::PermutationNoReplacement;
    std::size_t replications = 1000;  // B >= 100
    std::uint64_t seed = 0;
};

struct NullResampleResult {
    double z_observed = 0.0;
    double p_value = 1.0;
    std::size_t exceedances = 0;
    std::size_t replications = 0;
};

/// |Z_b| for b = 1..B; entry b uses RNG stream b of plan.seed.
std::vector<double> null_statistics(const DataMatrix& data, const ResamplePlan& plan,
                                    Execution exec = Execution::Parallel);

/// (1 + #{null_abs >= z_abs}) / (B + 1).
double add_one_pvalue(double z_abs, const std::vector<double>& null_abs);

NullResampleResult null_resample_test(const DataMatrix& data, const ResamplePlan& plan,
                                      Execution exec = Execution::Parallel);

double null_resample_pvalue(const DataMatrix& data, const ResamplePlan& plan,
                            Execution exec = Execution::Parallel);

/// log(1 - psi_b^2) - delta_hat_b over B row-bootstrap resamples. A resample
/// with a constant column is redrawn (at most 10 times).
std::vector<double> bootstrap_log_scale(const DataMatrix& data, std::size_t replications, std::uint64_t seed,
                                        Execution exec = Execution::Parallel);

/// Percentile interval on the log(1 - psi^2) scale mapped back to psi.
ConfidenceInterval bootstrap_ci(const DataMatrix& data, std::size_t replications, double level,
                                std::uint64_t seed, Execution exec = Execution::Parallel);

/// Linear-interpolation sample quantile (R type 7) of sorted values.
double sorted_quantile(const std::vector<double>& sorted, double prob);

}  // namespace mcorr
