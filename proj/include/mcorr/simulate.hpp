#pragma once

// Coverage study harness: draw ICM samples at a design point, estimate,
// build the asymptotic interval and tally coverage and length.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "mcorr/asymptotics.hpp"
#include "mcorr/datagen.hpp"
#include "mcorr/parallel.hpp"

namespace mcorr {

struct CoverageDesign {
    CovarianceCase kind = CovarianceCase::Autoregressive;
    double psi = 0.6;
    /// Exactly one of p (fixed dimension) or q (p = round(q n)) is set.
    std::optional<std::size_t> p;
    std::optional<double> q;
    std::size_t n = 500;
    ComponentDistribution dist = ComponentDistribution::StandardNormal;
    std::size_t reps = 1000;
    double level = kDefaultLevel;
    std::uint64_t seed = 0;
};

std::size_t resolved_p(const CoverageDesign& design);

struct Replicate {
    double psi_hat = 0.0;
    double psi_bc = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    bool covered = false;
};

struct CoverageReport {
    std::size_t p = 0;
    double phi = 0.0;
    double psi_true = 0.0;
    double coverage_pct = 0.0;
    double avg_length = 0.0;
    /// Binomial standard error of coverage_pct, in percentage points.
    double mc_stderr = 0.0;
    double mean_psi_hat = 0.0;
    double mean_psi_bc = 0.0;
    double mae_psi_hat = 0.0;
    double mae_psi_bc = 0.0;
    double runtime_seconds = 0.0;
    Warnings warnings;
    std::vector<Replicate> replicates;
};

/// Replicate r uses RNG stream r of design.seed, so the report does not
/// depend on the execution policy or thread count.
CoverageReport run_coverage(const CoverageDesign& design, Execution exec = Execution::Parallel);

/// Z statistics of `reps` samples drawn with Sigma = I.
std::vector<double> null_z_draws(std::size_t n, std::size_t p, ComponentDistribution dist, std::size_t reps,
                                 std::uint64_t seed, Execution exec = Execution::Parallel);

}  // namespace mcorr
