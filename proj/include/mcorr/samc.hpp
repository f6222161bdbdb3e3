#pragma once

// Stochastic approximation Monte Carlo evaluation of the permutation p-value
// of the independence z-test. The chain moves by partial within-column
// permutations: each step re-permutes round(n*varpi) entries in each of
// round(p*varpi) randomly chosen columns.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "mcorr/linalg.hpp"
#include "mcorr/parallel.hpp"
#include "mcorr/rng.hpp"

namespace mcorr {

struct SamcConfig {
    std::size_t m = 300;          // number of subregions
    double t0 = 1000.0;           // gain schedule gamma_t = min(1, t0 / t)
    std::size_t T = 1'000'000;    // iterations
    double varpi = 0.2;           // proportion of rows and columns updated
    std::uint64_t seed = 0;
    /// Maintain the correlation matrix by recomputing only the touched
    /// rows/columns instead of re-deriving it from the data each step.
    bool incremental = false;
};

/// E_1..E_{m-1} split [0, |Z_1|) into equal half-open intervals and
/// E_m = [|Z_1|, inf). Regions are 0-based here; index m-1 is the tail.
class RegionPartition {
public:
    RegionPartition(double z1_abs, std::size_t m);

    std::size_t region_of(double z_abs) const;
    std::size_t size() const noexcept { return cuts_.size() + 1; }
    double z1_abs() const noexcept { return z1_abs_; }
    /// Interior cut points k|Z_1|/(m-1), k = 1..m-2, followed by |Z_1|.
    const std::vector<double>& cuts() const noexcept { return cuts_; }

private:
    double z1_abs_;
    std::vector<double> cuts_;
};

RegionPartition build_regions(double z1_abs, std::size_t m);

struct ProposalSizes {
    std::size_t columns = 1;  // p*, at least 1
    std::size_t rows = 2;     // n*, at least 2
};

ProposalSizes proposal_sizes(std::size_t n, std::size_t p, double varpi);

/// Undo log of one in-place proposal.
struct ProposalRecord {
    std::vector<Eigen::Index> columns;
    std::vector<Eigen::Index> rows;  // columns.size() blocks of n* row indices
    std::vector<double> old_values;  // matching the rows layout
    std::size_t rows_per_column = 0;
};

void propose_update_in_place(Matrix& x, double varpi, Rng& rng, ProposalRecord& record);
void undo_proposal(Matrix& x, const ProposalRecord& record);

DataMatrix propose_update(const DataMatrix& x, double varpi, Rng& rng);

struct SamcResult {
    double p_value = 1.0;
    double z_observed = 0.0;
    std::vector<double> theta;
    std::vector<std::size_t> visit_counts;
    std::size_t empty_regions = 0;
    double acceptance_rate = 0.0;
    std::size_t iterations = 0;
};

/// Final p-value from the log-weights and per-region occupancy:
/// exp(theta_m)(1/m + Delta) / sum_{nonempty i} exp(theta_i)(1/m + Delta),
/// Delta = m0 / (m (m - m0)).
double samc_pvalue_from_theta(std::span<const double> theta, std::span<const std::size_t> visits);

/// Called after every iteration t = 1..T with the chain state x_{t+1} and theta_{t+1}.
using SamcObserver = std::function<void(std::size_t t, const Matrix& state, std::span<const double> theta)>;

SamcResult samc_pvalue(const DataMatrix& data, const SamcConfig& config, const SamcObserver& observer = {});

struct SamcChains {
    std::vector<SamcResult> chains;
    std::vector<std::uint64_t> seeds;
    double median_p_value = 1.0;
};

/// Independent chains; chain c runs with seed stream_seed(config.seed, c).
SamcChains samc_chains(const DataMatrix& data, const SamcConfig& config, std::size_t chains,
                       Execution exec = Execution::Parallel);

}  // namespace mcorr
