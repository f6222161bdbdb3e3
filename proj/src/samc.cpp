#include "mcorr/samc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "mcorr/asymptotics.hpp"
#include "mcorr/error.hpp"
#include "mcorr/statistic.hpp"

namespace mcorr {

namespace {

// Column-standardized copy of the chain state whose Gram matrix is the sample
// correlation. A within-column permutation leaves each column's mean and norm
// unchanged, so only the touched rows/columns of the Gram matrix move.
class IncrementalCorrelation {
public:
    explicit IncrementalCorrelation(const Matrix& x) {
        const Eigen::Index p = x.cols();
        mean_ = x.colwise().mean().transpose();
        scale_.resize(p);
        standardized_ = x.rowwise() - mean_.transpose();
        for (Eigen::Index j = 0; j < p; ++j) {
            const double norm = standardized_.col(j).norm();
            if (!(norm > 0.0)) {
                throw DegenerateVariableError(static_cast<std::size_t>(j),
                                              "variable " + std::to_string(j + 1) + " has zero variance");
            }
            scale_(j) = 1.0 / norm;
            standardized_.col(j) *= scale_(j);
        }
        corr_ = standardized_.transpose() * standardized_;
        corr_.diagonal().setOnes();
    }

    void apply(const Matrix& x, const ProposalRecord& record) {
        const std::size_t k = record.rows_per_column;
        saved_.resize(corr_.rows(), static_cast<Eigen::Index>(record.columns.size()));
        for (std::size_t c = 0; c < record.columns.size(); ++c) {
            const Eigen::Index col = record.columns[c];
            saved_.col(static_cast<Eigen::Index>(c)) = corr_.col(col);
            for (std::size_t r = 0; r < k; ++r) {
                const Eigen::Index row = record.rows[c * k + r];
                standardized_(row, col) = (x(row, col) - mean_(col)) * scale_(col);
            }
        }
        for (const Eigen::Index col : record.columns) {
            column_ = standardized_.transpose() * standardized_.col(col);
            column_(col) = 1.0;
            corr_.col(col) = column_;
            corr_.row(col) = column_.transpose();
        }
    }

    void undo(const Matrix& x, const ProposalRecord& record) {
        const std::size_t k = record.rows_per_column;
        for (std::size_t c = 0; c < record.columns.size(); ++c) {
            const Eigen::Index col = record.columns[c];
            for (std::size_t r = 0; r < k; ++r) {
                const Eigen::Index row = record.rows[c * k + r];
                standardized_(row, col) = (x(row, col) - mean_(col)) * scale_(col);
            }
            corr_.col(col) = saved_.col(static_cast<Eigen::Index>(c));
            corr_.row(col) = saved_.col(static_cast<Eigen::Index>(c)).transpose();
        }
    }

    const Matrix& correlation() const { return corr_; }

private:
    Vector mean_;
    Vector scale_;
    Matrix standardized_;
    Matrix corr_;
    Matrix saved_;
    Vector column_;
};

void validate(const DataMatrix& data, const SamcConfig& config) {
    if (config.m < 2) throw InvalidParameterError("SAMC needs m >= 2 subregions");
    if (!(config.varpi > 0.0 && config.varpi <= 1.0)) throw InvalidParameterError("varpi must lie in (0, 1]");
    if (!(config.t0 > 0.0)) throw InvalidParameterError("t0 must be positive");
    if (static_cast<double>(config.T) < config.t0) throw InvalidParameterError("SAMC needs T >= t0");
    if (data.p() < 2 || data.p() >= data.n()) throw DimensionError("SAMC needs 2 <= p < n");
}

}  // namespace

RegionPartition::RegionPartition(double z1_abs, std::size_t m) : z1_abs_(z1_abs) {
    if (m < 2) throw InvalidParameterError("need m >= 2 subregions");
    if (!(z1_abs > 0.0) || !std::isfinite(z1_abs)) {
        throw NumericDegeneracyError("observed |Z| must be positive and finite to build SAMC regions (got " +
                                     std::to_string(z1_abs) + ")");
    }
    cuts_.reserve(m - 1);
    const double width = z1_abs / static_cast<double>(m - 1);
    for (std::size_t k = 1; k + 1 < m; ++k) cuts_.push_back(static_cast<double>(k) * width);
    cuts_.push_back(z1_abs);
}

std::size_t RegionPartition::region_of(double z_abs) const {
    // Number of cut points <= z: half-open intervals [lo, hi).
    return static_cast<std::size_t>(std::upper_bound(cuts_.begin(), cuts_.end(), z_abs) - cuts_.begin());
}

RegionPartition build_regions(double z1_abs, std::size_t m) { return RegionPartition(z1_abs, m); }

ProposalSizes proposal_sizes(std::size_t n, std::size_t p, double varpi) {
    if (!(varpi > 0.0 && varpi <= 1.0)) throw InvalidParameterError("varpi must lie in (0, 1]");
    ProposalSizes s;
    s.columns = std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(static_cast<double>(p) * varpi)),
                                        1, p);
    s.rows = std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(static_cast<double>(n) * varpi)),
                                     std::min<std::size_t>(2, n), n);
    return s;
}

void propose_update_in_place(Matrix& x, double varpi, Rng& rng, ProposalRecord& record) {
    const auto n = static_cast<std::size_t>(x.rows());
    const auto p = static_cast<std::size_t>(x.cols());
    const ProposalSizes sizes = proposal_sizes(n, p, varpi);

    std::vector<Eigen::Index> all_cols(p);
    std::iota(all_cols.begin(), all_cols.end(), Eigen::Index{0});
    std::vector<Eigen::Index> all_rows(n);
    std::iota(all_rows.begin(), all_rows.end(), Eigen::Index{0});

    record.columns.clear();
    record.rows.clear();
    record.old_values.clear();
    record.rows_per_column = sizes.rows;
    std::sample(all_cols.begin(), all_cols.end(), std::back_inserter(record.columns), sizes.columns, rng);

    std::vector<Eigen::Index> picked;
    std::vector<double> values;
    for (const Eigen::Index col : record.columns) {
        picked.clear();
        std::sample(all_rows.begin(), all_rows.end(), std::back_inserter(picked), sizes.rows, rng);
        values.clear();
        for (const Eigen::Index row : picked) values.push_back(x(row, col));
        record.rows.insert(record.rows.end(), picked.begin(), picked.end());
        record.old_values.insert(record.old_values.end(), values.begin(), values.end());
        std::shuffle(values.begin(), values.end(), rng);
        for (std::size_t r = 0; r < picked.size(); ++r) x(picked[r], col) = values[r];
    }
}

void undo_proposal(Matrix& x, const ProposalRecord& record) {
    const std::size_t k = record.rows_per_column;
    for (std::size_t c = 0; c < record.columns.size(); ++c) {
        for (std::size_t r = 0; r < k; ++r) {
            x(record.rows[c * k + r], record.columns[c]) = record.old_values[c * k + r];
        }
    }
}

DataMatrix propose_update(const DataMatrix& x, double varpi, Rng& rng) {
    Matrix values = x.values();
    ProposalRecord record;
    propose_update_in_place(values, varpi, rng, record);
    return DataMatrix(std::move(values), x.names());
}

double samc_pvalue_from_theta(std::span<const double> theta, std::span<const std::size_t> visits) {
    const std::size_t m = theta.size();
    if (m < 2 || visits.size() != m) throw InvalidParameterError("theta and visits must have m >= 2 entries");
    const auto m0 = static_cast<std::size_t>(std::count(visits.begin(), visits.end(), std::size_t{0}));
    if (m0 == m || visits[m - 1] == 0) {
        throw NumericDegeneracyError("SAMC invariant violated: the tail region was never occupied");
    }
    const double md = static_cast<double>(m);
    const double delta = static_cast<double>(m0) / (md * (md - static_cast<double>(m0)));
    double shift = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
        if (visits[i] > 0) shift = std::max(shift, theta[i]);
    }
    double denom = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        if (visits[i] > 0) denom += std::exp(theta[i] - shift) * (1.0 / md + delta);
    }
    const double numer = std::exp(theta[m - 1] - shift) * (1.0 / md + delta);
    return numer / denom;
}

SamcResult samc_pvalue(const DataMatrix& data, const SamcConfig& config, const SamcObserver& observer) {
    validate(data, config);
    const auto n = static_cast<std::size_t>(data.n());
    const auto p = static_cast<std::size_t>(data.p());
    const std::size_t m = config.m;

    Matrix x = data.values();
    CorrelationLogDet workspace;
    std::optional<IncrementalCorrelation> tracker;
    if (config.incremental) tracker.emplace(x);
    auto current_z = [&] {
        const double ld = tracker ? workspace.of_correlation(tracker->correlation()) : workspace(x);
        return z_from_log_det(ld, n, p);
    };

    SamcResult result;
    result.z_observed = current_z();
    const RegionPartition regions(std::abs(result.z_observed), m);

    std::vector<double> theta(m, 0.0);
    std::vector<std::size_t> visits(m, 0);
    std::size_t region = regions.region_of(std::abs(result.z_observed));
    visits[region] = 1;

    Rng rng(config.seed);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    ProposalRecord record;
    std::size_t accepted = 0;
    const double inv_m = 1.0 / static_cast<double>(m);

    for (std::size_t t = 1; t <= config.T; ++t) {
        propose_update_in_place(x, config.varpi, rng, record);
        if (tracker) tracker->apply(x, record);
        const std::size_t proposed = regions.region_of(std::abs(current_z()));

        const double log_r = theta[region] - theta[proposed];
        const bool accept = log_r >= 0.0 || uniform(rng) < std::exp(log_r);
        if (accept) {
            region = proposed;
            ++accepted;
        } else {
            if (tracker) {
                undo_proposal(x, record);
                tracker->undo(x, record);
            } else {
                undo_proposal(x, record);
            }
        }

        const double gamma = std::min(1.0, config.t0 / static_cast<double>(t));
        for (std::size_t i = 0; i < m; ++i) {
            theta[i] += gamma * ((i == region ? 1.0 : 0.0) - inv_m);
        }
        ++visits[region];
        if (observer) observer(t, x, theta);
    }

    result.theta = std::move(theta);
    result.visit_counts = std::move(visits);
    result.empty_regions = static_cast<std::size_t>(
        std::count(result.visit_counts.begin(), result.visit_counts.end(), std::size_t{0}));
    result.iterations = config.T;
    result.acceptance_rate = config.T ? static_cast<double>(accepted) / static_cast<double>(config.T) : 0.0;
    result.p_value = samc_pvalue_from_theta(result.theta, result.visit_counts);
    return result;
}

SamcChains samc_chains(const DataMatrix& data, const SamcConfig& config, std::size_t chains, Execution exec) {
    if (chains < 1) throw InvalidParameterError("need at least one chain");
    SamcChains out;
    out.chains.resize(chains);
    out.seeds.resize(chains);
    for (std::size_t c = 0; c < chains; ++c) out.seeds[c] = stream_seed(config.seed, c);
    for_each_index(chains, exec, [&](std::size_t c) {
        SamcConfig chain_config = config;
        chain_config.seed = out.seeds[c];
        out.chains[c] = samc_pvalue(data, chain_config);
    });
    std::vector<double> pv;
    for (const auto& r : out.chains) pv.push_back(r.p_value);
    std::sort(pv.begin(), pv.end());
    const std::size_t h = pv.size() / 2;
    out.median_p_value = pv.size() % 2 ? pv[h] : 0.5 * (pv[h - 1] + pv[h]);
    return out;
}

}  // namespace mcorr
