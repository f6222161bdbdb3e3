#include "mcorr/simulate.hpp"

#include <chrono>
#include <cmath>

#include "mcorr/coefficient.hpp"
#include "mcorr/error.hpp"
#include "mcorr/statistic.hpp"

namespace mcorr {

std::size_t resolved_p(const CoverageDesign& design) {
    if (design.p.has_value() == design.q.has_value()) {
        throw InvalidParameterError("give exactly one of p or q");
    }
    if (design.p) return *design.p;
    const double q = *design.q;
    if (!(q > 0.0 && q < 1.0)) throw InvalidParameterError("q = p/n must lie in (0, 1)");
    return static_cast<std::size_t>(std::llround(q * static_cast<double>(design.n)));
}

CoverageReport run_coverage(const CoverageDesign& design, Execution exec) {
    const auto start = std::chrono::steady_clock::now();
    if (design.reps < 1) throw InvalidParameterError("reps must be positive");
    if (!(design.level > 0.0 && design.level < 1.0)) throw InvalidParameterError("level must lie in (0, 1)");
    if (!(design.psi >= 0.0 && design.psi < 1.0)) throw InvalidParameterError("psi must lie in [0, 1)");

    CoverageReport report;
    report.p = resolved_p(design);
    if (report.p < 2 || report.p >= design.n) throw DimensionError("simulation needs 2 <= p < n");
    report.phi = design.psi > 0.0 ? solve_phi_for_psi(design.kind, report.p, design.psi) : 0.0;
    const IcmSampler sampler({design.kind, report.phi, report.p}, design.dist);
    report.psi_true = psi_from_log_det(log_det_psd(sampler.sigma()), static_cast<Eigen::Index>(report.p)).value;
    if (!has_finite_fourth_moment(design.dist)) {
        report.warnings.emplace_back(std::string(to_string(design.dist)) +
                                     " components have an infinite fourth moment; coverage is not guaranteed");
    }

    report.replicates.resize(design.reps);
    for_each_index(design.reps, exec, [&](std::size_t r) {
        const DataMatrix data = sampler.sample(design.n, stream_seed(design.seed, r));
        const PsiEstimate est = full_estimate(data, {.kappa = {}, .exec = Execution::Serial});
        const ConfidenceInterval ci = asymptotic_ci(est.psi_bc, est.sigma_hat, design.level);
        report.replicates[r] = {est.psi_hat, est.psi_bc, ci.lower, ci.upper, ci.contains(report.psi_true)};
    });

    std::size_t covered = 0;
    double length = 0.0;
    for (const Replicate& rep : report.replicates) {
        covered += rep.covered ? 1 : 0;
        length += rep.upper - rep.lower;
        report.mean_psi_hat += rep.psi_hat;
        report.mean_psi_bc += rep.psi_bc;
        report.mae_psi_hat += std::abs(rep.psi_hat - report.psi_true);
        report.mae_psi_bc += std::abs(rep.psi_bc - report.psi_true);
    }
    const double reps = static_cast<double>(design.reps);
    const double rate = static_cast<double>(covered) / reps;
    report.coverage_pct = 100.0 * rate;
    report.avg_length = length / reps;
    report.mc_stderr = 100.0 * std::sqrt(rate * (1.0 - rate) / reps);
    report.mean_psi_hat /= reps;
    report.mean_psi_bc /= reps;
    report.mae_psi_hat /= reps;
    report.mae_psi_bc /= reps;
    report.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

std::vector<double> null_z_draws(std::size_t n, std::size_t p, ComponentDistribution dist, std::size_t reps,
                                 std::uint64_t seed, Execution exec) {
    if (p < 2 || p >= n) throw DimensionError("null draws need 2 <= p < n");
    const IcmSampler sampler({CovarianceCase::Autoregressive, 0.0, p}, dist);
    std::vector<double> out(reps);
    for_each_index(reps, exec, [&](std::size_t r) {
        const DataMatrix data = sampler.sample(n, stream_seed(seed, r));
        out[r] = z_of(data.values());
    });
    return out;
}

}  // namespace mcorr
