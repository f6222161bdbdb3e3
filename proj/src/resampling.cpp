#include "mcorr/resampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mcorr/error.hpp"
#include "mcorr/rng.hpp"
#include "mcorr/statistic.hpp"

namespace mcorr {

namespace {

constexpr int kMaxRedraws = 10;

void require_plan(const DataMatrix& data, const ResamplePlan& plan) {
    if (plan.replications < 100) {
        throw InvalidParameterError("resampling needs at least 100 replications");
    }
    if (data.p() < 2 || data.p() >= data.n()) {
        throw DimensionError("resampling test needs 2 <= p < n");
    }
}

bool has_constant_column(const Matrix& x) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const double first = x(0, j);
        if ((x.col(j).array() == first).all()) return true;
    }
    return false;
}

double psi_from_log_scale(double w) {
    if (std::isinf(w) && w < 0) return 1.0;
    return std::sqrt(std::clamp(-std::expm1(w), 0.0, 1.0));
}

}  // namespace

std::vector<double> null_statistics(const DataMatrix& data, const ResamplePlan& plan, Execution exec) {
    require_plan(data, plan);
    const Matrix& x = data.values();
    const Eigen::Index n = x.rows();
    const Eigen::Index p = x.cols();
    std::vector<double> out(plan.replications);
    for_each_index(plan.replications, exec, [&](std::size_t b) {
        thread_local Matrix resampled;
        resampled.resize(n, p);
        Rng rng = make_stream(plan.seed, b);
        if (plan.method == ResampleMethod::PermutationNoReplacement) {
            resampled = x;
            for (Eigen::Index j = 0; j < p; ++j) {
                double* col = resampled.col(j).data();
                std::shuffle(col, col + n, rng);
            }
        } else {
            std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
            for (Eigen::Index j = 0; j < p; ++j) {
                for (Eigen::Index i = 0; i < n; ++i) resampled(i, j) = x(pick(rng), j);
            }
        }
        out[b] = std::abs(z_of(resampled));
    });
    return out;
}

double add_one_pvalue(double z_abs, const std::vector<double>& null_abs) {
    const auto count = static_cast<std::size_t>(
        std::count_if(null_abs.begin(), null_abs.end(), [z_abs](double z) { return z >= z_abs; }));
    return (1.0 + static_cast<double>(count)) / (1.0 + static_cast<double>(null_abs.size()));
}

NullResampleResult null_resample_test(const DataMatrix& data, const ResamplePlan& plan, Execution exec) {
    require_plan(data, plan);
    NullResampleResult result;
    result.z_observed = z_of(data.values());
    const std::vector<double> null_abs = null_statistics(data, plan, exec);
    const double z_abs = std::abs(result.z_observed);
    result.replications = null_abs.size();
    result.exceedances = static_cast<std::size_t>(
        std::count_if(null_abs.begin(), null_abs.end(), [z_abs](double z) { return z >= z_abs; }));
    result.p_value = add_one_pvalue(z_abs, null_abs);
    return result;
}

double null_resample_pvalue(const DataMatrix& data, const ResamplePlan& plan, Execution exec) {
    return null_resample_test(data, plan, exec).p_value;
}

std::vector<double> bootstrap_log_scale(const DataMatrix& data, std::size_t replications, std::uint64_t seed,
                                        Execution exec) {
    if (replications < 1) throw InvalidParameterError("bootstrap needs at least one replication");
    const Eigen::Index n = data.n();
    const Eigen::Index p = data.p();
    if (p < 2 || p >= n) throw DimensionError("bootstrap interval needs 2 <= p < n");
    const auto nn = static_cast<std::size_t>(n);

    std::vector<double> out(replications);
    for_each_index(replications, exec, [&](std::size_t b) {
        Rng rng = make_stream(seed, b);
        std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
        std::vector<Eigen::Index> rows(nn);
        Matrix resampled;
        for (int attempt = 0;; ++attempt) {
            for (auto& r : rows) r = pick(rng);
            resampled = data.values()(rows, Eigen::all);
            if (!has_constant_column(resampled)) break;
            if (attempt + 1 >= kMaxRedraws) {
                throw NumericDegeneracyError("bootstrap resample " + std::to_string(b) +
                                             " kept producing a constant column");
            }
        }
        const DataMatrix boot(std::move(resampled));
        const PsiEstimate est = full_estimate(boot, {.kappa = {}, .exec = Execution::Serial});
        const double log_scale = est.singular ? -std::numeric_limits<double>::infinity()
                                            : std::log1p(-est.psi_hat * est.psi_hat);
        out[b] = log_scale - est.delta_hat;
    });
    return out;
}

double sorted_quantile(const std::vector<double>& sorted, double prob) {
    if (sorted.empty()) throw InvalidParameterError("quantile of an empty sample");
    const double h = (static_cast<double>(sorted.size()) - 1.0) * std::clamp(prob, 0.0, 1.0);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = h - static_cast<double>(lo);
    if (frac == 0.0 || std::isinf(sorted[lo]) || std::isinf(sorted[hi])) return sorted[lo];
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

ConfidenceInterval bootstrap_ci(const DataMatrix& data, std::size_t replications, double level,
                                std::uint64_t seed, Execution exec) {
    if (!(level > 0.0 && level < 1.0)) throw InvalidParameterError("level must lie in (0, 1)");
    std::vector<double> w = bootstrap_log_scale(data, replications, seed, exec);
    std::sort(w.begin(), w.end());
    const double alpha = 1.0 - level;
    const double w_lo = sorted_quantile(w, alpha / 2.0);
    const double w_hi = sorted_quantile(w, 1.0 - alpha / 2.0);
    // psi is decreasing in log(1 - psi^2).
    ConfidenceInterval ci;
    ci.level = level;
    ci.lower = psi_from_log_scale(w_hi);
    ci.upper = psi_from_log_scale(w_lo);
    if (ci.lower > ci.upper) std::swap(ci.lower, ci.upper);
    ci.clamped = w_lo > 0.0 || w_hi > 0.0;
    return ci;
}

}  // namespace mcorr
