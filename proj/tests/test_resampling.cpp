#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mcorr/datagen.hpp"
#include "mcorr/error.hpp"
#include "mcorr/resampling.hpp"
#include "mcorr/statistic.hpp"
#include "support/generators.hpp"

using namespace mcorr;
using namespace mcorr::gen;

TEST(Statistic, WorkspaceMatchesReference) {
    Rng rng(1);
    CorrelationLogDet ws;
    for (int rep = 0; rep < 30; ++rep) {
        const Eigen::Index p = 2 + rep % 12;
        const DataMatrix data(correlated_data(3 * p + 5, p, rng));
        const double fast = z_of(data.values());
        const double ref = reference::z_of(data);
        EXPECT_NEAR(fast, ref, 1e-8 * std::max(1.0, std::abs(ref)));
        EXPECT_NEAR(ws(data.values()), log_det_psd(sample_correlation(data)), 1e-10);
    }
}

TEST(Statistic, ConstantColumnThrows) {
    Matrix x = Matrix::Random(10, 3);
    x.col(1).setConstant(4.0);
    EXPECT_THROW(z_of(x), DegenerateVariableError);
}

TEST(NullResample, PValueBounds) {
    Rng rng(2);
    const DataMatrix data(correlated_data(60, 4, rng));
    for (const auto method : {ResampleMethod::PermutationNoReplacement, ResampleMethod::BootstrapWithReplacement}) {
        const NullResampleResult r = null_resample_test(data, {method, 200, 9});
        EXPECT_GE(r.p_value, 1.0 / 201.0);
        EXPECT_LE(r.p_value, 1.0);
        EXPECT_EQ(r.replications, 200u);
        EXPECT_DOUBLE_EQ(r.p_value, (1.0 + r.exceedances) / 201.0);
    }
}

TEST(NullResample, RejectsSmallB) {
    Rng rng(3);
    const DataMatrix data(correlated_data(30, 3, rng));
    EXPECT_THROW(null_resample_pvalue(data, {ResampleMethod::PermutationNoReplacement, 99, 0}), InvalidParameterError);
    EXPECT_THROW(null_resample_pvalue(DataMatrix(correlated_data(4, 4, rng)), {}), DimensionError);
}

TEST(NullResample, IdenticalColumnsGiveMinimalPValue) {
    Rng rng(4);
    Matrix x = random_gaussian(300, 3, rng);
    x.col(1) = x.col(0) + 1e-3 * x.col(1);
    x.col(2) = x.col(0) - 1e-3 * x.col(2);
    const double pv = null_resample_pvalue(DataMatrix(x), {ResampleMethod::PermutationNoReplacement, 500, 1});
    EXPECT_DOUBLE_EQ(pv, 1.0 / 501.0);
}

TEST(NullResample, MonotoneInObservedStatistic) {
    Rng rng(5);
    const DataMatrix data(correlated_data(50, 3, rng));
    const std::vector<double> null_abs = null_statistics(data, {ResampleMethod::PermutationNoReplacement, 300, 2});
    double previous = 2.0;
    for (double z = 0.0; z < 10.0; z += 0.25) {
        const double pv = add_one_pvalue(z, null_abs);
        EXPECT_LE(pv, previous);
        previous = pv;
    }
}

TEST(NullResample, SerialEqualsParallelAndDeterministic) {
    Rng rng(6);
    const DataMatrix data(correlated_data(80, 5, rng));
    for (const auto method : {ResampleMethod::PermutationNoReplacement, ResampleMethod::BootstrapWithReplacement}) {
        const ResamplePlan plan{method, 400, 77};
        const auto a = null_statistics(data, plan, Execution::Serial);
        const auto b = null_statistics(data, plan, Execution::Parallel);
        const auto c = null_statistics(data, plan, Execution::Parallel);
        EXPECT_EQ(a, b);
        EXPECT_EQ(b, c);
    }
}

TEST(NullResample, ScaleInvariance) {
    Rng rng(7);
    const Matrix x = correlated_data(70, 4, rng);
    Matrix y = x;
    y.col(0) *= 1000.0;
    y.col(3) = y.col(3).array() * -0.01 + 5.0;
    const ResamplePlan plan{ResampleMethod::PermutationNoReplacement, 300, 8};
    const auto a = null_statistics(DataMatrix(x), plan);
    const auto b = null_statistics(DataMatrix(y), plan);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-6 * std::max(1.0, a[i]));
}

TEST(NullResample, UniformUnderNull) {
    // KS distance of 200 null p-values from the uniform law.
    const std::size_t reps = 200;
    std::vector<double> pv(reps);
    const IcmSampler sampler({CovarianceCase::Autoregressive, 0.0, 10}, ComponentDistribution::StandardNormal);
    for_each_index(reps, Execution::Parallel, [&](std::size_t r) {
        const DataMatrix data = sampler.sample(200, stream_seed(100, r));
        pv[r] = null_resample_pvalue(data, {ResampleMethod::PermutationNoReplacement, 2000, stream_seed(200, r)},
                                     Execution::Serial);
    });
    std::sort(pv.begin(), pv.end());
    double ks = 0.0;
    for (std::size_t i = 0; i < reps; ++i) {
        ks = std::max({ks, std::abs(pv[i] - static_cast<double>(i) / reps), std::abs(pv[i] - (i + 1.0) / reps)});
    }
    EXPECT_LT(ks, 0.1);
}

TEST(SortedQuantile, Type7) {
    const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
    EXPECT_DOUBLE_EQ(sorted_quantile(v, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(sorted_quantile(v, 1.0), 4.0);
    EXPECT_DOUBLE_EQ(sorted_quantile(v, 0.5), 2.5);
    EXPECT_DOUBLE_EQ(sorted_quantile(v, 0.25), 1.75);
    EXPECT_THROW(sorted_quantile({}, 0.5), InvalidParameterError);
}

TEST(BootstrapCi, ValidOrderedIntervalAtSmallB) {
    Rng rng(9);
    for (int rep = 0; rep < 10; ++rep) {
        const DataMatrix data(correlated_data(25 + rep, 2 + rep % 4, rng));
        const ConfidenceInterval ci = bootstrap_ci(data, 100, 0.95, 3);
        EXPECT_LE(0.0, ci.lower);
        EXPECT_LE(ci.lower, ci.upper);
        EXPECT_LE(ci.upper, 1.0);
    }
}

TEST(BootstrapCi, NullDataClampsWithoutBreakingOrder) {
    Rng rng(10);
    const DataMatrix data(random_gaussian(40, 6, rng));
    const ConfidenceInterval ci = bootstrap_ci(data, 200, 0.9, 5);
    EXPECT_LE(0.0, ci.lower);
    EXPECT_LE(ci.lower, ci.upper);
    EXPECT_LE(ci.upper, 1.0);
}

TEST(BootstrapCi, DeterministicAndScheduleIndependent) {
    Rng rng(11);
    const DataMatrix data(correlated_data(100, 3, rng));
    const auto a = bootstrap_log_scale(data, 300, 4, Execution::Serial);
    const auto b = bootstrap_log_scale(data, 300, 4, Execution::Parallel);
    EXPECT_EQ(a, b);
}

TEST(BootstrapCi, RedrawsThenFailsOnNearConstantColumn) {
    // Columns 1..4 hold a single nonzero value each; a resample misses one of
    // those rows, making the column constant, most of the time.
    Matrix x = Matrix::Zero(20, 5);
    for (Eigen::Index i = 0; i < 20; ++i) x(i, 0) = static_cast<double>(i);
    for (Eigen::Index j = 1; j < 5; ++j) x(j, j) = 1.0;
    EXPECT_THROW(bootstrap_log_scale(DataMatrix(x), 2000, 1), NumericDegeneracyError);
}

TEST(BootstrapCi, CoversBivariateCorrelation) {
    // 200 outer replications of a B = 2000 interval at n = 2000.
    const std::size_t outer = 200;
    std::vector<int> hit(outer);
    const IcmSampler sampler({CovarianceCase::CompoundSymmetry, 0.5, 2}, ComponentDistribution::StandardNormal);
    for (std::size_t r = 0; r < outer; ++r) {
        const DataMatrix data = sampler.sample(2000, stream_seed(300, r));
        hit[r] = bootstrap_ci(data, 2000, 0.95, stream_seed(400, r)).contains(0.5);
    }
    const double coverage = std::accumulate(hit.begin(), hit.end(), 0.0) / outer;
    // Three binomial standard errors at 200 reps.
    EXPECT_NEAR(coverage, 0.95, 3.0 * std::sqrt(0.95 * 0.05 / outer));
}

TEST(PermutationVsBootstrap, AgreeOnHeavyTailedData) {
    const DataMatrix data = sample_icm(200, {CovarianceCase::CompoundSymmetry, 0.05, 10}, ComponentDistribution::T4, 8);
    const std::size_t b = 100000;
    const auto perm = null_resample_test(data, {ResampleMethod::PermutationNoReplacement, b, 1});
    const auto boot = null_resample_test(data, {ResampleMethod::BootstrapWithReplacement, b, 2});
    const double se = std::sqrt(perm.p_value * (1.0 - perm.p_value) / b + boot.p_value * (1.0 - boot.p_value) / b);
    EXPECT_LT(std::abs(perm.p_value - boot.p_value), 2.0 * se) << perm.p_value << " " << boot.p_value;
}
