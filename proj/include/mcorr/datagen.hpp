#pragma once

// Independent component model sampler x_i = Sigma^{1/2} y_i with the three
// covariance templates used in the simulation study, plus a solver that maps
// a target psi to the template parameter phi.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "mcorr/linalg.hpp"
#include "mcorr/rng.hpp"

namespace mcorr {

enum class CovarianceCase {
    Autoregressive,    // phi^{|i-j|}
    CompoundSymmetry,  // (1 - phi) I + phi 11^T
    MDependent,        // 1 on the diagonal, phi on the first off-diagonals
};

/// Component laws, all standardized analytically to mean 0 and variance 1.
enum class ComponentDistribution {
    StandardNormal,
    Beta66,
    T6,
    T4,
    HalfT6HalfBeta66,  // first ceil(p/2) components t(6), the rest beta(6,6)
};

struct SigmaSpec {
    CovarianceCase kind = CovarianceCase::Autoregressive;
    double phi = 0.0;
    std::size_t p = 2;
};

/// Exact covariance matrix; throws InvalidParameterError if phi leaves the
/// PSD range of the template.
SymmetricMatrix build_sigma(const SigmaSpec& spec);

/// Supremum of the nonnegative phi range over which Sigma stays PSD.
double phi_upper_bound(CovarianceCase kind, std::size_t p);

/// phi >= 0 with |psi(Sigma(phi)) - target| <= 1e-10, by bisection.
double solve_phi_for_psi(CovarianceCase kind, std::size_t p, double target_psi);

/// Population average fourth moment of the standardized components
/// (infinite for t(4)).
double population_kappa(ComponentDistribution dist, std::size_t p);
bool has_finite_fourth_moment(ComponentDistribution dist);

/// Holds Sigma^{1/2} so repeated draws from one design do not redo the
/// eigendecomposition.
class IcmSampler {
public:
    IcmSampler(const SigmaSpec& spec, ComponentDistribution dist);

    DataMatrix sample(std::size_t n, std::uint64_t seed) const;

    const SymmetricMatrix& sigma() const noexcept { return sigma_; }
    const SigmaSpec& spec() const noexcept { return spec_; }
    ComponentDistribution distribution() const noexcept { return dist_; }

private:
    SigmaSpec spec_;
    ComponentDistribution dist_;
    SymmetricMatrix sigma_;
    std::optional<Matrix> root_;  // empty when Sigma == I
};

DataMatrix sample_icm(std::size_t n, const SigmaSpec& spec, ComponentDistribution dist, std::uint64_t seed);

/// Fills y (row-major draw order) with standardized component draws.
void draw_components(Matrix& y, ComponentDistribution dist, Rng& rng);

std::string_view to_string(CovarianceCase kind);
std::string_view to_string(ComponentDistribution dist);
CovarianceCase parse_covariance_case(std::string_view text);
ComponentDistribution parse_distribution(std::string_view text);

}  // namespace mcorr
