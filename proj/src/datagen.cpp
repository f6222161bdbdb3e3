#include "mcorr/datagen.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>

#include "mcorr/coefficient.hpp"
#include "mcorr/error.hpp"

namespace mcorr {

namespace {

constexpr double kPsdTolerance = 1e-10;
constexpr double kBeta66Sd = 0.13867504905630729;  // sqrt(1/52)
constexpr double kT6Sd = 1.2247448713915890;       // sqrt(6/4)
constexpr double kT4Sd = 1.4142135623730951;       // sqrt(4/2)

double min_eigenvalue(const SigmaSpec& spec) {
    const double p = static_cast<double>(spec.p);
    const double phi = spec.phi;
    switch (spec.kind) {
        case CovarianceCase::Autoregressive:
            // Kac-Murdock-Szego matrices are PD for |phi| < 1, PSD at |phi| = 1.
            return std::abs(phi) <= 1.0 ? 0.0 : -1.0;
        case CovarianceCase::CompoundSymmetry:
            return std::min(1.0 - phi, 1.0 + (p - 1.0) * phi);
        case CovarianceCase::MDependent:
            // Eigenvalues 1 + 2 phi cos(k pi / (p + 1)), k = 1..p.
            return 1.0 - 2.0 * std::abs(phi) * std::cos(std::numbers::pi / (p + 1.0));
    }
    return -1.0;
}

double psi_of(CovarianceCase kind, std::size_t p, double phi) {
    const SymmetricMatrix sigma = build_sigma({kind, phi, p});
    return psi_from_log_det(log_det_psd(sigma), static_cast<Eigen::Index>(p)).value;
}

std::string lower(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

}  // namespace

SymmetricMatrix build_sigma(const SigmaSpec& spec) {
    if (spec.p < 2) throw InvalidParameterError("Sigma needs p >= 2");
    if (!std::isfinite(spec.phi)) throw InvalidParameterError("phi must be finite");
    if (spec.kind == CovarianceCase::CompoundSymmetry &&
        !(spec.phi > -1.0 / (static_cast<double>(spec.p) - 1.0) && spec.phi < 1.0)) {
        throw InvalidParameterError("compound symmetry needs phi in (-1/(p-1), 1), got " +
                                    std::to_string(spec.phi));
    }
    if (min_eigenvalue(spec) < -kPsdTolerance) {
        throw InvalidParameterError(std::string(to_string(spec.kind)) + " covariance is not PSD at phi = " +
                                    std::to_string(spec.phi));
    }
    const auto p = static_cast<Eigen::Index>(spec.p);
    Matrix s = Matrix::Identity(p, p);
    for (Eigen::Index j = 0; j < p; ++j) {
        for (Eigen::Index i = 0; i < p; ++i) {
            if (i == j) continue;
            const Eigen::Index lag = std::abs(i - j);
            switch (spec.kind) {
                case CovarianceCase::Autoregressive:
                    s(i, j) = std::pow(spec.phi, static_cast<double>(lag));
                    break;
                case CovarianceCase::CompoundSymmetry:
                    s(i, j) = spec.phi;
                    break;
                case CovarianceCase::MDependent:
                    s(i, j) = lag == 1 ? spec.phi : 0.0;
                    break;
            }
        }
    }
    return SymmetricMatrix(std::move(s));
}

double phi_upper_bound(CovarianceCase kind, std::size_t p) {
    switch (kind) {
        case CovarianceCase::Autoregressive:
        case CovarianceCase::CompoundSymmetry:
            return 1.0;
        case CovarianceCase::MDependent:
            return 1.0 / (2.0 * std::cos(std::numbers::pi / (static_cast<double>(p) + 1.0)));
    }
    return 0.0;
}

double solve_phi_for_psi(CovarianceCase kind, std::size_t p, double target_psi) {
    if (!(target_psi > 0.0 && target_psi < 1.0)) {
        throw InvalidParameterError("target psi must lie in (0, 1)");
    }
    if (p < 2) throw InvalidParameterError("p must be at least 2");
    double lo = 0.0;
    double hi = std::nextafter(phi_upper_bound(kind, p), 0.0);
    const double psi_max = psi_of(kind, p, hi);
    if (psi_max < target_psi) {
        throw UnreachableTargetError(psi_max, "psi = " + std::to_string(target_psi) +
                                                  " is unreachable; the largest achievable psi is " +
                                                  std::to_string(psi_max));
    }
    double psi_lo = 0.0;
    double psi_hi = psi_max;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double psi_mid = psi_of(kind, p, mid);
        if (psi_mid < target_psi) {
            lo = mid;
            psi_lo = psi_mid;
        } else {
            hi = mid;
            psi_hi = psi_mid;
        }
    }
    return (target_psi - psi_lo) <= (psi_hi - target_psi) ? lo : hi;
}

double population_kappa(ComponentDistribution dist, std::size_t p) {
    switch (dist) {
        case ComponentDistribution::StandardNormal:
            return 3.0;
        case ComponentDistribution::Beta66:
            return 2.6;  // 3 - 6 / (2a + 3)
        case ComponentDistribution::T6:
            return 6.0;  // 3 + 6 / (nu - 4)
        case ComponentDistribution::T4:
            return std::numeric_limits<double>::infinity();
        case ComponentDistribution::HalfT6HalfBeta66: {
            const double t_count = std::ceil(static_cast<double>(p) / 2.0);
            return (6.0 * t_count + 2.6 * (static_cast<double>(p) - t_count)) / static_cast<double>(p);
        }
    }
    return 3.0;
}

bool has_finite_fourth_moment(ComponentDistribution dist) { return dist != ComponentDistribution::T4; }

void draw_components(Matrix& y, ComponentDistribution dist, Rng& rng) {
    std::normal_distribution<double> normal;
    std::gamma_distribution<double> gamma6(6.0, 1.0);
    std::student_t_distribution<double> t6(6.0);
    std::student_t_distribution<double> t4(4.0);
    auto beta66 = [&] {
        const double a = gamma6(rng);
        const double b = gamma6(rng);
        return (a / (a + b) - 0.5) / kBeta66Sd;
    };
    const Eigen::Index n = y.rows();
    const Eigen::Index p = y.cols();
    const Eigen::Index t_cols = (p + 1) / 2;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) {
            double v = 0.0;
            switch (dist) {
                case ComponentDistribution::StandardNormal:
                    v = normal(rng);
                    break;
                case ComponentDistribution::Beta66:
                    v = beta66();
                    break;
                case ComponentDistribution::T6:
                    v = t6(rng) / kT6Sd;
                    break;
                case ComponentDistribution::T4:
                    v = t4(rng) / kT4Sd;
                    break;
                case ComponentDistribution::HalfT6HalfBeta66:
                    v = j < t_cols ? t6(rng) / kT6Sd : beta66();
                    break;
            }
            y(i, j) = v;
        }
    }
}

IcmSampler::IcmSampler(const SigmaSpec& spec, ComponentDistribution dist)
    : spec_(spec), dist_(dist), sigma_(build_sigma(spec)) {
    if (!sigma_.values().isIdentity(0.0)) root_ = sqrt_psd(sigma_).values();
}

DataMatrix IcmSampler::sample(std::size_t n, std::uint64_t seed) const {
    if (n < 2) throw InsufficientSampleError("need n >= 2 draws");
    Rng rng(seed);
    Matrix y(static_cast<Eigen::Index>(n), sigma_.dim());
    draw_components(y, dist_, rng);
    if (!root_) return DataMatrix(std::move(y));
    // Rows are y_i^T; Sigma^{1/2} is symmetric, so x_i^T = y_i^T Sigma^{1/2}.
    Matrix x = y * (*root_);
    return DataMatrix(std::move(x));
}

DataMatrix sample_icm(std::size_t n, const SigmaSpec& spec, ComponentDistribution dist, std::uint64_t seed) {
    return IcmSampler(spec, dist).sample(n, seed);
}

std::string_view to_string(CovarianceCase kind) {
    switch (kind) {
        case CovarianceCase::Autoregressive:
            return "autoregressive";
        case CovarianceCase::CompoundSymmetry:
            return "compound-symmetry";
        case CovarianceCase::MDependent:
            return "m-dependent";
    }
    return "?";
}

std::string_view to_string(ComponentDistribution dist) {
    switch (dist) {
        case ComponentDistribution::StandardNormal:
            return "normal";
        case ComponentDistribution::Beta66:
            return "beta66";
        case ComponentDistribution::T6:
            return "t6";
        case ComponentDistribution::T4:
            return "t4";
        case ComponentDistribution::HalfT6HalfBeta66:
            return "t6-beta66";
    }
    return "?";
}

CovarianceCase parse_covariance_case(std::string_view text) {
    const std::string t = lower(text);
    if (t == "1" || t == "ar" || t == "autoregressive") return CovarianceCase::Autoregressive;
    if (t == "2" || t == "cs" || t == "compound-symmetry") return CovarianceCase::CompoundSymmetry;
    if (t == "3" || t == "md" || t == "m-dependent") return CovarianceCase::MDependent;
    throw InvalidParameterError("unknown covariance case '" + std::string(text) + "'");
}

ComponentDistribution parse_distribution(std::string_view text) {
    const std::string t = lower(text);
    if (t == "normal") return ComponentDistribution::StandardNormal;
    if (t == "beta66" || t == "beta") return ComponentDistribution::Beta66;
    if (t == "t6") return ComponentDistribution::T6;
    if (t == "t4") return ComponentDistribution::T4;
    if (t == "t6-beta66" || t == "mixed") return ComponentDistribution::HalfT6HalfBeta66;
    throw InvalidParameterError("unknown distribution '" + std::string(text) + "'");
}

}  // namespace mcorr
