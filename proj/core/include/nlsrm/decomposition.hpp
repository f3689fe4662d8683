#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "nlsrm/distributions.hpp"
#include "nlsrm/matrix.hpp"
#include "nlsrm/matrixgen.hpp"
#include "nlsrm/nonlinearity.hpp"

namespace nlsrm {

/// Number of Taylor terms that carry signal at strength exponent alpha.
struct EllResult {
    unsigned ell = 1;
    // The intervals [(l-1)/(2l), l/(2l+2)) cover [0, 1/2) without holes, so this
    // is false for every valid alpha. Kept so reports state it explicitly.
    bool gap = false;
};

/// Smallest l with l > 2 alpha / (1 - 2 alpha), evaluated exactly.
EllResult ell_of_alpha(std::int64_t numerator, std::int64_t denominator);

/// Double overload: alpha is first snapped to a nearby rational (|error| <= 1e-12,
/// denominator <= 10^6), so 1.0/3 is treated as exactly 1/3.
EllResult ell_of_alpha(double alpha);

struct WignerEnsemble {
    Distribution noise;
};

struct SbmEnsemble {
    SbmSpec spec;
};

using Ensemble = std::variant<WignerEnsemble, SbmEnsemble>;

/// E f^(k)(W) = ones * 11^T + u * uu^T, with u the +-1 community vector.
struct DerivativeMatrix {
    double ones = 0.0;
    double u = 0.0;
};

DerivativeMatrix expected_derivative_matrix(const NonlinearFn& f, unsigned k, const Ensemble& ensemble,
                                            const MomentOptions& opt = {});

enum class DirectionKind { ones, signal, hadamard };

std::string to_string(DirectionKind k);

/// coefficient * direction direction^T with a unit direction.
struct SpikeTerm {
    unsigned k = 1;
    double coefficient = 0.0;
    Vector direction;
    DirectionKind direction_kind = DirectionKind::hadamard;
};

Matrix materialize(const SpikeTerm& term);

struct DecompositionReport {
    unsigned ell = 1;
    bool gap = false;
    Matrix noise_part;  // f(W) / sqrt(n)
    std::vector<SpikeTerm> spikes;
    double remainder_norm = 0.0;
    std::size_t n = 0;
    double alpha = 0.0;
    double c_lambda = 0.0;

    /// noise_part + sum of materialized spikes.
    Matrix approximation() const;
};

/// Builds f(W)/sqrt(n) + sum_{k=1..ell} H_k and measures ||Y - approximation||_op.
///
/// For a Wigner ensemble W is the sampled noise. For an SBM ensemble W is the
/// block-centered noise and x is the normalized community vector; the spike
/// then reproduces the block means.
DecompositionReport signal_plus_noise(const Matrix& w, const NonlinearFn& f, const SpikeParams& sp,
                                      const SignalVector& x, const Ensemble& ensemble,
                                      const MomentOptions& opt = {});

struct WignerTerm {
    unsigned k = 0;
    double coefficient = 0.0;
    DirectionKind direction_kind = DirectionKind::ones;
};

/// Per-k coefficients of the ones/zeta spikes for a Rademacher signal, k = 0..ell,
/// and their sums (kappa_ones multiplies 11^T/n, kappa_zeta multiplies zeta zeta^T/n).
struct WignerCoefficients {
    std::vector<WignerTerm> terms;
    double kappa_ones = 0.0;
    double kappa_zeta = 0.0;
};

WignerCoefficients wigner_spike_coefficients(const NonlinearFn& f, const Distribution& d, const SpikeParams& sp,
                                             const MomentOptions& opt = {});

struct SbmTerm {
    unsigned k = 0;
    double ones_coefficient = 0.0;
    double u_coefficient = 0.0;
};

/// Same for the two-block model: kappa_c multiplies 11^T/n, kappa_s multiplies uu^T/n.
struct SbmCoefficients {
    std::vector<SbmTerm> terms;
    double kappa_c = 0.0;
    double kappa_s = 0.0;
};

SbmCoefficients sbm_spike_coefficients(const NonlinearFn& f, const SbmSpec& spec, const SpikeParams& sp,
                                       const MomentOptions& opt = {});

nlohmann::json to_json(const DecompositionReport& r);

}  // namespace nlsrm
