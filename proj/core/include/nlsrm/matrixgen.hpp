#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "nlsrm/distributions.hpp"
#include "nlsrm/matrix.hpp"
#include "nlsrm/nonlinearity.hpp"

namespace nlsrm {

/// Signal strength lambda = c_lambda * n^alpha with alpha in [0, 1/2).
struct SpikeParams {
    double c_lambda = 0.0;
    double alpha = 0.0;
    std::size_t n = 1;

    SpikeParams() = default;
    SpikeParams(double c, double a, std::size_t size);

    /// Evaluated in extended precision so every module sees the same value.
    double lambda() const;
};

/// Two-community weighted SBM. Vertices [0, beta*n) form the + block.
struct SbmSpec {
    std::size_t n = 2;
    double beta = 0.5;
    Distribution within = Distribution::gaussian(0.0, 1.0);
    Distribution across = Distribution::gaussian(0.0, 1.0);

    SbmSpec() = default;
    SbmSpec(std::size_t size, double b, Distribution d_within, Distribution d_across);

    std::size_t plus_block_size() const;
};

/// Shift both block laws by -(gamma + gamma_bar)/2 so the means sum to zero.
SbmSpec balance_means(const SbmSpec& spec);

/// Block laws D = base_within + delta/2, D_bar = base_across - delta/2.
SbmSpec sbm_with_gap(std::size_t n, double beta, const Distribution& base_within,
                     const Distribution& base_across, double delta);

enum class SignalKind { rademacher_normalized, community, custom };

std::string to_string(SignalKind k);

struct SignalVector {
    Vector entries;
    SignalKind kind = SignalKind::custom;
};

Matrix sample_wigner(std::size_t n, const Distribution& d, std::uint64_t seed);

/// x = zeta / sqrt(n), zeta_i iid Rademacher(1/2).
SignalVector rademacher_signal(std::size_t n, std::uint64_t seed);

struct CommunitySignal {
    SignalVector u;           // u / sqrt(n)
    std::vector<int> labels;  // +1 then -1
};

CommunitySignal community_signal(std::size_t n, double beta);

/// Y = f(W + lambda sqrt(n) x x^T) / sqrt(n).
Matrix assemble_observation(const Matrix& w, const NonlinearFn& f, const SpikeParams& sp, const SignalVector& x);

Matrix sample_sbm_adjacency(const SbmSpec& spec, std::uint64_t seed);

/// Element-wise power x^{o k}.
Vector hadamard_power(const Vector& x, unsigned k);

}  // namespace nlsrm
