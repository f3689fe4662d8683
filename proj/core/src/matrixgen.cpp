#include "nlsrm/matrixgen.hpp"

#include <cmath>

#include "nlsrm/error.hpp"

namespace nlsrm {

SpikeParams::SpikeParams(double c, double a, std::size_t size) : c_lambda(c), alpha(a), n(size) {
    if (!std::isfinite(c)) throw ParameterError("SpikeParams: c_lambda must be finite");
    if (!(a >= 0.0 && a < 0.5)) throw ParameterError("SpikeParams: alpha must lie in [0, 0.5)");
    if (size == 0) throw ParameterError("SpikeParams: n must be positive");
}

double SpikeParams::lambda() const {
    const long double v = static_cast<long double>(c_lambda) *
                          std::pow(static_cast<long double>(n), static_cast<long double>(alpha));
    return static_cast<double>(v);
}

SbmSpec::SbmSpec(std::size_t size, double b, Distribution d_within, Distribution d_across)
    : n(size), beta(b), within(std::move(d_within)), across(std::move(d_across)) {
    if (size == 0) throw ParameterError("SbmSpec: n must be positive");
    if (!(b > 0.0 && b < 1.0)) throw ParameterError("SbmSpec: beta must lie in (0,1)");
    const double split = b * static_cast<double>(size);
    if (std::abs(split - std::round(split)) > 1e-9)
        throw ParameterError("SbmSpec: beta*n = " + std::to_string(split) + " is not an integer");
}

std::size_t SbmSpec::plus_block_size() const {
    return static_cast<std::size_t>(std::llround(beta * static_cast<double>(n)));
}

SbmSpec balance_means(const SbmSpec& spec) {
    const double shift = -(mean(spec.within) + mean(spec.across)) / 2.0;
    return SbmSpec(spec.n, spec.beta, shifted(spec.within, shift), shifted(spec.across, shift));
}

SbmSpec sbm_with_gap(std::size_t n, double beta, const Distribution& base_within, const Distribution& base_across,
                     double delta) {
    return SbmSpec(n, beta, shifted(base_within, delta / 2.0), shifted(base_across, -delta / 2.0));
}

std::string to_string(SignalKind k) {
    switch (k) {
        case SignalKind::rademacher_normalized: return "rademacher-normalized";
        case SignalKind::community: return "community";
        case SignalKind::custom: return "custom";
    }
    return "?";
}

Matrix sample_wigner(std::size_t n, const Distribution& d, std::uint64_t seed) {
    if (n == 0) throw ParameterError("sample_wigner: n must be positive");
    const auto size = static_cast<Eigen::Index>(n);
    Matrix m(size, size);
    Sampler draw(d, seed);
    for (Eigen::Index i = 0; i < size; ++i) {
        for (Eigen::Index j = i; j < size; ++j) {
            const double v = draw();
            m(i, j) = v;
            m(j, i) = v;
        }
    }
    return m;
}

SignalVector rademacher_signal(std::size_t n, std::uint64_t seed) {
    if (n == 0) throw ParameterError("rademacher_signal: n must be positive");
    Sampler draw(Distribution::rademacher(0.5), seed);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    SignalVector x{Vector(static_cast<Eigen::Index>(n)), SignalKind::rademacher_normalized};
    for (Eigen::Index i = 0; i < x.entries.size(); ++i) x.entries(i) = draw() * scale;
    return x;
}

CommunitySignal community_signal(std::size_t n, double beta) {
    if (n == 0) throw ParameterError("community_signal: n must be positive");
    const double split = beta * static_cast<double>(n);
    if (!(beta > 0.0 && beta < 1.0) || std::abs(split - std::round(split)) > 1e-9)
        throw ParameterError("community_signal: beta*n must be an integer with 0 < beta < 1");
    const auto plus = static_cast<std::size_t>(std::llround(split));
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    CommunitySignal out;
    out.u = SignalVector{Vector(static_cast<Eigen::Index>(n)), SignalKind::community};
    out.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const int s = i < plus ? 1 : -1;
        out.labels[i] = s;
        out.u.entries(static_cast<Eigen::Index>(i)) = s * scale;
    }
    return out;
}

Matrix assemble_observation(const Matrix& w, const NonlinearFn& f, const SpikeParams& sp, const SignalVector& x) {
    const auto n = w.rows();
    if (w.cols() != n || x.entries.size() != n || static_cast<std::size_t>(n) != sp.n)
        throw ParameterError("assemble_observation: dimension mismatch");
    const double root_n = std::sqrt(static_cast<double>(n));
    const double strength = sp.lambda() * root_n;
    Matrix perturbed(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i) perturbed(i, j) = w(i, j) + strength * (x.entries(i) * x.entries(j));
    Matrix y = apply_elementwise(f, perturbed);
    y /= root_n;
    return y;
}

Matrix sample_sbm_adjacency(const SbmSpec& spec, std::uint64_t seed) {
    const auto n = static_cast<Eigen::Index>(spec.n);
    const auto plus = static_cast<Eigen::Index>(spec.plus_block_size());
    // Two independent streams so the within/across draws do not depend on each other's count.
    Sampler in_draw(spec.within, seed, 0);
    Sampler out_draw(spec.across, seed, 1);
    Matrix a(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
            const bool same = (i < plus) == (j < plus);
            const double v = same ? in_draw() : out_draw();
            a(i, j) = v;
            a(j, i) = v;
        }
    }
    return a;
}

Vector hadamard_power(const Vector& x, unsigned k) {
    Vector out(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        double v = 1.0;
        for (unsigned p = 0; p < k; ++p) v *= x(i);
        out(i) = v;
    }
    return out;
}

}  // namespace nlsrm
