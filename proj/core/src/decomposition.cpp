#include "nlsrm/decomposition.hpp"

#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "nlsrm/error.hpp"
#include "nlsrm/spectral.hpp"

namespace nlsrm {

namespace {

double factorial(unsigned k) {
    double out = 1.0;
    for (unsigned i = 2; i <= k; ++i) out *= i;
    return out;
}

// Best rational approximation p/q of x with q <= max_den via continued fractions.
std::optional<std::pair<std::int64_t, std::int64_t>> snap_rational(double x, double tol, std::int64_t max_den) {
    std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double r = x;
    for (int iter = 0; iter < 64; ++iter) {
        const double a = std::floor(r);
        const auto ai = static_cast<std::int64_t>(a);
        const std::int64_t p2 = ai * p1 + p0;
        const std::int64_t q2 = ai * q1 + q0;
        if (q2 > max_den) break;
        if (std::abs(static_cast<double>(p2) / static_cast<double>(q2) - x) <= tol) return std::pair{p2, q2};
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        const double frac = r - a;
        if (frac <= 0.0) break;
        r = 1.0 / frac;
    }
    return std::nullopt;
}

// Both pieces of E f^(k) for the block-centered laws.
std::pair<double, double> block_gammas(const NonlinearFn& f, unsigned k, const SbmSpec& spec, const MomentOptions& opt) {
    return {gamma_moment(f, k, spec.within, opt), gamma_moment(f, k, spec.across, opt)};
}

// lambda^k n^{(k-1)/2} / k!, the prefactor of H_k.
double spike_prefactor(const SpikeParams& sp, unsigned k) {
    const long double n = static_cast<long double>(sp.n);
    const long double lambda = static_cast<long double>(sp.lambda());
    return static_cast<double>(std::pow(lambda, static_cast<long double>(k)) *
                               std::pow(n, (static_cast<long double>(k) - 1.0L) / 2.0L) /
                               static_cast<long double>(factorial(k)));
}

// c^k n^{(alpha - 1/2) k} sqrt(n) / k!: the coefficient scale after normalizing
// x^{ok} x^{ok T} to a unit direction when ||x||_inf = 1/sqrt(n).
double aggregate_scale(const SpikeParams& sp, unsigned k) {
    const long double n = static_cast<long double>(sp.n);
    const long double c = static_cast<long double>(sp.c_lambda);
    const long double a = static_cast<long double>(sp.alpha);
    return static_cast<double>(std::pow(c, static_cast<long double>(k)) *
                               std::pow(n, (a - 0.5L) * static_cast<long double>(k) + 0.5L) /
                               static_cast<long double>(factorial(k)));
}

DirectionKind classify(const Vector& unit, const Vector& signal) {
    const auto n = unit.size();
    const double inv = 1.0 / std::sqrt(static_cast<double>(n));
    if ((unit.array() - inv).abs().maxCoeff() <= 1e-12 || (unit.array() + inv).abs().maxCoeff() <= 1e-12)
        return DirectionKind::ones;
    const double sn = signal.norm();
    if (sn > 0.0) {
        const Vector s = signal / sn;
        if ((unit - s).cwiseAbs().maxCoeff() <= 1e-12 || (unit + s).cwiseAbs().maxCoeff() <= 1e-12)
            return DirectionKind::signal;
    }
    return DirectionKind::hadamard;
}

void push_spike(std::vector<SpikeTerm>& out, unsigned k, double prefactor, double weight, const Vector& v,
                const Vector& signal) {
    const double norm = v.norm();
    SpikeTerm t;
    t.k = k;
    if (norm == 0.0) {
        t.direction = Vector::Zero(v.size());
        t.direction_kind = DirectionKind::hadamard;
        out.push_back(std::move(t));
        return;
    }
    t.coefficient = prefactor * weight * norm * norm;
    t.direction = v / norm;
    t.direction_kind = classify(t.direction, signal);
    out.push_back(std::move(t));
}

}  // namespace

EllResult ell_of_alpha(std::int64_t numerator, std::int64_t denominator) {
    if (denominator <= 0) throw ParameterError("ell_of_alpha: denominator must be positive");
    // 0 <= p/q < 1/2  <=>  0 <= p and 2p < q
    if (numerator < 0 || 2 * numerator >= denominator) throw ParameterError("ell_of_alpha: alpha must lie in [0, 0.5)");
    const std::int64_t top = 2 * numerator;
    const std::int64_t bottom = denominator - 2 * numerator;
    return EllResult{static_cast<unsigned>(top / bottom + 1), false};
}

EllResult ell_of_alpha(double alpha) {
    if (!(alpha >= 0.0 && alpha < 0.5)) throw ParameterError("ell_of_alpha: alpha must lie in [0, 0.5)");
    if (auto r = snap_rational(alpha, 1e-12, 1'000'000)) {
        if (2 * r->first < r->second) return ell_of_alpha(r->first, r->second);
    }
    const double ratio = 2.0 * alpha / (1.0 - 2.0 * alpha);
    return EllResult{static_cast<unsigned>(std::floor(ratio)) + 1, false};
}

DerivativeMatrix expected_derivative_matrix(const NonlinearFn& f, unsigned k, const Ensemble& ensemble,
                                            const MomentOptions& opt) {
    return std::visit(
        [&](const auto& e) -> DerivativeMatrix {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, WignerEnsemble>) {
                return {derivative_moment(f, k, e.noise, opt), 0.0};
            } else {
                const auto [g, gb] = block_gammas(f, k, e.spec, opt);
                return {(g + gb) / 2.0, (g - gb) / 2.0};
            }
        },
        ensemble);
}

std::string to_string(DirectionKind k) {
    switch (k) {
        case DirectionKind::ones: return "ones";
        case DirectionKind::signal: return "signal";
        case DirectionKind::hadamard: return "hadamard";
    }
    return "?";
}

Matrix materialize(const SpikeTerm& term) { return term.coefficient * term.direction * term.direction.transpose(); }

Matrix DecompositionReport::approximation() const {
    Matrix out = noise_part;
    for (const auto& s : spikes) out.noalias() += s.coefficient * s.direction * s.direction.transpose();
    return out;
}

DecompositionReport signal_plus_noise(const Matrix& w, const NonlinearFn& f, const SpikeParams& sp,
                                      const SignalVector& x, const Ensemble& ensemble, const MomentOptions& opt) {
    const auto n = w.rows();
    if (w.cols() != n || x.entries.size() != n || static_cast<std::size_t>(n) != sp.n)
        throw ParameterError("signal_plus_noise: dimension mismatch");
    Vector community;
    if (const auto* sbm = std::get_if<SbmEnsemble>(&ensemble)) {
        if (sbm->spec.n != static_cast<std::size_t>(n)) throw ParameterError("signal_plus_noise: SBM size mismatch");
        community = community_signal(sbm->spec.n, sbm->spec.beta).u.entries * std::sqrt(static_cast<double>(n));
    }

    DecompositionReport r;
    const auto ell = ell_of_alpha(sp.alpha);
    r.ell = ell.ell;
    r.gap = ell.gap;
    r.n = sp.n;
    r.alpha = sp.alpha;
    r.c_lambda = sp.c_lambda;
    r.noise_part = apply_elementwise(f, w);
    r.noise_part /= std::sqrt(static_cast<double>(n));

    for (unsigned k = 1; k <= r.ell; ++k) {
        const auto edm = expected_derivative_matrix(f, k, ensemble, opt);
        const double prefactor = spike_prefactor(sp, k);
        const Vector v = hadamard_power(x.entries, k);
        push_spike(r.spikes, k, prefactor, edm.ones, v, x.entries);
        if (community.size() > 0) push_spike(r.spikes, k, prefactor, edm.u, community.cwiseProduct(v), x.entries);
    }

    const Matrix y = assemble_observation(w, f, sp, x);
    r.remainder_norm = operator_norm(y - r.approximation());
    return r;
}

WignerCoefficients wigner_spike_coefficients(const NonlinearFn& f, const Distribution& d, const SpikeParams& sp,
                                             const MomentOptions& opt) {
    WignerCoefficients out;
    const unsigned ell = ell_of_alpha(sp.alpha).ell;
    for (unsigned k = 0; k <= ell; ++k) {
        WignerTerm t;
        t.k = k;
        t.coefficient = aggregate_scale(sp, k) * derivative_moment(f, k, d, opt);
        t.direction_kind = k % 2 == 0 ? DirectionKind::ones : DirectionKind::signal;
        (k % 2 == 0 ? out.kappa_ones : out.kappa_zeta) += t.coefficient;
        out.terms.push_back(t);
    }
    return out;
}

SbmCoefficients sbm_spike_coefficients(const NonlinearFn& f, const SbmSpec& spec, const SpikeParams& sp,
                                       const MomentOptions& opt) {
    SbmCoefficients out;
    const unsigned ell = ell_of_alpha(sp.alpha).ell;
    for (unsigned k = 0; k <= ell; ++k) {
        const auto [g, gb] = block_gammas(f, k, spec, opt);
        const double sign = k % 2 == 0 ? 1.0 : -1.0;
        const double scale = aggregate_scale(sp, k);
        SbmTerm t;
        t.k = k;
        t.ones_coefficient = scale * (g + sign * gb) / 2.0;
        t.u_coefficient = scale * (g - sign * gb) / 2.0;
        out.kappa_c += t.ones_coefficient;
        out.kappa_s += t.u_coefficient;
        out.terms.push_back(t);
    }
    return out;
}

nlohmann::json to_json(const DecompositionReport& r) {
    nlohmann::json spikes = nlohmann::json::array();
    for (const auto& s : r.spikes)
        spikes.push_back({{"k", s.k}, {"coefficient", s.coefficient}, {"direction_kind", to_string(s.direction_kind)}});
    return {{"ell", r.ell},
            {"gap", r.gap},
            {"n", r.n},
            {"alpha", r.alpha},
            {"c_lambda", r.c_lambda},
            {"remainder_norm", r.remainder_norm},
            {"spikes", std::move(spikes)}};
}

}  // namespace nlsrm
