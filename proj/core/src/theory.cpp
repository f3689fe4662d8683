#include "nlsrm/theory.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>

#include <nlohmann/json.hpp>

#include "nlsrm/error.hpp"

namespace nlsrm {

namespace {

double factorial(unsigned k) {
    double out = 1.0;
    for (unsigned i = 2; i <= k; ++i) out *= i;
    return out;
}

// Reduced 2x2 variance profile.
struct Profile {
    double beta, s11, s12, s21, s22;

    Profile(double b, double sigma, double sigma_bar)
        : beta(b),
          s11(b * sigma * sigma),
          s12((1.0 - b) * sigma_bar * sigma_bar),
          s21(b * sigma_bar * sigma_bar),
          s22((1.0 - b) * sigma * sigma) {}

    template <class T>
    std::array<T, 2> residual(T z, T m1, T m2) const {
        return {z * m1 + m1 * (s11 * m1 + s12 * m2) + T(1), z * m2 + m2 * (s21 * m1 + s22 * m2) + T(1)};
    }

    // Jacobian of the residual in (m1, m2), row-major.
    template <class T>
    std::array<T, 4> jacobian(T z, T m1, T m2) const {
        return {z + 2.0 * s11 * m1 + s12 * m2, s12 * m1, s21 * m2, z + s21 * m1 + 2.0 * s22 * m2};
    }

    template <class T>
    T mbar(T m1, T m2) const {
        return beta * m1 + (1.0 - beta) * m2;
    }

    // Spectral radius of diag(m^2) S, the linearization of the fixed-point map.
    double stability(double m1, double m2) const {
        const double a = m1 * m1 * s11, b = m1 * m1 * s12, c = m2 * m2 * s21, d = m2 * m2 * s22;
        const double tr = a + d, det = a * d - b * c;
        return 0.5 * (tr + std::sqrt(std::max(0.0, tr * tr - 4.0 * det)));
    }
};

void validate_profile(double beta, double sigma, double sigma_bar) {
    if (!(beta > 0.0 && beta < 1.0)) throw ParameterError("QVE: beta must lie in (0,1)");
    if (!(sigma > 0.0) || !(sigma_bar > 0.0)) throw ParameterError("QVE: sigma and sigma_bar must be positive");
}

template <class T>
double max_abs(const std::array<T, 2>& r) {
    return std::max(std::abs(r[0]), std::abs(r[1]));
}

template <class T>
std::array<T, 2> solve2(const std::array<T, 4>& j, const std::array<T, 2>& rhs) {
    const T det = j[0] * j[3] - j[1] * j[2];
    return {(j[3] * rhs[0] - j[1] * rhs[1]) / det, (j[0] * rhs[1] - j[2] * rhs[0]) / det};
}

// Newton on the real axis from a nearby solution; fails rather than wander.
bool real_newton(const Profile& p, double z, double& m1, double& m2) {
    double a = m1, b = m2;
    for (int it = 0; it < 100; ++it) {
        const auto r = p.residual(z, a, b);
        if (max_abs(r) <= 1e-14) {
            if (!(a < 0.0 && b < 0.0)) return false;
            m1 = a;
            m2 = b;
            return true;
        }
        const auto j = p.jacobian(z, a, b);
        const double det = j[0] * j[3] - j[1] * j[2];
        if (det == 0.0 || !std::isfinite(det)) return false;
        const auto step = solve2(j, r);
        a -= step[0];
        b -= step[1];
        if (!std::isfinite(a) || !std::isfinite(b)) return false;
    }
    return false;
}

// Stable real solution at z, continued from (m1, m2) known at a larger z.
bool real_branch(const Profile& p, double z, double& m1, double& m2) {
    double a = m1, b = m2;
    if (!real_newton(p, z, a, b)) return false;
    if (p.stability(a, b) >= 1.0) return false;
    m1 = a;
    m2 = b;
    return true;
}

double mbar_derivative(const Profile& p, double z, double m1, double m2) {
    // d/dz of the residual is m_i, so J dm/dz = -m.
    const auto dm = solve2(p.jacobian(z, m1, m2), std::array<double, 2>{-m1, -m2});
    return p.mbar(dm[0], dm[1]);
}

void apply_critical(RegimePrediction& p, double kappa_abs, double kappa_critical, double closed_sigma) {
    if (std::abs(kappa_abs - kappa_critical) <= kThresholdDeadZone) {
        p.at_threshold = true;
        p.outlier_limit = 2.0 * closed_sigma;
        p.alignment_limit = 0.0;
    } else if (kappa_abs > kappa_critical) {
        p.outlier_limit = kappa_abs + closed_sigma * closed_sigma / kappa_abs;
        p.alignment_limit = std::sqrt(1.0 - closed_sigma * closed_sigma / (kappa_abs * kappa_abs));
    } else {
        p.outlier_limit = 2.0 * closed_sigma;
        p.alignment_limit = 0.0;
    }
}

// Position of alpha relative to (index - 1) / (2 index).
Regime classify(double alpha, unsigned index) {
    const double t = static_cast<double>(index - 1) / (2.0 * index);
    if (std::abs(alpha - t) <= 1e-12) return Regime::critical;
    return alpha < t ? Regime::subcritical : Regime::supercritical;
}

void fill_regime(RegimePrediction& p, double alpha, unsigned index) {
    p.index = index;
    const auto num = static_cast<std::int64_t>(index) - 1, den = 2 * static_cast<std::int64_t>(index);
    const auto g = std::max<std::int64_t>(1, std::gcd(num, den));
    p.threshold_exponent = Rational{num / g, den / g};
    p.regime = classify(alpha, index);
}

}  // namespace

Complex stieltjes_semicircle(Complex z, double sigma) {
    if (!(sigma > 0.0)) throw ParameterError("stieltjes_semicircle: sigma must be positive");
    if (z.imag() == 0.0 && std::abs(z.real()) <= 2.0 * sigma)
        throw DomainError("stieltjes_semicircle: z lies on the support [-2 sigma, 2 sigma]");
    const double s2 = sigma * sigma;
    const Complex root = std::sqrt(z * z - 4.0 * s2);
    // Roots (-z +- root) / (2 s2) multiply to 1/s2; take the large one without
    // cancellation and recover the small one from the product.
    const Complex plus = -z + root;
    const Complex minus = -z - root;
    const Complex big = (std::abs(plus) >= std::abs(minus) ? plus : minus) / (2.0 * s2);
    return 1.0 / (s2 * big);
}

BbpLimit bbp_prediction(double lambda, double sigma_w) {
    if (!(lambda > 0.0) || !(sigma_w > 0.0)) throw ParameterError("bbp_prediction: lambda and sigma_w must be positive");
    if (lambda <= sigma_w) return {2.0 * sigma_w, 0.0};
    return {lambda + sigma_w * sigma_w / lambda, 1.0 - sigma_w * sigma_w / (lambda * lambda)};
}

std::string to_string(Regime r) {
    switch (r) {
        case Regime::subcritical: return "subcritical";
        case Regime::critical: return "critical";
        case Regime::supercritical: return "supercritical";
        case Regime::sign_unrecoverable: return "sign-unrecoverable";
        case Regime::trivially_recoverable: return "trivially-recoverable";
    }
    return "?";
}

nlohmann::json to_json(const RegimePrediction& p) {
    nlohmann::json j;
    j["regime"] = to_string(p.regime);
    if (p.threshold_exponent) {
        j["threshold_exponent"] = {{"num", p.threshold_exponent->num}, {"den", p.threshold_exponent->den}};
    } else {
        j["threshold_exponent"] = nullptr;
    }
    j["index"] = p.index ? nlohmann::json(*p.index) : nlohmann::json("inf");
    j["kappa"] = p.kappa;
    j["sigma_f"] = p.sigma_f;
    j["outlier_limit"] = p.outlier_limit ? nlohmann::json(*p.outlier_limit) : nlohmann::json("diverges");
    j["alignment_limit"] = p.alignment_limit;
    j["which_eigenpair"] = p.which_eigenpair;
    j["at_threshold"] = p.at_threshold;
    return j;
}

RegimePrediction signed_recovery_prediction(const NonlinearFn& f, const Distribution& d, double c_lambda,
                                            double alpha, const IndexOptions& opt) {
    if (!(alpha >= 0.0 && alpha < 0.5)) throw ParameterError("signed_recovery_prediction: alpha must lie in [0, 0.5)");
    RegimePrediction p;
    p.sigma_f = sd_f(f, d, opt.moments);
    const auto [ie, io] = even_odd_index(f, d, opt);
    if (!io) {
        p.regime = Regime::sign_unrecoverable;
        p.outlier_limit = 2.0 * p.sigma_f;
        return p;
    }
    p.which_eigenpair = (ie && *ie < *io) ? 2 : 1;
    p.kappa = std::pow(c_lambda, *io) / factorial(*io) * derivative_moment(f, *io, d, opt.moments);
    fill_regime(p, alpha, *io);
    switch (p.regime) {
        case Regime::subcritical:
            p.outlier_limit = 2.0 * p.sigma_f;
            break;
        case Regime::supercritical:
            p.outlier_limit.reset();
            p.alignment_limit = 1.0;
            break;
        default:
            // A negative kappa mirrors the outlier below the bulk; magnitudes are reported.
            apply_critical(p, std::abs(p.kappa), p.sigma_f, p.sigma_f);
    }
    return p;
}

std::pair<double, double> qve_residuals(double beta, double sigma, double sigma_bar, Complex z, Complex m1,
                                        Complex m2) {
    const Profile p(beta, sigma, sigma_bar);
    const auto r = p.residual(z, m1, m2);
    return {std::abs(r[0]), std::abs(r[1])};
}

QveSolution solve_qve_two_block(double beta, double sigma, double sigma_bar, Complex z, const QveOptions& opt,
                                std::optional<std::pair<Complex, Complex>> guess) {
    validate_profile(beta, sigma, sigma_bar);
    if (!(z.imag() > 0.0)) throw DomainError("solve_qve_two_block: imag(z) must be positive");
    if (!(opt.damping > 0.0 && opt.damping <= 1.0)) throw ParameterError("solve_qve_two_block: damping in (0,1]");
    const Profile p(beta, sigma, sigma_bar);

    Complex m1 = -1.0 / z, m2 = m1;
    if (guess && guess->first.imag() > 0.0 && guess->second.imag() > 0.0) {
        m1 = guess->first;
        m2 = guess->second;
    }
    auto res = max_abs(p.residual(z, m1, m2));
    unsigned it = 0;
    // Damped fixed point: each iterate stays in the upper half-plane because the map
    // sends it to itself and the damping is a convex combination.
    auto fixed_point_step = [&] {
        const Complex n1 = -1.0 / (z + p.s11 * m1 + p.s12 * m2);
        const Complex n2 = -1.0 / (z + p.s21 * m1 + p.s22 * m2);
        m1 = (1.0 - opt.damping) * m1 + opt.damping * n1;
        m2 = (1.0 - opt.damping) * m2 + opt.damping * n2;
        res = max_abs(p.residual(z, m1, m2));
    };
    for (; it < opt.max_iter && res > 1e-3 && it < 200; ++it) fixed_point_step();

    // Newton with backtracking; a rejected step falls back to the damped map. Near
    // the real axis the fixed-point contraction rate tends to 1 inside the bulk.
    for (; it < opt.max_iter; ++it) {
        if (res <= opt.tol) return QveSolution{z, m1, m2, it, res};
        const auto r = p.residual(z, m1, m2);
        const auto step = solve2(p.jacobian(z, m1, m2), r);
        bool accepted = false;
        if (std::isfinite(step[0].real()) && std::isfinite(step[1].real())) {
            double t = 1.0;
            for (int half = 0; half < 40; ++half, t *= 0.5) {
                const Complex a = m1 - t * step[0];
                const Complex b = m2 - t * step[1];
                if (!(a.imag() > 0.0 && b.imag() > 0.0)) continue;
                const double trial = max_abs(p.residual(z, a, b));
                if (trial < res) {
                    m1 = a;
                    m2 = b;
                    res = trial;
                    accepted = true;
                    break;
                }
            }
        }
        if (!accepted) fixed_point_step();
    }
    if (res <= opt.tol) return QveSolution{z, m1, m2, it, res};
    throw ConvergenceError("solve_qve_two_block: no convergence at z = (" + std::to_string(z.real()) + ", " +
                               std::to_string(z.imag()) + ")",
                           res);
}

std::vector<DensityPoint> spectral_density_from_qve(double beta, double sigma, double sigma_bar,
                                                    const std::vector<double>& tau_grid, double eta,
                                                    const QveOptions& opt) {
    if (!(eta > 0.0)) throw ParameterError("spectral_density_from_qve: eta must be positive");
    validate_profile(beta, sigma, sigma_bar);
    const double fine = eta / 10.0;
    std::vector<DensityPoint> out;
    out.reserve(tau_grid.size());
    std::optional<std::pair<Complex, Complex>> warm;
    for (const double tau : tau_grid) {
        const auto coarse_sol = solve_qve_two_block(beta, sigma, sigma_bar, Complex(tau, eta), opt, warm);
        const auto fine_sol = solve_qve_two_block(beta, sigma, sigma_bar, Complex(tau, fine), opt,
                                                  std::pair{coarse_sol.m1, coarse_sol.m2});
        warm = std::pair{coarse_sol.m1, coarse_sol.m2};
        auto density = [&](const QveSolution& s) {
            return (beta * s.m1.imag() + (1.0 - beta) * s.m2.imag()) / std::numbers::pi;
        };
        const double r_coarse = density(coarse_sol);
        const double r_fine = density(fine_sol);
        // rho(eta) is linear in eta to first order: extrapolate the pair to eta = 0.
        const double extrapolated = r_fine + (r_fine - r_coarse) * fine / (eta - fine);
        out.push_back({tau, std::max(0.0, extrapolated)});
    }
    return out;
}

QveEdge qve_right_edge(double beta, double sigma, double sigma_bar) {
    validate_profile(beta, sigma, sigma_bar);
    const Profile p(beta, sigma, sigma_bar);
    const double row = std::max(p.s11 + p.s12, p.s21 + p.s22);
    double hi = 2.0 * std::sqrt(row) + 1.0;
    double m1 = -1.0 / hi, m2 = m1;
    if (!real_branch(p, hi, m1, m2)) throw ConvergenceError("qve_right_edge: no real solution above the bulk", 0.0);

    // Walk down in coarse steps so Newton always starts close to the stable branch,
    // then bisect the last bracket.
    const double step = hi / 400.0;
    double lo = 0.0;
    for (double z = hi - step; z > 0.0; z -= step) {
        double a = m1, b = m2;
        if (!real_branch(p, z, a, b)) {
            lo = z;
            break;
        }
        hi = z;
        m1 = a;
        m2 = b;
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        double a = m1, b = m2;
        if (real_branch(p, mid, a, b)) {
            hi = mid;
            m1 = a;
            m2 = b;
        } else {
            lo = mid;
        }
    }
    return {hi, p.mbar(m1, m2)};
}

QveOutlier qve_outlier(double beta, double sigma, double sigma_bar, double kappa) {
    validate_profile(beta, sigma, sigma_bar);
    const Profile p(beta, sigma, sigma_bar);
    const auto edge = qve_right_edge(beta, sigma, sigma_bar);
    QveOutlier out;
    out.kappa_critical = -1.0 / edge.mbar_at_edge;
    if (!(kappa > out.kappa_critical)) return out;

    // mbar increases from mbar(edge) to 0 on (edge, inf); bracket -1/kappa.
    const double target = -1.0 / kappa;
    double hi = std::max(2.0 * edge.edge, edge.edge + 2.0 * kappa);
    double m1 = -1.0 / hi, m2 = m1;
    while (true) {
        if (!real_branch(p, hi, m1, m2)) throw ConvergenceError("qve_outlier: lost the real branch", 0.0);
        if (p.mbar(m1, m2) > target) break;
        hi *= 2.0;
        m1 = m2 = -1.0 / hi;
    }
    double lo = edge.edge;
    // Continue downward from hi; intermediate points keep Newton on the stable branch.
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        double a = m1, b = m2;
        if (!real_branch(p, mid, a, b) || p.mbar(a, b) < target) {
            lo = mid;
        } else {
            hi = mid;
            m1 = a;
            m2 = b;
        }
    }
    out.exists = true;
    out.location = hi;
    const double mb = p.mbar(m1, m2);
    out.alignment_sq = std::clamp(mb * mb / mbar_derivative(p, hi, m1, m2), 0.0, 1.0);
    return out;
}

RegimePrediction sbm_recovery_prediction(const NonlinearFn& f, const Distribution& d, const Distribution& d_bar,
                                         double c_lambda, double alpha, double beta, const IndexOptions& opt) {
    if (!(alpha >= 0.0 && alpha < 0.5)) throw ParameterError("sbm_recovery_prediction: alpha must lie in [0, 0.5)");
    if (!(beta > 0.0 && beta < 1.0)) throw ParameterError("sbm_recovery_prediction: beta must lie in (0,1)");
    const Distribution dc = mean_and_center(d).second;
    const Distribution dbc = mean_and_center(d_bar).second;
    const double sigma = sd_f(f, dc, opt.moments);
    const double sigma_bar = sd_f(f, dbc, opt.moments);

    RegimePrediction p;
    p.sigma_f = std::sqrt((sigma * sigma + sigma_bar * sigma_bar) / 2.0);
    const auto [js, jc] = signal_constant_index(f, d, d_bar, opt);
    if (!js) {
        p.regime = Regime::sign_unrecoverable;
        p.outlier_limit = 2.0 * p.sigma_f;
        return p;
    }
    p.index = *js;
    if (*js == 0) {
        p.regime = Regime::trivially_recoverable;
        p.alignment_limit = 1.0;
        return p;
    }
    p.which_eigenpair = (jc && *js > *jc) ? 2 : 1;
    const double sign = (*js % 2 == 0) ? -1.0 : 1.0;  // (-1)^(J_s + 1)
    p.kappa = std::pow(c_lambda, *js) *
              (gamma_moment(f, *js, d, opt.moments) + sign * gamma_moment(f, *js, d_bar, opt.moments)) /
              (2.0 * factorial(*js));
    fill_regime(p, alpha, *js);
    switch (p.regime) {
        case Regime::subcritical:
            p.outlier_limit = 2.0 * p.sigma_f;
            break;
        case Regime::supercritical:
            p.outlier_limit.reset();
            p.alignment_limit = 1.0;
            break;
        default: {
            const double k_abs = std::abs(p.kappa);
            if (std::abs(beta - 0.5) <= 1e-12) {
                apply_critical(p, k_abs, p.sigma_f, p.sigma_f);
                break;
            }
            const auto outlier = qve_outlier(beta, sigma, sigma_bar, k_abs);
            const auto edge = qve_right_edge(beta, sigma, sigma_bar);
            if (std::abs(k_abs - outlier.kappa_critical) <= kThresholdDeadZone) {
                p.at_threshold = true;
                p.outlier_limit = edge.edge;
            } else if (outlier.exists) {
                p.outlier_limit = outlier.location;
                p.alignment_limit = std::sqrt(outlier.alignment_sq);
            } else {
                p.outlier_limit = edge.edge;
            }
        }
    }
    return p;
}

}  // namespace nlsrm
