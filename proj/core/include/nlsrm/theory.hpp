#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "nlsrm/distributions.hpp"
#include "nlsrm/nonlinearity.hpp"

namespace nlsrm {

using Complex = std::complex<double>;

/// Stieltjes transform of the semicircle law on [-2 sigma, 2 sigma]: the root of
/// sigma^2 m^2 + z m + 1 = 0 with m(z) ~ -1/z at infinity.
Complex stieltjes_semicircle(Complex z, double sigma);

struct BbpLimit {
    double eigenvalue = 0.0;
    double alignment_sq = 0.0;
};

/// Rank-one spike of strength lambda in Wigner noise of scale sigma_w.
BbpLimit bbp_prediction(double lambda, double sigma_w);

enum class Regime { subcritical, critical, supercritical, sign_unrecoverable, trivially_recoverable };

std::string to_string(Regime r);

struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

struct RegimePrediction {
    Regime regime = Regime::subcritical;
    std::optional<Rational> threshold_exponent;
    std::optional<unsigned> index;  // I_o or J_s
    double kappa = 0.0;
    double sigma_f = 0.0;
    std::optional<double> outlier_limit;  // nullopt: the outlier diverges
    double alignment_limit = 0.0;         // |<u, signal>| / (||u|| ||signal||)
    unsigned which_eigenpair = 1;
    bool at_threshold = false;  // |kappa| within 1e-9 of sigma_f; the theorems say nothing there
};

nlohmann::json to_json(const RegimePrediction& p);

/// Width of the band around |kappa| = sigma_f reported as at-threshold.
inline constexpr double kThresholdDeadZone = 1e-9;

/// Signed recovery from f(W + lambda sqrt(n) x x^T)/sqrt(n) with lambda = c n^alpha.
RegimePrediction signed_recovery_prediction(const NonlinearFn& f, const Distribution& d, double c_lambda,
                                            double alpha, const IndexOptions& opt = {});

struct QveOptions {
    unsigned max_iter = 20000;
    double tol = 1e-13;
    double damping = 0.5;
};

struct QveSolution {
    Complex z;
    Complex m1;
    Complex m2;
    unsigned iterations = 0;
    double residual = 0.0;
};

/// Two-block quadratic vector equation -1/m_i = z + sum_j S_ij m_j with
/// S = [[beta s^2, (1-beta) sb^2], [beta sb^2, (1-beta) s^2]].
/// `guess` seeds the iteration (e.g. the solution at a neighbouring grid point).
QveSolution solve_qve_two_block(double beta, double sigma, double sigma_bar, Complex z, const QveOptions& opt = {},
                                std::optional<std::pair<Complex, Complex>> guess = std::nullopt);

/// Residuals |z m_i + m_i (S m)_i + 1|, evaluated independently of the solver.
std::pair<double, double> qve_residuals(double beta, double sigma, double sigma_bar, Complex z, Complex m1, Complex m2);

struct DensityPoint {
    double tau = 0.0;
    double rho = 0.0;
};

/// rho(tau) from the QVE at tau + i eta and tau + i eta/10, extrapolated linearly to eta = 0.
std::vector<DensityPoint> spectral_density_from_qve(double beta, double sigma, double sigma_bar,
                                                    const std::vector<double>& tau_grid, double eta = 1e-3,
                                                    const QveOptions& opt = {});

/// Right edge of the two-block spectrum and the averaged transform there.
struct QveEdge {
    double edge = 0.0;
    double mbar_at_edge = 0.0;
};

QveEdge qve_right_edge(double beta, double sigma, double sigma_bar);

/// Outlier of a rank-one spike kappa u u^T/n (u = +-1 community vector) in the
/// two-block noise: solves beta m1 + (1-beta) m2 = -1/kappa above the edge.
struct QveOutlier {
    bool exists = false;
    double location = 0.0;
    double alignment_sq = 0.0;  // mbar^2 / mbar'
    double kappa_critical = 0.0;
};

QveOutlier qve_outlier(double beta, double sigma, double sigma_bar, double kappa);

/// Community recovery for the transformed two-block model with lambda = c n^alpha.
/// beta = 1/2 uses the closed form; other beta go through the QVE.
RegimePrediction sbm_recovery_prediction(const NonlinearFn& f, const Distribution& d, const Distribution& d_bar,
                                         double c_lambda, double alpha, double beta = 0.5,
                                         const IndexOptions& opt = {});

}  // namespace nlsrm
