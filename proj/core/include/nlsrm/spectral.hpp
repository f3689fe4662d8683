#pragma once

#include <utility>
#include <vector>

#include "nlsrm/matrix.hpp"

namespace nlsrm {

/// Eigenpairs sorted by descending eigenvalue. Column i of `vectors` pairs with values(i).
struct EigenPairs {
    Vector values;
    Matrix vectors;
    Vector residuals;  // ||M v - gamma v||_2 per pair

    Eigen::Index size() const noexcept { return values.size(); }
};

/// Relative asymmetry above which the symmetric routines refuse the input.
inline constexpr double kSymmetryTolerance = 1e-9;

/// Top-k eigenpairs by algebraic value. Each eigenvector is signed so that its
/// largest-magnitude entry is positive (lowest index wins ties).
EigenPairs sym_eig_top(const Matrix& m, Eigen::Index k);

/// Full decomposition, k = n.
EigenPairs sym_eig_all(const Matrix& m);

/// All eigenvalues, descending.
Vector sym_eigenvalues(const Matrix& m);

double operator_norm(const Matrix& m);

/// Number of LAPACK results in this process that failed validation and were
/// recomputed with the fallback solver.
unsigned long eigensolver_fallback_count() noexcept;

/// |<u,v>| / (||u|| ||v||).
double alignment(const Vector& u, const Vector& v);

struct HistogramBin {
    double center = 0.0;
    double density = 0.0;
};

/// Eigenvalue histogram on [lo, hi); hi itself falls in the last bin.
/// density = count / (n * width), so the densities integrate to the fraction inside.
std::vector<HistogramBin> esd_histogram(const Vector& eigenvalues, int bin_count, std::pair<double, double> range);
std::vector<HistogramBin> esd_histogram(const Matrix& m, int bin_count, std::pair<double, double> range);

}  // namespace nlsrm
