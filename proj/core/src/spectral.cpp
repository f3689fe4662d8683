#include "nlsrm/spectral.hpp"

#include <lapacke.h>

#include <Eigen/Eigenvalues>

#include <atomic>
#include <cmath>
#include <mutex>
#include <string>

#include "nlsrm/error.hpp"

extern "C" void openblas_set_num_threads(int);

namespace nlsrm {

namespace {

// Multithreaded BLAS reductions change rounding with the thread count; pin to one
// so results do not depend on the machine.
void pin_blas_threads() {
    static std::once_flag once;
    std::call_once(once, [] { openblas_set_num_threads(1); });
}

void require_symmetric(const Matrix& m, const char* who) {
    if (m.rows() != m.cols()) throw ContractError(std::string(who) + ": matrix is not square");
    const double asym = relative_asymmetry(m);
    if (asym > kSymmetryTolerance)
        throw ContractError(std::string(who) + ": matrix is not symmetric (relative asymmetry " +
                            std::to_string(asym) + ")");
}

void fix_sign(Eigen::Ref<Vector> v) {
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < v.size(); ++i)
        if (std::abs(v(i)) > std::abs(v(best))) best = i;
    if (v(best) < 0.0) v = -v;
}

std::atomic<unsigned long> fallback_count{0};

// Some OpenBLAS kernels return wrong results on some CPUs (0.3.20 with AVX-512 is one).
// Every LAPACK answer is checked and recomputed with Eigen's tridiagonal QL when it fails.
bool pairs_valid(const Matrix& m, const Vector& w, const Matrix& z, const Vector& residuals) {
    const double scale = std::max(1.0, m.norm());
    if (!w.allFinite() || !z.allFinite()) return false;
    if (residuals.size() > 0 && residuals.maxCoeff() > 1e-9 * scale) return false;
    const Matrix gram = z.transpose() * z;
    return (gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() <= 1e-9;
}

// Trace and Frobenius norm are the first two power sums of the spectrum.
bool spectrum_valid(const Matrix& m, const Vector& w) {
    if (!w.allFinite()) return false;
    const double fro2 = m.squaredNorm();
    const double scale = std::max(1.0, fro2);
    const double n = static_cast<double>(m.rows());
    return std::abs(w.sum() - m.trace()) <= 1e-10 * n * std::sqrt(scale) &&
           std::abs(w.squaredNorm() - fro2) <= 1e-10 * n * scale;
}

EigenPairs finish(const Matrix& m, Vector values, Matrix vectors) {
    EigenPairs out;
    out.values = std::move(values);
    out.vectors = std::move(vectors);
    out.residuals.resize(out.values.size());
    for (Eigen::Index j = 0; j < out.values.size(); ++j) {
        fix_sign(out.vectors.col(j));
        out.residuals(j) = (m * out.vectors.col(j) - out.values(j) * out.vectors.col(j)).norm();
    }
    return out;
}

EigenPairs solve_fallback(const Matrix& m, Eigen::Index k) {
    ++fallback_count;
    const Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    if (es.info() != Eigen::Success) throw ConvergenceError("symmetric eigensolver did not converge", 0.0);
    return finish(m, es.eigenvalues().tail(k).reverse(), es.eigenvectors().rightCols(k).rowwise().reverse());
}

// Top-k eigenpairs from dsyevr (indices n-k+1..n), descending.
EigenPairs solve_top(const Matrix& m, Eigen::Index k) {
    pin_blas_threads();
    const auto n = static_cast<lapack_int>(m.rows());
    const auto il = static_cast<lapack_int>(m.rows() - k + 1);
    Matrix a = m;
    Vector w(n);
    Matrix z(n, k);
    std::vector<lapack_int> support(2 * static_cast<std::size_t>(n));
    lapack_int found = 0;
    const lapack_int info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'U', n, a.data(), n, 0.0, 0.0, il, n, 0.0,
                                           &found, w.data(), z.data(), n, support.data());
    if (info != 0 || found != static_cast<lapack_int>(k)) return solve_fallback(m, k);
    auto out = finish(m, w.head(found).reverse(), z.leftCols(found).rowwise().reverse());
    if (!pairs_valid(m, out.values, out.vectors, out.residuals)) return solve_fallback(m, k);
    return out;
}

}  // namespace

unsigned long eigensolver_fallback_count() noexcept { return fallback_count.load(); }

EigenPairs sym_eig_top(const Matrix& m, Eigen::Index k) {
    require_symmetric(m, "sym_eig_top");
    const auto n = m.rows();
    if (k < 1 || k > n) throw ParameterError("sym_eig_top: k must lie in [1, dim]");
    return solve_top(m, k);
}

EigenPairs sym_eig_all(const Matrix& m) { return sym_eig_top(m, m.rows()); }

Vector sym_eigenvalues(const Matrix& m) {
    require_symmetric(m, "sym_eigenvalues");
    pin_blas_threads();
    const auto n = static_cast<lapack_int>(m.rows());
    if (n == 0) return Vector();
    Matrix a = m;
    Vector w(n);
    const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'U', n, a.data(), n, w.data());
    if (info == 0 && spectrum_valid(m, w)) return w.reverse();
    ++fallback_count;
    const Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw ConvergenceError("symmetric eigensolver did not converge", 0.0);
    return es.eigenvalues().reverse();
}

double operator_norm(const Matrix& m) {
    const Vector w = sym_eigenvalues(m);
    if (w.size() == 0) return 0.0;
    return std::max(std::abs(w(0)), std::abs(w(w.size() - 1)));
}

double alignment(const Vector& u, const Vector& v) {
    if (u.size() != v.size()) throw ParameterError("alignment: length mismatch");
    const double nu = u.norm();
    const double nv = v.norm();
    if (nu == 0.0 || nv == 0.0) throw ParameterError("alignment: zero vector");
    return std::min(1.0, std::abs(u.dot(v)) / (nu * nv));
}

std::vector<HistogramBin> esd_histogram(const Vector& eigenvalues, int bin_count, std::pair<double, double> range) {
    const auto [lo, hi] = range;
    if (bin_count < 1) throw ParameterError("esd_histogram: bin_count must be >= 1");
    if (!(lo < hi)) throw ParameterError("esd_histogram: empty range");
    const double width = (hi - lo) / bin_count;
    std::vector<std::size_t> counts(static_cast<std::size_t>(bin_count), 0);
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
        const double e = eigenvalues(i);
        if (e < lo || e > hi) continue;
        auto b = static_cast<long>(std::floor((e - lo) / width));
        b = std::clamp(b, 0L, static_cast<long>(bin_count) - 1);
        ++counts[static_cast<std::size_t>(b)];
    }
    const double total = static_cast<double>(eigenvalues.size());
    std::vector<HistogramBin> out(static_cast<std::size_t>(bin_count));
    for (int b = 0; b < bin_count; ++b) {
        out[b].center = lo + (b + 0.5) * width;
        out[b].density = total > 0 ? static_cast<double>(counts[b]) / (total * width) : 0.0;
    }
    return out;
}

std::vector<HistogramBin> esd_histogram(const Matrix& m, int bin_count, std::pair<double, double> range) {
    return esd_histogram(sym_eigenvalues(m), bin_count, range);
}

}  // namespace nlsrm
