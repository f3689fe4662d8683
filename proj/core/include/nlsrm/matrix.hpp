#pragma once

#include <filesystem>

#include <Eigen/Dense>

namespace nlsrm {

// Dense storage. Every matrix the library produces is symmetric, so row- and
// column-major layouts coincide.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Largest |M_ij - M_ji| relative to max |M_ij| (0 for the zero matrix).
double relative_asymmetry(const Matrix& m);

/// Binary format: 8-byte magic "NLSRM1\0\0", n as little-endian uint64, then
/// n*n little-endian float64 values in row-major order.
void write_matrix_binary(const std::filesystem::path& path, const Matrix& m);
Matrix read_matrix_binary(const std::filesystem::path& path);

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);

}  // namespace nlsrm
