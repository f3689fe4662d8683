#pragma once

#include <cstdint>
#include <vector>

#include "nlsrm/matrix.hpp"
#include "nlsrm/matrixgen.hpp"
#include "nlsrm/nonlinearity.hpp"

namespace nlsrm {

/// f(A) / sqrt(n), element-wise.
Matrix transform_and_embed(const Matrix& a, const NonlinearFn& f);

/// Signs of the `which`-th top eigenvector (1-based); zero entries map to +1.
std::vector<int> recover_communities(const Matrix& y, int which);

/// |sum labels_i truth_i| / n.
double overlap(const std::vector<int>& labels, const std::vector<int>& truth);

struct SbmTrialResult {
    std::size_t n = 0;
    double beta = 0.5;
    double delta = 0.0;  // mean(within) - mean(across)
    std::uint64_t seed = 0;
    std::vector<double> top_eigenvalues;
    double overlap_top = 0.0;
    double overlap_second = 0.0;
    double alignment_top = 0.0;     // |<u_1, u>| / (||u_1|| ||u||)
    double alignment_second = 0.0;  // same for u_2
    int labels_recovered_from = 1;
};

/// Sample, transform, take the top four eigenpairs and score both leading
/// eigenvectors. `which` selects the eigenvector reported in labels_recovered_from.
SbmTrialResult run_sbm_trial(const SbmSpec& spec, const NonlinearFn& f, std::uint64_t seed, int which = 2);

}  // namespace nlsrm
