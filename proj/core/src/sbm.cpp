#include "nlsrm/sbm.hpp"

#include <algorithm>
#include <cmath>

#include "nlsrm/error.hpp"
#include "nlsrm/spectral.hpp"

namespace nlsrm {

namespace {

std::vector<int> signs(const Eigen::Ref<const Vector>& v) {
    std::vector<int> out(static_cast<std::size_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) out[static_cast<std::size_t>(i)] = v(i) < 0.0 ? -1 : 1;
    return out;
}

}  // namespace

Matrix transform_and_embed(const Matrix& a, const NonlinearFn& f) {
    if (a.rows() != a.cols()) throw ParameterError("transform_and_embed: matrix must be square");
    Matrix y = apply_elementwise(f, a);
    y /= std::sqrt(static_cast<double>(a.rows()));
    return y;
}

std::vector<int> recover_communities(const Matrix& y, int which) {
    if (y.rows() < 2) throw ParameterError("recover_communities: dimension must be >= 2");
    if (which < 1 || which > 2) throw ParameterError("recover_communities: which must be 1 or 2");
    const auto pairs = sym_eig_top(y, which);
    return signs(pairs.vectors.col(which - 1));
}

double overlap(const std::vector<int>& labels, const std::vector<int>& truth) {
    if (labels.size() != truth.size()) throw ParameterError("overlap: length mismatch");
    if (labels.empty()) throw ParameterError("overlap: empty labels");
    long long sum = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) sum += static_cast<long long>(labels[i]) * truth[i];
    return static_cast<double>(std::llabs(sum)) / static_cast<double>(labels.size());
}

SbmTrialResult run_sbm_trial(const SbmSpec& spec, const NonlinearFn& f, std::uint64_t seed, int which) {
    if (which < 1 || which > 2) throw ParameterError("run_sbm_trial: which must be 1 or 2");
    if (spec.n < 4) throw ParameterError("run_sbm_trial: n must be >= 4");
    const Matrix a = sample_sbm_adjacency(spec, seed);
    const Matrix y = transform_and_embed(a, f);
    const auto pairs = sym_eig_top(y, 4);
    const auto truth = community_signal(spec.n, spec.beta);

    SbmTrialResult r;
    r.n = spec.n;
    r.beta = spec.beta;
    r.delta = mean(spec.within) - mean(spec.across);
    r.seed = seed;
    r.top_eigenvalues.assign(pairs.values.data(), pairs.values.data() + pairs.values.size());
    r.overlap_top = overlap(signs(pairs.vectors.col(0)), truth.labels);
    r.overlap_second = overlap(signs(pairs.vectors.col(1)), truth.labels);
    r.alignment_top = alignment(pairs.vectors.col(0), truth.u.entries);
    r.alignment_second = alignment(pairs.vectors.col(1), truth.u.entries);
    r.labels_recovered_from = which;
    return r;
}

}  // namespace nlsrm
