#include "nlsrm/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "nlsrm/error.hpp"

namespace nlsrm {

namespace {

// Golub-Welsch on the Jacobi matrix of the probabilists' Hermite recurrence
// (zero diagonal, off-diagonal sqrt(k)), followed by Newton polishing of each node
// and weights 1 / sum_k p_k(x)^2 from the orthonormal polynomials p_k = He_k / sqrt(k!).
GaussHermiteRule build_rule(std::size_t n) {
    const auto size = static_cast<Eigen::Index>(n);
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(size);
    Eigen::VectorXd off(std::max<Eigen::Index>(size - 1, 0));
    for (Eigen::Index k = 0; k + 1 < size; ++k) off(k) = std::sqrt(static_cast<double>(k + 1));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);

    // p_{n-1}(x), p_n(x) by the orthonormal recurrence, plus sum_{k<n} p_k^2.
    auto evaluate = [n](double x, double& p_prev, double& p_last, double& sum_sq) {
        double prev = 0.0, cur = 1.0;
        sum_sq = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            sum_sq += cur * cur;
            const double next = (x * cur - std::sqrt(static_cast<double>(k)) * prev) / std::sqrt(static_cast<double>(k + 1));
            prev = cur;
            cur = next;
        }
        p_prev = prev;
        p_last = cur;
    };

    GaussHermiteRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double x = solver.eigenvalues()(static_cast<Eigen::Index>(i));
        double p_prev = 0.0, p_last = 0.0, sum_sq = 0.0;
        for (int it = 0; it < 3; ++it) {
            evaluate(x, p_prev, p_last, sum_sq);
            const double slope = std::sqrt(static_cast<double>(n)) * p_prev;  // p_n' = sqrt(n) p_{n-1}
            if (slope == 0.0 || !std::isfinite(slope)) break;
            x -= p_last / slope;
        }
        evaluate(x, p_prev, p_last, sum_sq);
        rule.nodes[i] = x;
        rule.weights[i] = std::isfinite(sum_sq) ? 1.0 / sum_sq : 0.0;
    }
    // Enforce the exact symmetry of the rule.
    for (std::size_t i = 0; i < n / 2; ++i) {
        const std::size_t j = n - 1 - i;
        const double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
        const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
        rule.nodes[i] = -x;
        rule.nodes[j] = x;
        rule.weights[i] = rule.weights[j] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

}  // namespace

const GaussHermiteRule& gauss_hermite(std::size_t nodes) {
    if (nodes == 0 || nodes > 512) throw ParameterError("gauss_hermite: node count must be in [1, 512]");
    static std::mutex mu;
    static std::map<std::size_t, GaussHermiteRule> cache;
    std::lock_guard lock(mu);
    auto it = cache.find(nodes);
    if (it == cache.end()) it = cache.emplace(nodes, build_rule(nodes)).first;
    return it->second;
}

}  // namespace nlsrm
