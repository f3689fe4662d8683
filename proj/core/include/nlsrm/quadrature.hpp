#pragma once

#include <cstddef>
#include <vector>

namespace nlsrm {

/// Gauss-Hermite rule for the standard normal density: sum_i w_i g(x_i)
/// approximates E g(Z), Z ~ N(0,1), exactly for polynomials of degree < 2n.
struct GaussHermiteRule {
    std::vector<double> nodes;
    std::vector<double> weights;  // sum to 1
};

/// Rules are computed once per node count and cached.
const GaussHermiteRule& gauss_hermite(std::size_t nodes);

template <class F>
double expect_standard_normal(F&& g, std::size_t nodes = 64) {
    const auto& rule = gauss_hermite(nodes);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * g(rule.nodes[i]);
    return sum;
}

}  // namespace nlsrm
