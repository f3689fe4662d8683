#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "nlsrm/distributions.hpp"
#include "nlsrm/matrix.hpp"

namespace nlsrm {

enum class NamedTag { abs, tanh, relu };

std::string to_string(NamedTag tag);
NamedTag named_tag_from_string(const std::string& s);

/// Element-wise scalar function with exact derivatives.
///
/// Polynomials are held in the monomial basis (ascending degree, degree <= 32).
/// Named functions carry their derivative order; tanh derivatives are stored as
/// a polynomial in t = tanh(x), since d/dx P(t) = P'(t) (1 - t^2). abs and relu
/// support orders 0 and 1, with the derivative at 0 defined as 0.
class NonlinearFn {
public:
    struct Polynomial {
        std::vector<double> coeffs;
    };
    struct Named {
        NamedTag tag;
        unsigned order = 0;
        std::vector<double> tanh_poly;  // tanh only
    };
    using Repr = std::variant<Polynomial, Named>;

    static constexpr unsigned max_degree = 32;

    static NonlinearFn polynomial(std::vector<double> coeffs);
    static NonlinearFn named(NamedTag tag);
    static NonlinearFn identity() { return polynomial({0.0, 1.0}); }

    /// Sum_k a_k He_k(x) in probabilists' Hermite polynomials.
    static NonlinearFn hermite_combination(const std::vector<double>& hermite_coeffs);

    const Repr& repr() const noexcept { return repr_; }
    bool is_polynomial() const noexcept { return std::holds_alternative<Polynomial>(repr_); }

    /// Degree for polynomials (-1 for the zero polynomial); nullopt for named functions.
    std::optional<int> degree() const;

    /// Largest derivative order that derivative() accepts, nullopt if unbounded.
    std::optional<unsigned> max_derivative_order() const;

    double operator()(double x) const;

    std::string describe() const;

    friend bool operator==(const NonlinearFn& a, const NonlinearFn& b);

private:
    explicit NonlinearFn(Repr r) : repr_(std::move(r)) {}
    Repr repr_;

    friend NonlinearFn derivative(const NonlinearFn& f, unsigned k);
    friend NonlinearFn multiply(const NonlinearFn& a, const NonlinearFn& b);
};

NonlinearFn derivative(const NonlinearFn& f, unsigned k);

/// Product of two polynomials (used for E f(Z)^2).
NonlinearFn multiply(const NonlinearFn& a, const NonlinearFn& b);

Matrix apply_elementwise(const NonlinearFn& f, const Matrix& m);

enum class MomentMethod { closed_form, gauss_hermite, two_point, monte_carlo };

std::string to_string(MomentMethod m);

struct MomentOptions {
    std::size_t hermite_nodes = 64;
    std::size_t mc_samples = 1'000'000;
    std::uint64_t mc_seed = 0x5eed;
    bool force_monte_carlo = false;
};

/// E g(Z) with its provenance; std_error is 0 on exact paths.
struct Expectation {
    double value = 0.0;
    double std_error = 0.0;
    MomentMethod method = MomentMethod::closed_form;
};

Expectation expectation(const NonlinearFn& g, const Distribution& d, const MomentOptions& opt = {});

/// mu_{f^(k)} = E f^(k)(Z), Z ~ d.
Expectation derivative_moment_detail(const NonlinearFn& f, unsigned k, const Distribution& d,
                                     const MomentOptions& opt = {});
double derivative_moment(const NonlinearFn& f, unsigned k, const Distribution& d, const MomentOptions& opt = {});

/// gamma_{f^(k)} = E f^(k)(Z - E Z), Z ~ d.
double gamma_moment(const NonlinearFn& f, unsigned k, const Distribution& d, const MomentOptions& opt = {});

/// SD of f(Z), Z ~ d.
double sd_f(const NonlinearFn& f, const Distribution& d, const MomentOptions& opt = {});

struct MomentTable {
    std::map<unsigned, double> values;
    std::map<unsigned, double> std_errors;
    MomentMethod method = MomentMethod::closed_form;
    std::size_t nodes_or_samples = 0;
};

MomentTable moment_table(const NonlinearFn& f, const Distribution& d, unsigned k_max,
                         const MomentOptions& opt = {});

/// nullopt stands for an infinite index.
using Index = std::optional<unsigned>;

std::string index_to_string(const Index& i);

struct IndexOptions {
    double tol = 1e-9;
    unsigned k_max = 16;
    MomentOptions moments{};
};

/// (I_e, I_o): smallest even / odd k with |mu_{f^(k)}| > tol.
std::pair<Index, Index> even_odd_index(const NonlinearFn& f, const Distribution& d, const IndexOptions& opt = {});

/// (J_s, J_c): smallest k with |gamma_k + (-1)^(k+1) gamma_bar_k| > tol, resp. (-1)^k.
std::pair<Index, Index> signal_constant_index(const NonlinearFn& f, const Distribution& d,
                                              const Distribution& d_bar, const IndexOptions& opt = {});

}  // namespace nlsrm
