#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "nlsrm/rng.hpp"

namespace nlsrm {

class Distribution;

struct Gaussian {
    double mean = 0.0;
    double std = 1.0;
};

/// Two-point law on {-1, +1} with P(+1) = p.
struct Rademacher {
    double p = 0.5;
};

struct Uniform {
    double lo = 0.0;
    double hi = 1.0;
};

/// Z - E Z for an inner law. Its mean is 0 by construction.
struct Centered {
    std::shared_ptr<const Distribution> inner;
};

/// Scalar probability law. Immutable; copies share the inner law of a
/// Centered wrapper.
class Distribution {
public:
    using Kind = std::variant<Gaussian, Rademacher, Uniform, Centered>;

    static Distribution gaussian(double mean, double std);
    static Distribution rademacher(double p = 0.5);
    static Distribution uniform(double lo, double hi);
    static Distribution centered(Distribution inner);

    const Kind& kind() const noexcept { return kind_; }

    template <class T>
    bool is() const noexcept {
        return std::holds_alternative<T>(kind_);
    }

    template <class T>
    const T& as() const {
        return std::get<T>(kind_);
    }

    /// The underlying non-centered law (the distribution itself unless Centered).
    const Distribution& base() const;

    /// Location offset between this law and base(): 0 unless Centered.
    double offset_from_base() const;

    std::string describe() const;

    friend bool operator==(const Distribution& a, const Distribution& b);

private:
    explicit Distribution(Kind k) : kind_(std::move(k)) {}
    Kind kind_;
};

double mean(const Distribution& d);
double variance(const Distribution& d);

/// Raw moment E Z^k in closed form.
double moment(const Distribution& d, unsigned k);

/// (E Z, law of Z - E Z). Gaussians re-center in kind, mean-zero laws are
/// returned unchanged, everything else is wrapped in Centered.
std::pair<double, Distribution> mean_and_center(const Distribution& d);

/// Law of Z + shift. Supported for Gaussian and Uniform.
Distribution shifted(const Distribution& d, double shift);

/// Stateful sampler over one (distribution, seed, stream) triple.
class Sampler {
public:
    Sampler(Distribution d, std::uint64_t seed, std::uint64_t stream = 0);

    double operator()();

private:
    Distribution base_;
    double offset_;
    Engine engine_;
    std::normal_distribution<double> normal_;
    std::uniform_real_distribution<double> uniform_;
    std::bernoulli_distribution coin_;
};

std::vector<double> sample(const Distribution& d, std::size_t count, std::uint64_t seed);

}  // namespace nlsrm
