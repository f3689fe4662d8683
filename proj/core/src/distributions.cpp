#include "nlsrm/distributions.hpp"

#include <cmath>
#include <sstream>

#include "nlsrm/error.hpp"

namespace nlsrm {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double binomial(unsigned n, unsigned k) {
    double r = 1.0;
    for (unsigned i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
}

// E X^k for X ~ N(0,1): (k-1)!! for even k, 0 for odd k.
double standard_normal_moment(unsigned k) {
    if (k % 2 == 1) return 0.0;
    double r = 1.0;
    for (unsigned j = k; j > 1; j -= 2) r *= static_cast<double>(j - 1);
    return r;
}

double base_moment(const Distribution& d, unsigned k) {
    return std::visit(
        overloaded{
            [k](const Gaussian& g) {
                double sum = 0.0;
                for (unsigned j = 0; j <= k; j += 2) {
                    sum += binomial(k, j) * std::pow(g.mean, static_cast<int>(k - j)) *
                           std::pow(g.std, static_cast<int>(j)) * standard_normal_moment(j);
                }
                return sum;
            },
            [k](const Rademacher& r) { return k % 2 == 0 ? 1.0 : 2.0 * r.p - 1.0; },
            [k](const Uniform& u) {
                const double kp1 = static_cast<double>(k + 1);
                return (std::pow(u.hi, kp1) - std::pow(u.lo, kp1)) / (kp1 * (u.hi - u.lo));
            },
            [](const Centered&) -> double { throw Error("base_moment called on Centered"); },
        },
        d.kind());
}

}  // namespace

Distribution Distribution::gaussian(double mean, double std) {
    // std == 0 is accepted as a point mass; the SBM examples use it for noiseless blocks.
    if (!std::isfinite(mean) || !std::isfinite(std) || std < 0.0)
        throw ParameterError("gaussian: require finite mean and std >= 0");
    return Distribution(Gaussian{mean, std});
}

Distribution Distribution::rademacher(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("rademacher: p must lie in [0,1]");
    return Distribution(Rademacher{p});
}

Distribution Distribution::uniform(double lo, double hi) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi))
        throw ParameterError("uniform: require finite lo < hi");
    return Distribution(Uniform{lo, hi});
}

Distribution Distribution::centered(Distribution inner) {
    return Distribution(Centered{std::make_shared<const Distribution>(std::move(inner))});
}

const Distribution& Distribution::base() const {
    if (const auto* c = std::get_if<Centered>(&kind_)) return c->inner->base();
    return *this;
}

double Distribution::offset_from_base() const {
    if (const auto* c = std::get_if<Centered>(&kind_))
        return c->inner->offset_from_base() - mean(*c->inner);
    return 0.0;
}

std::string Distribution::describe() const {
    std::ostringstream os;
    std::visit(overloaded{
                   [&](const Gaussian& g) { os << "Gaussian(" << g.mean << ", " << g.std << ")"; },
                   [&](const Rademacher& r) { os << "Rademacher(" << r.p << ")"; },
                   [&](const Uniform& u) { os << "Uniform(" << u.lo << ", " << u.hi << ")"; },
                   [&](const Centered& c) { os << "Centered(" << c.inner->describe() << ")"; },
               },
               kind_);
    return os.str();
}

bool operator==(const Distribution& a, const Distribution& b) {
    if (a.kind_.index() != b.kind_.index()) return false;
    return std::visit(
        overloaded{
            [&](const Gaussian& g) {
                const auto& h = b.as<Gaussian>();
                return g.mean == h.mean && g.std == h.std;
            },
            [&](const Rademacher& r) { return r.p == b.as<Rademacher>().p; },
            [&](const Uniform& u) {
                const auto& v = b.as<Uniform>();
                return u.lo == v.lo && u.hi == v.hi;
            },
            [&](const Centered& c) { return *c.inner == *b.as<Centered>().inner; },
        },
        a.kind_);
}

double mean(const Distribution& d) {
    if (d.is<Centered>()) return 0.0;
    return base_moment(d, 1);
}

double variance(const Distribution& d) {
    if (const auto* c = std::get_if<Centered>(&d.kind())) return variance(*c->inner);
    const double m = mean(d);
    return std::visit(overloaded{
                          [](const Gaussian& g) { return g.std * g.std; },
                          [m](const Rademacher&) { return 1.0 - m * m; },
                          [](const Uniform& u) { return (u.hi - u.lo) * (u.hi - u.lo) / 12.0; },
                          [](const Centered&) { return 0.0; },
                      },
                      d.kind());
}

double moment(const Distribution& d, unsigned k) {
    if (k == 0) return 1.0;
    if (!d.is<Centered>()) return base_moment(d, k);
    if (k == 1) return 0.0;
    const Distribution& b = d.base();
    const double off = d.offset_from_base();
    if (b.is<Gaussian>()) {
        // Shifted Gaussian stays Gaussian: evaluate in closed form directly.
        const auto& g = b.as<Gaussian>();
        return base_moment(Distribution::gaussian(g.mean + off, g.std), k);
    }
    // E (Z + off)^k = sum_j C(k,j) E Z^j off^(k-j)
    double sum = 0.0;
    for (unsigned j = 0; j <= k; ++j)
        sum += binomial(k, j) * base_moment(b, j) * std::pow(off, static_cast<int>(k - j));
    return sum;
}

std::pair<double, Distribution> mean_and_center(const Distribution& d) {
    const double m = mean(d);
    if (d.is<Gaussian>()) return {m, Distribution::gaussian(0.0, d.as<Gaussian>().std)};
    if (m == 0.0 || d.is<Centered>()) return {m, d};
    return {m, Distribution::centered(d)};
}

Distribution shifted(const Distribution& d, double shift) {
    if (d.is<Gaussian>()) {
        const auto& g = d.as<Gaussian>();
        return Distribution::gaussian(g.mean + shift, g.std);
    }
    if (d.is<Uniform>()) {
        const auto& u = d.as<Uniform>();
        return Distribution::uniform(u.lo + shift, u.hi + shift);
    }
    if (d.is<Centered>()) {
        const Distribution& b = d.base();
        if (b.is<Gaussian>() || b.is<Uniform>()) return shifted(b, d.offset_from_base() + shift);
    }
    throw ParameterError("shifted: only Gaussian and Uniform laws can be translated, got " + d.describe());
}

Sampler::Sampler(Distribution d, std::uint64_t seed, std::uint64_t stream)
    : base_(d.base()), offset_(d.offset_from_base()), engine_(make_engine(seed, stream)) {
    if (const auto* r = std::get_if<Rademacher>(&base_.kind())) coin_ = std::bernoulli_distribution(r->p);
}

double Sampler::operator()() {
    return std::visit(overloaded{
                          [&](const Gaussian& g) {
                              if (g.std == 0.0) return g.mean + offset_;
                              return g.mean + g.std * normal_(engine_) + offset_;
                          },
                          [&](const Rademacher&) { return (coin_(engine_) ? 1.0 : -1.0) + offset_; },
                          [&](const Uniform& u) { return u.lo + (u.hi - u.lo) * uniform_(engine_) + offset_; },
                          [](const Centered&) -> double { throw Error("sampler base is Centered"); },
                      },
                      base_.kind());
}

std::vector<double> sample(const Distribution& d, std::size_t count, std::uint64_t seed) {
    if (count == 0) throw ParameterError("sample: count must be >= 1");
    Sampler draw(d, seed);
    std::vector<double> out(count);
    for (auto& v : out) v = draw();
    return out;
}

}  // namespace nlsrm
