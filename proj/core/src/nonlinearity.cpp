#include "nlsrm/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "nlsrm/error.hpp"
#include "nlsrm/quadrature.hpp"

namespace nlsrm {

namespace {

void trim(std::vector<double>& c) {
    while (c.size() > 1 && c.back() == 0.0) c.pop_back();
    if (c.empty()) c.push_back(0.0);
}

double polyval(const std::vector<double>& c, double x) {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
    return acc;
}

std::vector<double> differentiate(const std::vector<double>& c) {
    if (c.size() <= 1) return {0.0};
    std::vector<double> d(c.size() - 1);
    for (std::size_t j = 1; j < c.size(); ++j) d[j - 1] = static_cast<double>(j) * c[j];
    trim(d);
    return d;
}

double eval_named(const NonlinearFn::Named& n, double x) {
    switch (n.tag) {
        case NamedTag::abs:
            if (n.order == 0) return std::abs(x);
            return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
        case NamedTag::relu:
            if (n.order == 0) return x > 0.0 ? x : 0.0;
            return x > 0.0 ? 1.0 : 0.0;
        case NamedTag::tanh:
            return polyval(n.tanh_poly, std::tanh(x));
    }
    return 0.0;
}

// E h(Z) for an arbitrary callable. Exact for two-point laws, Gauss-Hermite for
// Gaussian laws, Monte Carlo otherwise.
Expectation expect_callable(const std::function<double(double)>& h, const Distribution& d, const MomentOptions& opt) {
    const Distribution& base = d.base();
    const double off = d.offset_from_base();
    if (!opt.force_monte_carlo) {
        if (base.is<Gaussian>()) {
            const auto& g = base.as<Gaussian>();
            const double loc = g.mean + off;
            if (g.std == 0.0) return {h(loc), 0.0, MomentMethod::closed_form};
            const double v = expect_standard_normal([&](double x) { return h(loc + g.std * x); }, opt.hermite_nodes);
            return {v, 0.0, MomentMethod::gauss_hermite};
        }
        if (base.is<Rademacher>()) {
            const double p = base.as<Rademacher>().p;
            return {p * h(1.0 + off) + (1.0 - p) * h(-1.0 + off), 0.0, MomentMethod::two_point};
        }
    }
    if (opt.mc_samples < 2) throw CapabilityError("expectation: no exact path for " + d.describe() +
                                                  " and Monte Carlo budget is empty");
    Sampler draw(d, opt.mc_seed);
    double mean = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < opt.mc_samples; ++i) {
        const double v = h(draw());
        const double delta = v - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (v - mean);
    }
    const double n = static_cast<double>(opt.mc_samples);
    const double var = m2 / (n - 1.0);
    return {mean, std::sqrt(var / n), MomentMethod::monte_carlo};
}

}  // namespace

std::string to_string(NamedTag tag) {
    switch (tag) {
        case NamedTag::abs: return "abs";
        case NamedTag::tanh: return "tanh";
        case NamedTag::relu: return "relu";
    }
    return "?";
}

NamedTag named_tag_from_string(const std::string& s) {
    if (s == "abs") return NamedTag::abs;
    if (s == "tanh") return NamedTag::tanh;
    if (s == "relu") return NamedTag::relu;
    throw ParameterError("unknown named function '" + s + "'");
}

std::string to_string(MomentMethod m) {
    switch (m) {
        case MomentMethod::closed_form: return "closed-form";
        case MomentMethod::gauss_hermite: return "gauss-hermite";
        case MomentMethod::two_point: return "two-point";
        case MomentMethod::monte_carlo: return "monte-carlo";
    }
    return "?";
}

NonlinearFn NonlinearFn::polynomial(std::vector<double> coeffs) {
    for (double c : coeffs)
        if (!std::isfinite(c)) throw ParameterError("polynomial: non-finite coefficient");
    trim(coeffs);
    if (coeffs.size() > max_degree + 1) throw ParameterError("polynomial: degree exceeds 32");
    return NonlinearFn(Polynomial{std::move(coeffs)});
}

NonlinearFn NonlinearFn::named(NamedTag tag) {
    Named n{tag, 0, {}};
    if (tag == NamedTag::tanh) n.tanh_poly = {0.0, 1.0};
    return NonlinearFn(std::move(n));
}

NonlinearFn NonlinearFn::hermite_combination(const std::vector<double>& a) {
    if (a.size() > max_degree + 1) throw ParameterError("hermite_combination: degree exceeds 32");
    std::vector<double> out(std::max<std::size_t>(a.size(), 1), 0.0);
    std::vector<double> prev{1.0};       // He_0
    std::vector<double> cur{0.0, 1.0};   // He_1
    for (std::size_t k = 0; k < a.size(); ++k) {
        const std::vector<double>& he = (k == 0) ? prev : cur;
        for (std::size_t j = 0; j < he.size(); ++j) out[j] += a[k] * he[j];
        if (k >= 1) {
            // He_{k+1} = x He_k - k He_{k-1}
            std::vector<double> next(cur.size() + 1, 0.0);
            for (std::size_t j = 0; j < cur.size(); ++j) next[j + 1] += cur[j];
            for (std::size_t j = 0; j < prev.size(); ++j) next[j] -= static_cast<double>(k) * prev[j];
            prev = std::move(cur);
            cur = std::move(next);
        }
    }
    return polynomial(std::move(out));
}

std::optional<int> NonlinearFn::degree() const {
    if (const auto* p = std::get_if<Polynomial>(&repr_)) {
        if (p->coeffs.size() == 1 && p->coeffs[0] == 0.0) return -1;
        return static_cast<int>(p->coeffs.size()) - 1;
    }
    return std::nullopt;
}

std::optional<unsigned> NonlinearFn::max_derivative_order() const {
    if (const auto* n = std::get_if<Named>(&repr_)) {
        if (n->tag == NamedTag::tanh) return std::nullopt;
        return 1u - std::min(n->order, 1u);
    }
    return std::nullopt;
}

double NonlinearFn::operator()(double x) const {
    if (const auto* p = std::get_if<Polynomial>(&repr_)) return polyval(p->coeffs, x);
    return eval_named(std::get<Named>(repr_), x);
}

std::string NonlinearFn::describe() const {
    std::ostringstream os;
    if (const auto* p = std::get_if<Polynomial>(&repr_)) {
        os << "poly[";
        for (std::size_t j = 0; j < p->coeffs.size(); ++j) os << (j ? "," : "") << p->coeffs[j];
        os << "]";
    } else {
        const auto& n = std::get<Named>(repr_);
        os << to_string(n.tag);
        if (n.order) os << "^(" << n.order << ")";
    }
    return os.str();
}

bool operator==(const NonlinearFn& a, const NonlinearFn& b) {
    if (a.repr_.index() != b.repr_.index()) return false;
    if (a.is_polynomial()) return std::get<NonlinearFn::Polynomial>(a.repr_).coeffs ==
                                  std::get<NonlinearFn::Polynomial>(b.repr_).coeffs;
    const auto& x = std::get<NonlinearFn::Named>(a.repr_);
    const auto& y = std::get<NonlinearFn::Named>(b.repr_);
    return x.tag == y.tag && x.order == y.order && x.tanh_poly == y.tanh_poly;
}

NonlinearFn derivative(const NonlinearFn& f, unsigned k) {
    if (k == 0) return f;
    if (const auto* p = std::get_if<NonlinearFn::Polynomial>(&f.repr_)) {
        std::vector<double> c = p->coeffs;
        for (unsigned i = 0; i < k && !(c.size() == 1 && c[0] == 0.0); ++i) c = differentiate(c);
        return NonlinearFn(NonlinearFn::Polynomial{std::move(c)});
    }
    NonlinearFn::Named n = std::get<NonlinearFn::Named>(f.repr_);
    if (n.tag != NamedTag::tanh) {
        if (n.order + k > 1)
            throw CapabilityError("derivative: " + to_string(n.tag) + " supports derivative orders 0 and 1 only");
        n.order += k;
        return NonlinearFn(std::move(n));
    }
    for (unsigned i = 0; i < k; ++i) {
        // P'(t) (1 - t^2)
        const std::vector<double> dp = differentiate(n.tanh_poly);
        std::vector<double> next(dp.size() + 2, 0.0);
        for (std::size_t j = 0; j < dp.size(); ++j) {
            next[j] += dp[j];
            next[j + 2] -= dp[j];
        }
        trim(next);
        n.tanh_poly = std::move(next);
    }
    n.order += k;
    return NonlinearFn(std::move(n));
}

NonlinearFn multiply(const NonlinearFn& a, const NonlinearFn& b) {
    if (!a.is_polynomial() || !b.is_polynomial()) throw CapabilityError("multiply: polynomials only");
    const auto& x = std::get<NonlinearFn::Polynomial>(a.repr()).coeffs;
    const auto& y = std::get<NonlinearFn::Polynomial>(b.repr()).coeffs;
    std::vector<double> out(x.size() + y.size() - 1, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < y.size(); ++j) out[i + j] += x[i] * y[j];
    trim(out);
    // The product of two degree-32 polynomials may exceed the public cap.
    return NonlinearFn(NonlinearFn::Polynomial{std::move(out)});
}

Matrix apply_elementwise(const NonlinearFn& f, const Matrix& m) {
    Matrix out(m.rows(), m.cols());
    if (const auto* p = std::get_if<NonlinearFn::Polynomial>(&f.repr())) {
        const auto& c = p->coeffs;
        const double* src = m.data();
        double* dst = out.data();
        const Eigen::Index size = m.size();
        for (Eigen::Index i = 0; i < size; ++i) dst[i] = polyval(c, src[i]);
        return out;
    }
    out = m.unaryExpr([&f](double x) { return f(x); });
    return out;
}

namespace {

// abs and relu (and their step derivatives) have closed-form Gaussian expectations;
// quadrature converges slowly across the kink.
std::optional<double> kinked_gaussian(const NonlinearFn::Named& n, double m, double s) {
    if (n.tag == NamedTag::tanh || s == 0.0) return std::nullopt;
    const double t = m / s;
    const double cdf = 0.5 * std::erfc(-t / std::sqrt(2.0));
    const double pdf = std::exp(-0.5 * t * t) / std::sqrt(2.0 * 3.14159265358979323846);
    if (n.tag == NamedTag::abs) return n.order == 0 ? m * (2.0 * cdf - 1.0) + 2.0 * s * pdf : 2.0 * cdf - 1.0;
    return n.order == 0 ? m * cdf + s * pdf : cdf;
}

}  // namespace

Expectation expectation(const NonlinearFn& g, const Distribution& d, const MomentOptions& opt) {
    if (const auto* n = std::get_if<NonlinearFn::Named>(&g.repr()); n && !opt.force_monte_carlo &&
                                                                     d.base().is<Gaussian>()) {
        const auto& gauss = d.base().as<Gaussian>();
        if (auto v = kinked_gaussian(*n, gauss.mean + d.offset_from_base(), gauss.std))
            return {*v, 0.0, MomentMethod::closed_form};
    }
    if (const auto* p = std::get_if<NonlinearFn::Polynomial>(&g.repr()); p && !opt.force_monte_carlo) {
        double sum = 0.0;
        for (std::size_t j = 0; j < p->coeffs.size(); ++j)
            if (p->coeffs[j] != 0.0) sum += p->coeffs[j] * moment(d, static_cast<unsigned>(j));
        return {sum, 0.0, MomentMethod::closed_form};
    }
    return expect_callable([&g](double x) { return g(x); }, d, opt);
}

Expectation derivative_moment_detail(const NonlinearFn& f, unsigned k, const Distribution& d,
                                     const MomentOptions& opt) {
    return expectation(derivative(f, k), d, opt);
}

double derivative_moment(const NonlinearFn& f, unsigned k, const Distribution& d, const MomentOptions& opt) {
    return derivative_moment_detail(f, k, d, opt).value;
}

double gamma_moment(const NonlinearFn& f, unsigned k, const Distribution& d, const MomentOptions& opt) {
    return derivative_moment(f, k, mean_and_center(d).second, opt);
}

double sd_f(const NonlinearFn& f, const Distribution& d, const MomentOptions& opt) {
    double first = 0.0, second = 0.0;
    if (f.is_polynomial() && !opt.force_monte_carlo) {
        const auto& c = std::get<NonlinearFn::Polynomial>(f.repr()).coeffs;
        first = expectation(f, d, opt).value;
        // E f(Z)^2 = sum_{i,j} c_i c_j E Z^{i+j}
        for (std::size_t i = 0; i < c.size(); ++i)
            for (std::size_t j = 0; j < c.size(); ++j)
                if (c[i] != 0.0 && c[j] != 0.0) second += c[i] * c[j] * moment(d, static_cast<unsigned>(i + j));
    } else {
        first = expect_callable([&f](double x) { return f(x); }, d, opt).value;
        second = expect_callable([&f](double x) { const double v = f(x); return v * v; }, d, opt).value;
    }
    return std::sqrt(std::max(0.0, second - first * first));
}

MomentTable moment_table(const NonlinearFn& f, const Distribution& d, unsigned k_max, const MomentOptions& opt) {
    MomentTable t;
    unsigned limit = k_max;
    if (auto deg = f.degree()) limit = std::min<unsigned>(k_max, static_cast<unsigned>(std::max(*deg, 0)));
    if (auto cap = f.max_derivative_order()) limit = std::min(limit, *cap);
    for (unsigned k = 0; k <= k_max; ++k) {
        if (k > limit) {
            if (f.is_polynomial()) {
                t.values[k] = 0.0;
                t.std_errors[k] = 0.0;
            }
            continue;
        }
        const Expectation e = derivative_moment_detail(f, k, d, opt);
        t.values[k] = e.value;
        t.std_errors[k] = e.std_error;
        t.method = e.method;
    }
    switch (t.method) {
        case MomentMethod::gauss_hermite: t.nodes_or_samples = opt.hermite_nodes; break;
        case MomentMethod::monte_carlo: t.nodes_or_samples = opt.mc_samples; break;
        default: break;
    }
    return t;
}

std::string index_to_string(const Index& i) { return i ? std::to_string(*i) : std::string("inf"); }

namespace {

unsigned index_limit(const NonlinearFn& f, unsigned k_max) {
    unsigned limit = k_max;
    if (auto deg = f.degree()) {
        if (*deg < 0) return 0;
        limit = std::min<unsigned>(limit, static_cast<unsigned>(*deg));
    }
    if (auto cap = f.max_derivative_order()) limit = std::min(limit, *cap);
    return limit;
}

}  // namespace

std::pair<Index, Index> even_odd_index(const NonlinearFn& f, const Distribution& d, const IndexOptions& opt) {
    if (opt.k_max < 1) throw ParameterError("even_odd_index: k_max must be >= 1");
    if (!(opt.tol > 0.0)) throw ParameterError("even_odd_index: tol must be positive");
    Index even, odd;
    const unsigned limit = index_limit(f, opt.k_max);
    for (unsigned k = 0; k <= limit && !(even && odd); ++k) {
        Index& slot = (k % 2 == 0) ? even : odd;
        if (slot) continue;
        const Expectation e = derivative_moment_detail(f, k, d, opt.moments);
        const double tol = std::max(opt.tol, 5.0 * e.std_error);
        if (std::abs(e.value) > tol) slot = k;
    }
    return {even, odd};
}

std::pair<Index, Index> signal_constant_index(const NonlinearFn& f, const Distribution& d,
                                              const Distribution& d_bar, const IndexOptions& opt) {
    if (opt.k_max < 1) throw ParameterError("signal_constant_index: k_max must be >= 1");
    if (!(opt.tol > 0.0)) throw ParameterError("signal_constant_index: tol must be positive");
    const Distribution dc = mean_and_center(d).second;
    const Distribution dbc = mean_and_center(d_bar).second;
    Index signal, constant;
    const unsigned limit = index_limit(f, opt.k_max);
    for (unsigned k = 0; k <= limit && !(signal && constant); ++k) {
        const Expectation g = derivative_moment_detail(f, k, dc, opt.moments);
        const Expectation gb = derivative_moment_detail(f, k, dbc, opt.moments);
        const double tol = std::max(opt.tol, 5.0 * std::hypot(g.std_error, gb.std_error));
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;  // (-1)^k
        if (!signal && std::abs(g.value - sign * gb.value) > tol) signal = k;
        if (!constant && std::abs(g.value + sign * gb.value) > tol) constant = k;
    }
    return {signal, constant};
}

}  // namespace nlsrm
