#include "nlsrm/json_io.hpp"

#include <algorithm>
#include <string>

#include "nlsrm/error.hpp"

namespace nlsrm {

namespace {

using nlohmann::json;

const json& field(const json& j, const char* key, const char* where) {
    const auto it = j.find(key);
    if (it == j.end()) throw ConfigError(std::string(where) + ": missing \"" + key + "\"");
    return *it;
}

double number(const json& j, const char* key, const char* where) {
    const json& v = field(j, key, where);
    if (!v.is_number()) throw ConfigError(std::string(where) + ": \"" + key + "\" must be a number");
    return v.get<double>();
}

std::string kind_of(const json& j, const char* where) {
    if (!j.is_object()) throw ConfigError(std::string(where) + ": expected an object");
    const json& k = field(j, "kind", where);
    if (!k.is_string()) throw ConfigError(std::string(where) + ": \"kind\" must be a string");
    return k.get<std::string>();
}

std::vector<double> coefficients(const json& j, const char* where) {
    const json& c = field(j, "coeffs", where);
    if (!c.is_array() || c.empty()) throw ConfigError(std::string(where) + ": \"coeffs\" must be a nonempty array");
    std::vector<double> out;
    for (const auto& v : c) {
        if (!v.is_number()) throw ConfigError(std::string(where) + ": coefficients must be numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

}  // namespace

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed, const char* where) {
    for (const auto& item : j.items()) {
        const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* k) { return item.key() == k; });
        if (!known) throw ConfigError(std::string(where) + ": unknown key \"" + item.key() + "\"");
    }
}

json to_json(const Distribution& d) {
    return std::visit(
        [](const auto& k) -> json {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, Gaussian>) {
                return {{"kind", "gaussian"}, {"mean", k.mean}, {"std", k.std}};
            } else if constexpr (std::is_same_v<T, Rademacher>) {
                return {{"kind", "rademacher"}, {"p", k.p}};
            } else if constexpr (std::is_same_v<T, Uniform>) {
                return {{"kind", "uniform"}, {"lo", k.lo}, {"hi", k.hi}};
            } else {
                return {{"kind", "centered"}, {"inner", to_json(*k.inner)}};
            }
        },
        d.kind());
}

Distribution distribution_from_json(const json& j) {
    constexpr const char* where = "distribution";
    const std::string kind = kind_of(j, where);
    try {
        if (kind == "gaussian") {
            reject_unknown_keys(j, {"kind", "mean", "std"}, where);
            return Distribution::gaussian(number(j, "mean", where), number(j, "std", where));
        }
        if (kind == "rademacher") {
            reject_unknown_keys(j, {"kind", "p"}, where);
            return Distribution::rademacher(j.contains("p") ? number(j, "p", where) : 0.5);
        }
        if (kind == "uniform") {
            reject_unknown_keys(j, {"kind", "lo", "hi"}, where);
            return Distribution::uniform(number(j, "lo", where), number(j, "hi", where));
        }
        if (kind == "centered") {
            reject_unknown_keys(j, {"kind", "inner"}, where);
            return Distribution::centered(distribution_from_json(field(j, "inner", where)));
        }
    } catch (const ParameterError& e) {
        throw ConfigError(std::string(where) + ": " + e.what());
    }
    throw ConfigError(std::string(where) + ": unknown kind \"" + kind + "\"");
}

json to_json(const NonlinearFn& f) {
    return std::visit(
        [](const auto& r) -> json {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, NonlinearFn::Polynomial>) {
                return {{"kind", "polynomial"}, {"coeffs", r.coeffs}};
            } else {
                json out{{"kind", "named"}, {"tag", to_string(r.tag)}};
                if (r.order != 0) out["order"] = r.order;
                return out;
            }
        },
        f.repr());
}

NonlinearFn nonlinear_fn_from_json(const json& j) {
    constexpr const char* where = "f";
    const std::string kind = kind_of(j, where);
    try {
        if (kind == "polynomial") {
            reject_unknown_keys(j, {"kind", "coeffs"}, where);
            return NonlinearFn::polynomial(coefficients(j, where));
        }
        if (kind == "hermite") {
            reject_unknown_keys(j, {"kind", "coeffs"}, where);
            return NonlinearFn::hermite_combination(coefficients(j, where));
        }
        if (kind == "named") {
            reject_unknown_keys(j, {"kind", "tag", "order"}, where);
            const json& tag = field(j, "tag", where);
            if (!tag.is_string()) throw ConfigError("f: \"tag\" must be a string");
            NonlinearFn f = NonlinearFn::named(named_tag_from_string(tag.get<std::string>()));
            if (j.contains("order")) {
                const json& o = j.at("order");
                if (!o.is_number_unsigned()) throw ConfigError("f: \"order\" must be a non-negative integer");
                f = derivative(f, o.get<unsigned>());
            }
            return f;
        }
    } catch (const ParameterError& e) {
        throw ConfigError(std::string(where) + ": " + e.what());
    } catch (const CapabilityError& e) {
        throw ConfigError(std::string(where) + ": " + e.what());
    }
    throw ConfigError(std::string(where) + ": unknown kind \"" + kind + "\"");
}

}  // namespace nlsrm
