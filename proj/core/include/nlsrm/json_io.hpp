#pragma once

#include <nlohmann/json.hpp>

#include "nlsrm/distributions.hpp"
#include "nlsrm/nonlinearity.hpp"

namespace nlsrm {

/// {"kind":"gaussian","mean":m,"std":s}, {"kind":"rademacher","p":p},
/// {"kind":"uniform","lo":a,"hi":b} or {"kind":"centered","inner":{...}}.
nlohmann::json to_json(const Distribution& d);
Distribution distribution_from_json(const nlohmann::json& j);

/// {"kind":"polynomial","coeffs":[...]} (ascending degree) or {"kind":"named","tag":"abs"}.
/// Input also accepts {"kind":"hermite","coeffs":[...]} in the He_k basis; it is
/// stored and written back as a polynomial. Derivatives of named functions carry "order".
nlohmann::json to_json(const NonlinearFn& f);
NonlinearFn nonlinear_fn_from_json(const nlohmann::json& j);

/// Throws ConfigError naming the first key of `j` outside `allowed`.
void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed, const char* where);

}  // namespace nlsrm
