#pragma once

// JSON serialization of solver results. Doubles are written with 17
// significant digits so identical runs produce byte-identical files.

#include "hilbvp/iteration.hpp"
#include "hilbvp/linear_bvp.hpp"

#include <json.hpp>

#include <string>

namespace hilbvp {

/// Pretty-printed JSON with "%.17g" numbers; NaN and infinities become null.
[[nodiscard]] std::string dump_json(const nlohmann::json& value, int indent = 2);

[[nodiscard]] nlohmann::json vector_to_json(const Vector& v);
[[nodiscard]] nlohmann::json matrix_to_json(const Matrix& m);

/// Classification of a nonlinear solve: "solution" or "pseudosolution".
[[nodiscard]] std::string solve_classification(Classification c);

[[nodiscard]] nlohmann::json to_json(const SolveReport& report);
[[nodiscard]] nlohmann::json to_json(const LinearSolveResult& result);

/// One "iter m delta residual" line per record.
[[nodiscard]] std::string iteration_log(const SolveReport& report);

}  // namespace hilbvp
