#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "zdr/rates.hpp"

namespace zdr::cli {

enum ExitCode : int { kOk = 0, kInternalError = 1, kConfigInvalid = 2, kInfeasible = 3 };

/// Entry point of the `zdr` executable. Results go to `out` and to files in
/// the configured output directory; diagnostics go to `diag` as one JSON
/// object per line.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& diag);

/// The shipped configuration schema.
const nlohmann::json& config_schema();

/// Checks an instance against the subset of JSON Schema used by the shipped
/// schema: type, enum, properties, required, additionalProperties (boolean),
/// items, minItems, minLength, minimum/maximum and their exclusive forms.
/// Returns one message per violation, each prefixed by a JSON pointer.
std::vector<std::string> validate_against_schema(const nlohmann::json& instance, const nlohmann::json& schema,
                                                 const std::string& pointer = "");

nlohmann::json to_json(const ConditionReport& rep);

}  // namespace zdr::cli
