#pragma once

#include <json.hpp>
#include <string>

#include "nadid/capacity.hpp"
#include "nadid/fit.hpp"

namespace nadid {

/// Capacity JSON: {n, labels, representation, values|mobius|params, normalized}.
/// Subset values/Möbius coefficients are keyed by bitmask as decimal strings
/// (bit i of the mask = labels[i]).
nlohmann::json capacity_to_json(const Capacity& capacity);
Capacity capacity_from_json(const nlohmann::json& j);

Capacity read_capacity_file(const std::string& path);
void write_capacity_file(const std::string& path, const Capacity& capacity);

/// FitResult JSON: the capacity object plus a "diagnostics" block.
nlohmann::json fit_result_to_json(const FitResult& result);

}  // namespace nadid
