#pragma once

#include <string>

#include <json.hpp>

namespace rescoef {

using ordered_json = nlohmann::ordered_json;

/// Serializes a JSON tree with every floating-point number rendered at 17
/// significant digits (lossless round trip), objects in insertion order,
/// two-space indentation. All result files go through this so reruns are
/// byte-identical.
std::string dump_json17(const ordered_json& j);

}  // namespace rescoef
