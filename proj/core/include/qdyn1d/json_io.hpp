#pragma once

#include <json.hpp>

#include "qdyn1d/potentials.hpp"

namespace qdyn1d {

/// JSON form of a PotentialSpec (schema documented in the README). Unknown
/// keys raise ConfigError naming the offending key; missing keys take the
/// documented defaults.
nlohmann::json spec_to_json(const PotentialSpec& spec);
PotentialSpec spec_from_json(const nlohmann::json& j);

}  // namespace qdyn1d
