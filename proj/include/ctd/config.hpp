#pragma once

#include <string>

#include "ctd/simulation.hpp"

namespace ctd {

/// Reads a JSON run description. Every key is checked: unknown keys and
/// missing required sections (grid, physics) raise ConfigError naming the
/// offending key; an unreadable file raises std::runtime_error.
SimConfig load_config(const std::string& path);
SimConfig parse_config(const std::string& text);

/// The effective configuration, defaults included, as pretty-printed JSON.
std::string config_to_json(const SimConfig& config);

}  // namespace ctd
