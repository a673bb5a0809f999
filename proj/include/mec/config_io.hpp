#pragma once

#include <iosfwd>
#include <string>

#include "mec/config.hpp"

namespace mec {

/// Reads an INI-style file (flat `key = value` lines grouped in `[section]`s).
/// Unknown sections or keys, missing required keys, unparsable values and
/// failed validation all raise ConfigError naming the key.
Config load_config(const std::string& path);
Config parse_config(std::istream& is);

}  // namespace mec
