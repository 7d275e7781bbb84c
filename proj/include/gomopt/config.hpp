#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "gomopt/params.hpp"

namespace gomopt {

/// Resolved run configuration: model parameters plus the efficacy choice.
struct Config {
    ModelParams params;
    EfficacyModel efficacy = EfficacyModel::zero();
    std::map<std::string, std::string> raw;  // canonical key -> value text
};

/// Parse a flat key=value file (one parameter per line, `#` comments).
/// Recognized keys: r, delta, beta, gamma, zeta, mu, sigma, m0,
/// efficacy (zero|isoelastic), a, q. Unknown keys and malformed lines raise
/// parse_error with the line number.
Config load_config(const std::string& path);
Config parse_config_text(const std::string& text, const std::string& origin = "<config>");

/// FNV-1a digest of the sorted key=value pairs; stable under key reordering.
uint64_t config_hash(const std::map<std::string, std::string>& raw);

}  // namespace gomopt
