#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rectprod/io.hpp"

namespace rectprod::cli {

// Command-line overrides. Precedence, lowest first: built-in defaults,
// --config file, flags, then RECTPROD_OUT for the output directory.
struct FlagOverrides {
  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<int> jobs;
  std::optional<std::string> out;
  std::optional<std::string> preset;
  std::vector<std::string> params;  // key=value
};

Json resolve_config(const std::string& command, const FlagOverrides& flags,
                    const char* env_out = nullptr);

// "3,20" -> [3, 20]; "2" -> 2; "true" -> true; anything else stays a string.
Json parse_param_value(const std::string& text);

// Chain from {"family": name, "params": {..}} or an explicit ChainSpec object.
// Families: square (n, m, gamma = m), example2 (n, m, alpha = 2, gamma = 2m),
// rectangular (n, m, inner, gamma). gamma may be a number or a rule name.
ChainSpec resolve_chain(const Json& chain);

// Explicit "law" entry if present, else the law implied by the chain family
// with its default gamma; nullopt when neither applies.
std::optional<LimitLaw> resolve_law(const Json& cfg);

RingBand resolve_ring(const Json& cfg, const std::optional<LimitLaw>& law);

// <out>/<run_id>; run_id defaults to "<command>-<hash of the config>".
std::filesystem::path run_directory(const Json& cfg);

}  // namespace rectprod::cli
