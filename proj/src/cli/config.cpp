#include "config.hpp"

#include <cmath>
#include <cstdio>
#include <set>

namespace rectprod::cli {

namespace {

// Keys that live at the top level of a command's config rather than in the
// preset's parameter block.
const std::set<std::string>& top_level_keys(const std::string& command) {
  static const std::set<std::string> simulate{"check_invariants"};
  static const std::set<std::string> oracle{"x_grid", "replicates"};
  static const std::set<std::string> limit{"grid_points"};
  static const std::set<std::string> classify{"gamma_rule", "probes"};
  static const std::set<std::string> gof{"sample", "against"};
  static const std::set<std::string> none;
  if (command == "simulate") return simulate;
  if (command == "oracle") return oracle;
  if (command == "limit") return limit;
  if (command == "classify") return classify;
  if (command == "gof") return gof;
  return none;
}

Json defaults(const std::string& command) {
  Json cfg = {{"command", command}, {"seed", 1}, {"trials", 1}, {"jobs", 1}, {"out", "out"}};
  if (command == "oracle") {
    cfg["x_grid"] = {0.25, 0.5, 0.75, 1.0};
    cfg["replicates"] = 1000;
  } else if (command == "limit") {
    cfg["grid_points"] = 101;
  } else if (command == "classify") {
    cfg["probes"] = {250, 500, 1000, 2000};
  }
  return cfg;
}

// The parameter block that --preset/--param address for each command.
Json& target_block(Json& cfg, const std::string& command) {
  if (command == "simulate" || command == "oracle") {
    if (!cfg.contains("chain") || !cfg["chain"].contains("family")) cfg["chain"] = {{"family", "square"}};
    return cfg["chain"];
  }
  if (command == "classify") {
    if (!cfg.contains("family")) cfg["family"] = "square";
    return cfg;
  }
  if (!cfg.contains("law")) cfg["law"] = Json::object();
  return cfg["law"];
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

double number_param(const Json& params, const char* key, std::optional<double> fallback) {
  if (params.contains(key)) {
    if (!params[key].is_number()) throw Error(ErrorCode::BadParameter, std::string(key) + " must be numeric");
    return params[key].get<double>();
  }
  if (!fallback) throw Error(ErrorCode::BadParameter, std::string("chain family needs parameter '") + key + "'");
  return *fallback;
}

std::int64_t integer_param(const Json& params, const char* key) {
  const double v = number_param(params, key, std::nullopt);
  if (v != std::floor(v)) throw Error(ErrorCode::BadParameter, std::string(key) + " must be an integer");
  return static_cast<std::int64_t>(v);
}

double apply_gamma(const Json& params, ChainSpec& spec, const std::string& default_rule) {
  if (params.contains("gamma") && params["gamma"].is_number()) return params["gamma"].get<double>();
  const std::string rule = params.contains("gamma") ? params["gamma"].get<std::string>() : default_rule;
  return parse_gamma_rule(rule)(spec);
}

std::string default_gamma_rule(const std::string& family) {
  if (family == "square") return "m";
  if (family == "example2") return "2m";
  return "";
}

}  // namespace

Json parse_param_value(const std::string& text) {
  if (text == "true") return true;
  if (text == "false") return false;
  if (text.find(',') != std::string::npos) {
    Json list = Json::array();
    std::size_t start = 0;
    for (;;) {
      const auto comma = text.find(',', start);
      list.push_back(parse_param_value(text.substr(start, comma - start)));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    return list;
  }
  try {
    const double v = parse_double(text);
    if (v == std::floor(v) && std::abs(v) < 9e15) return static_cast<std::int64_t>(v);
    return v;
  } catch (const Error&) {
    return text;
  }
}

Json resolve_config(const std::string& command, const FlagOverrides& flags, const char* env_out) {
  Json cfg = defaults(command);
  if (flags.config_path) {
    Json file;
    try {
      file = Json::parse(read_text(*flags.config_path));
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::ParseError, *flags.config_path + ": " + e.what());
    }
    if (!file.is_object()) throw Error(ErrorCode::ParseError, "config must be a JSON object");
    cfg.merge_patch(file);
    cfg["command"] = command;
  }
  if (flags.seed) cfg["seed"] = *flags.seed;
  if (flags.trials) cfg["trials"] = *flags.trials;
  if (flags.jobs) cfg["jobs"] = *flags.jobs;
  if (flags.out) cfg["out"] = *flags.out;

  if (flags.preset) {
    Json& block = target_block(cfg, command);
    const char* key = (command == "simulate" || command == "oracle" || command == "classify") ? "family" : "preset";
    if (!block.contains(key) || block[key] != *flags.preset) {
      block[key] = *flags.preset;
      if (command != "classify") block["params"] = Json::object();
    }
  }
  for (const auto& kv : flags.params) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw Error(ErrorCode::BadParameter, "--param expects key=value, got '" + kv + "'");
    }
    const std::string key = kv.substr(0, eq);
    const Json value = parse_param_value(kv.substr(eq + 1));
    const auto dot = key.find('.');
    if (dot != std::string::npos) {
      const std::string section = key.substr(0, dot);
      const std::string field = key.substr(dot + 1);
      if (section == "law" && field == "preset") {
        cfg["law"]["preset"] = value;
      } else if (section == "law") {
        cfg["law"]["params"][field] = value;
      } else {
        cfg[section][field] = value;
      }
    } else if (top_level_keys(command).count(key)) {
      cfg[key] = value;
    } else if (command == "limit" && key == "preset") {
      cfg["law"]["preset"] = value;
    } else {
      Json& block = target_block(cfg, command);
      block["params"][key] = value;
    }
  }
  if (env_out && *env_out) cfg["out"] = std::string(env_out);

  if (!cfg["seed"].is_number_unsigned() && !(cfg["seed"].is_number_integer() && cfg["seed"].get<std::int64_t>() >= 0)) {
    throw Error(ErrorCode::BadParameter, "seed must be an unsigned 64-bit integer");
  }
  if (!cfg["trials"].is_number_integer() || cfg["trials"].get<std::int64_t>() < 1) {
    throw Error(ErrorCode::BadParameter, "trials must be >= 1");
  }
  if (!cfg["jobs"].is_number_integer() || cfg["jobs"].get<std::int64_t>() < 1) {
    throw Error(ErrorCode::BadParameter, "jobs must be >= 1");
  }
  return cfg;
}

ChainSpec resolve_chain(const Json& chain) {
  if (!chain.is_object()) throw Error(ErrorCode::ParseError, "chain must be a JSON object");
  if (!chain.contains("family")) return chain_from_json(chain);

  const std::string family = chain["family"].get<std::string>();
  const Json params = chain.value("params", Json::object());
  ChainSpec spec;
  if (family == "square") {
    spec = square_chain(integer_param(params, "n"), integer_param(params, "m"), 1.0);
  } else if (family == "example2") {
    const double alpha = number_param(params, "alpha", 2.0);
    if (!(alpha >= 1.0)) throw Error(ErrorCode::BadParameter, "example2 needs alpha >= 1");
    const auto n = integer_param(params, "n");
    const auto inner = static_cast<std::int64_t>(std::llround(alpha * static_cast<double>(n)));
    spec = rectangular_chain(n, integer_param(params, "m"), inner, 1.0);
  } else if (family == "rectangular") {
    spec = rectangular_chain(integer_param(params, "n"), integer_param(params, "m"), integer_param(params, "inner"), 1.0);
  } else {
    throw Error(ErrorCode::UnknownFamily, "no chain family named '" + family + "'");
  }
  const std::string rule = default_gamma_rule(family);
  if (rule.empty() && !params.contains("gamma")) {
    throw Error(ErrorCode::BadParameter, "family '" + family + "' needs parameter 'gamma'");
  }
  spec.gamma = apply_gamma(params, spec, rule);
  require_valid(spec);
  return spec;
}

std::optional<LimitLaw> resolve_law(const Json& cfg) {
  if (cfg.contains("law") && !cfg["law"].empty()) return law_from_json(cfg["law"]);
  if (!cfg.contains("chain") || !cfg["chain"].contains("family")) return std::nullopt;
  const auto& chain = cfg["chain"];
  const std::string family = chain["family"].get<std::string>();
  const Json params = chain.value("params", Json::object());
  const bool default_gamma = !params.contains("gamma") ||
                             (params["gamma"].is_string() && params["gamma"] == default_gamma_rule(family));
  if (!default_gamma) return std::nullopt;
  if (family == "square") return preset("example1");
  if (family == "example2") return preset("example2", {{"alpha", number_param(params, "alpha", 2.0)}});
  return std::nullopt;
}

RingBand resolve_ring(const Json& cfg, const std::optional<LimitLaw>& law) {
  RingBand ring;
  if (law && law->type() == LawType::TypeI) ring.inner = law->f_zero();
  if (law && law->type() == LawType::TypeII) ring.inner = 1.0;
  if (law && law->type() == LawType::TypeIII) ring.outer = 0.0;
  if (cfg.contains("ring")) {
    const auto& r = cfg["ring"];
    ring.inner = r.value("inner", ring.inner);
    ring.outer = r.value("outer", ring.outer);
    ring.slack = r.value("slack", ring.slack);
  }
  if (!(ring.inner >= 0.0 && ring.inner <= ring.outer)) {
    throw Error(ErrorCode::BadParameter, "ring needs 0 <= inner <= outer");
  }
  return ring;
}

std::filesystem::path run_directory(const Json& cfg) {
  const std::filesystem::path out = cfg.value("out", std::string("out"));
  if (cfg.contains("run_id")) return out / cfg["run_id"].get<std::string>();
  Json identity = cfg;
  for (const char* key : {"out", "jobs", "run_id"}) identity.erase(key);
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a(identity.dump())));
  return out / (cfg["command"].get<std::string>() + "-" + std::string(hex, 12));
}

}  // namespace rectprod::cli
