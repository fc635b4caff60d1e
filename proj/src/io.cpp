#include "rectprod/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace rectprod {

namespace {

[[noreturn]] void parse_fail(const std::string& why) { throw Error(ErrorCode::ParseError, why); }

template <typename T>
T get_field(const Json& j, const char* key) {
  if (!j.contains(key)) parse_fail(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    parse_fail(std::string("field '") + key + "': " + e.what());
  }
}

Json tail_to_json(const TailRule& tail) {
  if (tail.terms.empty()) return {{"kind", "zero"}};
  if (tail.terms.size() == 1) {
    const auto& t = tail.terms.front();
    if (t.rho == 1.0) return {{"kind", "constant"}, {"c", t.weight}};
    return {{"kind", "geometric"}, {"c", t.weight}, {"rho", t.rho}};
  }
  Json terms = Json::array();
  for (const auto& t : tail.terms) terms.push_back({{"c", t.weight}, {"rho", t.rho}});
  return {{"kind", "mixture"}, {"terms", terms}};
}

TailRule tail_from_json(const Json& j) {
  const auto kind = get_field<std::string>(j, "kind");
  if (kind == "zero") return TailRule::zero();
  if (kind == "constant") return TailRule::constant(get_field<double>(j, "c"));
  if (kind == "geometric") return TailRule::geometric(get_field<double>(j, "c"), get_field<double>(j, "rho"));
  if (kind == "mixture") {
    TailRule tail;
    for (const auto& t : get_field<Json>(j, "terms")) {
      tail.terms.push_back({get_field<double>(t, "c"), get_field<double>(t, "rho")});
    }
    return tail;
  }
  parse_fail("unknown tail kind '" + kind + "'");
}

}  // namespace

Json to_json(const ChainSpec& spec) {
  return {{"n", spec.n}, {"m", spec.m}, {"dims", spec.dims}, {"gamma", spec.gamma}};
}

ChainSpec chain_from_json(const Json& j) {
  if (!j.is_object()) parse_fail("chain spec must be a JSON object");
  ChainSpec spec;
  spec.n = get_field<std::int64_t>(j, "n");
  spec.gamma = get_field<double>(j, "gamma");
  const auto dims = get_field<Json>(j, "dims");
  if (!dims.is_array()) parse_fail("dims must be an array");
  for (const auto& d : dims) {
    if (d.is_array()) {
      if (d.size() != 2) parse_fail("run-length dims entries are [value, count]");
      const auto value = d[0].get<std::int64_t>();
      const auto count = d[1].get<std::int64_t>();
      if (count < 0) parse_fail("run-length count must be >= 0");
      spec.dims.insert(spec.dims.end(), static_cast<std::size_t>(count), value);
    } else {
      spec.dims.push_back(d.get<std::int64_t>());
    }
  }
  spec.m = j.contains("m") ? get_field<std::int64_t>(j, "m")
                           : static_cast<std::int64_t>(spec.dims.size()) - 1;
  require_valid(spec);
  return spec;
}

Json to_json(const LimitLaw& law) {
  if (law.type() != LawType::TypeI) return {{"type", std::string(to_string(law.type()))}};
  const auto& c = law.coefficients();
  if (c.kind() == CoefficientSource::Kind::Callable) {
    throw Error(ErrorCode::BadParameter, "callable coefficient sources cannot be serialized");
  }
  return {{"type", "I"}, {"coeffs", {{"head", c.head()}, {"tail", tail_to_json(c.tail())}}}};
}

LimitLaw law_from_json(const Json& j) {
  if (!j.is_object()) parse_fail("limit law must be a JSON object");
  if (j.contains("preset")) {
    PresetParams params;
    if (j.contains("params")) {
      for (const auto& [key, value] : j.at("params").items()) {
        if (!value.is_number()) parse_fail("preset parameter '" + key + "' must be numeric");
        params[key] = value.get<double>();
      }
    }
    return preset(get_field<std::string>(j, "preset"), params);
  }
  const auto type = get_field<std::string>(j, "type");
  if (type == "II") return LimitLaw::type2();
  if (type == "III") return LimitLaw::type3();
  if (type != "I") parse_fail("unknown law type '" + type + "'");
  const auto coeffs = get_field<Json>(j, "coeffs");
  std::vector<double> head;
  if (coeffs.contains("head")) head = get_field<std::vector<double>>(coeffs, "head");
  const TailRule tail = coeffs.contains("tail") ? tail_from_json(coeffs.at("tail")) : TailRule::zero();
  return build_type1(CoefficientSource::explicit_sequence(std::move(head), tail));
}

Json to_json(const GofReport& r) {
  return {{"ks_radial", r.ks_radial},   {"wasserstein_radial", r.wasserstein_radial},
          {"angle_ks", r.angle_ks},     {"ring_coverage", r.ring_coverage},
          {"n", r.n},                   {"m", r.m},
          {"seed", r.seed}};
}

Json to_json(const TypeDiagnostics& d) {
  Json j = {{"probe_sizes", d.probe_sizes},
            {"c1_estimates", d.c1_estimates},
            {"theta_trends", d.theta_trends},
            {"verdict", std::string(to_string(d.verdict))},
            {"heuristic", d.heuristic},
            {"reason", d.reason}};
  if (!d.c_estimates.empty()) j["c_estimates"] = d.c_estimates;
  return j;
}

Json to_json(const TnLimitSummary& s) {
  return {{"x", s.x}, {"j", s.j}, {"mean", s.mean}, {"stddev", s.stddev}, {"replicates", s.replicates}};
}

Json to_json(const InvariantReport& r) {
  return {{"trace_residual", r.trace_residual},
          {"logdet_residual", r.logdet_residual},
          {"logdet_spectrum", r.logdet_spectrum},
          {"logdet_lu", r.logdet_lu}};
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  parse_fail("CSV has no column '" + name + "'");
}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last) parse_fail("not a number: '" + text + "'");
  return value;
}

std::string to_csv_string(const CsvTable& table) {
  std::string out;
  auto append_row = [&out](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (row[i].find_first_of(",\"\n\r") != std::string::npos) {
        throw Error(ErrorCode::BadParameter, "CSV field needs quoting: '" + row[i] + "'");
      }
      if (i) out += ',';
      out += row[i];
    }
    out += '\n';
  };
  append_row(table.header);
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size()) throw Error(ErrorCode::BadParameter, "CSV row width mismatch");
    append_row(row);
  }
  return out;
}

CsvTable parse_csv(const std::string& text) {
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
      const auto comma = line.find(',', start);
      fields.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (first) {
      table.header = std::move(fields);
      first = false;
    } else {
      if (fields.size() != table.header.size()) parse_fail("CSV row width mismatch");
      table.rows.push_back(std::move(fields));
    }
  }
  if (first) parse_fail("CSV has no header");
  return table;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::BadParameter, "cannot write " + path.string());
  out << text;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::BadParameter, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CsvTable to_csv(const SpectralSample& sample) {
  CsvTable t{{"index", "log_modulus", "angle"}, {}};
  for (std::size_t j = 0; j < sample.size(); ++j) {
    t.rows.push_back({std::to_string(j), format_double(sample.log_modulus[j]), format_double(sample.angle[j])});
  }
  return t;
}

SpectralSample spectral_from_csv(const CsvTable& table) {
  const auto lm = table.column("log_modulus");
  const auto an = table.column("angle");
  SpectralSample s;
  for (const auto& row : table.rows) {
    s.log_modulus.push_back(parse_double(row[lm]));
    s.angle.push_back(parse_double(row[an]));
  }
  return s;
}

CsvTable to_csv(const OracleSample& sample) {
  CsvTable t{{"index", "log_t"}, {}};
  for (std::size_t j = 0; j < sample.log_t.size(); ++j) {
    t.rows.push_back({std::to_string(j + 1), format_double(sample.log_t[j])});
  }
  return t;
}

OracleSample oracle_from_csv(const CsvTable& table) {
  const auto col = table.column("log_t");
  OracleSample s;
  for (const auto& row : table.rows) s.log_t.push_back(parse_double(row[col]));
  return s;
}

CsvTable to_csv(const PlanarSample& sample, SampleSource source) {
  CsvTable t{{"radius", "angle", "source"}, {}};
  const std::string tag(to_string(source));
  for (const auto& p : sample.points) {
    t.rows.push_back({format_double(p.radius), format_double(p.angle), tag});
  }
  return t;
}

PlanarSample planar_from_csv(const CsvTable& table) {
  const auto rc = table.column("radius");
  const auto ac = table.column("angle");
  PlanarSample s;
  for (const auto& row : table.rows) s.points.push_back({parse_double(row[rc]), parse_double(row[ac])});
  return s;
}

}  // namespace rectprod
