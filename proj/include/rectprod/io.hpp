#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "rectprod/chain_spec.hpp"
#include "rectprod/empirics.hpp"
#include "rectprod/limit_law.hpp"
#include "rectprod/sampler.hpp"
#include "rectprod/spectrum.hpp"

namespace rectprod {

using Json = nlohmann::json;

// {"n":..,"m":..,"dims":[..],"gamma":..}. On load dims may also be given in
// run-length form [[value, count], ...]; m may be omitted and is then
// inferred from dims.
Json to_json(const ChainSpec& spec);
ChainSpec chain_from_json(const Json& j);

// {"type":"I","coeffs":{"head":[..],"tail":{"kind":"geometric","c":..,"rho":..}}}
// Tail kinds: zero, constant (c), geometric (c, rho), mixture (terms). Type II
// and III laws are {"type":"II"} / {"type":"III"}. Loading also accepts
// {"preset": name, "params": {..}}.
Json to_json(const LimitLaw& law);
LimitLaw law_from_json(const Json& j);

Json to_json(const GofReport& report);
Json to_json(const TypeDiagnostics& diag);
Json to_json(const TnLimitSummary& summary);
Json to_json(const InvariantReport& report);

// Minimal CSV: header row, comma separated, LF line endings, no quoting.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
};

// Shortest decimal form that parses back to the same double.
std::string format_double(double value);
double parse_double(const std::string& text);

std::string to_csv_string(const CsvTable& table);
CsvTable parse_csv(const std::string& text);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

// Columns index, log_modulus, angle.
CsvTable to_csv(const SpectralSample& sample);
SpectralSample spectral_from_csv(const CsvTable& table);

// Columns index, log_t.
CsvTable to_csv(const OracleSample& sample);
OracleSample oracle_from_csv(const CsvTable& table);

// Columns radius, angle, source.
CsvTable to_csv(const PlanarSample& sample, SampleSource source);
PlanarSample planar_from_csv(const CsvTable& table);

}  // namespace rectprod
