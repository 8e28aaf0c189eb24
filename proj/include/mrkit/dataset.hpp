#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mrkit/domain_config.hpp"
#include "mrkit/errors.hpp"
#include "mrkit/mr.hpp"

namespace mrkit {

// One dataset record in wire form. Scenario and reference stay as flattened
// text here; modules parse them against a config when needed.
struct Example {
  std::string id;
  std::string domain;
  std::string query;
  std::string scenario;
  std::optional<std::string> reference;
  std::optional<std::string> origin;  // "golden" or "synthetic"

  bool operator==(const Example&) const = default;
};

inline nlohmann::ordered_json example_to_json(const Example& e) {
  nlohmann::ordered_json j;
  j["id"] = e.id;
  j["domain"] = e.domain;
  j["query"] = e.query;
  j["scenario"] = e.scenario;
  if (e.reference) j["reference"] = *e.reference;
  if (e.origin) j["origin"] = *e.origin;
  return j;
}

inline Example example_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw SchemaError("<record>", "must be a JSON object");
  Example e;
  auto need = [&](const char* key) -> std::string {
    if (!j.contains(key) || !j[key].is_string())
      throw SchemaError(key, "required string field");
    return j[key].get<std::string>();
  };
  e.id = need("id");
  e.domain = need("domain");
  e.query = need("query");
  e.scenario = need("scenario");
  if (j.contains("reference")) {
    if (!j["reference"].is_string())
      throw SchemaError("reference", "must be a string");
    e.reference = j["reference"].get<std::string>();
  }
  if (j.contains("origin")) {
    if (!j["origin"].is_string() || (j["origin"] != "golden" &&
                                     j["origin"] != "synthetic"))
      throw SchemaError("origin", "must be \"golden\" or \"synthetic\"");
    e.origin = j["origin"].get<std::string>();
  }
  return e;
}

inline std::vector<Example> load_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset: " + path);
  std::vector<Example> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(path + ":" + std::to_string(lineno),
                        std::string("invalid JSON: ") + e.what());
    }
    try {
      out.push_back(example_from_json(j));
    } catch (const SchemaError& e) {
      throw SchemaError(path + ":" + std::to_string(lineno), e.what());
    }
  }
  return out;
}

inline void save_jsonl(const std::string& path,
                       const std::vector<Example>& examples) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write dataset: " + path);
  for (const Example& e : examples) out << example_to_json(e).dump() << "\n";
}

// Scenario/reference parse check over a whole dataset; failures are
// collected, never silently dropped.
struct ValidationReport {
  std::size_t checked = 0;
  std::vector<std::pair<std::string, std::string>> failures;  // (id, message)

  bool ok() const { return failures.empty(); }
};

inline ValidationReport validate_dataset(const std::vector<Example>& examples,
                                         const DomainConfig& config) {
  ValidationReport report;
  std::set<std::string> ids;
  for (const Example& e : examples) {
    ++report.checked;
    if (!ids.insert(e.id).second) {
      report.failures.emplace_back(e.id, "duplicate id");
      continue;
    }
    try {
      MrForest scenario = parse(e.scenario, config.vocab);
      if (scenario.empty()) throw ParseError("empty scenario", 0);
      if (serialize(parse(serialize(scenario), config.vocab)) !=
          serialize(scenario))
        throw ParseError("round trip mismatch", 0);
      if (e.reference) parse(*e.reference, config.vocab);
    } catch (const Error& err) {
      report.failures.emplace_back(e.id, err.what());
    }
  }
  return report;
}

inline void require_valid(const std::vector<Example>& examples,
                          const DomainConfig& config) {
  ValidationReport report = validate_dataset(examples, config);
  if (!report.ok()) throw AggregateParseError(report.failures);
}

// ---------------------------------------------------------------------------
// Raw-file import
// ---------------------------------------------------------------------------

// Column positions in a delimited raw file. reference < 0 means absent.
struct ColumnMapping {
  int query = -1;
  int scenario = -1;
  int reference = -1;
  char delimiter = '\t';
};

// Accepts "query=0,scenario=1" or "query=0,scenario=1,reference=2".
inline ColumnMapping parse_mapping(const std::string& text) {
  ColumnMapping m;
  std::istringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) {
    const std::size_t eq = part.find('=');
    if (eq == std::string::npos)
      throw MappingError("expected name=column pairs", text);
    const std::string name = part.substr(0, eq);
    int col = -1;
    try {
      col = std::stoi(part.substr(eq + 1));
    } catch (...) {
      throw MappingError("column index is not a number", part);
    }
    if (col < 0) throw MappingError("column index is negative", part);
    if (name == "query")
      m.query = col;
    else if (name == "scenario")
      m.scenario = col;
    else if (name == "reference")
      m.reference = col;
    else
      throw MappingError("unknown field \"" + name + "\"", part);
  }
  if (m.query < 0 || m.scenario < 0)
    throw MappingError("mapping must name query and scenario columns", text);
  return m;
}

struct ImportResult {
  std::vector<Example> examples;
  std::vector<std::pair<std::string, std::string>> failures;  // (line id, msg)
};

// Reads a delimited raw file, validating each scenario against the config.
// Ids are <domain>-<line number> unless the raw file is later re-imported
// with explicit ids.
inline ImportResult import_raw(const std::string& path,
                               const ColumnMapping& mapping,
                               const DomainConfig& config) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open raw file: " + path);

  ImportResult result;
  std::string line;
  std::size_t lineno = 0;
  const int max_col = std::max({mapping.query, mapping.scenario,
                                mapping.reference});
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::istringstream split(line);
    std::string col;
    while (std::getline(split, col, mapping.delimiter))
      cols.push_back(std::move(col));
    if (static_cast<int>(cols.size()) <= max_col)
      throw MappingError("line has only " + std::to_string(cols.size()) +
                             " columns, mapping needs " +
                             std::to_string(max_col + 1),
                         line);

    Example e;
    e.id = config.name + "-" + std::to_string(lineno);
    e.domain = config.name;
    e.query = normalize_whitespace(cols[mapping.query]);
    e.scenario = normalize_whitespace(cols[mapping.scenario]);
    if (mapping.reference >= 0)
      e.reference = normalize_whitespace(cols[mapping.reference]);
    e.origin = "golden";

    try {
      MrForest scenario = parse(e.scenario, config.vocab);
      if (scenario.empty()) throw ParseError("empty scenario", 0);
      if (e.reference) parse(*e.reference, config.vocab);
      result.examples.push_back(std::move(e));
    } catch (const Error& err) {
      result.failures.emplace_back(e.id, err.what());
    }
  }
  return result;
}

}  // namespace mrkit
