#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mrkit/errors.hpp"
#include "mrkit/mr.hpp"
#include "mrkit/rng.hpp"

namespace mrkit {

// Per-domain configuration: which labels are relations/acts, how each
// argument is treated during delexicalization and bucketing, and the value
// pools used for augmentation.

enum class ArgRuleKind { Retain, Delex, NumericGroup };

struct ArgRule {
  ArgRuleKind kind = ArgRuleKind::Delex;

  bool operator==(const ArgRule&) const = default;
};

// Surface-form groups for counted values: singular, plural, everything that
// is not a positive integer.
inline std::string numeric_group_of(std::string_view value) {
  if (value.empty()) return "other";
  for (char c : value)
    if (c < '0' || c > '9') return "other";
  if (value.size() > 18) return "gr1";  // out of parse range, certainly > 1
  long long v = 0;
  for (char c : value) v = v * 10 + (c - '0');
  if (v == 1) return "eq1";
  if (v > 1) return "gr1";
  return "other";  // "0", "00", ...
}

// Literal values plus inclusive integer ranges, drawn uniformly over the
// combined size without materializing the ranges.
struct ValuePool {
  std::vector<std::string> literals;
  std::vector<std::pair<std::int64_t, std::int64_t>> ranges;

  bool operator==(const ValuePool&) const = default;

  std::uint64_t size() const {
    std::uint64_t total = literals.size();
    for (auto [lo, hi] : ranges)
      if (hi >= lo) total += static_cast<std::uint64_t>(hi - lo + 1);
    return total;
  }

  bool empty() const { return size() == 0; }

  std::string value_at(std::uint64_t i) const {
    if (i < literals.size()) return literals[i];
    i -= literals.size();
    for (auto [lo, hi] : ranges) {
      if (hi < lo) continue;
      const std::uint64_t span = static_cast<std::uint64_t>(hi - lo + 1);
      if (i < span) return std::to_string(lo + static_cast<std::int64_t>(i));
      i -= span;
    }
    return {};
  }

  std::string draw(SplitMix64& rng) const { return value_at(rng.below(size())); }

  // The sub-pool whose values fall in one numeric group.
  ValuePool restricted_to_group(const std::string& group) const {
    ValuePool out;
    for (const std::string& v : literals)
      if (numeric_group_of(v) == group) out.literals.push_back(v);
    for (auto [lo, hi] : ranges) {
      std::int64_t a = lo, b = hi;
      if (group == "eq1") {
        a = std::max<std::int64_t>(a, 1);
        b = std::min<std::int64_t>(b, 1);
      } else if (group == "gr1") {
        a = std::max<std::int64_t>(a, 2);
      } else {
        b = std::min<std::int64_t>(b, 0);
        a = std::max<std::int64_t>(a, 0);
      }
      if (a <= b) out.ranges.emplace_back(a, b);
    }
    return out;
  }
};

struct DomainConfig {
  std::string name;
  LabelVocabulary vocab;
  std::map<std::string, ArgRule> rules;
  ArgRule default_rule{ArgRuleKind::Delex};
  std::set<std::string> mb_value_retaining;
  std::map<std::string, ValuePool> value_pools;

  bool operator==(const DomainConfig&) const = default;

  const ArgRule& rule_for(const std::string& arg_name) const {
    auto it = rules.find(arg_name);
    return it == rules.end() ? default_rule : it->second;
  }
};

namespace detail {

inline ArgRuleKind rule_kind_from_string(const std::string& s,
                                         const std::string& field) {
  if (s == "retain") return ArgRuleKind::Retain;
  if (s == "delex") return ArgRuleKind::Delex;
  if (s == "numeric_group") return ArgRuleKind::NumericGroup;
  throw SchemaError(field, "unknown rule kind \"" + s + "\"");
}

inline std::string rule_kind_to_string(ArgRuleKind k) {
  switch (k) {
    case ArgRuleKind::Retain:
      return "retain";
    case ArgRuleKind::Delex:
      return "delex";
    default:
      return "numeric_group";
  }
}

inline ArgRule rule_from_json(const nlohmann::json& j,
                              const std::string& field) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw SchemaError(field, "expected an object with a \"kind\" string");
  ArgRule r;
  r.kind = rule_kind_from_string(j["kind"].get<std::string>(), field);
  return r;
}

inline void pool_entry_from_json(const nlohmann::json& j, ValuePool& pool,
                                 const std::string& field) {
  if (j.is_string()) {
    pool.literals.push_back(j.get<std::string>());
    return;
  }
  if (j.is_object() && j.contains("int_range")) {
    const auto& r = j["int_range"];
    if (!r.is_array() || r.size() != 2 || !r[0].is_number_integer() ||
        !r[1].is_number_integer())
      throw SchemaError(field, "int_range must be [lo, hi] integers");
    std::int64_t lo = r[0].get<std::int64_t>();
    std::int64_t hi = r[1].get<std::int64_t>();
    if (lo > hi) throw SchemaError(field, "int_range lo exceeds hi");
    pool.ranges.emplace_back(lo, hi);
    return;
  }
  throw SchemaError(field, "pool entries are strings or {\"int_range\": ...}");
}

}  // namespace detail

inline DomainConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw SchemaError("<root>", "config must be an object");

  DomainConfig cfg;
  if (!j.contains("name") || !j["name"].is_string())
    throw SchemaError("name", "required string");
  cfg.name = j["name"].get<std::string>();

  auto load_labels = [&](const char* key, std::set<std::string>& into) {
    if (!j.contains(key) || !j[key].is_array())
      throw SchemaError(key, "required array of strings");
    for (const auto& e : j[key]) {
      if (!e.is_string()) throw SchemaError(key, "labels must be strings");
      into.insert(e.get<std::string>());
    }
  };
  load_labels("relation_labels", cfg.vocab.relation_labels);
  load_labels("act_labels", cfg.vocab.act_labels);
  for (const std::string& l : cfg.vocab.relation_labels)
    if (cfg.vocab.act_labels.count(l)) throw ConflictingLabel(l);

  if (j.contains("rules")) {
    if (!j["rules"].is_object())
      throw SchemaError("rules", "must map argument names to rules");
    for (auto it = j["rules"].begin(); it != j["rules"].end(); ++it)
      cfg.rules[it.key()] =
          detail::rule_from_json(it.value(), "rules." + it.key());
  }
  if (j.contains("default_rule"))
    cfg.default_rule = detail::rule_from_json(j["default_rule"], "default_rule");

  if (j.contains("mb_value_retaining")) {
    if (!j["mb_value_retaining"].is_array())
      throw SchemaError("mb_value_retaining", "must be an array of names");
    for (const auto& e : j["mb_value_retaining"]) {
      if (!e.is_string())
        throw SchemaError("mb_value_retaining", "names must be strings");
      cfg.mb_value_retaining.insert(e.get<std::string>());
    }
  }

  if (j.contains("value_pools")) {
    if (!j["value_pools"].is_object())
      throw SchemaError("value_pools", "must map argument names to pools");
    for (auto it = j["value_pools"].begin(); it != j["value_pools"].end();
         ++it) {
      const std::string field = "value_pools." + it.key();
      ValuePool pool;
      if (it.value().is_array()) {
        for (const auto& e : it.value())
          detail::pool_entry_from_json(e, pool, field);
      } else {
        detail::pool_entry_from_json(it.value(), pool, field);
      }
      if (pool.empty()) throw SchemaError(field, "pool is empty");
      cfg.value_pools[it.key()] = std::move(pool);
    }
  }

  // Medium-granularity value retention only keeps hashing refinement intact
  // when the retained argument's value also survives delexicalization.
  for (const std::string& name : cfg.mb_value_retaining)
    if (cfg.rule_for(name).kind != ArgRuleKind::Retain)
      throw SchemaError("mb_value_retaining",
                        "\"" + name + "\" must have a retain rule");

  return cfg;
}

inline nlohmann::json config_to_json(const DomainConfig& cfg) {
  nlohmann::json j;
  j["name"] = cfg.name;
  j["relation_labels"] = cfg.vocab.relation_labels;
  j["act_labels"] = cfg.vocab.act_labels;
  nlohmann::json rules = nlohmann::json::object();
  for (const auto& [name, rule] : cfg.rules)
    rules[name] = {{"kind", detail::rule_kind_to_string(rule.kind)}};
  j["rules"] = std::move(rules);
  j["default_rule"] = {{"kind", detail::rule_kind_to_string(cfg.default_rule.kind)}};
  j["mb_value_retaining"] = cfg.mb_value_retaining;
  nlohmann::json pools = nlohmann::json::object();
  for (const auto& [name, pool] : cfg.value_pools) {
    nlohmann::json entries = nlohmann::json::array();
    for (const std::string& v : pool.literals) entries.push_back(v);
    for (auto [lo, hi] : pool.ranges)
      entries.push_back({{"int_range", {lo, hi}}});
    pools[name] = std::move(entries);
  }
  j["value_pools"] = std::move(pools);
  return j;
}

inline DomainConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("<root>", std::string("invalid JSON: ") + e.what());
  }
  return config_from_json(j);
}

// Stable fingerprint of a config for provenance records.
inline std::string config_digest(const DomainConfig& cfg) {
  const std::string canon = config_to_json(cfg).dump();
  std::ostringstream hex;
  hex << std::hex << fnv1a64(canon);
  return hex.str();
}

}  // namespace mrkit
