#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mrkit/dataset.hpp"
#include "mrkit/domain_config.hpp"
#include "mrkit/errors.hpp"
#include "mrkit/mr.hpp"

namespace mrkit {

// Partial delexicalization: argument values are replaced by placeholder
// tokens, consistently across scenario, reference and query, with value
// uniqueness tracked per argument name. `<name>__<suffix>` placeholders use
// suffixes a, b, ... for distinct values of one Delex argument and the
// group name (eq1, gr1, other) for NumericGroup arguments.

enum class FieldKind { Scenario, Reference, Query };

struct Occurrence {
  FieldKind field;
  TreePath path;       // Scenario/Reference: path to the Argument leaf
  std::size_t begin = 0, length = 0;  // Query: span in the delex query
  std::string original;               // the value found at this spot

  bool operator==(const Occurrence&) const = default;
};

struct Binding {
  std::string placeholder;
  std::string arg_name;
  std::string original_value;  // first-seen value (scenario pre-order)
  std::vector<Occurrence> occurrences;

  bool operator==(const Binding&) const = default;
};

struct DelexExample {
  Example base;
  MrForest delex_scenario;
  std::optional<MrForest> delex_reference;
  std::string delex_query;
  std::vector<Binding> bindings;
  // Reference argument leaves whose rule asked for replacement but whose
  // value matched no scenario binding (inflected values stay untouched).
  std::vector<TreePath> unmatched_reference_leaves;

  bool operator==(const DelexExample&) const = default;
};

// Suffixes a..z, aa, ab, ... (bijective base 26).
inline std::string uniqueness_suffix(std::size_t k) {
  std::string s;
  for (;;) {
    s.insert(s.begin(), static_cast<char>('a' + k % 26));
    if (k < 26) break;
    k = k / 26 - 1;
  }
  return s;
}

namespace detail {

inline void replace_leaf_value(MrNode& leaf, const std::string& value) {
  leaf.children.clear();
  std::size_t i = 0;
  while (i < value.size()) {
    while (i < value.size() && value[i] == ' ') ++i;
    std::size_t start = i;
    while (i < value.size() && value[i] != ' ') ++i;
    if (i > start)
      leaf.children.push_back(MrNode::terminal(value.substr(start, i - start)));
  }
}

inline bool word_boundary(const std::string& text, std::size_t begin,
                          std::size_t length) {
  auto alnum = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0;
  };
  if (begin > 0 && alnum(text[begin - 1])) return false;
  const std::size_t end = begin + length;
  if (end < text.size() && alnum(text[end])) return false;
  return true;
}

inline bool matches_at(const std::string& hay, std::size_t pos,
                       const std::string& needle) {
  if (pos + needle.size() > hay.size()) return false;
  for (std::size_t i = 0; i < needle.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(hay[pos + i])) !=
        std::tolower(static_cast<unsigned char>(needle[i])))
      return false;
  }
  return true;
}

}  // namespace detail

inline DelexExample delexicalize(const Example& example,
                                 const DomainConfig& config,
                                 bool include_query = true) {
  DelexExample dex;
  dex.base = example;
  dex.delex_scenario = parse(example.scenario, config.vocab);
  if (example.reference)
    dex.delex_reference = parse(*example.reference, config.vocab);
  dex.delex_query = example.query;

  // (arg_name, value) → binding position; per-argument suffix counters.
  std::map<std::pair<std::string, std::string>, std::size_t> by_value;
  std::map<std::string, std::size_t> next_suffix;
  std::map<std::string, std::size_t> by_placeholder;

  auto binding_index = [&](const std::string& placeholder,
                           const std::string& arg_name,
                           const std::string& value) -> std::size_t {
    auto it = by_placeholder.find(placeholder);
    if (it != by_placeholder.end()) return it->second;
    by_placeholder.emplace(placeholder, dex.bindings.size());
    dex.bindings.push_back(Binding{placeholder, arg_name, value, {}});
    return dex.bindings.size() - 1;
  };

  // Scenario pass: assign placeholders in pre-order.
  auto walk_scenario = [&](auto&& self, MrNode& node, TreePath& path) -> void {
    if (is_value_leaf(node)) {
      const ArgRule& rule = config.rule_for(node.label);
      if (rule.kind == ArgRuleKind::Retain) return;
      const std::string value = leaf_value(node);
      std::size_t b;
      if (rule.kind == ArgRuleKind::NumericGroup) {
        b = binding_index(node.label + "__" + numeric_group_of(value),
                          node.label, value);
      } else {
        auto key = std::make_pair(node.label, value);
        auto it = by_value.find(key);
        if (it == by_value.end()) {
          b = binding_index(
              node.label + "__" + uniqueness_suffix(next_suffix[node.label]++),
              node.label, value);
          by_value.emplace(std::move(key), b);
        } else {
          b = it->second;
        }
      }
      dex.bindings[b].occurrences.push_back(
          Occurrence{FieldKind::Scenario, path, 0, 0, value});
      detail::replace_leaf_value(node, dex.bindings[b].placeholder);
      return;
    }
    for (std::size_t i = 0; i < node.children.size(); ++i) {
      path.push_back(i);
      self(self, node.children[i], path);
      path.pop_back();
    }
  };
  for (std::size_t r = 0; r < dex.delex_scenario.roots.size(); ++r) {
    TreePath path{r};
    walk_scenario(walk_scenario, dex.delex_scenario.roots[r], path);
  }

  // Reference pass: replace leaves whose (name, value) matches a binding.
  if (dex.delex_reference) {
    auto walk_reference = [&](auto&& self, MrNode& node,
                              TreePath& path) -> void {
      if (is_value_leaf(node)) {
        const ArgRule& rule = config.rule_for(node.label);
        if (rule.kind == ArgRuleKind::Retain) return;
        const std::string value = leaf_value(node);
        std::size_t binding = dex.bindings.size();
        if (rule.kind == ArgRuleKind::NumericGroup) {
          auto it = by_placeholder.find(node.label + "__" +
                                        numeric_group_of(value));
          if (it != by_placeholder.end()) binding = it->second;
        } else {
          auto it = by_value.find(std::make_pair(node.label, value));
          if (it != by_value.end()) binding = it->second;
        }
        if (binding == dex.bindings.size()) {
          dex.unmatched_reference_leaves.push_back(path);
          return;
        }
        dex.bindings[binding].occurrences.push_back(
            Occurrence{FieldKind::Reference, path, 0, 0, value});
        detail::replace_leaf_value(node, dex.bindings[binding].placeholder);
        return;
      }
      for (std::size_t i = 0; i < node.children.size(); ++i) {
        path.push_back(i);
        self(self, node.children[i], path);
        path.pop_back();
      }
    };
    for (std::size_t r = 0; r < dex.delex_reference->roots.size(); ++r) {
      TreePath path{r};
      walk_reference(walk_reference, dex.delex_reference->roots[r], path);
    }
  }

  // Query pass: verbatim value matching, case-insensitive, longest match
  // first, word-boundary anchored; all matching is done against the
  // original query so replaced text is never rescanned.
  if (include_query) {
    struct Candidate {
      std::size_t begin, length, binding;
    };
    std::vector<Candidate> candidates;
    for (std::size_t b = 0; b < dex.bindings.size(); ++b) {
      const Binding& binding = dex.bindings[b];
      if (config.rule_for(binding.arg_name).kind != ArgRuleKind::Delex)
        continue;
      const std::string& value = binding.original_value;
      if (value.empty()) continue;
      for (std::size_t pos = 0; pos + value.size() <= example.query.size();
           ++pos) {
        if (detail::matches_at(example.query, pos, value) &&
            detail::word_boundary(example.query, pos, value.size()))
          candidates.push_back(Candidate{pos, value.size(), b});
      }
    }
    std::sort(candidates.begin(), candidates.end(),
              [](const Candidate& a, const Candidate& b) {
                if (a.begin != b.begin) return a.begin < b.begin;
                if (a.length != b.length) return a.length > b.length;
                return a.binding < b.binding;
              });

    std::string out;
    std::size_t cursor = 0;
    for (const Candidate& c : candidates) {
      if (c.begin < cursor) continue;  // overlapped by an earlier, longer match
      out.append(example.query, cursor, c.begin - cursor);
      const std::string& placeholder = dex.bindings[c.binding].placeholder;
      dex.bindings[c.binding].occurrences.push_back(
          Occurrence{FieldKind::Query, {}, out.size(), placeholder.size(),
                     example.query.substr(c.begin, c.length)});
      out += placeholder;
      cursor = c.begin + c.length;
    }
    out.append(example.query, cursor, std::string::npos);
    dex.delex_query = std::move(out);
  }

  return dex;
}

namespace detail {

inline void substitute_occurrence(DelexExample& dex, const Occurrence& occ,
                                  const std::string& value,
                                  std::string& query,
                                  std::ptrdiff_t& query_shift) {
  switch (occ.field) {
    case FieldKind::Scenario: {
      MrNode* leaf = node_at(dex.delex_scenario, occ.path);
      if (leaf) replace_leaf_value(*leaf, value);
      break;
    }
    case FieldKind::Reference: {
      if (!dex.delex_reference) break;
      MrNode* leaf = node_at(*dex.delex_reference, occ.path);
      if (leaf) replace_leaf_value(*leaf, value);
      break;
    }
    case FieldKind::Query: {
      const std::size_t begin =
          static_cast<std::size_t>(static_cast<std::ptrdiff_t>(occ.begin) +
                                   query_shift);
      query.replace(begin, occ.length, value);
      query_shift += static_cast<std::ptrdiff_t>(value.size()) -
                     static_cast<std::ptrdiff_t>(occ.length);
      break;
    }
  }
}

}  // namespace detail

// Substitutes one value per placeholder at every recorded occurrence.
// `values` must cover every binding.
inline Example relexicalize(const DelexExample& dex,
                            const std::map<std::string, std::string>& values) {
  for (const Binding& b : dex.bindings)
    if (!values.count(b.placeholder)) throw MissingBinding(b.placeholder);

  DelexExample work = dex;
  std::string query = dex.delex_query;
  std::ptrdiff_t shift = 0;

  // Query occurrences must be replayed left to right for span arithmetic;
  // they were recorded in that order.
  for (const Binding& b : work.bindings) {
    const std::string& value = values.at(b.placeholder);
    for (const Occurrence& occ : b.occurrences)
      if (occ.field != FieldKind::Query)
        detail::substitute_occurrence(work, occ, value, query, shift);
  }
  std::vector<std::pair<Occurrence, std::string>> query_occurrences;
  for (const Binding& b : work.bindings)
    for (const Occurrence& occ : b.occurrences)
      if (occ.field == FieldKind::Query)
        query_occurrences.emplace_back(occ, values.at(b.placeholder));
  std::sort(query_occurrences.begin(), query_occurrences.end(),
            [](const auto& a, const auto& b) {
              return a.first.begin < b.first.begin;
            });
  for (const auto& [occ, value] : query_occurrences)
    detail::substitute_occurrence(work, occ, value, query, shift);

  Example out = dex.base;
  out.query = std::move(query);
  out.scenario = serialize(work.delex_scenario);
  if (work.delex_reference) out.reference = serialize(*work.delex_reference);
  return out;
}

// Exact inverse of delexicalize: every occurrence gets back the value that
// was found there, occurrence by occurrence. Unlike relexicalize this also
// restores NumericGroup leaves that shared a placeholder but held different
// values.
inline Example restore_original(const DelexExample& dex) {
  DelexExample work = dex;
  std::string query = dex.delex_query;
  std::ptrdiff_t shift = 0;

  for (const Binding& b : work.bindings)
    for (const Occurrence& occ : b.occurrences)
      if (occ.field != FieldKind::Query)
        detail::substitute_occurrence(work, occ, occ.original, query, shift);
  std::vector<Occurrence> query_occurrences;
  for (const Binding& b : work.bindings)
    for (const Occurrence& occ : b.occurrences)
      if (occ.field == FieldKind::Query) query_occurrences.push_back(occ);
  std::sort(query_occurrences.begin(), query_occurrences.end(),
            [](const Occurrence& a, const Occurrence& b) {
              return a.begin < b.begin;
            });
  for (const Occurrence& occ : query_occurrences)
    detail::substitute_occurrence(work, occ, occ.original, query, shift);

  Example out = dex.base;
  out.query = std::move(query);
  out.scenario = serialize(work.delex_scenario);
  if (work.delex_reference) out.reference = serialize(*work.delex_reference);
  return out;
}

}  // namespace mrkit
