#pragma once

#include <map>
#include <string>
#include <vector>

#include "mrkit/dataset.hpp"
#include "mrkit/delex.hpp"
#include "mrkit/domain_config.hpp"
#include "mrkit/errors.hpp"
#include "mrkit/mr.hpp"

namespace mrkit {

// Bucket keys at four granularities. Each key is the canonical form of a
// reduced scenario tree, so sibling order and whitespace never split a
// bucket. Coarsest to finest: CB keeps only act labels plus direct argument
// names; MB keeps the whole argument structure (values only for configured
// arguments); FB keys the delexicalized scenario; FBQ appends the
// delexicalized query.

enum class Granularity { CB, MB, FB, FBQ };

inline const char* granularity_name(Granularity g) {
  switch (g) {
    case Granularity::CB:
      return "cb";
    case Granularity::MB:
      return "mb";
    case Granularity::FB:
      return "fb";
    default:
      return "fbq";
  }
}

inline Granularity granularity_from_name(const std::string& name) {
  if (name == "cb") return Granularity::CB;
  if (name == "mb") return Granularity::MB;
  if (name == "fb") return Granularity::FB;
  if (name == "fbq") return Granularity::FBQ;
  throw SchemaError("granularity", "expected cb, mb, fb or fbq");
}

struct BucketKey {
  Granularity granularity;
  std::string key;

  bool operator==(const BucketKey&) const = default;
  auto operator<=>(const BucketKey&) const = default;
};

// FBQ keys are "<fb key>\t<delex query>"; a tab can appear in neither half
// (canonical serialization is single-spaced and the query is whitespace
// normalized).
inline constexpr char fbq_separator = '\t';

namespace detail {

inline MrNode cb_reduce_node(const MrNode& node) {
  MrNode out;
  out.kind = node.kind;
  out.label = node.label;
  out.index = node.index;
  if (node.kind == NodeKind::DiscourseRelation) {
    for (const MrNode& c : node.children)
      if (!c.is_terminal()) out.children.push_back(cb_reduce_node(c));
  } else {
    for (const MrNode& c : node.children)
      if (c.kind == NodeKind::Argument)
        out.children.push_back(MrNode::terminal(c.label));
  }
  return out;
}

inline MrNode mb_reduce_node(const MrNode& node, const DomainConfig& config) {
  if (node.kind == NodeKind::Argument) {
    if (config.mb_value_retaining.count(node.label)) return node;
    if (is_value_leaf(node)) return MrNode::terminal(node.label);
  }
  MrNode out;
  out.kind = node.kind;
  out.label = node.label;
  out.index = node.index;
  for (const MrNode& c : node.children)
    if (!c.is_terminal()) out.children.push_back(mb_reduce_node(c, config));
  return out;
}

}  // namespace detail

inline BucketKey cb_hash(const Example& example, const DomainConfig& config) {
  MrForest scenario = parse(example.scenario, config.vocab);
  MrForest reduced;
  for (const MrNode& root : scenario.roots)
    if (!root.is_terminal())
      reduced.roots.push_back(detail::cb_reduce_node(root));
  return {Granularity::CB, canonical_form(reduced)};
}

inline BucketKey mb_hash(const Example& example, const DomainConfig& config) {
  MrForest scenario = parse(example.scenario, config.vocab);
  MrForest reduced;
  for (const MrNode& root : scenario.roots)
    if (!root.is_terminal())
      reduced.roots.push_back(detail::mb_reduce_node(root, config));
  return {Granularity::MB, canonical_form(reduced)};
}

inline BucketKey fb_hash(const Example& example, const DomainConfig& config) {
  DelexExample dex = delexicalize(example, config, false);
  return {Granularity::FB, canonical_form(dex.delex_scenario)};
}

inline BucketKey fbq_hash(const Example& example, const DomainConfig& config) {
  DelexExample dex = delexicalize(example, config, true);
  std::string key = canonical_form(dex.delex_scenario);
  key += fbq_separator;
  key += to_lower_ascii(normalize_whitespace(dex.delex_query));
  return {Granularity::FBQ, std::move(key)};
}

inline BucketKey bucket_key(const Example& example, const DomainConfig& config,
                            Granularity g) {
  switch (g) {
    case Granularity::CB:
      return cb_hash(example, config);
    case Granularity::MB:
      return mb_hash(example, config);
    case Granularity::FB:
      return fb_hash(example, config);
    default:
      return fbq_hash(example, config);
  }
}

// Complete partition of a dataset: key → ids, ids sorted, so the result is
// independent of input order.
inline std::map<std::string, std::vector<std::string>> partition(
    const std::vector<Example>& dataset, const DomainConfig& config,
    Granularity g) {
  std::map<std::string, std::vector<std::string>> buckets;
  std::vector<std::pair<std::string, std::string>> failures;
  for (const Example& e : dataset) {
    try {
      buckets[bucket_key(e, config, g).key].push_back(e.id);
    } catch (const Error& err) {
      failures.emplace_back(e.id, err.what());
    }
  }
  if (!failures.empty()) throw AggregateParseError(failures);
  for (auto& [key, ids] : buckets) std::sort(ids.begin(), ids.end());
  return buckets;
}

}  // namespace mrkit
