#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mrkit/bucketing.hpp"
#include "mrkit/dataset.hpp"
#include "mrkit/domain_config.hpp"
#include "mrkit/errors.hpp"
#include "mrkit/rng.hpp"

namespace mrkit {

// Bucket-aware sampling. Draws are deterministic: each bucket's generator is
// seeded by mixing the plan seed with a hash of the bucket key, so a draw
// never depends on input order, other buckets, or scheduling.

struct SamplePlan {
  Granularity granularity = Granularity::FB;
  std::optional<std::uint64_t> per_bucket;
  std::optional<double> bucket_fraction;  // in (0, 1]
  std::uint64_t seed = 0;

  bool valid() const {
    if (per_bucket.has_value() == bucket_fraction.has_value()) return false;
    if (per_bucket && *per_bucket == 0) return false;
    if (bucket_fraction && (*bucket_fraction <= 0.0 || *bucket_fraction > 1.0))
      return false;
    return true;
  }
};

inline nlohmann::ordered_json plan_to_json(const SamplePlan& plan) {
  nlohmann::ordered_json j;
  j["granularity"] = granularity_name(plan.granularity);
  if (plan.per_bucket) j["per_bucket"] = *plan.per_bucket;
  if (plan.bucket_fraction) j["bucket_fraction"] = *plan.bucket_fraction;
  j["seed"] = plan.seed;
  return j;
}

inline SamplePlan plan_from_json(const nlohmann::json& j) {
  SamplePlan plan;
  if (!j.is_object()) throw SchemaError("<plan>", "must be an object");
  if (!j.contains("granularity") || !j["granularity"].is_string())
    throw SchemaError("granularity", "required string");
  plan.granularity = granularity_from_name(j["granularity"].get<std::string>());
  if (j.contains("per_bucket")) {
    if (!j["per_bucket"].is_number_unsigned() &&
        !j["per_bucket"].is_number_integer())
      throw SchemaError("per_bucket", "must be a positive integer");
    plan.per_bucket = j["per_bucket"].get<std::uint64_t>();
  }
  if (j.contains("bucket_fraction")) {
    if (!j["bucket_fraction"].is_number())
      throw SchemaError("bucket_fraction", "must be a number in (0, 1]");
    plan.bucket_fraction = j["bucket_fraction"].get<double>();
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer())
      throw SchemaError("seed", "must be an integer");
    plan.seed = j["seed"].get<std::uint64_t>();
  }
  if (!plan.valid())
    throw SchemaError("<plan>",
                      "exactly one of per_bucket / bucket_fraction, in range");
  return plan;
}

inline std::vector<Example> sample(const std::vector<Example>& dataset,
                                   const DomainConfig& config,
                                   const SamplePlan& plan) {
  if (dataset.empty()) throw EmptyDataset();
  if (!plan.valid())
    throw SchemaError("<plan>",
                      "exactly one of per_bucket / bucket_fraction, in range");

  std::unordered_map<std::string, const Example*> by_id;
  by_id.reserve(dataset.size());
  for (const Example& e : dataset) {
    if (!by_id.emplace(e.id, &e).second) throw DuplicateId(e.domain, e.id);
  }

  // std::map ordering makes bucket iteration key-sorted; ids inside each
  // bucket are already sorted by partition.
  std::map<std::string, std::vector<std::string>> buckets =
      partition(dataset, config, plan.granularity);

  std::vector<std::pair<std::string, std::string>> picks;  // (key, id)
  auto draw_from_bucket = [&](const std::string& key,
                              const std::vector<std::string>& ids,
                              std::uint64_t n) {
    SplitMix64 rng(mix_seed(plan.seed, fnv1a64(key)));
    const std::size_t k =
        static_cast<std::size_t>(std::min<std::uint64_t>(n, ids.size()));
    for (std::size_t idx : rng.choose(ids.size(), k))
      picks.emplace_back(key, ids[idx]);
  };

  if (plan.per_bucket) {
    for (const auto& [key, ids] : buckets)
      draw_from_bucket(key, ids, *plan.per_bucket);
  } else {
    std::vector<const std::pair<const std::string, std::vector<std::string>>*>
        ordered;
    ordered.reserve(buckets.size());
    for (const auto& kv : buckets) ordered.push_back(&kv);
    const std::size_t want = static_cast<std::size_t>(
        std::ceil(*plan.bucket_fraction * static_cast<double>(ordered.size())));
    SplitMix64 selector(plan.seed);
    for (std::size_t idx : selector.choose(ordered.size(), want))
      draw_from_bucket(ordered[idx]->first, ordered[idx]->second, 1);
  }

  std::sort(picks.begin(), picks.end());
  std::vector<Example> out;
  out.reserve(picks.size());
  for (const auto& [key, id] : picks) out.push_back(*by_id.at(id));
  return out;
}

// Concatenates datasets with domain-namespaced ids.
inline std::vector<Example> merge(
    const std::vector<std::pair<std::string, std::vector<Example>>>& sources) {
  std::vector<Example> out;
  for (const auto& [domain, examples] : sources) {
    std::set<std::string> ids;
    for (const Example& e : examples) {
      if (!ids.insert(e.id).second) throw DuplicateId(domain, e.id);
      Example tagged = e;
      tagged.id = domain + ":" + e.id;
      tagged.domain = domain;
      out.push_back(std::move(tagged));
    }
  }
  return out;
}

// Share of the full training set a sampling plan leaves unused, as a
// percentage with one decimal.
inline double data_reduction(std::uint64_t full_size,
                             std::uint64_t sampled_size) {
  if (full_size == 0 || sampled_size > full_size)
    throw InvalidCounts(full_size, sampled_size);
  const double raw = 100.0 * (1.0 - static_cast<double>(sampled_size) /
                                        static_cast<double>(full_size));
  return std::round(raw * 10.0) / 10.0;
}

}  // namespace mrkit
