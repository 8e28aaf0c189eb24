#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mrkit/delex.hpp"
#include "mrkit/domain_config.hpp"
#include "mrkit/errors.hpp"
#include "mrkit/rng.hpp"

namespace mrkit {

// Epoch-wise re-lexicalization of delexicalized examples: each emitted
// instance substitutes freshly drawn values for every placeholder,
// consistently across query, scenario, and reference. The surface shape is
// untouched, so every instance keeps its source's FB bucket key.

inline constexpr int kAugmentDrawRetries = 16;

namespace detail {

// Pool for one binding. NumericGroup placeholders draw from the slice of
// the argument's pool that falls in their group; everything else draws from
// the whole pool.
inline ValuePool binding_pool(const Binding& b, const DomainConfig& config) {
  auto it = config.value_pools.find(b.arg_name);
  if (it == config.value_pools.end()) throw EmptyPool(b.placeholder);
  ValuePool pool = it->second;
  if (config.rule_for(b.arg_name).kind == ArgRuleKind::NumericGroup)
    pool = pool.restricted_to_group(b.placeholder.substr(b.arg_name.size() + 2));
  if (pool.empty()) throw EmptyPool(b.placeholder);
  return pool;
}

}  // namespace detail

// One fresh instance. Distinct uniqueness suffixes of the same argument get
// distinct values, enforced by rejection with a bounded retry count. Leaves
// without a placeholder (Retain rule, inflected reference values) are left
// as they were.
inline Example augment_once(const DelexExample& dex, const DomainConfig& config,
                            SplitMix64& rng) {
  if (dex.bindings.empty()) return dex.base;

  std::map<std::string, std::string> values;
  std::map<std::string, std::set<std::string>> taken;
  for (const Binding& b : dex.bindings) {
    const ValuePool pool = detail::binding_pool(b, config);
    std::set<std::string>& used = taken[b.arg_name];
    std::optional<std::string> drawn;
    for (int attempt = 0; attempt <= kAugmentDrawRetries; ++attempt) {
      std::string value = pool.draw(rng);
      if (!used.count(value)) {
        drawn = std::move(value);
        break;
      }
    }
    if (!drawn) throw PoolExhausted(b.placeholder);
    used.insert(*drawn);
    values[b.placeholder] = std::move(*drawn);
  }
  return relexicalize(dex, values);
}

struct EpochInstance {
  std::uint64_t epoch = 1;  // numbered from 1
  Example example;

  bool operator==(const EpochInstance&) const = default;
};

struct AugmentReport {
  std::size_t emitted = 0;
  // Source ids whose reference held a value no scenario binding matched;
  // those leaves keep their original token in every instance.
  std::vector<std::string> inflected_reference_ids;
};

// Streams epochs of augmented instances in source order. Each draw is a pure
// function of (seed, epoch, example id), so any slice of the stream can be
// regenerated independently. With per_instance set, repeated emissions of
// one id within an epoch get fresh draws (keyed additionally by their
// within-epoch repetition ordinal; the first emission matches the default
// mode).
class AugmentStream {
 public:
  AugmentStream(std::vector<DelexExample> source, DomainConfig config,
                std::uint64_t seed,
                std::optional<std::uint64_t> epochs = std::nullopt,
                bool per_instance = false)
      : source_(std::move(source)),
        config_(std::move(config)),
        seed_(seed),
        epochs_(epochs),
        per_instance_(per_instance) {
    std::set<std::string> flagged;
    for (const DelexExample& dex : source_)
      if (!dex.unmatched_reference_leaves.empty())
        flagged.insert(dex.base.id);
    report_.inflected_reference_ids.assign(flagged.begin(), flagged.end());
  }

  // Next instance, or nullopt once the epoch budget is spent.
  std::optional<EpochInstance> next() {
    if (epochs_ && epoch_ > *epochs_) return std::nullopt;
    if (source_.empty()) return std::nullopt;

    const DelexExample& dex = source_[position_];
    std::uint64_t key = mix_seed(seed_, epoch_, fnv1a64(dex.base.id));
    if (per_instance_) {
      std::uint64_t& seen = repeats_[dex.base.id];
      if (seen > 0) key = mix_seed(key, seen);
      ++seen;
    }
    SplitMix64 rng(key);

    EpochInstance out{epoch_, augment_once(dex, config_, rng)};
    ++report_.emitted;
    if (++position_ == source_.size()) {
      position_ = 0;
      ++epoch_;
      repeats_.clear();
    }
    return out;
  }

  const AugmentReport& report() const { return report_; }

 private:
  std::vector<DelexExample> source_;
  DomainConfig config_;
  std::uint64_t seed_;
  std::optional<std::uint64_t> epochs_;
  bool per_instance_;
  std::uint64_t epoch_ = 1;
  std::size_t position_ = 0;
  std::map<std::string, std::uint64_t> repeats_;
  AugmentReport report_;
};

// All instances of a bounded number of epochs, in stream order.
inline std::vector<EpochInstance> augment_epochs(
    const std::vector<DelexExample>& source, const DomainConfig& config,
    std::uint64_t seed, std::uint64_t epochs, bool per_instance = false) {
  AugmentStream stream(source, config, seed, epochs, per_instance);
  std::vector<EpochInstance> out;
  out.reserve(source.size() * epochs);
  while (auto instance = stream.next()) out.push_back(std::move(*instance));
  return out;
}

}  // namespace mrkit
