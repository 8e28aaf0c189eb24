#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mrkit/bucketing.hpp"
#include "mrkit/dataset.hpp"
#include "mrkit/domain_config.hpp"
#include "mrkit/errors.hpp"
#include "mrkit/mr.hpp"

namespace mrkit {

// Structural fidelity checking: does a generated response carry the same
// bracketing as its scenario, modulo sibling order? Strict mode compares the
// skeletons outright. Lenient mode additionally allows the response to omit
// an argument subtree when a value-identical copy (same name, same values)
// sits under a sibling dialog act of the same base label and at least one
// copy survives, which is the aggregation pattern found in gold references.
// Indices are ignored by default since annotated references drop them; pass
// require_indices to compare them too.

enum class TreeAccuracyMode { Strict, Lenient };

struct EvalRecord {
  std::string example_id;
  std::string experiment_id;
  std::string candidate_text;
  bool tree_pass = false;
  std::string failure_reason;  // empty when the check passed
};

struct RunReport {
  std::string experiment_id;
  double tree_accuracy = 0.0;  // percentage
  double bleu = 0.0;           // [0, 1]; filled by the evaluation driver
  std::size_t n_examples = 0;
  std::vector<bool> passes;  // per record, in input order
};

struct TreeCheck {
  bool pass = false;
  std::string reason;  // empty when pass
};

namespace detail {

inline std::string path_key(const TreePath& path) {
  std::string out;
  for (std::size_t step : path) {
    out += std::to_string(step);
    out += '.';
  }
  return out;
}

// One argument subtree that a response may aggregate away: it has a
// value-identical twin under a different sibling act of the same base label.
struct OmittableArg {
  TreePath path;
  std::string act;    // owning act, as a path key
  std::string group;  // sibling scope + act base label + subtree canon
};

inline void collect_omittable(const MrForest& scenario,
                              std::vector<OmittableArg>& out) {
  std::vector<std::pair<TreePath, const std::vector<MrNode>*>> scopes;
  scopes.emplace_back(TreePath{}, &scenario.roots);
  for (std::size_t s = 0; s < scopes.size(); ++s) {
    const auto [prefix, children] = scopes[s];
    for (std::size_t i = 0; i < children->size(); ++i) {
      const MrNode& child = (*children)[i];
      TreePath child_path = prefix;
      child_path.push_back(i);
      if (!child.children.empty())
        scopes.emplace_back(child_path, &child.children);
      if (child.kind != NodeKind::DialogAct) continue;
      for (std::size_t j = 0; j < child.children.size(); ++j) {
        const MrNode& arg = child.children[j];
        if (arg.kind != NodeKind::Argument) continue;
        TreePath arg_path = child_path;
        arg_path.push_back(j);
        out.push_back({std::move(arg_path), path_key(child_path),
                       path_key(prefix) + '\x1f' + child.label + '\x1f' +
                           canonical_node(arg)});
      }
    }
  }

  // Only members of groups spanning at least two acts can be omitted.
  std::map<std::string, std::set<std::string>> acts_per_group;
  for (const OmittableArg& arg : out) acts_per_group[arg.group].insert(arg.act);
  std::erase_if(out, [&](const OmittableArg& arg) {
    return acts_per_group[arg.group].size() < 2;
  });
}

inline MrForest without_subtrees(const MrForest& forest,
                                 std::vector<TreePath> paths) {
  MrForest pruned = forest;
  std::sort(paths.begin(), paths.end(), std::greater<>());
  for (const TreePath& path : paths) {
    TreePath parent(path.begin(), path.end() - 1);
    std::vector<MrNode>& siblings =
        parent.empty() ? pruned.roots : node_at(pruned, parent)->children;
    siblings.erase(siblings.begin() +
                   static_cast<std::ptrdiff_t>(path.back()));
  }
  return pruned;
}

}  // namespace detail

inline TreeCheck check_tree(const MrForest& scenario,
                            std::string_view candidate,
                            const DomainConfig& config,
                            TreeAccuracyMode mode = TreeAccuracyMode::Strict,
                            bool require_indices = false) {
  const bool strip = !require_indices;
  MrForest parsed;
  try {
    parsed = parse(candidate, config.vocab);
  } catch (const ParseError& error) {
    return {false, std::string("candidate does not parse: ") + error.what()};
  }
  const std::string want = canonical_form(skeleton(scenario, strip));
  const std::string got = canonical_form(skeleton(parsed, strip));
  if (got == want) return {true, {}};
  if (mode == TreeAccuracyMode::Strict)
    return {false, "structural tokens differ"};

  std::vector<detail::OmittableArg> omittable;
  detail::collect_omittable(scenario, omittable);
  // Bounded search: 2^12 pruned skeletons is the cap. Scenarios with more
  // duplicated subtrees than that are beyond any data seen in practice.
  const std::size_t n = std::min<std::size_t>(omittable.size(), 12);
  for (std::uint64_t mask = 1; mask < (1ULL << n); ++mask) {
    bool licensed = true;
    std::vector<TreePath> dropped;
    for (std::size_t i = 0; i < n && licensed; ++i) {
      if (!(mask >> i & 1)) continue;
      // A surviving twin under a different act must license the drop.
      bool twin = false;
      for (std::size_t j = 0; j < omittable.size() && !twin; ++j)
        twin = (j >= n || !(mask >> j & 1)) &&
               omittable[j].group == omittable[i].group &&
               omittable[j].act != omittable[i].act;
      licensed = twin;
      dropped.push_back(omittable[i].path);
    }
    if (!licensed) continue;
    const MrForest pruned =
        detail::without_subtrees(scenario, std::move(dropped));
    if (canonical_form(skeleton(pruned, strip)) == got) return {true, {}};
  }
  return {false, "structural tokens differ beyond the aggregation allowance"};
}

inline bool tree_accuracy(const MrForest& scenario, std::string_view candidate,
                          const DomainConfig& config,
                          TreeAccuracyMode mode = TreeAccuracyMode::Strict,
                          bool require_indices = false) {
  return check_tree(scenario, candidate, config, mode, require_indices).pass;
}

// First candidate (by generator rank) whose tree structure checks out.
inline std::optional<std::pair<std::size_t, std::string>> kd_filter(
    const MrForest& scenario, const std::vector<std::string>& candidates,
    const DomainConfig& config,
    TreeAccuracyMode mode = TreeAccuracyMode::Strict,
    bool require_indices = false) {
  for (std::size_t i = 0; i < candidates.size(); ++i)
    if (tree_accuracy(scenario, candidates[i], config, mode, require_indices))
      return std::make_pair(i, candidates[i]);
  return std::nullopt;
}

// Tree-accuracy percentage over one experiment's records. BLEU is computed
// from the candidate and reference texts separately and filled in by the
// caller.
inline RunReport aggregate(const std::vector<EvalRecord>& records) {
  if (records.empty()) throw MissingCandidates({});
  std::set<std::pair<std::string, std::string>> seen;
  RunReport report;
  report.experiment_id = records.front().experiment_id;
  report.n_examples = records.size();
  std::size_t passed = 0;
  for (const EvalRecord& record : records) {
    if (!seen.emplace(record.example_id, record.experiment_id).second)
      throw DuplicateId(record.experiment_id, record.example_id);
    report.passes.push_back(record.tree_pass);
    if (record.tree_pass) ++passed;
  }
  report.tree_accuracy = 100.0 * static_cast<double>(passed) /
                         static_cast<double>(records.size());
  return report;
}

// Across repeated training runs of one configuration: the best run's
// tree accuracy and the population standard deviation over all runs.
inline std::pair<double, double> robustness(
    const std::vector<RunReport>& reports) {
  if (reports.size() < 2) throw TooFewRuns(reports.size());
  double best = reports.front().tree_accuracy;
  double mean = 0.0;
  for (const RunReport& r : reports) {
    best = std::max(best, r.tree_accuracy);
    mean += r.tree_accuracy;
  }
  mean /= static_cast<double>(reports.size());
  double variance = 0.0;
  for (const RunReport& r : reports) {
    const double d = r.tree_accuracy - mean;
    variance += d * d;
  }
  variance /= static_cast<double>(reports.size());
  return {best, std::sqrt(variance)};
}

using PassMatrix = std::map<std::string, std::map<std::string, bool>>;

// Picks the examples that best separate experiments: bucket the test set at
// FB granularity, in each bucket take the example with the fewest passing
// experiments among those with at least one pass, rank buckets by that count
// ascending, and return the first k picks. Buckets where everything failed
// everywhere are skipped.
inline std::vector<std::string> select_differentiating(
    const std::vector<Example>& test_set, const PassMatrix& passes,
    const DomainConfig& config, std::size_t k = 150) {
  std::vector<std::string> missing;
  for (const Example& e : test_set)
    if (!passes.count(e.id)) missing.push_back(e.id);
  if (!missing.empty()) throw MissingCandidates(std::move(missing));

  const auto buckets = partition(test_set, config, Granularity::FB);
  struct Pick {
    std::size_t pass_count;
    std::string id;
  };
  std::vector<Pick> picks;
  for (const auto& [key, ids] : buckets) {
    std::optional<Pick> best;
    for (const std::string& id : ids) {
      std::size_t count = 0;
      for (const auto& [experiment, pass] : passes.at(id))
        if (pass) ++count;
      if (count == 0) continue;
      if (!best || count < best->pass_count) best = Pick{count, id};
    }
    if (best) picks.push_back(std::move(*best));
  }
  std::stable_sort(picks.begin(), picks.end(),
                   [](const Pick& a, const Pick& b) {
                     return a.pass_count < b.pass_count;
                   });
  std::vector<std::string> out;
  for (const Pick& pick : picks) {
    if (out.size() == k) break;
    out.push_back(pick.id);
  }
  return out;
}

}  // namespace mrkit
