#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mrkit {

// Base class for every error thrown by the toolkit.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// MR text errors
// ---------------------------------------------------------------------------

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " (at offset " + std::to_string(position) + ")"),
        position(position) {}
  std::size_t position;
};

class UnbalancedBrackets final : public ParseError {
 public:
  explicit UnbalancedBrackets(std::size_t position)
      : ParseError("unbalanced brackets", position) {}
};

class EmptyLabel final : public ParseError {
 public:
  explicit EmptyLabel(std::size_t position)
      : ParseError("open bracket without a label", position) {}
};

// Parse failures over a whole dataset, keyed by example id.
class AggregateParseError final : public Error {
 public:
  explicit AggregateParseError(
      std::vector<std::pair<std::string, std::string>> failures)
      : Error(describe(failures)), failures(std::move(failures)) {}
  std::vector<std::pair<std::string, std::string>> failures;

 private:
  static std::string describe(
      const std::vector<std::pair<std::string, std::string>>& fails) {
    std::string msg =
        std::to_string(fails.size()) + " example(s) failed to parse";
    if (!fails.empty()) {
      msg += "; first: " + fails.front().first + ": " + fails.front().second;
    }
    return msg;
  }
};

// ---------------------------------------------------------------------------
// Configuration errors
// ---------------------------------------------------------------------------

class SchemaError final : public Error {
 public:
  SchemaError(std::string field, std::string reason)
      : Error("config field '" + field + "': " + reason),
        field(std::move(field)),
        reason(std::move(reason)) {}
  std::string field;
  std::string reason;
};

class ConflictingLabel final : public Error {
 public:
  explicit ConflictingLabel(std::string label)
      : Error("label '" + label +
              "' appears in both relation_labels and act_labels"),
        label(std::move(label)) {}
  std::string label;
};

// ---------------------------------------------------------------------------
// Delexicalization / augmentation errors
// ---------------------------------------------------------------------------

class MissingBinding final : public Error {
 public:
  explicit MissingBinding(std::string placeholder)
      : Error("no value supplied for placeholder '" + placeholder + "'"),
        placeholder(std::move(placeholder)) {}
  std::string placeholder;
};

class EmptyPool final : public Error {
 public:
  explicit EmptyPool(std::string placeholder)
      : Error("no pool values available for placeholder '" + placeholder +
              "'"),
        placeholder(std::move(placeholder)) {}
  std::string placeholder;
};

class PoolExhausted final : public Error {
 public:
  explicit PoolExhausted(std::string placeholder)
      : Error("pool has fewer distinct values than distinct suffixes for '" +
              placeholder + "'"),
        placeholder(std::move(placeholder)) {}
  std::string placeholder;
};

// ---------------------------------------------------------------------------
// Curation errors
// ---------------------------------------------------------------------------

class EmptyDataset final : public Error {
 public:
  EmptyDataset() : Error("dataset is empty") {}
};

class DuplicateId final : public Error {
 public:
  DuplicateId(std::string domain, std::string id)
      : Error("duplicate example id '" + id + "' in '" + domain + "'"),
        domain(std::move(domain)),
        id(std::move(id)) {}
  std::string domain;
  std::string id;
};

class InvalidCounts final : public Error {
 public:
  InvalidCounts(std::size_t full, std::size_t sampled)
      : Error("invalid counts: full=" + std::to_string(full) +
              " sampled=" + std::to_string(sampled)) {}
};

// ---------------------------------------------------------------------------
// Metric errors
// ---------------------------------------------------------------------------

class EmptyCorpus final : public Error {
 public:
  EmptyCorpus() : Error("BLEU corpus is empty") {}
};

class MissingCandidates final : public Error {
 public:
  explicit MissingCandidates(std::vector<std::string> example_ids)
      : Error(describe(example_ids)), example_ids(std::move(example_ids)) {}
  std::vector<std::string> example_ids;

 private:
  static std::string describe(const std::vector<std::string>& ids) {
    if (ids.empty()) return std::string("no evaluation records");
    std::string msg = std::to_string(ids.size()) + " example(s) lack candidates";
    msg += "; first: " + ids.front();
    return msg;
  }
};

class TooFewRuns final : public Error {
 public:
  explicit TooFewRuns(std::size_t got)
      : Error("robustness needs at least 2 runs, got " + std::to_string(got)) {}
};

// ---------------------------------------------------------------------------
// Import errors
// ---------------------------------------------------------------------------

class MappingError final : public Error {
 public:
  MappingError(std::string reason, std::string sample_line)
      : Error("column mapping error: " + reason +
              (sample_line.empty() ? "" : "; offending line: " + sample_line)),
        reason(std::move(reason)),
        sample_line(std::move(sample_line)) {}
  std::string reason;
  std::string sample_line;
};

class IoError final : public Error {
 public:
  explicit IoError(const std::string& what) : Error(what) {}
};

}  // namespace mrkit
