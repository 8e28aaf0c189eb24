#pragma once

#include <algorithm>
#include <cctype>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mrkit/errors.hpp"

namespace mrkit {

// Flattened tree-structured meaning representations.
//
// The text form is a whitespace-tokenized bracketing: `LABEL[` opens a node,
// `]` closes it, and any other token is a terminal. Scenarios carry slot
// values only at argument leaves; annotated responses interleave surface
// words with the same bracket structure, so terminals may appear at any
// level, including between roots.

// ---------------------------------------------------------------------------
// Lexing
// ---------------------------------------------------------------------------

enum class TokenKind { Open, Close, Term };

struct Token {
  TokenKind kind;
  std::string text;     // label for Open (may be empty for a bare "["),
                        // token text for Term, unused for Close
  std::size_t offset;   // byte offset in the source text

  friend bool operator==(const Token& a, const Token& b) {
    return a.kind == b.kind && a.text == b.text;
  }
};

inline std::string token_text(const Token& t) {
  switch (t.kind) {
    case TokenKind::Open:
      return t.text + "[";
    case TokenKind::Close:
      return "]";
    default:
      return t.text;
  }
}

// Pure lexing: no balance requirement. Joining the tokens back with single
// spaces reproduces the input up to whitespace normalization.
inline std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    while (i < n && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i >= n) break;
    const std::size_t start = i;
    while (i < n && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::string_view tok = text.substr(start, i - start);
    if (tok == "]") {
      out.push_back({TokenKind::Close, "", start});
    } else if (tok.back() == '[') {
      tok.remove_suffix(1);
      out.push_back({TokenKind::Open, std::string(tok), start});
    } else {
      out.push_back({TokenKind::Term, std::string(tok), start});
    }
  }
  return out;
}

inline std::string join_tokens(const std::vector<Token>& tokens) {
  std::string out;
  for (const Token& t : tokens) {
    if (!out.empty()) out += ' ';
    out += token_text(t);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Nodes
// ---------------------------------------------------------------------------

enum class NodeKind { DiscourseRelation, DialogAct, Argument, Terminal };

struct MrNode {
  NodeKind kind = NodeKind::Terminal;
  std::string label;             // empty for Terminal
  std::optional<int> index;      // trailing _<digits> on relation/act labels
  std::vector<MrNode> children;  // empty for Terminal
  std::string text;              // Terminal only, a single token

  bool operator==(const MrNode&) const = default;

  static MrNode terminal(std::string token) {
    MrNode n;
    n.kind = NodeKind::Terminal;
    n.text = std::move(token);
    return n;
  }

  bool is_terminal() const { return kind == NodeKind::Terminal; }

  // Label as written, index suffix included.
  std::string full_label() const {
    if (index) return label + "_" + std::to_string(*index);
    return label;
  }
};

struct MrForest {
  std::vector<MrNode> roots;

  bool operator==(const MrForest&) const = default;
  bool empty() const { return roots.empty(); }
};

// An argument leaf is an argument whose children are all terminals; its
// value is the children joined by single spaces ("buy milk").
inline bool is_value_leaf(const MrNode& node) {
  if (node.kind != NodeKind::Argument || node.children.empty()) return false;
  return std::all_of(node.children.begin(), node.children.end(),
                     [](const MrNode& c) { return c.is_terminal(); });
}

inline std::string leaf_value(const MrNode& node) {
  std::string value;
  for (const MrNode& c : node.children) {
    if (!c.is_terminal()) continue;
    if (!value.empty()) value += ' ';
    value += c.text;
  }
  return value;
}

// Child-index path from a forest root to a node.
using TreePath = std::vector<std::size_t>;

inline const MrNode* node_at(const MrForest& forest, const TreePath& path) {
  if (path.empty() || path.front() >= forest.roots.size()) return nullptr;
  const MrNode* node = &forest.roots[path.front()];
  for (std::size_t d = 1; d < path.size(); ++d) {
    if (path[d] >= node->children.size()) return nullptr;
    node = &node->children[path[d]];
  }
  return node;
}

inline MrNode* node_at(MrForest& forest, const TreePath& path) {
  return const_cast<MrNode*>(node_at(std::as_const(forest), path));
}

// ---------------------------------------------------------------------------
// Label vocabulary
// ---------------------------------------------------------------------------

// The label sets that decide node kinds. DomainConfig embeds one of these;
// parsing needs nothing else from the config.
struct LabelVocabulary {
  std::set<std::string> relation_labels;
  std::set<std::string> act_labels;

  bool operator==(const LabelVocabulary&) const = default;

  bool is_relation(std::string_view base) const {
    return relation_labels.count(std::string(base)) > 0;
  }
  bool is_act(std::string_view base) const {
    return act_labels.count(std::string(base)) > 0;
  }
};

namespace detail {

// Trailing `_<digits>` splits off as an index only when the prefix is a
// known relation/act label; argument names like `amount_remaining` or a
// label like `INFORM_01` (leading zero) stay whole.
inline std::pair<std::string, std::optional<int>> split_label(
    const std::string& full, const LabelVocabulary& vocab) {
  const std::size_t us = full.rfind('_');
  if (us != std::string::npos && us + 1 < full.size()) {
    const std::string_view digits = std::string_view(full).substr(us + 1);
    const bool numeric =
        std::all_of(digits.begin(), digits.end(),
                    [](char c) { return c >= '0' && c <= '9'; });
    if (numeric && digits.front() != '0' && digits.size() <= 9) {
      const std::string base = full.substr(0, us);
      if (vocab.is_relation(base) || vocab.is_act(base)) {
        return {base, std::stoi(std::string(digits))};
      }
    }
  }
  return {full, std::nullopt};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

inline MrForest parse(std::string_view text, const LabelVocabulary& vocab) {
  std::vector<Token> tokens = tokenize(text);

  // Normalize `label [` (bare bracket after a bare token) to `label[`.
  std::vector<Token> fused;
  fused.reserve(tokens.size());
  for (Token& t : tokens) {
    if (t.kind == TokenKind::Open && t.text.empty()) {
      if (!fused.empty() && fused.back().kind == TokenKind::Term) {
        Token open{TokenKind::Open, std::move(fused.back().text),
                   fused.back().offset};
        fused.back() = std::move(open);
        continue;
      }
      throw EmptyLabel(t.offset);
    }
    fused.push_back(std::move(t));
  }

  MrForest forest;
  std::vector<MrNode> stack;  // open nodes, outermost first
  auto sink = [&]() -> std::vector<MrNode>& {
    return stack.empty() ? forest.roots : stack.back().children;
  };

  for (const Token& t : fused) {
    switch (t.kind) {
      case TokenKind::Open: {
        auto [base, index] = detail::split_label(t.text, vocab);
        MrNode node;
        node.label = std::move(base);
        node.index = index;
        if (vocab.is_relation(node.label)) {
          node.kind = NodeKind::DiscourseRelation;
        } else if (vocab.is_act(node.label)) {
          node.kind = NodeKind::DialogAct;
        } else {
          node.kind = NodeKind::Argument;
        }
        stack.push_back(std::move(node));
        break;
      }
      case TokenKind::Close: {
        if (stack.empty()) throw UnbalancedBrackets(t.offset);
        MrNode done = std::move(stack.back());
        stack.pop_back();
        sink().push_back(std::move(done));
        break;
      }
      case TokenKind::Term:
        sink().push_back(MrNode::terminal(t.text));
        break;
    }
  }
  if (!stack.empty()) throw UnbalancedBrackets(text.size());
  return forest;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace detail {

inline void serialize_node(const MrNode& node, std::string& out) {
  if (!out.empty()) out += ' ';
  if (node.is_terminal()) {
    out += node.text;
    return;
  }
  out += node.full_label();
  out += '[';
  for (const MrNode& c : node.children) serialize_node(c, out);
  out += " ]";
}

}  // namespace detail

// Inverse of parse up to whitespace normalization.
inline std::string serialize(const MrForest& forest) {
  std::string out;
  for (const MrNode& root : forest.roots) detail::serialize_node(root, out);
  return out;
}

inline std::string serialize(const MrNode& node) {
  std::string out;
  detail::serialize_node(node, out);
  return out;
}

// ---------------------------------------------------------------------------
// Skeleton and canonical form
// ---------------------------------------------------------------------------

namespace detail {

inline MrNode skeleton_node(const MrNode& node, bool strip_indices) {
  MrNode out;
  out.kind = node.kind;
  out.label = node.label;
  out.index = strip_indices ? std::nullopt : node.index;
  for (const MrNode& c : node.children) {
    if (c.is_terminal()) continue;
    out.children.push_back(skeleton_node(c, strip_indices));
  }
  return out;
}

}  // namespace detail

// Structural tokens only: every terminal removed, optionally indices too.
inline MrForest skeleton(const MrForest& forest, bool strip_indices = false) {
  MrForest out;
  for (const MrNode& root : forest.roots) {
    if (root.is_terminal()) continue;
    out.roots.push_back(detail::skeleton_node(root, strip_indices));
  }
  return out;
}

namespace detail {

inline std::string canonical_node(const MrNode& node) {
  if (node.is_terminal()) return node.text;
  std::vector<std::string> kids;
  kids.reserve(node.children.size());
  for (const MrNode& c : node.children) kids.push_back(canonical_node(c));
  std::sort(kids.begin(), kids.end());
  std::string out = node.full_label();
  out += '[';
  for (const std::string& k : kids) {
    out += ' ';
    out += k;
  }
  out += " ]";
  return out;
}

}  // namespace detail

// Serialization of the forest with every sibling list (roots included)
// sorted by the children's own canonical strings. Two forests are equal up
// to sibling reordering at every level iff their canonical forms are equal.
inline std::string canonical_form(const MrForest& forest) {
  std::vector<std::string> roots;
  roots.reserve(forest.roots.size());
  for (const MrNode& r : forest.roots)
    roots.push_back(detail::canonical_node(r));
  std::sort(roots.begin(), roots.end());
  std::string out;
  for (const std::string& r : roots) {
    if (!out.empty()) out += ' ';
    out += r;
  }
  return out;
}

inline bool canonical_equal(const MrForest& a, const MrForest& b) {
  return canonical_form(a) == canonical_form(b);
}

// ---------------------------------------------------------------------------
// Small text helpers shared across the toolkit
// ---------------------------------------------------------------------------

inline std::string normalize_whitespace(std::string_view text) {
  std::string out;
  bool in_space = true;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      in_space = true;
      continue;
    }
    if (in_space && !out.empty()) out += ' ';
    in_space = false;
    out += c;
  }
  return out;
}

inline std::string to_lower_ascii(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

}  // namespace mrkit
