// Penn-Treebank-style bracketed constituency trees.

#ifndef SYNQA_TREEBANK_HPP_
#define SYNQA_TREEBANK_HPP_

#include <compare>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace synqa {

// Half-open token interval [begin, end) over a sentence yield.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t width() const { return end - begin; }
  bool empty() const { return begin == end; }
  bool contains(const Span& other) const {
    return begin <= other.begin && other.end <= end;
  }
  bool overlaps(const Span& other) const {
    return begin < other.end && other.begin < end;
  }

  friend auto operator<=>(const Span&, const Span&) = default;
};

std::string to_string(const Span& span);

struct NodeLabel {
  std::string category;
  std::vector<std::string> function_tags;
  std::optional<int> coindex;

  // Splits a raw label such as "NP-SBJ-1" into category, tags and coindex.
  // Labels starting with '-' ("-NONE-", "-LRB-") are atomic categories.
  static NodeLabel parse(std::string_view raw);

  bool has_tag(std::string_view tag) const;
  std::string str() const;

  friend bool operator==(const NodeLabel&, const NodeLabel&) = default;
};

class TreeNode {
 public:
  TreeNode() = default;
  TreeNode(NodeLabel label, std::string token);
  TreeNode(NodeLabel label, std::vector<TreeNode> children);

  const NodeLabel& label() const { return label_; }
  const std::vector<TreeNode>& children() const { return children_; }
  const std::optional<std::string>& token() const { return token_; }
  const Span& span() const { return span_; }

  // Leaves are POS-tagged words: (NN dog) is a leaf with token "dog".
  bool is_leaf() const { return token_.has_value(); }

  // Reassigns spans top-down starting at `first`; returns the end offset.
  std::size_t assign_spans(std::size_t first = 0);

  // Left-to-right leaf tokens.
  std::vector<std::string> yield() const;
  void collect_leaves(std::vector<const TreeNode*>& out) const;

  // Canonical single-line bracketed rendering.
  std::string bracketed() const;

  // Label, token and shape equality (spans are derived, so not compared).
  bool structurally_equal(const TreeNode& other) const;

 private:
  NodeLabel label_;
  std::vector<TreeNode> children_;
  std::optional<std::string> token_;
  Span span_;
};

struct Sentence {
  std::string id;
  TreeNode root;
  std::vector<std::string> tokens;

  // Space-joined tokens.
  std::string text() const;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " at byte " + std::to_string(offset)),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// Parses every top-level tree in `text`. Sentence ids are
// "<source>:<index>" with the index zero-padded to five digits so that
// lexicographic id order equals input order within a source.
std::vector<Sentence> parse_bracketed(std::string_view text,
                                      std::string_view source = "input");

std::vector<Sentence> read_treebank_file(const std::filesystem::path& path);

// Single-tree convenience for fixtures; throws unless exactly one tree.
TreeNode parse_tree(std::string_view text);

inline constexpr std::string_view kNullElement = "-NONE-";

// PTB punctuation and symbol POS tags (",", "``", "-LRB-", "$", ...).
bool is_punctuation_pos(std::string_view category);

// Removes -NONE- leaves and any constituents emptied by that removal.
// Returns nullopt when nothing remains.
std::optional<TreeNode> strip_empty_elements(const TreeNode& root);

// Applies strip_empty_elements to a sentence and refreshes its tokens.
std::optional<Sentence> strip_empty_elements(const Sentence& sentence);

// Surface words of `span` joined by single spaces. Throws std::out_of_range.
std::string phrase_text(const Sentence& sentence, const Span& span);
std::string phrase_text(const std::vector<std::string>& tokens,
                        const Span& span);

}  // namespace synqa

#endif  // SYNQA_TREEBANK_HPP_
