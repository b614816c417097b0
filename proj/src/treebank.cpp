#include "synqa/treebank.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <utility>

namespace synqa {

std::string to_string(const Span& span) {
  return std::to_string(span.begin) + "-" + std::to_string(span.end);
}

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

}  // namespace

NodeLabel NodeLabel::parse(std::string_view raw) {
  NodeLabel label;
  if (raw.empty() || raw.front() == '-') {
    label.category = std::string(raw);
    return label;
  }

  // Gap indices ("NP=2") are identity markers like coindices.
  if (auto eq = raw.rfind('='); eq != std::string_view::npos && eq > 0 &&
                                all_digits(raw.substr(eq + 1))) {
    label.coindex = std::stoi(std::string(raw.substr(eq + 1)));
    raw = raw.substr(0, eq);
  }

  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    auto dash = raw.find('-', start);
    parts.push_back(raw.substr(start, dash - start));
    if (dash == std::string_view::npos) break;
    start = dash + 1;
  }

  label.category = std::string(parts.front());
  std::size_t last = parts.size();
  if (parts.size() > 1 && all_digits(parts.back())) {
    label.coindex = std::stoi(std::string(parts.back()));
    --last;
  }
  for (std::size_t i = 1; i < last; ++i)
    if (!parts[i].empty()) label.function_tags.emplace_back(parts[i]);
  return label;
}

bool NodeLabel::has_tag(std::string_view tag) const {
  for (const auto& t : function_tags)
    if (t == tag) return true;
  return false;
}

std::string NodeLabel::str() const {
  std::string out = category;
  for (const auto& tag : function_tags) {
    out += '-';
    out += tag;
  }
  if (coindex) {
    out += '-';
    out += std::to_string(*coindex);
  }
  return out;
}

TreeNode::TreeNode(NodeLabel label, std::string token)
    : label_(std::move(label)), token_(std::move(token)) {}

TreeNode::TreeNode(NodeLabel label, std::vector<TreeNode> children)
    : label_(std::move(label)), children_(std::move(children)) {}

std::size_t TreeNode::assign_spans(std::size_t first) {
  if (is_leaf()) {
    span_ = {first, first + 1};
    return first + 1;
  }
  std::size_t pos = first;
  for (auto& child : children_) pos = child.assign_spans(pos);
  span_ = {first, pos};
  return pos;
}

std::vector<std::string> TreeNode::yield() const {
  std::vector<const TreeNode*> leaves;
  collect_leaves(leaves);
  std::vector<std::string> out;
  out.reserve(leaves.size());
  for (const auto* leaf : leaves) out.push_back(*leaf->token());
  return out;
}

void TreeNode::collect_leaves(std::vector<const TreeNode*>& out) const {
  if (is_leaf()) {
    out.push_back(this);
    return;
  }
  for (const auto& child : children_) child.collect_leaves(out);
}

std::string TreeNode::bracketed() const {
  std::string out = "(" + label_.str();
  if (is_leaf()) {
    out += ' ';
    out += *token_;
  } else {
    for (const auto& child : children_) {
      out += ' ';
      out += child.bracketed();
    }
  }
  out += ')';
  return out;
}

bool TreeNode::structurally_equal(const TreeNode& other) const {
  if (label_ != other.label_ || token_ != other.token_ ||
      children_.size() != other.children_.size())
    return false;
  for (std::size_t i = 0; i < children_.size(); ++i)
    if (!children_[i].structurally_equal(other.children_[i])) return false;
  return true;
}

std::string Sentence::text() const {
  return phrase_text(tokens, Span{0, tokens.size()});
}

namespace {

class BracketReader {
 public:
  explicit BracketReader(std::string_view text) : text_(text) {}

  bool at_end() {
    skip_space();
    return pos_ >= text_.size();
  }

  // Reads one top-level expression and unwraps "( (S ...) )".
  TreeNode read_top() {
    skip_space();
    if (text_[pos_] != '(')
      throw ParseError("expected '(' at start of tree", pos_);
    std::size_t open = pos_;
    ++pos_;
    skip_space();
    std::string raw = read_atom();
    skip_space();

    if (raw.empty()) {
      // Wrapper with an empty label: must hold exactly one subtree.
      if (pos_ >= text_.size() || text_[pos_] != '(')
        throw ParseError("empty label", open + 1);
      TreeNode inner = read_node();
      skip_space();
      if (pos_ >= text_.size())
        throw ParseError("unmatched '('", open);
      if (text_[pos_] != ')')
        throw ParseError("empty-label wrapper holds more than one tree", pos_);
      ++pos_;
      return inner;
    }
    return read_rest(open, std::move(raw));
  }

 private:
  TreeNode read_node() {
    skip_space();
    if (pos_ >= text_.size() || text_[pos_] != '(')
      throw ParseError("expected '('", pos_);
    std::size_t open = pos_;
    ++pos_;
    skip_space();
    std::string raw = read_atom();
    if (raw.empty()) {
      if (pos_ >= text_.size()) throw ParseError("unmatched '('", open);
      throw ParseError("empty label", open + 1);
    }
    return read_rest(open, std::move(raw));
  }

  // Parses what follows a node label up to and including its ')'.
  TreeNode read_rest(std::size_t open, std::string raw) {
    NodeLabel label = NodeLabel::parse(raw);
    skip_space();
    if (pos_ >= text_.size()) throw ParseError("unmatched '('", open);

    if (text_[pos_] != '(') {
      if (text_[pos_] == ')')
        throw ParseError("constituent without children or token", open);
      std::string token = read_atom();
      skip_space();
      if (pos_ >= text_.size()) throw ParseError("unmatched '('", open);
      if (text_[pos_] != ')')
        throw ParseError("leaf holds more than one token", pos_);
      ++pos_;
      return TreeNode(std::move(label), std::move(token));
    }

    std::vector<TreeNode> children;
    while (true) {
      skip_space();
      if (pos_ >= text_.size()) throw ParseError("unmatched '('", open);
      if (text_[pos_] == ')') {
        ++pos_;
        break;
      }
      if (text_[pos_] != '(')
        throw ParseError("token mixed with constituents", pos_);
      children.push_back(read_node());
    }
    return TreeNode(std::move(label), std::move(children));
  }

  std::string read_atom() {
    std::size_t start = pos_;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '(' || c == ')' || std::isspace(static_cast<unsigned char>(c)))
        break;
      ++pos_;
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  void skip_space() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

std::string make_id(std::string_view source, std::size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%05zu", index);
  return std::string(source) + ":" + buf;
}

}  // namespace

std::vector<Sentence> parse_bracketed(std::string_view text,
                                      std::string_view source) {
  // Stray ')' would otherwise surface as a confusing error later.
  {
    long depth = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
      if (text[i] == '(') ++depth;
      if (text[i] == ')' && --depth < 0)
        throw ParseError("unmatched ')'", i);
    }
  }

  std::vector<Sentence> out;
  BracketReader reader(text);
  while (!reader.at_end()) {
    Sentence sentence;
    sentence.root = reader.read_top();
    sentence.root.assign_spans();
    sentence.tokens = sentence.root.yield();
    sentence.id = make_id(source, out.size());
    out.push_back(std::move(sentence));
  }
  return out;
}

std::vector<Sentence> read_treebank_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open treebank file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_bracketed(buf.str(), path.filename().string());
}

TreeNode parse_tree(std::string_view text) {
  auto sentences = parse_bracketed(text);
  if (sentences.size() != 1)
    throw std::invalid_argument("expected exactly one tree, got " +
                                std::to_string(sentences.size()));
  return std::move(sentences.front().root);
}

namespace {

std::optional<TreeNode> strip_node(const TreeNode& node) {
  if (node.is_leaf()) {
    if (node.label().category == kNullElement) return std::nullopt;
    return TreeNode(node.label(), *node.token());
  }
  std::vector<TreeNode> kept;
  for (const auto& child : node.children())
    if (auto c = strip_node(child)) kept.push_back(std::move(*c));
  if (kept.empty()) return std::nullopt;
  return TreeNode(node.label(), std::move(kept));
}

}  // namespace

bool is_punctuation_pos(std::string_view cat) {
  return cat == "," || cat == ":" || cat == "." || cat == "``" ||
         cat == "''" || cat == "-LRB-" || cat == "-RRB-" || cat == "#" ||
         cat == "$";
}

std::optional<TreeNode> strip_empty_elements(const TreeNode& root) {
  auto out = strip_node(root);
  if (out) out->assign_spans();
  return out;
}

std::optional<Sentence> strip_empty_elements(const Sentence& sentence) {
  auto root = strip_empty_elements(sentence.root);
  if (!root) return std::nullopt;
  Sentence out;
  out.id = sentence.id;
  out.tokens = root->yield();
  out.root = std::move(*root);
  return out;
}

std::string phrase_text(const std::vector<std::string>& tokens,
                        const Span& span) {
  if (span.begin > span.end || span.end > tokens.size())
    throw std::out_of_range("span " + to_string(span) +
                            " outside sentence of " +
                            std::to_string(tokens.size()) + " tokens");
  std::string out;
  for (std::size_t i = span.begin; i < span.end; ++i) {
    if (i > span.begin) out += ' ';
    out += tokens[i];
  }
  return out;
}

std::string phrase_text(const Sentence& sentence, const Span& span) {
  return phrase_text(sentence.tokens, span);
}

}  // namespace synqa
