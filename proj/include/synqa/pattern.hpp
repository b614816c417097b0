// Tree-pattern language over constituency trees.
//
// A pattern file is a list of rules:
//
//   # grammatical subject
//   rule GS: (S _* ?GS:_%SBJ _* VP _*)
//
//   rule DO: ^!VP
//       (VP +[MD|TO|VB@] [RB|ADVP]* @self _*)
//     | (VP +VB@ [RB|ADVP]* ?DO:[=NP|=S|=SBAR|=SQ] (![=NP|=S|=SBAR|=SQ])*)
//
// Label matchers:
//   _        any label            NP       category NP (any function tags)
//   %SBJ     any category, tag    NP%SBJ   category NP carrying tag SBJ
//   =NP      NP without tags      VB@      verb family VB VBD VBG VBN VBP VBZ
//   !X  ~X   negation             A|B      alternation, [..] or (..) groups
//   "#"      quoted category for labels that clash with the syntax
//
// Child items (matched against a node's children as a regex over siblings):
//   X        one child matching X, its own children unconstrained
//   (X i..)  one child matching X whose children match items i..
//   @R       one child matched by rule R;  @self recurses into this rule
//   item*    zero or more children
//   ?name:   capture the child;  +  marks the per-level chain head
//
// `^M` before the first branch constrains the parent of the matched node
// (a root node is matched against an empty label). Branches are separated
// by `|`. A rule with `@self` is recursive: it needs a base branch without
// `@self`, and every branch marks exactly one `+` head so each match
// reports the chain of heads from the top level down.

#ifndef SYNQA_PATTERN_HPP_
#define SYNQA_PATTERN_HPP_

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "synqa/treebank.hpp"

namespace synqa {

class LabelMatcher {
 public:
  struct Literal {
    std::string category;
    std::vector<std::string> tags;  // all must be present
    bool exact = false;             // no other function tags allowed
  };
  struct Wildcard {};
  struct FunctionTag {
    std::string tag;
  };
  struct PosFamily {
    std::string prefix;
  };
  struct Negation {
    std::shared_ptr<const LabelMatcher> inner;
  };
  struct Alternation {
    std::vector<LabelMatcher> branches;
  };
  using Variant = std::variant<Literal, Wildcard, FunctionTag, PosFamily,
                               Negation, Alternation>;

  LabelMatcher() : v_(Wildcard{}) {}

  static LabelMatcher literal(std::string category,
                              std::vector<std::string> tags = {},
                              bool exact = false);
  static LabelMatcher wildcard();
  static LabelMatcher function_tag(std::string tag);
  static LabelMatcher pos_family(std::string prefix);
  static LabelMatcher negation(LabelMatcher inner);
  static LabelMatcher alternation(std::vector<LabelMatcher> branches);

  const Variant& variant() const { return v_; }
  std::string str() const;

 private:
  explicit LabelMatcher(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

bool label_matches(const LabelMatcher& matcher, const NodeLabel& label);

// Categories a PosFamily prefix stands for. VB is closed over the six PTB
// verb tags; any other prefix matches categories beginning with it.
bool in_pos_family(std::string_view prefix, std::string_view category);

struct RuleRef {
  std::string name;
  bool self = false;
};

struct ChildItem {
  enum class Quantifier { One, Star };

  std::variant<LabelMatcher, RuleRef> matcher;
  Quantifier quantifier = Quantifier::One;
  std::optional<std::string> capture;
  std::optional<std::vector<ChildItem>> descend;
  bool chain_head = false;
};

struct PatternBranch {
  LabelMatcher root;
  // Empty means "children unconstrained".
  std::vector<ChildItem> children;
  bool recursive = false;
};

struct PatternRule {
  std::string name;
  std::optional<LabelMatcher> parent_constraint;
  std::vector<PatternBranch> branches;
  bool recursive = false;

  // Every capture name declared anywhere in the rule, sorted.
  std::vector<std::string> capture_names() const;
};

class PatternRuleSet {
 public:
  PatternRuleSet() = default;
  explicit PatternRuleSet(std::vector<PatternRule> rules);

  const std::vector<PatternRule>& rules() const { return rules_; }
  std::size_t size() const { return rules_.size(); }
  bool contains(std::string_view name) const;
  // Throws std::out_of_range for unknown names.
  const PatternRule& at(std::string_view name) const;

 private:
  std::vector<PatternRule> rules_;
};

class PatternError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PatternSyntaxError : public PatternError {
 public:
  PatternSyntaxError(const std::string& what, std::size_t line,
                     std::size_t column)
      : PatternError(std::to_string(line) + ":" + std::to_string(column) +
                     ": " + what),
        line_(line),
        column_(column) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class PatternSemanticError : public PatternError {
 public:
  PatternSemanticError(const std::string& rule, const std::string& what)
      : PatternError("rule " + rule + ": " + what), rule_(rule) {}
  const std::string& rule() const { return rule_; }

 private:
  std::string rule_;
};

PatternRuleSet compile_pattern(std::string_view source);
PatternRuleSet load_pattern_file(const std::filesystem::path& path);

// Source text of the shipped pattern file and its compiled form.
std::string_view default_pattern_source();
const PatternRuleSet& default_patterns();

struct MatchBinding {
  std::string rule;
  const TreeNode* node = nullptr;
  std::map<std::string, const TreeNode*> captures;
  // Recursive rules only: the head leaf of each level, top-down, and the
  // node matched at that level.
  std::vector<const TreeNode*> chain;
  std::vector<const TreeNode*> chain_levels;
};

// One way of consuming a child sequence.
struct Assignment {
  std::map<std::string, const TreeNode*> captures;
  const TreeNode* head = nullptr;
  std::vector<const TreeNode*> sub_chain;
  std::vector<const TreeNode*> sub_levels;
};

// Enumerates every way `children` is consumed by `items`, deduplicated.
// `rules` and `self` resolve RuleRef items; without them a RuleRef never
// matches.
std::vector<Assignment> match_children(std::span<const ChildItem> items,
                                       std::span<const TreeNode> children,
                                       const PatternRuleSet* rules = nullptr,
                                       const PatternRule* self = nullptr);

// Bindings of rule `name` at every node of `root`, in pre-order.
std::vector<MatchBinding> match_rule(const PatternRuleSet& rules,
                                     std::string_view name,
                                     const TreeNode& root);

// Bindings of rule `name` rooted exactly at `node`; `parent` is null for a
// tree root.
std::vector<MatchBinding> match_at(const PatternRuleSet& rules,
                                   std::string_view name,
                                   const TreeNode& node,
                                   const TreeNode* parent);

}  // namespace synqa

#endif  // SYNQA_PATTERN_HPP_
