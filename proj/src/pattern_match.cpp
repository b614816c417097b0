#include <algorithm>

#include "synqa/pattern.hpp"

namespace synqa {

bool in_pos_family(std::string_view prefix, std::string_view category) {
  if (prefix == "VB")
    return category == "VB" || category == "VBD" || category == "VBG" ||
           category == "VBN" || category == "VBP" || category == "VBZ";
  return category.substr(0, prefix.size()) == prefix;
}

bool label_matches(const LabelMatcher& matcher, const NodeLabel& label) {
  struct Visitor {
    const NodeLabel& label;
    bool operator()(const LabelMatcher::Literal& l) const {
      if (label.category != l.category) return false;
      for (const auto& t : l.tags)
        if (!label.has_tag(t)) return false;
      return !l.exact || label.function_tags.size() == l.tags.size();
    }
    bool operator()(const LabelMatcher::Wildcard&) const { return true; }
    bool operator()(const LabelMatcher::FunctionTag& f) const {
      return label.has_tag(f.tag);
    }
    bool operator()(const LabelMatcher::PosFamily& p) const {
      return in_pos_family(p.prefix, label.category);
    }
    bool operator()(const LabelMatcher::Negation& n) const {
      return !label_matches(*n.inner, label);
    }
    bool operator()(const LabelMatcher::Alternation& a) const {
      for (const auto& b : a.branches)
        if (label_matches(b, label)) return true;
      return false;
    }
  };
  return std::visit(Visitor{label}, matcher.variant());
}

namespace {

const NodeLabel& root_parent_label() {
  static const NodeLabel empty;
  return empty;
}

bool same_assignment(const Assignment& a, const Assignment& b) {
  return a.captures == b.captures && a.head == b.head &&
         a.sub_chain == b.sub_chain && a.sub_levels == b.sub_levels;
}

void push_unique(std::vector<Assignment>& out, Assignment a) {
  for (const auto& e : out)
    if (same_assignment(e, a)) return;
  out.push_back(std::move(a));
}

class Matcher {
 public:
  Matcher(const PatternRuleSet* rules, const PatternRule* self)
      : rules_(rules), self_(self) {}

  // All ways `rule` matches rooted at `node`.
  std::vector<Assignment> rule_at(const PatternRule& rule, const TreeNode& node,
                                  const TreeNode* parent,
                                  bool check_parent) const {
    if (check_parent && rule.parent_constraint &&
        !label_matches(*rule.parent_constraint,
                       parent ? parent->label() : root_parent_label()))
      return {};

    Matcher inner(rules_, &rule);
    std::vector<Assignment> out;
    for (const auto& branch : rule.branches) {
      if (!label_matches(branch.root, node.label())) continue;
      std::vector<Assignment> seqs;
      if (branch.children.empty())
        seqs.emplace_back();
      else
        seqs = inner.sequence(branch.children, node.children(), &node);

      for (auto& a : seqs) {
        if (rule.recursive) {
          // Fold this level's head in front of the deeper chain.
          Assignment folded;
          folded.captures = std::move(a.captures);
          folded.sub_chain.push_back(a.head);
          folded.sub_levels.push_back(&node);
          folded.sub_chain.insert(folded.sub_chain.end(), a.sub_chain.begin(),
                                  a.sub_chain.end());
          folded.sub_levels.insert(folded.sub_levels.end(),
                                   a.sub_levels.begin(), a.sub_levels.end());
          push_unique(out, std::move(folded));
        } else {
          Assignment plain;
          plain.captures = std::move(a.captures);
          push_unique(out, std::move(plain));
        }
      }
    }
    return out;
  }

  std::vector<Assignment> sequence(std::span<const ChildItem> items,
                                   std::span<const TreeNode> children,
                                   const TreeNode* parent) const {
    std::vector<Assignment> out;
    Assignment acc;
    walk(items, 0, children, 0, parent, acc, out);
    return out;
  }

 private:
  // Ways a single child satisfies `item` (ignoring the quantifier).
  std::vector<Assignment> item_at(const ChildItem& item, const TreeNode& child,
                                  const TreeNode* parent) const {
    std::vector<Assignment> out;
    if (const auto* ref = std::get_if<RuleRef>(&item.matcher)) {
      const PatternRule* target = nullptr;
      if (ref->self)
        target = self_;
      else if (rules_ && rules_->contains(ref->name))
        target = &rules_->at(ref->name);
      if (!target) return out;
      // @self continues the current rule below its anchor, so the parent
      // constraint only applies to references to other rules.
      out = rule_at(*target, child, parent, !ref->self);
      if (!ref->self) {
        // A foreign rule's chain is not part of this binding.
        for (auto& a : out) {
          a.sub_chain.clear();
          a.sub_levels.clear();
        }
      }
    } else {
      const auto& m = std::get<LabelMatcher>(item.matcher);
      if (!label_matches(m, child.label())) return out;
      if (item.descend)
        out = sequence(*item.descend, child.children(), &child);
      else
        out.emplace_back();
    }
    if (item.capture)
      for (auto& a : out) a.captures.emplace(*item.capture, &child);
    if (item.chain_head)
      for (auto& a : out) a.head = &child;
    return out;
  }

  static Assignment merge(const Assignment& acc, const Assignment& part) {
    Assignment m = acc;
    for (const auto& [k, v] : part.captures) m.captures.emplace(k, v);
    if (part.head) m.head = part.head;
    m.sub_chain.insert(m.sub_chain.end(), part.sub_chain.begin(),
                       part.sub_chain.end());
    m.sub_levels.insert(m.sub_levels.end(), part.sub_levels.begin(),
                        part.sub_levels.end());
    return m;
  }

  void walk(std::span<const ChildItem> items, std::size_t i,
            std::span<const TreeNode> children, std::size_t j,
            const TreeNode* parent, const Assignment& acc,
            std::vector<Assignment>& out) const {
    if (i == items.size()) {
      if (j == children.size()) push_unique(out, acc);
      return;
    }
    const ChildItem& item = items[i];
    if (item.quantifier == ChildItem::Quantifier::Star) {
      walk(items, i + 1, children, j, parent, acc, out);
      if (j < children.size() && !item_at(item, children[j], parent).empty())
        walk(items, i, children, j + 1, parent, acc, out);
      return;
    }
    if (j == children.size()) return;
    for (const auto& part : item_at(item, children[j], parent))
      walk(items, i + 1, children, j + 1, parent, merge(acc, part), out);
  }

  const PatternRuleSet* rules_;
  const PatternRule* self_;
};

MatchBinding to_binding(const PatternRule& rule, const TreeNode& node,
                        Assignment a) {
  MatchBinding b;
  b.rule = rule.name;
  b.node = &node;
  b.captures = std::move(a.captures);
  if (rule.recursive) {
    b.chain = std::move(a.sub_chain);
    b.chain_levels = std::move(a.sub_levels);
  }
  return b;
}

void collect(const PatternRuleSet& rules, const PatternRule& rule,
             const TreeNode& node, const TreeNode* parent,
             std::vector<MatchBinding>& out) {
  Matcher m(&rules, &rule);
  for (auto& a : m.rule_at(rule, node, parent, true))
    out.push_back(to_binding(rule, node, std::move(a)));
  for (const auto& child : node.children()) collect(rules, rule, child, &node, out);
}

}  // namespace

std::vector<Assignment> match_children(std::span<const ChildItem> items,
                                       std::span<const TreeNode> children,
                                       const PatternRuleSet* rules,
                                       const PatternRule* self) {
  return Matcher(rules, self).sequence(items, children, nullptr);
}

std::vector<MatchBinding> match_rule(const PatternRuleSet& rules,
                                     std::string_view name,
                                     const TreeNode& root) {
  const PatternRule& rule = rules.at(name);
  std::vector<MatchBinding> out;
  collect(rules, rule, root, nullptr, out);
  return out;
}

std::vector<MatchBinding> match_at(const PatternRuleSet& rules,
                                   std::string_view name, const TreeNode& node,
                                   const TreeNode* parent) {
  const PatternRule& rule = rules.at(name);
  std::vector<MatchBinding> out;
  Matcher m(&rules, &rule);
  for (auto& a : m.rule_at(rule, node, parent, true))
    out.push_back(to_binding(rule, node, std::move(a)));
  return out;
}

}  // namespace synqa
