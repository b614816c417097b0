// Random trees and rules, plus an exhaustive reference matcher that tries
// every node and every partition of its children.

#ifndef SYNQA_TESTS_RANDOM_TREES_HPP_
#define SYNQA_TESTS_RANDOM_TREES_HPP_

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "synqa/pattern.hpp"
#include "synqa/rng.hpp"
#include "synqa/treebank.hpp"

namespace synqa::testing {

inline const std::vector<std::string> kPhraseLabels = {"S", "NP", "VP", "PP"};
inline const std::vector<std::string> kLeafLabels = {"VB", "MD", "."};

// A tree of max_nodes/2 to `max_nodes` nodes over {S, NP, VP, PP} above
// {VB, MD, .}; some NPs carry an SBJ tag.
inline TreeNode random_tree(Rng& rng, std::size_t max_nodes) {
  std::size_t budget = max_nodes / 2 + rng.below(max_nodes - max_nodes / 2 + 1);
  std::size_t word = 0;
  auto leaf = [&] {
    return TreeNode(NodeLabel::parse(kLeafLabels[rng.below(kLeafLabels.size())]),
                    "w" + std::to_string(word++));
  };
  auto build = [&](auto& self, std::size_t& left) -> TreeNode {
    --left;
    if (left == 0 || rng.below(6) == 0) return leaf();
    std::string raw = kPhraseLabels[rng.below(kPhraseLabels.size())];
    if (raw == "NP" && rng.below(3) == 0) raw = "NP-SBJ";
    std::vector<TreeNode> kids;
    const std::size_t want = 1 + rng.below(4);
    while (kids.size() < want && left > 0) kids.push_back(self(self, left));
    return TreeNode(NodeLabel::parse(raw), std::move(kids));
  };
  TreeNode t = build(build, budget);
  t.assign_spans();
  return t;
}

inline LabelMatcher random_matcher(Rng& rng, int depth = 0) {
  static const std::vector<std::string> cats = {"S", "NP", "VP", "PP",
                                                "VB", "MD", "."};
  switch (depth > 1 ? rng.below(4) : rng.below(7)) {
    case 0: return LabelMatcher::literal(cats[rng.below(cats.size())]);
    case 1: return LabelMatcher::wildcard();
    case 2: return rng.coin() ? LabelMatcher::function_tag("SBJ")
                              : LabelMatcher::pos_family("VB");
    case 3: return LabelMatcher::literal("NP", {"SBJ"}, rng.coin());
    case 4: return LabelMatcher::negation(random_matcher(rng, depth + 1));
    case 5: return LabelMatcher::wildcard();
    default:
      return LabelMatcher::alternation(
          {random_matcher(rng, depth + 1), random_matcher(rng, depth + 1)});
  }
}

// Child items with no rule references; captures only on unstarred items and
// never below a starred one.
inline std::vector<ChildItem> random_items(Rng& rng, int depth, bool in_star,
                                           int& capture_counter) {
  std::vector<ChildItem> items;
  const std::size_t n = rng.below(4);
  for (std::size_t i = 0; i < n; ++i) {
    ChildItem item;
    item.matcher = random_matcher(rng);
    const bool star = rng.below(3) == 0;
    if (star) item.quantifier = ChildItem::Quantifier::Star;
    if (!star && !in_star && rng.below(3) == 0)
      item.capture = "c" + std::to_string(capture_counter++);
    if (depth < 2 && rng.below(4) == 0) {
      auto nested = random_items(rng, depth + 1, in_star || star, capture_counter);
      if (!nested.empty()) item.descend = std::move(nested);
    }
    items.push_back(std::move(item));
  }
  return items;
}

inline PatternRuleSet random_rule(Rng& rng) {
  PatternRule rule;
  rule.name = "R";
  if (rng.below(4) == 0) rule.parent_constraint = random_matcher(rng);
  const std::size_t branches = 1 + rng.below(2);
  for (std::size_t b = 0; b < branches; ++b) {
    int counter = 0;
    PatternBranch br;
    br.root = random_matcher(rng);
    br.children = random_items(rng, 0, false, counter);
    rule.branches.push_back(std::move(br));
  }
  return PatternRuleSet({std::move(rule)});
}

using Captures = std::map<std::string, const TreeNode*>;

namespace oracle_detail {

inline std::set<Captures> item_ways(const ChildItem& item, const TreeNode& child);

inline std::set<Captures> sequence_ways(const std::vector<ChildItem>& items,
                                        const std::vector<TreeNode>& children) {
  std::set<Captures> out;
  const std::size_t m = items.size(), n = children.size();
  std::vector<std::size_t> sizes(m, 0);
  // Enumerate every split of the children into m contiguous groups, one
  // per item, then check each group against its item.
  auto enumerate = [&](auto& self, std::size_t i, std::size_t used) -> void {
    if (i == m) {
      if (used != n) return;
      std::vector<Captures> partial = {Captures{}};
      std::size_t pos = 0;
      for (std::size_t k = 0; k < m; ++k) {
        std::vector<Captures> next;
        if (items[k].quantifier == ChildItem::Quantifier::Star) {
          bool ok = true;
          for (std::size_t c = pos; c < pos + sizes[k]; ++c)
            ok = ok && !item_ways(items[k], children[c]).empty();
          if (ok) next = partial;
        } else {
          for (const auto& ways : item_ways(items[k], children[pos]))
            for (const auto& p : partial) {
              Captures merged = p;
              merged.insert(ways.begin(), ways.end());
              next.push_back(std::move(merged));
            }
        }
        partial = std::move(next);
        pos += sizes[k];
      }
      out.insert(partial.begin(), partial.end());
      return;
    }
    if (items[i].quantifier == ChildItem::Quantifier::One) {
      sizes[i] = 1;
      self(self, i + 1, used + 1);
    } else {
      for (std::size_t s = 0; used + s <= n; ++s) {
        sizes[i] = s;
        self(self, i + 1, used + s);
      }
    }
  };
  enumerate(enumerate, 0, 0);
  return out;
}

inline std::set<Captures> item_ways(const ChildItem& item, const TreeNode& child) {
  const auto& m = std::get<LabelMatcher>(item.matcher);
  if (!label_matches(m, child.label())) return {};
  std::set<Captures> ways = item.descend ? sequence_ways(*item.descend, child.children())
                                         : std::set<Captures>{Captures{}};
  if (!item.capture) return ways;
  std::set<Captures> out;
  for (auto w : ways) {
    w.emplace(*item.capture, &child);
    out.insert(std::move(w));
  }
  return out;
}

inline void walk(const PatternRule& rule, const TreeNode& node,
                 const TreeNode* parent,
                 std::vector<std::pair<const TreeNode*, Captures>>& out) {
  static const NodeLabel root_parent;
  const bool parent_ok = !rule.parent_constraint ||
                         label_matches(*rule.parent_constraint,
                                       parent ? parent->label() : root_parent);
  if (parent_ok) {
    std::set<Captures> all;
    for (const auto& br : rule.branches) {
      if (!label_matches(br.root, node.label())) continue;
      if (br.children.empty()) {
        all.insert(Captures{});
      } else {
        auto ways = sequence_ways(br.children, node.children());
        all.insert(ways.begin(), ways.end());
      }
    }
    for (const auto& c : all) out.emplace_back(&node, c);
  }
  for (const auto& child : node.children()) walk(rule, child, &node, out);
}

}  // namespace oracle_detail

// (node, captures) for every match of a non-recursive, reference-free rule.
inline std::vector<std::pair<const TreeNode*, Captures>> brute_force_match(
    const PatternRule& rule, const TreeNode& root) {
  std::vector<std::pair<const TreeNode*, Captures>> out;
  oracle_detail::walk(rule, root, nullptr, out);
  return out;
}

}  // namespace synqa::testing

#endif  // SYNQA_TESTS_RANDOM_TREES_HPP_
