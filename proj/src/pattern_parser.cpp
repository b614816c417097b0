#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "synqa/pattern.hpp"

namespace synqa {

LabelMatcher LabelMatcher::literal(std::string category,
                                   std::vector<std::string> tags, bool exact) {
  return LabelMatcher(Literal{std::move(category), std::move(tags), exact});
}
LabelMatcher LabelMatcher::wildcard() { return LabelMatcher(Wildcard{}); }
LabelMatcher LabelMatcher::function_tag(std::string tag) {
  return LabelMatcher(FunctionTag{std::move(tag)});
}
LabelMatcher LabelMatcher::pos_family(std::string prefix) {
  return LabelMatcher(PosFamily{std::move(prefix)});
}
LabelMatcher LabelMatcher::negation(LabelMatcher inner) {
  return LabelMatcher(
      Negation{std::make_shared<const LabelMatcher>(std::move(inner))});
}
LabelMatcher LabelMatcher::alternation(std::vector<LabelMatcher> branches) {
  if (branches.size() < 2)
    throw std::invalid_argument("alternation needs at least two branches");
  return LabelMatcher(Alternation{std::move(branches)});
}

std::string LabelMatcher::str() const {
  struct Printer {
    std::string operator()(const Literal& l) const {
      std::string out = (l.exact ? "=" : "") + l.category;
      for (const auto& t : l.tags) out += "%" + t;
      return out;
    }
    std::string operator()(const Wildcard&) const { return "_"; }
    std::string operator()(const FunctionTag& f) const { return "_%" + f.tag; }
    std::string operator()(const PosFamily& p) const { return p.prefix + "@"; }
    std::string operator()(const Negation& n) const {
      return "!" + n.inner->str();
    }
    std::string operator()(const Alternation& a) const {
      std::string out = "[";
      for (std::size_t i = 0; i < a.branches.size(); ++i) {
        if (i) out += "|";
        out += a.branches[i].str();
      }
      return out + "]";
    }
  };
  return std::visit(Printer{}, v_);
}

std::vector<std::string> PatternRule::capture_names() const {
  std::set<std::string> names;
  std::function<void(const std::vector<ChildItem>&)> walk =
      [&](const std::vector<ChildItem>& items) {
        for (const auto& item : items) {
          if (item.capture) names.insert(*item.capture);
          if (item.descend) walk(*item.descend);
        }
      };
  for (const auto& b : branches) walk(b.children);
  return {names.begin(), names.end()};
}

PatternRuleSet::PatternRuleSet(std::vector<PatternRule> rules)
    : rules_(std::move(rules)) {}

bool PatternRuleSet::contains(std::string_view name) const {
  return std::any_of(rules_.begin(), rules_.end(),
                     [&](const PatternRule& r) { return r.name == name; });
}

const PatternRule& PatternRuleSet::at(std::string_view name) const {
  for (const auto& r : rules_)
    if (r.name == name) return r;
  throw std::out_of_range("unknown pattern rule '" + std::string(name) + "'");
}

namespace {

constexpr std::string_view kSpecial = "()[]|!~*?%@\"#^+;";

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  std::vector<PatternRule> parse_file() {
    std::vector<PatternRule> rules;
    while (true) {
      skip_space();
      if (eof()) break;
      rules.push_back(parse_rule());
    }
    return rules;
  }

 private:
  PatternRule parse_rule() {
    std::string kw = parse_ident("'rule'");
    if (kw != "rule") fail("expected 'rule', found '" + kw + "'");
    PatternRule rule;
    rule.name = parse_ident("rule name");
    expect(':');
    skip_space();
    if (peek() == '^') {
      ++pos_;
      rule.parent_constraint = parse_matcher();
    }
    rule.branches.push_back(parse_branch());
    while (true) {
      skip_space();
      if (peek() == '|') {
        ++pos_;
        rule.branches.push_back(parse_branch());
      } else {
        break;
      }
    }
    skip_space();
    if (peek() == ';') ++pos_;
    return rule;
  }

  PatternBranch parse_branch() {
    skip_space();
    if (peek() != '(') fail("expected '(' to open a rule branch");
    ++pos_;
    ++node_depth_;
    PatternBranch branch;
    branch.root = parse_matcher();
    branch.children = parse_items_until_close();
    --node_depth_;
    return branch;
  }

  std::vector<ChildItem> parse_items_until_close() {
    std::vector<ChildItem> items;
    while (true) {
      skip_space();
      if (eof()) fail("unterminated '(': missing ')'");
      if (peek() == ')') {
        ++pos_;
        return items;
      }
      items.push_back(parse_item());
    }
  }

  ChildItem parse_item() {
    ChildItem item;
    skip_space();
    if (peek() == '?') {
      ++pos_;
      item.capture = parse_ident("capture name");
      expect(':');
    }
    skip_space();
    if (peek() == '+') {
      ++pos_;
      item.chain_head = true;
    }
    skip_space();
    if (peek() == '(') {
      ++pos_;
      ++node_depth_;
      item.matcher = parse_matcher();
      auto inner = parse_items_until_close();
      --node_depth_;
      if (!inner.empty()) item.descend = std::move(inner);
    } else if (peek() == '@') {
      ++pos_;
      RuleRef ref;
      ref.name = parse_ident("rule reference");
      ref.self = ref.name == "self";
      item.matcher = std::move(ref);
    } else {
      item.matcher = parse_matcher();
    }
    skip_space();
    if (peek() == '*') {
      ++pos_;
      item.quantifier = ChildItem::Quantifier::Star;
    }
    return item;
  }

  LabelMatcher parse_matcher() {
    std::vector<LabelMatcher> alts;
    alts.push_back(parse_unary());
    while (true) {
      skip_space();
      if (peek() != '|') break;
      // Outside any node, "| (" separates rule branches.
      if (node_depth_ == 0 && depth_ == 0 &&
          next_nonspace_after(pos_ + 1) == '(')
        break;
      ++pos_;
      alts.push_back(parse_unary());
    }
    if (alts.size() == 1) return std::move(alts.front());
    return LabelMatcher::alternation(std::move(alts));
  }

  LabelMatcher parse_unary() {
    skip_space();
    if (peek() == '!' || peek() == '~') {
      ++pos_;
      return LabelMatcher::negation(parse_unary());
    }
    return parse_primary();
  }

  LabelMatcher parse_primary() {
    skip_space();
    char c = peek();
    if (c == '[' || c == '(') {
      char close = c == '[' ? ']' : ')';
      ++pos_;
      ++depth_;
      LabelMatcher inner = parse_matcher();
      --depth_;
      expect(close);
      return inner;
    }
    return parse_atom();
  }

  LabelMatcher parse_atom() {
    skip_space();
    bool exact = false;
    if (peek() == '=') {
      exact = true;
      ++pos_;
    }
    std::string word;
    if (peek() == '"') {
      word = parse_quoted();
    } else if (peek() != '%') {
      word = parse_word();
      if (word.empty()) fail("expected a label matcher");
    }

    if (peek() == '@') {
      if (exact || word.empty() || word == "_")
        fail("'@' must follow a category prefix");
      ++pos_;
      return LabelMatcher::pos_family(word);
    }

    std::vector<std::string> tags;
    while (peek() == '%') {
      ++pos_;
      std::string tag = parse_word();
      if (tag.empty()) fail("expected a function tag after '%'");
      tags.push_back(std::move(tag));
    }

    if (word.empty() || word == "_") {
      if (exact) fail("'=' needs a category");
      if (tags.empty()) return LabelMatcher::wildcard();
      if (tags.size() == 1) return LabelMatcher::function_tag(tags.front());
      fail("a wildcard takes at most one function tag");
    }
    return LabelMatcher::literal(std::move(word), std::move(tags), exact);
  }

  std::string parse_word() {
    std::size_t start = pos_;
    while (!eof()) {
      char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c)) ||
          kSpecial.find(c) != std::string_view::npos)
        break;
      ++pos_;
    }
    return std::string(src_.substr(start, pos_ - start));
  }

  std::string parse_quoted() {
    ++pos_;
    std::size_t start = pos_;
    while (!eof() && src_[pos_] != '"' && src_[pos_] != '\n') ++pos_;
    if (eof() || src_[pos_] != '"') fail("unterminated quoted label");
    std::string out(src_.substr(start, pos_ - start));
    ++pos_;
    if (out.empty()) fail("empty quoted label");
    return out;
  }

  std::string parse_ident(const char* what) {
    skip_space();
    std::size_t start = pos_;
    while (!eof() && is_ident_char(src_[pos_])) ++pos_;
    if (start == pos_) fail(std::string("expected ") + what);
    return std::string(src_.substr(start, pos_ - start));
  }

  void expect(char c) {
    skip_space();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  char next_nonspace_after(std::size_t p) const {
    while (p < src_.size()) {
      char c = src_[p];
      if (c == '#') {
        while (p < src_.size() && src_[p] != '\n') ++p;
        continue;
      }
      if (!std::isspace(static_cast<unsigned char>(c))) return c;
      ++p;
    }
    return '\0';
  }

  void skip_space() {
    while (!eof()) {
      char c = src_[pos_];
      if (c == '#') {
        while (!eof() && src_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  bool eof() const { return pos_ >= src_.size(); }
  char peek() const { return eof() ? '\0' : src_[pos_]; }

  [[noreturn]] void fail(const std::string& what) const {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < pos_ && i < src_.size(); ++i) {
      if (src_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw PatternSyntaxError(what, line, col);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int depth_ = 0;
  int node_depth_ = 0;
};

// Semantic checks. Everything here names the offending rule.
class Validator {
 public:
  explicit Validator(std::vector<PatternRule>& rules) : rules_(rules) {}

  void run() {
    std::set<std::string> names;
    for (const auto& r : rules_)
      if (!names.insert(r.name).second)
        throw PatternSemanticError(r.name, "duplicate rule name");

    for (auto& rule : rules_) check_rule(rule);
    check_ref_cycles();
  }

 private:
  void check_rule(PatternRule& rule) {
    if (rule.name == "self")
      throw PatternSemanticError(rule.name, "'self' is reserved");

    std::size_t self_refs = 0;
    std::size_t base_branches = 0;
    for (auto& branch : rule.branches) {
      std::size_t here = count_self(rule, branch.children, 0);
      branch.recursive = here > 0;
      self_refs += here;
      if (!branch.recursive) ++base_branches;
    }
    rule.recursive = self_refs > 0;
    if (rule.recursive && self_refs != 1)
      throw PatternSemanticError(rule.name,
                                 "recursive rule must have exactly one @self");
    if (rule.recursive && base_branches == 0)
      throw PatternSemanticError(rule.name, "recursion lacks a base case");

    for (const auto& branch : rule.branches) {
      std::set<std::string> seen;
      check_items(rule, branch.children, false, seen);
      if (rule.recursive && branch.recursive && !seen.empty())
        throw PatternSemanticError(
            rule.name, "captures are not allowed in the recursive branch");

      std::size_t heads = 0;
      for (const auto& item : branch.children)
        if (item.chain_head) {
          ++heads;
          if (item.quantifier == ChildItem::Quantifier::Star)
            throw PatternSemanticError(rule.name, "chain head cannot be starred");
          if (std::holds_alternative<RuleRef>(item.matcher))
            throw PatternSemanticError(rule.name,
                                       "chain head must be a label matcher");
        }
      if (rule.recursive && heads != 1)
        throw PatternSemanticError(
            rule.name, "each branch of a recursive rule needs one '+' head");
      if (!rule.recursive && heads != 0)
        throw PatternSemanticError(rule.name,
                                   "'+' heads are only meaningful with @self");
    }
  }

  std::size_t count_self(const PatternRule& rule,
                         const std::vector<ChildItem>& items, int depth) {
    std::size_t n = 0;
    for (const auto& item : items) {
      if (const auto* ref = std::get_if<RuleRef>(&item.matcher)) {
        if (ref->self) {
          if (depth > 0)
            throw PatternSemanticError(
                rule.name, "@self must be a direct child item of a branch");
          if (item.quantifier == ChildItem::Quantifier::Star)
            throw PatternSemanticError(rule.name, "@self cannot be starred");
          ++n;
        } else if (!by_name(ref->name)) {
          throw PatternSemanticError(
              rule.name, "unknown rule reference @" + ref->name);
        }
      }
      if (item.descend) {
        if (item.chain_head)
          throw PatternSemanticError(rule.name,
                                     "chain head cannot constrain children");
        n += count_self(rule, *item.descend, depth + 1);
      }
    }
    return n;
  }

  void check_items(const PatternRule& rule, const std::vector<ChildItem>& items,
                   bool under_star, std::set<std::string>& seen) {
    for (const auto& item : items) {
      bool star = item.quantifier == ChildItem::Quantifier::Star;
      if (item.capture) {
        if (star)
          throw PatternSemanticError(rule.name, "capture ?" + *item.capture +
                                                    " on a starred item");
        if (under_star)
          throw PatternSemanticError(
              rule.name, "capture ?" + *item.capture + " inside a starred item");
        if (!seen.insert(*item.capture).second)
          throw PatternSemanticError(
              rule.name, "capture ?" + *item.capture + " declared twice");
      }
      if (const auto* ref = std::get_if<RuleRef>(&item.matcher);
          ref && !ref->self) {
        for (const auto& name : by_name(ref->name)->capture_names()) {
          if (star)
            throw PatternSemanticError(
                rule.name, "starred @" + ref->name + " would repeat captures");
          if (!seen.insert(name).second)
            throw PatternSemanticError(rule.name, "capture ?" + name +
                                                      " clashes with @" +
                                                      ref->name);
        }
      }
      if (item.descend) check_items(rule, *item.descend, under_star || star, seen);
    }
  }

  void check_ref_cycles() {
    // 0 = unvisited, 1 = on stack, 2 = done
    std::map<std::string, int> state;
    std::function<void(const PatternRule&)> visit = [&](const PatternRule& r) {
      state[r.name] = 1;
      std::function<void(const std::vector<ChildItem>&)> walk =
          [&](const std::vector<ChildItem>& items) {
            for (const auto& item : items) {
              if (const auto* ref = std::get_if<RuleRef>(&item.matcher);
                  ref && !ref->self) {
                int s = state[ref->name];
                if (s == 1)
                  throw PatternSemanticError(
                      r.name, "cyclic rule reference through @" + ref->name);
                if (s == 0) visit(*by_name(ref->name));
              }
              if (item.descend) walk(*item.descend);
            }
          };
      for (const auto& b : r.branches) walk(b.children);
      state[r.name] = 2;
    };
    for (const auto& r : rules_)
      if (state[r.name] == 0) visit(r);
  }

  const PatternRule* by_name(const std::string& name) const {
    for (const auto& r : rules_)
      if (r.name == name) return &r;
    return nullptr;
  }

  std::vector<PatternRule>& rules_;
};

}  // namespace

PatternRuleSet compile_pattern(std::string_view source) {
  auto rules = Parser(source).parse_file();
  Validator(rules).run();
  return PatternRuleSet(std::move(rules));
}

PatternRuleSet load_pattern_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open pattern file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return compile_pattern(buf.str());
}

const PatternRuleSet& default_patterns() {
  static const PatternRuleSet rules = compile_pattern(default_pattern_source());
  return rules;
}

}  // namespace synqa
