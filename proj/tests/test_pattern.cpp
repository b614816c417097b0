#include <doctest.h>

#include <algorithm>
#include <set>

#include "support/fixtures.hpp"
#include "support/random_trees.hpp"
#include "synqa/pattern.hpp"

using namespace synqa;
using namespace synqa::testing;

namespace {

bool matches(std::string_view matcher_src, std::string_view label) {
  auto rules = compile_pattern("rule T: (" + std::string(matcher_src) + ")");
  return label_matches(rules.at("T").branches.at(0).root, NodeLabel::parse(label));
}

std::vector<std::string> capture_texts(const std::vector<MatchBinding>& bs,
                                       const Sentence& s, const std::string& name) {
  std::vector<std::string> out;
  for (const auto& b : bs)
    if (auto it = b.captures.find(name); it != b.captures.end())
      out.push_back(phrase_text(s, it->second->span()));
  return out;
}

}  // namespace

TEST_CASE("label matcher truth table") {
  CHECK(matches("NP", "NP"));
  CHECK(matches("NP", "NP-SBJ-1"));
  CHECK_FALSE(matches("NP", "NNP"));
  CHECK(matches("=NP", "NP"));
  CHECK_FALSE(matches("=NP", "NP-SBJ"));
  CHECK(matches("=NP", "NP-1"));
  CHECK(matches("%SBJ", "S-SBJ"));
  CHECK_FALSE(matches("%SBJ", "NP"));
  CHECK(matches("NP%SBJ", "NP-SBJ"));
  CHECK_FALSE(matches("NP%SBJ", "S-SBJ"));
  CHECK(matches("_", "-NONE-"));
  for (const char* v : {"VB", "VBD", "VBG", "VBN", "VBP", "VBZ"}) CHECK(matches("VB@", v));
  CHECK_FALSE(matches("VB@", "MD"));
  CHECK(matches("NN@", "NNPS"));
  CHECK(matches("!NP", "VP"));
  CHECK_FALSE(matches("~NP", "NP-TMP"));
  CHECK(matches("[MD|TO]", "TO"));
  CHECK_FALSE(matches("[MD|TO]", "VB"));
  CHECK(matches("\"#\"", "#"));
  CHECK(matches("\".\"", "."));
}

TEST_CASE("syntax errors carry line and column") {
  try {
    compile_pattern("rule A: (S\n  ?X:NP");
    FAIL("expected a syntax error");
  } catch (const PatternSyntaxError& e) {
    CHECK(e.line() >= 1);
  }
  CHECK_THROWS_AS(compile_pattern("rul A: (S)"), PatternSyntaxError);
  CHECK_THROWS_AS(compile_pattern("rule A: S"), PatternSyntaxError);
  CHECK_THROWS_AS(compile_pattern("rule A: (S %)"), PatternSyntaxError);
  CHECK_THROWS_AS(compile_pattern("rule A: (S \"#)"), PatternSyntaxError);
}

TEST_CASE("semantic errors name the rule") {
  auto semantic = [](std::string_view src) {
    try {
      compile_pattern(src);
    } catch (const PatternSemanticError& e) {
      return e.rule();
    }
    return std::string("<none>");
  };
  CHECK(semantic("rule A: (S)\nrule A: (VP)") == "A");
  CHECK(semantic("rule B: (S @Missing)") == "B");
  CHECK(semantic("rule C: (VP +VB @self)") == "C");  // no base case
  CHECK(semantic("rule D: (S ?X:NP* )") == "D");
  CHECK(semantic("rule E: (S ?X:NP ?X:VP)") == "E");
  CHECK(semantic("rule F: (S (NP ?X:NN)*)") == "F");
  CHECK(semantic("rule G: (S +NP)") == "G");
  CHECK(semantic("rule H: (S @I)\nrule I: (NP @H)") != "<none>");
  CHECK(semantic("rule J: (VP +VB @self) | (VP +VB) | (VP +MD @self)") == "J");
  CHECK(semantic("rule K: (VP +VB ?X:NP @self) | (VP +VB)") == "K");
  CHECK(semantic("rule L: (S ?X:NP)\nrule M: (S ?X:NP @L)") == "M");
}

TEST_CASE("shipped patterns compile") {
  const auto& rules = default_patterns();
  for (const char* name : {"GS", "SC", "DO", "IO", "MVP", "ADJ", "ADV", "CO", "PPA"})
    CHECK(rules.contains(name));
  CHECK(rules.at("MVP").recursive);
  CHECK_FALSE(rules.at("GS").recursive);
  CHECK(rules.at("GS").capture_names() == std::vector<std::string>{"GS", "PRED"});
}

TEST_CASE("subject rule on the Vinken tree") {
  auto s = make_sentence(kVinkenTree);
  auto bs = match_rule(default_patterns(), "GS", s.root);
  REQUIRE(bs.size() == 1);
  CHECK(capture_texts(bs, s, "GS") == std::vector<std::string>{"Pierre Vinken"});
  CHECK(bs[0].node == &s.root);
}

TEST_CASE("recursive chain runs top-down from the outermost VP") {
  auto s = make_sentence(
      "(S (NP-SBJ (PRP It)) (VP (MD may) (VP (VB have) (VP (VBN left)))))");
  auto bs = match_rule(default_patterns(), "MVP", s.root);
  // "have" also closes a chain through the base branch, so both the full
  // and the shorter chain are reported.
  REQUIRE(bs.size() == 2);
  std::set<std::vector<std::string>> chains;
  for (const auto& b : bs) {
    CHECK(b.node == &s.root.children()[1]);
    std::vector<std::string> words;
    for (const auto* leaf : b.chain) words.push_back(*leaf->token());
    chains.insert(words);
    REQUIRE(b.chain_levels.size() == b.chain.size());
    for (std::size_t i = 1; i < b.chain_levels.size(); ++i)
      CHECK(b.chain_levels[i - 1]->span().contains(b.chain_levels[i]->span()));
  }
  CHECK(chains == std::set<std::vector<std::string>>{{"may", "have", "left"}, {"may", "have"}});
}

TEST_CASE("parent constraint keeps inner VPs out") {
  auto s = make_sentence(kVinkenTree);
  auto bs = match_rule(default_patterns(), "MVP", s.root);
  REQUIRE(bs.size() == 1);
  CHECK(bs[0].node->label().category == "VP");
  CHECK(bs[0].node->span() == Span{2, 12});
}

TEST_CASE("a root matches an empty parent label") {
  auto rules = compile_pattern("rule R: ^!_ (S)\nrule Q: ^_ (S)\nrule N: ^!NP (S)");
  auto t = parse_tree("(S (NP (NN a)) (VP (VB b)))");
  CHECK(match_rule(rules, "R", t).empty());
  CHECK(match_rule(rules, "Q", t).size() == 1);
  CHECK(match_rule(rules, "N", t).size() == 1);
}

TEST_CASE("a leaf-only tree yields no subject match") {
  auto t = parse_tree("(S (NP (NN dog)))");
  CHECK(match_rule(default_patterns(), "GS", t).empty());
}

TEST_CASE("match_rule is deterministic and duplicate-free") {
  Rng rng(11, "pattern-determinism");
  for (int i = 0; i < 300; ++i) {
    TreeNode t = random_tree(rng, 12);
    auto rules = random_rule(rng);
    auto a = match_rule(rules, "R", t);
    auto b = match_rule(rules, "R", t);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
      CHECK(a[k].node == b[k].node);
      CHECK(a[k].captures == b[k].captures);
    }
    for (std::size_t x = 0; x < a.size(); ++x)
      for (std::size_t y = x + 1; y < a.size(); ++y)
        CHECK_FALSE((a[x].node == a[y].node && a[x].captures == a[y].captures));
  }
}

TEST_CASE("match_rule agrees with the exhaustive matcher") {
  Rng rng(3, "pattern-oracle-unit");
  for (int i = 0; i < 2000; ++i) {
    TreeNode t = random_tree(rng, 12);
    auto rules = random_rule(rng);
    auto got = match_rule(rules, "R", t);
    auto want = brute_force_match(rules.at("R"), t);
    std::vector<std::pair<const TreeNode*, Captures>> g;
    for (const auto& b : got) g.emplace_back(b.node, b.captures);
    std::sort(g.begin(), g.end());
    std::sort(want.begin(), want.end());
    INFO(t.bracketed());
    REQUIRE(g == want);
  }
}
