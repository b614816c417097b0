#include <doctest.h>

#include <set>

#include "support/fixtures.hpp"
#include "support/synthetic_treebank.hpp"
#include "synqa/extract.hpp"

using namespace synqa;
using namespace synqa::testing;

namespace {

std::vector<std::string> answers(const Sentence& s, const std::vector<SyntacticFact>& fs,
                                 KnowledgePoint kp) {
  std::vector<std::string> out;
  for (const auto& f : facts_of(fs, kp)) out.push_back(phrase_text(s, f.answer_span));
  return out;
}

}  // namespace

TEST_CASE("Vinken tree facts") {
  auto s = make_sentence(kVinkenTree);
  auto facts = extract_facts(s, default_patterns());

  auto gs = facts_of(facts, KnowledgePoint::GS);
  REQUIRE(gs.size() == 1);
  CHECK(phrase_text(s, gs[0].answer_span) == "Pierre Vinken");
  CHECK(gs[0].anchor_text == "will join");
  CHECK(gs[0].answer_category == "noun phrase");

  CHECK(answers(s, facts, KnowledgePoint::DO) == std::vector<std::string>{"the board"});

  auto mvp = facts_of(facts, KnowledgePoint::MVP);
  REQUIRE(mvp.size() == 1);
  CHECK(mvp[0].anchor_text == "will join");
  REQUIRE(mvp[0].chain.size() == 2);
  CHECK(mvp[0].chain[0] == Span{2, 3});
  CHECK(mvp[0].chain[1] == Span{3, 4});
  REQUIRE(mvp[0].partner);
  CHECK(phrase_text(s, *mvp[0].partner) == "Pierre Vinken");

  CHECK(facts_of(facts, KnowledgePoint::SC).empty());
  CHECK(facts_of(facts, KnowledgePoint::IO).empty());

  auto ppa = facts_of(facts, KnowledgePoint::PPA);
  REQUIRE(ppa.size() == 1);
  CHECK(phrase_text(s, ppa[0].answer_span) == "as a nonexecutive director");
  CHECK(ppa[0].attachment == Attachment::Verb);
}

TEST_CASE("double object yields IO and DO") {
  auto s = make_sentence(kDoubleObjectTree);
  auto facts = extract_facts(s, default_patterns());
  CHECK(answers(s, facts, KnowledgePoint::IO) == std::vector<std::string>{"me"});
  CHECK(answers(s, facts, KnowledgePoint::DO) == std::vector<std::string>{"a book"});
}

TEST_CASE("subject complement") {
  auto s = make_sentence("(S (NP-SBJ (DT The) (NN price)) (VP (VBZ seems) (ADJP-PRD (JJ reasonable))) (. .))");
  auto facts = extract_facts(s, default_patterns());
  auto sc = facts_of(facts, KnowledgePoint::SC);
  REQUIRE(sc.size() == 1);
  CHECK(phrase_text(s, sc[0].answer_span) == "reasonable");
  CHECK(sc[0].answer_category == "adjective phrase");
  CHECK(facts_of(facts, KnowledgePoint::DO).empty());
}

TEST_CASE("coordination, adverbials and noun attachment") {
  auto s = make_sentence(
      "(S (NP-SBJ (NP (NNS Stocks)) (CC and) (NP (NNS bonds))) (VP (VBD rose) "
      "(NP-TMP (NN yesterday)) (ADVP (RB sharply))) (. .))");
  auto facts = extract_facts(s, default_patterns());
  auto co = facts_of(facts, KnowledgePoint::CO);
  REQUIRE(co.size() == 1);
  CHECK(co[0].anchor_text == "and");
  CHECK(phrase_text(s, co[0].answer_span) == "Stocks");
  REQUIRE(co[0].partner);
  CHECK(phrase_text(s, *co[0].partner) == "bonds");
  CHECK(answers(s, facts, KnowledgePoint::ADV) == std::vector<std::string>{"sharply"});

  auto t = make_sentence(
      "(S (NP-SBJ (PRP She)) (VP (VBD saw) (NP (NP (DT the) (NN man)) (PP (IN with) "
      "(NP (DT the) (NN telescope))))) (. .))");
  auto pp = facts_of(extract_facts(t, default_patterns()), KnowledgePoint::PPA);
  REQUIRE(pp.size() == 1);
  CHECK(pp[0].attachment == Attachment::Noun);
  CHECK(pp[0].anchor_text == "the man");
}

TEST_CASE("a bare noun phrase yields nothing") {
  auto s = make_sentence("(S (NP (NN dog)))");
  ExtractionStats stats;
  CHECK(extract_facts(s, default_patterns(), &stats).empty());
}

TEST_CASE("answer categories") {
  CHECK(answer_category(parse_tree("(NP (DT the) (NN board))")) == "noun phrase");
  CHECK(answer_category(parse_tree("(PP-CLR (IN as) (NP (NN x)))")) == "prepositional phrase");
  CHECK(answer_category(parse_tree("(SBAR (IN that) (S (NP (PRP it)) (VP (VBD rose))))")) ==
        "that-clause");
  CHECK_FALSE(answer_category(parse_tree("(ADVP (RB quickly))")).empty());
}

TEST_CASE("extraction invariants over a synthetic corpus") {
  auto sentences = parse_bracketed(SyntheticTreebank(5).generate(300), "syn");
  auto one = extract_corpus(sentences, default_patterns(), 1);
  auto many = extract_corpus(sentences, default_patterns(), 4);
  CHECK(one.facts == many.facts);
  REQUIRE_FALSE(one.facts.empty());

  std::map<std::string, const Sentence*> by_id;
  for (const auto& s : one.kept) by_id[s.id] = &s;
  std::set<std::tuple<std::string, KnowledgePoint, Span, Span>> seen;
  for (const auto& f : one.facts) {
    const Sentence& s = *by_id.at(f.sentence_id);
    const std::size_t n = s.tokens.size();
    CHECK(f.answer_span.end <= n);
    CHECK(f.anchor_span.end <= n);
    CHECK_FALSE(f.answer_span.empty());
    CHECK_FALSE(f.anchor_text.empty());
    CHECK_FALSE(f.answer_category.empty());
    CHECK(seen.insert({f.sentence_id, f.kp, f.anchor_span, f.answer_span}).second);
    if (f.kp == KnowledgePoint::MVP) {
      REQUIRE_FALSE(f.chain.empty());
      for (std::size_t i = 1; i < f.chain.size(); ++i)
        CHECK(f.chain[i - 1].end <= f.chain[i].begin);
    }
    if (f.kp != KnowledgePoint::MVP) CHECK_FALSE(f.answer_span.overlaps(f.anchor_span));
    if (f.kp == KnowledgePoint::PPA) CHECK(f.attachment.has_value());
  }
  std::size_t emitted = 0;
  for (auto e : one.stats.emitted) emitted += e;
  CHECK(emitted == one.facts.size());
}
