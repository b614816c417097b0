#include <doctest.h>

#include <algorithm>

#include "synqa/error.hpp"
#include "synqa/rng.hpp"
#include "synqa/scoring.hpp"

using namespace synqa;

namespace {

using Tokens = std::vector<std::string>;

// Longest common subsequence by trying every subsequence of the shorter list.
std::size_t lcs_brute(const Tokens& a, const Tokens& b) {
  const Tokens& s = a.size() <= b.size() ? a : b;
  const Tokens& t = a.size() <= b.size() ? b : a;
  std::size_t best = 0;
  for (std::uint32_t mask = 0; mask < (1u << s.size()); ++mask) {
    std::size_t j = 0, n = 0;
    bool ok = true;
    for (std::size_t i = 0; i < s.size() && ok; ++i) {
      if (!(mask >> i & 1u)) continue;
      while (j < t.size() && t[j] != s[i]) ++j;
      if (j == t.size()) ok = false;
      else { ++j; ++n; }
    }
    if (ok) best = std::max(best, n);
  }
  return best;
}

Question make_q(std::string id, QuestionType t, Gold gold,
                KnowledgePoint kp = KnowledgePoint::GS) {
  Question q;
  q.id = std::move(id);
  q.qtype = t;
  q.kp = kp;
  q.gold = std::move(gold);
  return q;
}

AnswerRecord rec(const std::string& id, std::uint64_t seed, QuestionType t,
                 std::string_view raw) {
  return {id, seed, parse_answer(t, raw)};
}

}  // namespace

TEST_CASE("treebank tokenizer") {
  CHECK(treebank_tokenize("Don't stop.") == Tokens{"Do", "n't", "stop", "."});
  CHECK(treebank_tokenize("\"Hi,\" she said (twice).") ==
        Tokens{"``", "Hi", ",", "''", "she", "said", "(", "twice", ")", "."});
  CHECK(treebank_tokenize("the company's board") == Tokens{"the", "company", "'s", "board"});
  CHECK(treebank_tokenize("$5.50 each") == Tokens{"$", "5.50", "each"});
}

TEST_CASE("normalize_tokens") {
  CHECK(normalize_tokens("a nonexecutive director.") == Tokens{"a", "nonexecutive", "director"});
  CHECK(normalize_tokens("").empty());
  CHECK(normalize_tokens("Nov. 29") == Tokens{"nov.", "29"});
  CHECK(normalize_tokens("Pierre Vinken , 61 years old ,") ==
        Tokens{"pierre", "vinken", "61", "years", "old"});
}

TEST_CASE("fitb metrics on the worked examples") {
  const Tokens gold{"a", "nonexecutive", "director"};
  CHECK(fitb_f1(gold, gold) == 1.0);
  CHECK(fitb_f1(gold, Tokens{"nonexecutive", "director"}) == 0.8);
  CHECK(fitb_f1(gold, Tokens{"director", "nonexecutive", "a"}) == 1.0 / 3.0);
  CHECK(fitb_f1(gold, Tokens{}) == 0.0);
  CHECK(fitb_f1(Tokens{}, gold) == 0.0);
  CHECK(fitb_f1(gold, Tokens{"x"}) == 0.0);
  CHECK(fitb_acc(gold, gold) == 1.0);
  CHECK(fitb_acc(Tokens{"the", "board"}, Tokens{"board"}) == 0.0);
  CHECK(fitb_acc(normalize_tokens("The board."), normalize_tokens("the board")) == 1.0);
}

TEST_CASE("F1 agrees with exhaustive LCS") {
  Rng rng(1, "f1-unit");
  const Tokens alphabet{"a", "b", "c", "d"};
  for (int i = 0; i < 5000; ++i) {
    Tokens g(rng.below(9)), p(rng.below(9));
    for (auto& t : g) t = alphabet[rng.below(4)];
    for (auto& t : p) t = alphabet[rng.below(4)];
    const std::size_t m = lcs_brute(g, p);
    REQUIRE(lcs_length(g, p) == m);
    double want = 0;
    if (m > 0) {
      const double prec = double(m) / double(p.size()), rec = double(m) / double(g.size());
      want = 2 * prec * rec / (prec + rec);
    }
    CHECK(std::abs(fitb_f1(g, p) - want) <= 1e-12);
    CHECK(fitb_f1(g, p) >= 0.0);
    CHECK(fitb_f1(g, p) <= 1.0);
  }
}

TEST_CASE("overall accuracy") {
  CHECK(overall_accuracy(81.88, 88.19, 63.98, 77.78) == doctest::Approx(80.3167).epsilon(1e-6));
  CHECK(overall_accuracy(100, 100, 100, 100) == 100.0);
  CHECK(overall_accuracy(0, 0, 0, 0) == 0.0);
  CHECK_THROWS_AS(overall_accuracy(101, 0, 0, 0), std::domain_error);
  CHECK_THROWS_AS(overall_accuracy(-1, 0, 0, 0), std::domain_error);
}

TEST_CASE("true/false answers") {
  auto a = parse_answer(QuestionType::TF, "True.");
  CHECK(std::get<bool>(a.value));
  CHECK(a.status == ParseStatus::Clean);
  a = parse_answer(QuestionType::TF, "The statement is false");
  CHECK_FALSE(std::get<bool>(a.value));
  CHECK(a.status == ParseStatus::Salvaged);
  CHECK(parse_answer(QuestionType::TF, "untrue, maybe").status == ParseStatus::Unparseable);
  CHECK(parse_answer(QuestionType::TF, "").status == ParseStatus::Unparseable);
}

TEST_CASE("multiple-choice answers") {
  auto a = parse_answer(QuestionType::MC, "B");
  CHECK(std::get<char>(a.value) == 'B');
  CHECK(a.status == ParseStatus::Clean);
  CHECK(std::get<char>(parse_answer(QuestionType::MC, "(C) the board").value) == 'C');
  a = parse_answer(QuestionType::MC, "The answer is D.");
  CHECK(std::get<char>(a.value) == 'D');
  CHECK(a.status == ParseStatus::Salvaged);
  CHECK(parse_answer(QuestionType::MC, "Because").status == ParseStatus::Unparseable);
  CHECK(parse_answer(QuestionType::MC, "E").status == ParseStatus::Unparseable);
}

TEST_CASE("fill-in-the-blank answers") {
  const std::string prompt =
      "In the above sentence, the grammatical subject of \"will join\" is ____________.";
  auto a = parse_answer(QuestionType::FITB, "Pierre Vinken", prompt);
  CHECK(std::get<std::string>(a.value) == "Pierre Vinken");
  CHECK(a.status == ParseStatus::Clean);
  a = parse_answer(QuestionType::FITB,
                   "the grammatical subject of \"will join\" is \"Pierre Vinken\".", prompt);
  CHECK(std::get<std::string>(a.value) == "Pierre Vinken");
  CHECK(a.status == ParseStatus::Salvaged);
  a = parse_answer(QuestionType::FITB, "Answer: Pierre Vinken\nBecause ...", prompt);
  CHECK(std::get<std::string>(a.value) == "Pierre Vinken");
  CHECK(parse_answer(QuestionType::FITB, "  \n", prompt).status == ParseStatus::Unparseable);
}

TEST_CASE("aggregate averages seeds and fills the breakdown") {
  std::vector<Question> eval{
      make_q("tf", QuestionType::TF, true),
      make_q("mc", QuestionType::MC, 'A'),
      make_q("fb", QuestionType::FITB, std::string("the board")),
  };
  std::vector<AnswerRecord> records{
      rec("tf", 0, QuestionType::TF, "True"), rec("mc", 0, QuestionType::MC, "A"),
      rec("fb", 0, QuestionType::FITB, "the board"),
      rec("tf", 1, QuestionType::TF, "False"), rec("mc", 1, QuestionType::MC, "B"),
      rec("fb", 1, QuestionType::FITB, "board"),
  };
  auto board = aggregate(records, eval);
  CHECK(board.seeds == std::vector<std::uint64_t>{0, 1});
  CHECK(*board.overall.tf_acc == 50.0);
  CHECK(*board.overall.mc_acc == 50.0);
  CHECK(*board.overall.fitb_acc == 50.0);
  CHECK(*board.overall.fitb_f1 == doctest::Approx((100.0 + 200.0 / 3.0) / 2));
  CHECK(*board.overall.oa == doctest::Approx(overall_accuracy(
                                 50, 50, 50, (100.0 + 200.0 / 3.0) / 2)));
  CHECK(board.overall.n_tf == 2);
  CHECK(board.kp(KnowledgePoint::GS).oa.has_value());
  CHECK_FALSE(board.kp(KnowledgePoint::IO).tf_acc.has_value());

  std::reverse(records.begin(), records.end());
  auto again = aggregate(records, eval);
  CHECK(*again.overall.oa == *board.overall.oa);

  records.push_back(records.front());
  CHECK_THROWS_AS(aggregate(records, eval), IntegrityError);
  records.pop_back();
  records.push_back(rec("zz", 0, QuestionType::TF, "True"));
  CHECK_THROWS_AS(aggregate(records, eval), IntegrityError);
}

TEST_CASE("reused statements count toward the reused point") {
  std::vector<Question> eval{make_q("tf", QuestionType::TF, true)};
  eval[0].meta.reuse_kp = KnowledgePoint::MVP;
  std::vector<AnswerRecord> records{rec("tf", 0, QuestionType::TF, "true")};
  auto board = aggregate(records, eval);
  CHECK(*board.kp(KnowledgePoint::GS).tf_acc == 100.0);
  CHECK(*board.kp(KnowledgePoint::MVP).tf_acc == 100.0);
  CHECK(board.overall.n_tf == 1);
  CHECK(board.overall.unparseable == 0);
}
