#include <doctest.h>

#include <map>
#include <set>

#include "synqa/sampler.hpp"
#include "synqa/serialize.hpp"

using namespace synqa;

namespace {

std::vector<Question> pool(std::size_t n, std::size_t categories) {
  std::vector<Question> out;
  for (std::size_t i = 0; i < n; ++i) {
    Question q;
    q.id = "q" + std::to_string(i);
    q.qtype = kAllQuestionTypes[i % 3];
    q.kp = static_cast<KnowledgePoint>((i / 3) % 9);
    q.meta.answer_category = "cat" + std::to_string((i / 27) % categories);
    q.gold = std::string("x");
    out.push_back(std::move(q));
  }
  return out;
}

std::string dump(const std::vector<Question>& qs) {
  std::string s;
  for (const auto& q : qs) s += json(q).dump() + "\n";
  return s;
}

}  // namespace

TEST_CASE("strata are (qtype, kp, answer category)") {
  auto p = pool(270, 2);
  auto strata = stratify(p);
  CHECK(strata.size() == 54);
  CHECK(to_string(StratumKey{QuestionType::TF, KnowledgePoint::GS, "noun phrase"}) ==
        "TF/GS/noun phrase");
}

TEST_CASE("per-stratum caps, disjointness and determinism") {
  auto p = pool(3000, 3);
  SampleConfig cfg{5, 2, 17};
  auto r = sample_balanced(p, cfg);
  std::map<std::string, std::size_t> per;
  std::set<std::string> eval_ids;
  for (const auto& q : r.eval) {
    ++per[to_string(StratumKey{q.qtype, q.kp, q.meta.answer_category})];
    eval_ids.insert(q.id);
  }
  for (const auto& [k, n] : per) CHECK(n <= 5);
  for (const auto& q : r.exemplars) CHECK_FALSE(eval_ids.contains(q.id));
  CHECK(r.strata.size() == stratify(p).size());
  for (const auto& sc : r.strata) {
    CHECK(sc.eval == std::min<std::size_t>(5, sc.pool));
    CHECK(sc.eval + sc.exemplar <= sc.pool);
  }

  auto again = sample_balanced(p, cfg);
  CHECK(dump(r.eval) == dump(again.eval));
  CHECK(dump(r.exemplars) == dump(again.exemplars));
  cfg.seed = 18;
  CHECK(dump(sample_balanced(p, cfg).eval) != dump(r.eval));
}

TEST_CASE("small strata give everything to eval first") {
  auto p = pool(27 * 2, 1);  // 27 strata of two
  auto r = sample_balanced(p, SampleConfig{5, 2, 0});
  CHECK(r.eval.size() == 54);
  CHECK(r.exemplars.empty());
}

TEST_CASE("sampler rejects bad input") {
  auto p = pool(30, 1);
  CHECK_THROWS(sample_balanced(p, SampleConfig{0, 2, 0}));
  p.push_back(p.front());
  CHECK_THROWS(sample_balanced(p, SampleConfig{5, 2, 0}));
}
