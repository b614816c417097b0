#include <doctest.h>

#include <fstream>

#include "support/fixtures.hpp"
#include "synqa/report.hpp"
#include "synqa/serialize.hpp"

using namespace synqa;
using namespace synqa::testing;

namespace {

std::vector<Question> vinken_questions() {
  auto s = make_sentence(kVinkenTree);
  auto facts = extract_facts(s, default_patterns());
  std::vector<Sentence> sentences{s};
  return generate_questions(facts, sentences, TemplateSet::defaults(), 3);
}

}  // namespace

TEST_CASE("facts, sentences and questions round-trip through JSON") {
  auto s = make_sentence(kVinkenTree);
  Sentence back = json(s).get<Sentence>();
  CHECK(back.id == s.id);
  CHECK(back.tokens == s.tokens);
  CHECK(back.root.structurally_equal(s.root));

  for (const auto& f : extract_facts(s, default_patterns())) CHECK(json(f).get<SyntacticFact>() == f);

  for (const auto& q : vinken_questions()) {
    json j = q;
    Question r = j.get<Question>();
    CHECK(json(r) == j);
    CHECK(r.gold == q.gold);
    CHECK(r.meta.reuse_kp == q.meta.reuse_kp);
  }
}

TEST_CASE("unknown schema versions are refused") {
  json j = vinken_questions().front();
  j["v"] = 2;
  CHECK_THROWS(j.get<Question>());
}

TEST_CASE("run records round-trip, including the error marker") {
  RunRecord r{"q/FITB", 2, "ep", "m", "prompt", "raw", 12.5, "2024-01-01T00:00:00Z", 3,
              std::string("HTTP 500")};
  CHECK(json(r).get<RunRecord>() == r);
  r.error.reset();
  CHECK(json(r).get<RunRecord>() == r);
}

TEST_CASE("jsonl files report the failing line") {
  TempDir dir("serialize");
  auto qs = vinken_questions();
  write_jsonl(dir.path() / "q.jsonl", qs);
  auto back = read_jsonl<Question>(dir.path() / "q.jsonl");
  REQUIRE(back.size() == qs.size());
  CHECK(json(back.back()) == json(qs.back()));

  {
    std::ofstream out(dir.path() / "q.jsonl", std::ios::app);
    out << "{not json\n";
  }
  try {
    read_jsonl<Question>(dir.path() / "q.jsonl");
    FAIL("expected IntegrityError");
  } catch (const IntegrityError& e) {
    CHECK(std::string(e.what()).find(":" + std::to_string(qs.size() + 1) + ":") !=
          std::string::npos);
  }
  CHECK_THROWS_AS(read_jsonl<Question>(dir.path() / "missing.jsonl"), ConfigError);
}

TEST_CASE("scoreboards keep empty cells empty") {
  Scoreboard b;
  b.overall.tf_acc = 50.0;
  b.seeds = {0, 1};
  json j = b;
  CHECK(j["overall"]["mc_acc"].is_null());
  Scoreboard r = j.get<Scoreboard>();
  CHECK(r.overall.tf_acc == 50.0);
  CHECK_FALSE(r.overall.mc_acc.has_value());
  CHECK(r.seeds == b.seeds);
}

TEST_CASE("report tables") {
  Scoreboard b;
  b.overall = {81.88, 88.19, 63.98, 77.78, 80.3167, 1, 1, 1, 0};
  std::vector<LabeledScoreboard> rows{{"gpt", b}};
  CHECK(format_cell(std::nullopt) == "-");
  CHECK(format_cell(80.31666) == "80.32");
  auto table = overall_table(rows);
  CHECK(table.find("FITB F1") != std::string::npos);
  CHECK(table.find("80.32") != std::string::npos);
  auto csv = overall_csv(rows);
  CHECK(csv.find("gpt,") != std::string::npos);
  auto series = series_csv(rows);
  CHECK(series.starts_with("metric,gpt"));
  CHECK(knowledge_point_table(rows).find("MVP") != std::string::npos);

  auto d = dataset_stats(std::span<const Question>(vinken_questions()));
  auto dt = distribution_table(d);
  CHECK(dt.find("Total") != std::string::npos);
  CHECK(distribution_json(d).is_object());
}
