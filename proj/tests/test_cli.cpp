#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "support/fixtures.hpp"
#include "support/mock_server.hpp"
#include "synqa/serialize.hpp"

using namespace synqa;
using namespace synqa::testing;

namespace {

int cli(const std::string& args, const std::filesystem::path& log) {
  const std::string cmd = std::string(SYNQA_CLI_PATH) + " " + args + " > " +
                          log.string() + " 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("command-line pipeline from treebank to report") {
  TempDir dir("cli");
  const auto d = dir.path();
  const auto log = d / "log.txt";
  const std::string data = SYNQA_TEST_DATA_DIR;

  REQUIRE(cli("extract " + data + "/wsj_sample.mrg -o " + (d / "out").string(), log) == 0);
  CHECK(std::filesystem::exists(d / "out/facts.jsonl"));
  CHECK(read_json_file(d / "out/extract_stats.json").is_object());

  REQUIRE(cli("generate --facts " + (d / "out/facts.jsonl").string() + " --sentences " +
                  (d / "out/sentences.jsonl").string() + " -o " +
                  (d / "out/questions.jsonl").string(),
              log) == 0);
  auto qs = read_jsonl<Question>(d / "out/questions.jsonl");
  CHECK(qs.size() > 50);

  REQUIRE(cli("--seed 4 sample --questions " + (d / "out/questions.jsonl").string() + " -o " +
                  (d / "out").string(),
              log) == 0);
  auto manifest = read_json_file(d / "out/manifest.json");
  CHECK(manifest["seed"] == 4);

  REQUIRE(cli("--seed 4 baseline --eval " + (d / "out/eval.jsonl").string() + " --seeds 0 1 -o " +
                  (d / "out/runs/random.jsonl").string(),
              log) == 0);
  REQUIRE(cli("score --eval " + (d / "out/eval.jsonl").string() + " --run " +
                  (d / "out/runs/random.jsonl").string() + " -o " +
                  (d / "out/random.score.json").string(),
              log) == 0);
  auto board = read_json_file(d / "out/random.score.json").get<Scoreboard>();
  CHECK(board.seeds == std::vector<std::uint64_t>{0, 1});

  REQUIRE(cli("report Random=" + (d / "out/random.score.json").string(), log) == 0);
  CHECK(slurp(log).find("Random") != std::string::npos);

  REQUIRE(cli("stats --questions " + (d / "out/questions.jsonl").string(), log) == 0);
  CHECK(slurp(log).find("MVP") != std::string::npos);
}

TEST_CASE("command-line run against a mock endpoint") {
  TempDir dir("cli-run");
  const auto d = dir.path();
  const auto log = d / "log.txt";
  const std::string data = SYNQA_TEST_DATA_DIR;
  REQUIRE(cli("extract " + data + "/wsj_sample.mrg -o " + d.string(), log) == 0);
  REQUIRE(cli("generate --facts " + (d / "facts.jsonl").string() + " --sentences " +
                  (d / "sentences.jsonl").string() + " -o " + (d / "questions.jsonl").string(),
              log) == 0);
  REQUIRE(cli("sample --questions " + (d / "questions.jsonl").string() + " -o " + d.string(),
              log) == 0);

  MockServer server([](std::size_t, const json&) { return MockReply{200, "True"}; });
  json config = {{"run", {{"seeds", {0}}}},
                 {"endpoints", {{{"label", "m"}, {"base_url", server.base_url()}, {"model", "m"}}}}};
  write_json_file(d / "config.json", config);
  REQUIRE(cli("--config " + (d / "config.json").string() + " run --endpoint m --eval " +
                  (d / "eval.jsonl").string() + " -o " + (d / "m.jsonl").string(),
              log) == 0);
  auto eval = read_jsonl<Question>(d / "eval.jsonl");
  CHECK(read_jsonl<RunRecord>(d / "m.jsonl").size() == eval.size());
  CHECK(server.calls() == eval.size());

  config["endpoints"][0]["api_key"] = "secret";
  write_json_file(d / "bad.json", config);
  CHECK(cli("--config " + (d / "bad.json").string() + " run --endpoint m --eval " +
                (d / "eval.jsonl").string(),
            log) == 1);
  CHECK(slurp(log).find("synqa:") != std::string::npos);
}
