// Trees and helpers shared by unit and acceptance tests.

#ifndef SYNQA_TESTS_FIXTURES_HPP_
#define SYNQA_TESTS_FIXTURES_HPP_

#include <algorithm>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "synqa/extract.hpp"
#include "synqa/pattern.hpp"
#include "synqa/qgen.hpp"
#include "synqa/treebank.hpp"

namespace synqa::testing {

inline constexpr std::string_view kVinkenTree =
    "(S (NP-SBJ (NNP Pierre) (NNP Vinken)) (VP (MD will) (VP (VB join) "
    "(NP (DT the) (NN board)) (PP-CLR (IN as) (NP (DT a) (JJ nonexecutive) "
    "(NN director))) (NP-TMP (NNP Nov.) (CD 29)))) (. .))";

inline constexpr std::string_view kDoubleObjectTree =
    "(S (NP-SBJ (NNP John)) (VP (VBD gave) (NP (PRP me)) (NP (DT a) (NN book))) (. .))";

inline Sentence make_sentence(std::string_view bracketed, std::string id = "t:00000") {
  auto parsed = parse_bracketed(bracketed, "t");
  auto s = strip_empty_elements(parsed.at(0));
  s->id = std::move(id);
  return *s;
}

inline std::vector<SyntacticFact> facts_of(const std::vector<SyntacticFact>& facts,
                                           KnowledgePoint kp) {
  std::vector<SyntacticFact> out;
  std::copy_if(facts.begin(), facts.end(), std::back_inserter(out),
               [&](const SyntacticFact& f) { return f.kp == kp; });
  return out;
}

inline const Question* find_question(const std::vector<Question>& qs,
                                     KnowledgePoint kp, QuestionType qt) {
  for (const auto& q : qs)
    if (q.kp == kp && q.qtype == qt) return &q;
  return nullptr;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(std::string_view tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("synqa-" + std::string(tag) + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace synqa::testing

#endif  // SYNQA_TESTS_FIXTURES_HPP_
