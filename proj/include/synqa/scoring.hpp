// Answer parsing, per-question metrics and seed-averaged scoreboards.

#ifndef SYNQA_SCORING_HPP_
#define SYNQA_SCORING_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "synqa/qgen.hpp"

namespace synqa {

// Penn Treebank word tokenization (the conventions of NLTK's
// TreebankWordTokenizer): splits punctuation, quotes and contractions.
std::vector<std::string> treebank_tokenize(std::string_view text);

// Tokenize, drop punctuation-only tokens, lowercase.
std::vector<std::string> normalize_tokens(std::string_view text);

// Order-sensitive token F1 over the longest common subsequence, in [0, 1].
double fitb_f1(std::span<const std::string> gold,
               std::span<const std::string> pred);
// 1.0 iff the lists are equal, else 0.0.
double fitb_acc(std::span<const std::string> gold,
                std::span<const std::string> pred);

std::size_t lcs_length(std::span<const std::string> a,
                       std::span<const std::string> b);

enum class ParseStatus { Clean, Salvaged, Unparseable };
std::string_view to_string(ParseStatus s);

struct ParsedAnswer {
  QuestionType qtype = QuestionType::TF;
  std::variant<std::monostate, bool, char, std::string> value;
  ParseStatus status = ParseStatus::Unparseable;
};

// `prompt` is the question text; FITB answers that echo it are trimmed.
ParsedAnswer parse_answer(QuestionType qtype, std::string_view raw,
                          std::string_view prompt = {});

struct QuestionScore {
  double acc = 0.0;  // 0 or 1
  double f1 = 0.0;   // FITB only
};
QuestionScore score_question(const Question& q, const ParsedAnswer& a);

// (tf + mc + (fitb_acc + fitb_f1) / 2) / 3. Inputs are percentages; throws
// std::domain_error outside [0, 100].
double overall_accuracy(double tf, double mc, double fitb_acc, double fitb_f1);

// Percentages; a cell is empty when no question of that type was scored.
struct ScoreSet {
  std::optional<double> tf_acc, mc_acc, fitb_acc, fitb_f1, oa;
  std::size_t n_tf = 0, n_mc = 0, n_fitb = 0;
  std::size_t unparseable = 0;
};

struct Scoreboard {
  ScoreSet overall;
  std::array<ScoreSet, 9> breakdown{};  // indexed by KnowledgePoint
  std::vector<std::uint64_t> seeds;

  const ScoreSet& kp(KnowledgePoint k) const {
    return breakdown[static_cast<std::size_t>(k)];
  }
};

struct AnswerRecord {
  std::string question_id;
  std::uint64_t seed = 0;
  ParsedAnswer answer;
};

// Scores each seed separately and averages the cells over seeds. MVP's TF
// cell uses the GS/SC/DO/IO statements tagged for reuse. Throws
// IntegrityError for ids missing from `eval`.
Scoreboard aggregate(std::span<const AnswerRecord> records,
                     std::span<const Question> eval);

}  // namespace synqa

#endif  // SYNQA_SCORING_HPP_
