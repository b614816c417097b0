// Template question generation: facts become TF / MC / FITB items.

#ifndef SYNQA_QGEN_HPP_
#define SYNQA_QGEN_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "synqa/extract.hpp"
#include "synqa/treebank.hpp"

namespace synqa {

enum class QuestionType { TF, MC, FITB };

inline constexpr std::array<QuestionType, 3> kAllQuestionTypes = {
    QuestionType::TF, QuestionType::MC, QuestionType::FITB};

std::string_view to_string(QuestionType q);
// Throws std::invalid_argument.
QuestionType parse_question_type(std::string_view s);

inline constexpr std::string_view kBlank = "____________";

struct QuestionMeta {
  std::string answer_category;
  std::string fact_ref;
  std::string template_id;
  Span answer_span;
  // MC: spans of options A-D in order. TF: the asserted span (one entry).
  std::vector<Span> option_spans;
  // Spans drawn as distractors, in draw order.
  std::vector<Span> distractors;
  std::string pair_id;                      // TF only
  // Set on GS/SC/DO/IO TF items, which also count toward this point.
  std::optional<KnowledgePoint> reuse_kp;
  // Sentence yield and its constituent spans, so answers can be checked
  // and random baselines drawn without the treebank.
  std::vector<std::string> tokens;
  std::vector<Span> constituents;
};

using Gold = std::variant<bool, char, std::string>;

struct Question {
  std::string id;
  std::string sentence_id;
  std::string sentence_text;
  KnowledgePoint kp = KnowledgePoint::GS;
  QuestionType qtype = QuestionType::TF;
  std::string prompt;
  std::vector<std::string> options;         // MC only, A-D
  Gold gold;
  QuestionMeta meta;
};

// Gold rendered as it would appear after "Answer:" ("True", "B", phrase).
std::string gold_text(const Question& q);

char option_letter(std::size_t index);

// One template per (kp, qtype). MVP has no TF template; its TF cell is
// taken from the GS/SC/DO/IO statements.
class TemplateSet {
 public:
  // Throws ConfigError with the offending line.
  static TemplateSet parse(std::string_view source);
  static TemplateSet load(const std::filesystem::path& path);
  static const TemplateSet& defaults();

  const std::string* find(KnowledgePoint kp, QuestionType q) const;
  // Throws ConfigError naming the missing pair.
  const std::string& at(KnowledgePoint kp, QuestionType q) const;
  // Throws ConfigError for the first uncovered pair.
  void require_complete() const;

  static std::string id(KnowledgePoint kp, QuestionType q);

 private:
  std::map<std::pair<KnowledgePoint, QuestionType>, std::string> templates_;
};

std::string_view default_template_source();

struct TemplateValues {
  std::string sentence;
  std::string anchor;
  std::string answer;
  std::string role;
  std::string partner;
};

// Substitutes placeholders; {BLANK} becomes kBlank. Throws ConfigError when
// the template needs {PARTNER} and none is given.
std::string render_template(std::string_view tmpl, const TemplateValues& v);

// "<sentence_id>/<KP>/<anchor>/<answer>", unique per fact.
std::string fact_key(const SyntacticFact& fact);

// Spans of every non-punctuation constituent (phrases and words), each span
// once, in pre-order.
std::vector<Span> constituent_spans(const Sentence& sentence);

struct DistractorPick {
  std::vector<Span> spans;
  bool shortfall = false;
};

// Up to n constituent spans of the sentence other than the answer: never
// textually equal to it (case-insensitive), nested in it, containing it, or
// listed in `exclude`; pairwise distinct in text. Same-category candidates
// come first. Throws std::invalid_argument when n == 0.
DistractorPick select_distractors(const SyntacticFact& fact,
                                  const Sentence& sentence, std::size_t n,
                                  std::uint64_t seed,
                                  std::span<const Span> exclude = {});

// The false TF twin of a fact: asserts that `distractor` fills the role.
Question make_false_statement(const SyntacticFact& fact,
                              const Sentence& sentence, const Span& distractor,
                              const TemplateSet& templates);
Question make_true_statement(const SyntacticFact& fact,
                             const Sentence& sentence,
                             const TemplateSet& templates);

struct GenerationStats {
  std::size_t facts = 0;
  std::array<std::size_t, 3> emitted{};     // indexed by QuestionType
  std::size_t mc_skipped = 0;               // fewer than 3 distractors
  std::size_t tf_skipped = 0;               // no distractor for the false twin
  std::size_t no_partner = 0;               // template needs {PARTNER}
};

// Per fact, in fact order: FITB, MC, TF true, TF false. Throws ConfigError
// for template gaps and std::invalid_argument for facts whose sentence is
// missing.
std::vector<Question> generate_questions(std::span<const SyntacticFact> facts,
                                         std::span<const Sentence> sentences,
                                         const TemplateSet& templates,
                                         std::uint64_t seed,
                                         GenerationStats* stats = nullptr);

// Per-(kp, qtype) counts and each point's share of all items. MVP's TF
// column counts the reused GS/SC/DO/IO statements, so the grand total
// counts those items twice.
struct DistributionReport {
  struct Row {
    std::size_t tf = 0, mc = 0, fitb = 0;
    std::size_t count = 0;  // tf + mc + fitb, or facts for the fact variant
    double ratio = 0.0;     // percent of the grand total
  };
  std::array<Row, 9> rows{};
  std::size_t total = 0;

  const Row& row(KnowledgePoint kp) const {
    return rows[static_cast<std::size_t>(kp)];
  }
};

DistributionReport dataset_stats(std::span<const Question> questions);
// Fact-level variant: only `count` is filled.
DistributionReport dataset_stats(std::span<const SyntacticFact> facts);

}  // namespace synqa

#endif  // SYNQA_QGEN_HPP_
