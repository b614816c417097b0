// Knowledge-point extraction: pattern matches turned into facts.

#ifndef SYNQA_EXTRACT_HPP_
#define SYNQA_EXTRACT_HPP_

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "synqa/pattern.hpp"
#include "synqa/treebank.hpp"

namespace synqa {

enum class KnowledgePoint { GS, SC, DO, IO, MVP, ADJ, ADV, CO, PPA };

inline constexpr std::array<KnowledgePoint, 9> kAllKnowledgePoints = {
    KnowledgePoint::GS,  KnowledgePoint::SC,  KnowledgePoint::DO,
    KnowledgePoint::IO,  KnowledgePoint::MVP, KnowledgePoint::ADJ,
    KnowledgePoint::ADV, KnowledgePoint::CO,  KnowledgePoint::PPA};

std::string_view to_string(KnowledgePoint kp);
// Throws std::invalid_argument for unknown abbreviations.
KnowledgePoint parse_knowledge_point(std::string_view abbr);
// Human-readable role, e.g. "grammatical subject".
std::string_view role_name(KnowledgePoint kp);

enum class Attachment { Noun, Verb };
std::string_view to_string(Attachment a);

struct SyntacticFact {
  std::string sentence_id;
  KnowledgePoint kp = KnowledgePoint::GS;
  Span anchor_span;
  // Display text of the anchor. For verb-chain anchors this is the chain
  // joined by spaces, which may skip words inside anchor_span.
  std::string anchor_text;
  Span answer_span;
  std::string answer_category;
  std::string rule;

  std::vector<Span> chain;                // MVP leaves v0..vn
  std::vector<Span> conjuncts;            // CO
  // CO: the conjunct the question names. MVP: the clause subject, if any.
  std::optional<Span> partner;
  std::optional<Attachment> attachment;   // PPA

  friend bool operator==(const SyntacticFact&, const SyntacticFact&) = default;
};

// Per-knowledge-point counters. `matched` counts pattern bindings, `emitted`
// facts kept, `skipped` bindings that could not be turned into a fact (no
// verb chain, empty anchor, unlike conjuncts, ...).
struct ExtractionStats {
  std::array<std::size_t, 9> matched{};
  std::array<std::size_t, 9> emitted{};
  std::array<std::size_t, 9> skipped{};
  std::size_t sentences = 0;
  std::size_t sentences_without_facts = 0;
  std::size_t empty_sentences = 0;

  ExtractionStats& operator+=(const ExtractionStats& other);
};

// Human-readable category of a constituent ("noun phrase", "that-clause").
std::string answer_category(const TreeNode& node);

// Facts for one sentence (already stripped of empty elements), sorted by
// answer span, anchor span, then knowledge point; no duplicate
// (kp, anchor_span, answer_span).
std::vector<SyntacticFact> extract_facts(const Sentence& sentence,
                                         const PatternRuleSet& rules,
                                         ExtractionStats* stats = nullptr);

// Strips empty elements and extracts every sentence, in parallel when
// `threads` > 1. Output is ordered by sentence id. Sentences that strip to
// nothing are dropped from `kept` and counted in stats.
struct CorpusExtraction {
  std::vector<Sentence> kept;
  std::vector<SyntacticFact> facts;
  ExtractionStats stats;
};
CorpusExtraction extract_corpus(std::span<const Sentence> sentences,
                                const PatternRuleSet& rules,
                                unsigned threads = 1);

}  // namespace synqa

#endif  // SYNQA_EXTRACT_HPP_
