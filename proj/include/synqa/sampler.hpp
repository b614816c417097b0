// Balanced down-sampling into disjoint eval and exemplar sets.

#ifndef SYNQA_SAMPLER_HPP_
#define SYNQA_SAMPLER_HPP_

#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "synqa/qgen.hpp"

namespace synqa {

struct StratumKey {
  QuestionType qtype = QuestionType::TF;
  KnowledgePoint kp = KnowledgePoint::GS;
  std::string answer_category;

  friend auto operator<=>(const StratumKey&, const StratumKey&) = default;
};

std::string to_string(const StratumKey& key);  // "TF/GS/noun phrase"

struct SampleConfig {
  std::size_t k_eval = 5;
  std::size_t k_exemplar = 2;
  std::uint64_t seed = 0;
};

// Partition by key; input order is kept inside each stratum.
std::map<StratumKey, std::vector<Question>> stratify(
    std::span<const Question> questions);

struct StratumCount {
  StratumKey key;
  std::size_t pool = 0, eval = 0, exemplar = 0;
};

struct SampleResult {
  std::vector<Question> eval;
  std::vector<Question> exemplars;
  std::vector<StratumCount> strata;  // in key order
};

// Per stratum (in key order): shuffle with a stream derived from the seed and
// the stratum key, take the first k_eval for eval and the next k_exemplar
// for exemplars. Throws std::invalid_argument for k_eval == 0 or duplicate
// question ids.
SampleResult sample_balanced(std::span<const Question> questions,
                             const SampleConfig& cfg);

}  // namespace synqa

#endif  // SYNQA_SAMPLER_HPP_
