#include "synqa/sampler.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

#include "synqa/rng.hpp"

namespace synqa {

std::string to_string(const StratumKey& key) {
  return std::string(to_string(key.qtype)) + "/" +
         std::string(to_string(key.kp)) + "/" + key.answer_category;
}

std::map<StratumKey, std::vector<Question>> stratify(
    std::span<const Question> questions) {
  std::map<StratumKey, std::vector<Question>> strata;
  for (const auto& q : questions)
    strata[{q.qtype, q.kp, q.meta.answer_category}].push_back(q);
  return strata;
}

SampleResult sample_balanced(std::span<const Question> questions,
                             const SampleConfig& cfg) {
  if (cfg.k_eval == 0) throw std::invalid_argument("k_eval must be >= 1");
  std::unordered_set<std::string> ids;
  for (const auto& q : questions)
    if (!ids.insert(q.id).second)
      throw std::invalid_argument("duplicate question id '" + q.id + "'");

  SampleResult result;
  for (auto& [key, members] : stratify(questions)) {
    Rng rng(cfg.seed, to_string(key));
    const auto order = rng.sample_indices(
        members.size(), std::min(members.size(), cfg.k_eval + cfg.k_exemplar));
    StratumCount count{key, members.size(), 0, 0};
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (i < cfg.k_eval) {
        result.eval.push_back(std::move(members[order[i]]));
        ++count.eval;
      } else {
        result.exemplars.push_back(std::move(members[order[i]]));
        ++count.exemplar;
      }
    }
    result.strata.push_back(std::move(count));
  }
  return result;
}

}  // namespace synqa
