// JSON / JSON Lines encodings of every artifact the toolchain writes.

#ifndef SYNQA_SERIALIZE_HPP_
#define SYNQA_SERIALIZE_HPP_

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "synqa/error.hpp"
#include "synqa/extract.hpp"
#include "synqa/qgen.hpp"
#include "synqa/sampler.hpp"
#include "synqa/scoring.hpp"
#include "synqa/treebank.hpp"

namespace synqa {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// One model response, or the error that replaced it.
struct RunRecord {
  std::string question_id;
  std::uint64_t seed = 0;
  std::string endpoint;
  std::string model;
  std::string prompt;
  std::string raw_response;
  double latency_ms = 0.0;
  std::string timestamp;       // UTC, ISO 8601
  int attempts = 0;
  std::optional<std::string> error;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

void to_json(json& j, const Span& s);
void from_json(const json& j, Span& s);
void to_json(json& j, const SyntacticFact& f);
void from_json(const json& j, SyntacticFact& f);
void to_json(json& j, const Sentence& s);
void from_json(const json& j, Sentence& s);
void to_json(json& j, const Question& q);
void from_json(const json& j, Question& q);
void to_json(json& j, const RunRecord& r);
void from_json(const json& j, RunRecord& r);
void to_json(json& j, const ScoreSet& s);
void from_json(const json& j, ScoreSet& s);
void to_json(json& j, const Scoreboard& b);
void from_json(const json& j, Scoreboard& b);

json sample_manifest(const SampleConfig& cfg, const SampleResult& result);
json extraction_summary(const ExtractionStats& stats);
json distribution_json(const DistributionReport& report);

template <typename T>
void write_jsonl(const std::filesystem::path& path, const std::vector<T>& items) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  for (const auto& item : items) out << json(item).dump() << '\n';
}

template <typename T>
std::vector<T> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::vector<T> items;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      items.push_back(json::parse(line).get<T>());
    } catch (const json::exception& e) {
      throw IntegrityError(path.string() + ":" + std::to_string(lineno) +
                           ": " + e.what());
    }
  }
  return items;
}

json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& j);

}  // namespace synqa

#endif  // SYNQA_SERIALIZE_HPP_
