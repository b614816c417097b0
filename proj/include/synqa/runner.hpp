// Model endpoints, prompt construction and the evaluation loop.

#ifndef SYNQA_RUNNER_HPP_
#define SYNQA_RUNNER_HPP_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "synqa/qgen.hpp"
#include "synqa/report.hpp"
#include "synqa/scoring.hpp"
#include "synqa/serialize.hpp"

namespace synqa {

enum class ApiStyle { Chat, Completion };

struct Backoff {
  double initial_s = 1.0;
  double multiplier = 2.0;
  double max_s = 30.0;
};

struct ModelEndpoint {
  std::string label;          // column / record identity; defaults to model
  std::string base_url;       // e.g. https://api.example.com/v1
  std::string model_name;
  std::string api_key_env;    // empty: no Authorization header
  ApiStyle style = ApiStyle::Chat;
  double request_timeout_s = 60.0;
  int max_retries = 3;
  Backoff backoff;
  double requests_per_second = 0.0;  // 0: unlimited

  // Throws ConfigError.
  void validate() const;
  // Reads the credential from the environment. Throws ConfigError when
  // api_key_env names a variable that is unset.
  std::optional<std::string> resolve_api_key() const;
};

// Rejects "api_key" and friends: credentials only come from the environment.
ModelEndpoint endpoint_from_json(const json& j);

enum class Setting { ZeroShot, FewShot };
std::string_view to_string(Setting s);
Setting parse_setting(std::string_view s);

struct RunConfig {
  Setting setting = Setting::ZeroShot;
  std::size_t n_exemplars = 5;
  std::vector<std::uint64_t> seeds = {0, 1, 2};
  double temperature = 0.0;
  int max_tokens_fitb = 256;
  int max_tokens_choice = 10;  // TF and MC
  std::size_t concurrency_limit = 4;
  // When set, records are appended to "<output>.partial" as they finish and
  // the sorted set is written to `output` at the end.
  std::filesystem::path output;

  void validate() const;
};

RunConfig run_config_from_json(const json& j, RunConfig base = {});

struct HttpResponse {
  int status = 0;  // 0: transport failure, see error
  std::string body;
  std::string error;
};

class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse post(
      const std::string& url, const std::string& body,
      const std::vector<std::pair<std::string, std::string>>& headers,
      double timeout_s) = 0;
};

// cpp-httplib client; https needs the OpenSSL build.
std::unique_ptr<Transport> make_http_transport();

// Request URL and JSON body for one prompt, and the completion text of a
// response body (throws std::runtime_error on an unexpected shape).
std::string request_url(const ModelEndpoint& ep);
std::string request_body(const ModelEndpoint& ep, const std::string& prompt,
                         int max_tokens, double temperature);
std::string completion_text(ApiStyle style, const std::string& body);

// Up to n exemplars of the question's kp and qtype, never the question
// itself, in draw order. Adds to *shortfall when fewer than n exist.
std::vector<Question> select_exemplars(std::span<const Question> pool,
                                       const Question& question, std::size_t n,
                                       std::uint64_t seed,
                                       std::size_t* shortfall = nullptr);

std::string instruction_header(QuestionType qtype);

// Question block: Sentence / Question / Options / Answer, with the answer
// filled in for exemplars (`with_answer`).
std::string render_block(const Question& q, bool with_answer);

// Header, exemplar blocks, then the target block ending in "Answer:".
// Throws std::invalid_argument for zero-shot with exemplars.
std::string build_prompt(const Question& question,
                         std::span<const Question> exemplars, Setting setting);

struct RunDiagnostics {
  std::size_t requests = 0;       // HTTP attempts, retries included
  std::size_t retries = 0;
  std::size_t failed_records = 0; // gave up, error marker set
  std::size_t exemplar_shortfalls = 0;
};

struct RunResult {
  std::vector<RunRecord> records;  // sorted by (seed, question_id)
  RunDiagnostics diagnostics;
};

// One record per (question, seed). Throws ConfigError before sending
// anything if the configuration or credential is unusable.
RunResult run_eval(const ModelEndpoint& endpoint, const RunConfig& cfg,
                   std::span<const Question> eval,
                   std::span<const Question> exemplars,
                   Transport* transport = nullptr);

// TF by fair coin, MC uniform over A-D, FITB a uniformly drawn constituent
// of the question's sentence.
std::vector<RunRecord> random_baseline(std::span<const Question> eval,
                                       std::uint64_t seed);

// Parses every record against its question and aggregates. Records with an
// error marker count as unparseable.
Scoreboard score_run(std::span<const RunRecord> records,
                     std::span<const Question> eval);

struct SeriesResult {
  std::vector<LabeledScoreboard> columns;       // endpoint order
  std::vector<std::optional<std::string>> errors;
  std::vector<RunDiagnostics> diagnostics;
};

// run_eval + score_run per endpoint. A failing endpoint leaves an empty
// column and an error message; the others still run. When `runs_dir` is set
// each endpoint's records go to runs_dir/<label>.jsonl.
SeriesResult checkpoint_series(std::span<const ModelEndpoint> endpoints,
                               const RunConfig& cfg,
                               std::span<const Question> eval,
                               std::span<const Question> exemplars,
                               const std::filesystem::path& runs_dir = {},
                               Transport* transport = nullptr);

}  // namespace synqa

#endif  // SYNQA_RUNNER_HPP_
