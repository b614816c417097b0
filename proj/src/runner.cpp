#include "synqa/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>
#include <unordered_map>

#include "synqa/rng.hpp"

namespace synqa {

// ---------------------------------------------------------------------------
// Configuration

void ModelEndpoint::validate() const {
  if (base_url.find("://") == std::string::npos)
    throw ConfigError("endpoint '" + label + "': base_url must be absolute");
  if (model_name.empty())
    throw ConfigError("endpoint '" + label + "': model_name is required");
  if (max_retries < 0)
    throw ConfigError("endpoint '" + label + "': max_retries must be >= 0");
  if (request_timeout_s <= 0)
    throw ConfigError("endpoint '" + label + "': request_timeout must be > 0");
  if (backoff.initial_s < 0 || backoff.multiplier < 1 || backoff.max_s < 0)
    throw ConfigError("endpoint '" + label + "': bad backoff settings");
  if (requests_per_second < 0)
    throw ConfigError("endpoint '" + label + "': requests_per_second < 0");
}

std::optional<std::string> ModelEndpoint::resolve_api_key() const {
  if (api_key_env.empty()) return std::nullopt;
  const char* v = std::getenv(api_key_env.c_str());
  if (!v || !*v)
    throw ConfigError("endpoint '" + label + "': environment variable " +
                      api_key_env + " is not set");
  return std::string(v);
}

ModelEndpoint endpoint_from_json(const json& j) {
  for (const char* forbidden : {"api_key", "key", "token", "authorization"})
    if (j.contains(forbidden))
      throw ConfigError(std::string("endpoint config must not contain '") +
                        forbidden + "'; name an environment variable in "
                        "api_key_env instead");
  ModelEndpoint ep;
  ep.base_url = j.at("base_url").get<std::string>();
  ep.model_name = j.at("model").get<std::string>();
  ep.label = j.value("label", ep.model_name);
  ep.api_key_env = j.value("api_key_env", std::string());
  auto style = j.value("style", std::string("chat"));
  if (style == "chat") ep.style = ApiStyle::Chat;
  else if (style == "completion") ep.style = ApiStyle::Completion;
  else throw ConfigError("unknown endpoint style '" + style + "'");
  ep.request_timeout_s = j.value("request_timeout", ep.request_timeout_s);
  ep.max_retries = j.value("max_retries", ep.max_retries);
  if (j.contains("backoff")) {
    const auto& b = j.at("backoff");
    ep.backoff.initial_s = b.value("initial", ep.backoff.initial_s);
    ep.backoff.multiplier = b.value("multiplier", ep.backoff.multiplier);
    ep.backoff.max_s = b.value("max", ep.backoff.max_s);
  }
  ep.requests_per_second = j.value("requests_per_second", 0.0);
  ep.validate();
  return ep;
}

std::string_view to_string(Setting s) {
  return s == Setting::ZeroShot ? "zero_shot" : "few_shot";
}

Setting parse_setting(std::string_view s) {
  if (s == "zero_shot") return Setting::ZeroShot;
  if (s == "few_shot") return Setting::FewShot;
  throw ConfigError("unknown setting '" + std::string(s) +
                    "' (zero_shot or few_shot)");
}

void RunConfig::validate() const {
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size())
    throw ConfigError("seeds must be distinct");
  if (temperature != 0.0)
    throw ConfigError("temperature must be 0 for reproducible runs");
  if (concurrency_limit == 0) throw ConfigError("concurrency_limit must be >= 1");
  if (max_tokens_fitb <= 0 || max_tokens_choice <= 0)
    throw ConfigError("max token limits must be positive");
  if (setting == Setting::FewShot && n_exemplars == 0)
    throw ConfigError("few_shot needs n_exemplars >= 1");
}

RunConfig run_config_from_json(const json& j, RunConfig cfg) {
  if (j.contains("setting")) cfg.setting = parse_setting(j.at("setting").get<std::string>());
  cfg.n_exemplars = j.value("n_exemplars", cfg.n_exemplars);
  if (j.contains("seeds")) cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  cfg.temperature = j.value("temperature", cfg.temperature);
  cfg.max_tokens_fitb = j.value("max_tokens_fitb", cfg.max_tokens_fitb);
  cfg.max_tokens_choice = j.value("max_tokens_choice", cfg.max_tokens_choice);
  cfg.concurrency_limit = j.value("concurrency_limit", cfg.concurrency_limit);
  return cfg;
}

// ---------------------------------------------------------------------------
// Wire format

std::string request_url(const ModelEndpoint& ep) {
  std::string base = ep.base_url;
  while (!base.empty() && base.back() == '/') base.pop_back();
  return base + (ep.style == ApiStyle::Chat ? "/chat/completions" : "/completions");
}

std::string request_body(const ModelEndpoint& ep, const std::string& prompt,
                         int max_tokens, double temperature) {
  json body{{"model", ep.model_name},
            {"temperature", temperature},
            {"max_tokens", max_tokens}};
  if (ep.style == ApiStyle::Chat)
    body["messages"] = json::array({{{"role", "user"}, {"content", prompt}}});
  else
    body["prompt"] = prompt;
  return body.dump();
}

std::string completion_text(ApiStyle style, const std::string& body) {
  json j;
  try {
    j = json::parse(body);
    const auto& choice = j.at("choices").at(0);
    if (style == ApiStyle::Chat)
      return choice.at("message").at("content").get<std::string>();
    return choice.at("text").get<std::string>();
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("unexpected response body: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Prompts

std::vector<Question> select_exemplars(std::span<const Question> pool,
                                       const Question& question, std::size_t n,
                                       std::uint64_t seed,
                                       std::size_t* shortfall) {
  std::vector<const Question*> matching;
  for (const auto& e : pool)
    if (e.kp == question.kp && e.qtype == question.qtype && e.id != question.id)
      matching.push_back(&e);
  if (n == 0) return {};
  Rng rng(seed, question.id + "/exemplars");
  std::vector<Question> out;
  for (auto i : rng.sample_indices(matching.size(), n)) out.push_back(*matching[i]);
  if (shortfall && out.size() < n) ++*shortfall;
  return out;
}

std::string instruction_header(QuestionType qtype) {
  switch (qtype) {
    case QuestionType::TF:
      return "Each question below is a statement about the syntax of the "
             "sentence given above it. Answer True if the statement is "
             "correct and False if it is not.";
    case QuestionType::MC:
      return "Each question below asks about the syntax of the sentence given "
             "above it. Answer with the letter (A, B, C or D) of the correct "
             "option.";
    case QuestionType::FITB:
      return "Each question below asks about the syntax of the sentence given "
             "above it. Fill in the blank with words copied from the sentence "
             "and answer with those words only.";
  }
  return {};
}

std::string render_block(const Question& q, bool with_answer) {
  std::string out = "Sentence: " + q.sentence_text + "\n";
  out += "Question: " + q.prompt + "\n";
  if (q.qtype == QuestionType::MC) {
    out += "Options:\n";
    for (std::size_t i = 0; i < q.options.size(); ++i)
      out += std::string(1, option_letter(i)) + ". " + q.options[i] + "\n";
  }
  out += "Answer:";
  if (with_answer) out += " " + gold_text(q);
  return out;
}

std::string build_prompt(const Question& question,
                         std::span<const Question> exemplars, Setting setting) {
  if (setting == Setting::ZeroShot && !exemplars.empty())
    throw std::invalid_argument("zero-shot prompts take no exemplars");
  std::string out = instruction_header(question.qtype) + "\n\n";
  for (const auto& e : exemplars) out += render_block(e, true) + "\n\n";
  out += render_block(question, false);
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation loop

namespace {

std::string utc_timestamp() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

class TokenBucket {
 public:
  explicit TokenBucket(double rate)
      : rate_(rate), capacity_(std::max(1.0, rate)), tokens_(capacity_),
        last_(Clock::now()) {}

  void acquire() {
    if (rate_ <= 0) return;
    for (;;) {
      std::chrono::duration<double> wait{};
      {
        std::lock_guard lock(mu_);
        auto now = Clock::now();
        tokens_ = std::min(capacity_,
                           tokens_ + rate_ * std::chrono::duration<double>(
                                                 now - last_).count());
        last_ = now;
        if (tokens_ >= 1.0) {
          tokens_ -= 1.0;
          return;
        }
        wait = std::chrono::duration<double>((1.0 - tokens_) / rate_);
      }
      std::this_thread::sleep_for(wait);
    }
  }

 private:
  using Clock = std::chrono::steady_clock;
  double rate_, capacity_, tokens_;
  Clock::time_point last_;
  std::mutex mu_;
};

bool record_less(const RunRecord& a, const RunRecord& b) {
  return std::tie(a.seed, a.question_id) < std::tie(b.seed, b.question_id);
}

bool retryable(const HttpResponse& r) {
  return r.status == 0 || r.status == 429 || r.status >= 500;
}

}  // namespace

RunResult run_eval(const ModelEndpoint& endpoint, const RunConfig& cfg,
                   std::span<const Question> eval,
                   std::span<const Question> exemplars, Transport* transport) {
  endpoint.validate();
  cfg.validate();
  if (cfg.setting == Setting::FewShot && exemplars.empty())
    throw ConfigError("few_shot needs a non-empty exemplar set");
  const auto api_key = endpoint.resolve_api_key();
  std::unique_ptr<Transport> owned;
  if (!transport) {
    owned = make_http_transport();
    transport = owned.get();
  }
  const std::string label =
      endpoint.label.empty() ? endpoint.model_name : endpoint.label;

  std::vector<std::pair<const Question*, std::uint64_t>> jobs;
  for (auto seed : cfg.seeds)
    for (const auto& q : eval) jobs.emplace_back(&q, seed);

  std::ofstream partial;
  std::filesystem::path partial_path;
  if (!cfg.output.empty()) {
    if (cfg.output.has_parent_path())
      std::filesystem::create_directories(cfg.output.parent_path());
    partial_path = cfg.output;
    partial_path += ".partial";
    partial.open(partial_path, std::ios::binary | std::ios::trunc);
    if (!partial) throw ConfigError("cannot write " + partial_path.string());
  }

  std::vector<std::pair<std::string, std::string>> headers;
  if (api_key) headers.emplace_back("Authorization", "Bearer " + *api_key);
  const std::string url = request_url(endpoint);

  TokenBucket bucket(endpoint.requests_per_second);
  std::mutex sink_mu;
  RunResult result;
  result.records.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> requests{0}, retries{0}, failed{0}, shortfalls{0};

  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < jobs.size();) {
      const auto& [q, seed] = jobs[i];
      RunRecord rec;
      rec.question_id = q->id;
      rec.seed = seed;
      rec.endpoint = label;
      rec.model = endpoint.model_name;

      std::vector<Question> shots;
      if (cfg.setting == Setting::FewShot) {
        std::size_t short_count = 0;
        shots = select_exemplars(exemplars, *q, cfg.n_exemplars, seed, &short_count);
        shortfalls += short_count;
      }
      rec.prompt = build_prompt(*q, shots, cfg.setting);
      const int max_tokens = q->qtype == QuestionType::FITB
                                 ? cfg.max_tokens_fitb
                                 : cfg.max_tokens_choice;
      const std::string body =
          request_body(endpoint, rec.prompt, max_tokens, cfg.temperature);

      double delay = endpoint.backoff.initial_s;
      const auto start = std::chrono::steady_clock::now();
      for (;;) {
        bucket.acquire();
        ++rec.attempts;
        ++requests;
        HttpResponse res =
            transport->post(url, body, headers, endpoint.request_timeout_s);
        if (res.status >= 200 && res.status < 300) {
          try {
            rec.raw_response = completion_text(endpoint.style, res.body);
            rec.error.reset();
          } catch (const std::exception& e) {
            rec.error = e.what();
          }
          break;
        }
        rec.error = res.status == 0 ? "transport: " + res.error
                                    : "HTTP " + std::to_string(res.status);
        if (!retryable(res) || rec.attempts > endpoint.max_retries) break;
        ++retries;
        std::this_thread::sleep_for(std::chrono::duration<double>(delay));
        delay = std::min(delay * endpoint.backoff.multiplier, endpoint.backoff.max_s);
      }
      rec.latency_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - start)
                           .count();
      rec.timestamp = utc_timestamp();
      if (rec.error) ++failed;

      std::lock_guard lock(sink_mu);
      if (partial.is_open()) partial << json(rec).dump() << '\n' << std::flush;
      result.records[i] = std::move(rec);
    }
  };

  {
    std::vector<std::jthread> pool;
    const auto n = std::min(cfg.concurrency_limit, std::max<std::size_t>(jobs.size(), 1));
    for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
  }

  std::sort(result.records.begin(), result.records.end(), record_less);
  result.diagnostics = {requests, retries, failed, shortfalls};
  if (!cfg.output.empty()) {
    partial.close();
    write_jsonl(cfg.output, result.records);
    std::filesystem::remove(partial_path);
  }
  return result;
}

std::vector<RunRecord> random_baseline(std::span<const Question> eval,
                                       std::uint64_t seed) {
  std::vector<RunRecord> out;
  out.reserve(eval.size());
  for (const auto& q : eval) {
    Rng rng(seed, q.id + "/random");
    RunRecord rec;
    rec.question_id = q.id;
    rec.seed = seed;
    rec.endpoint = "random";
    rec.model = "random";
    switch (q.qtype) {
      case QuestionType::TF: rec.raw_response = rng.coin() ? "True" : "False"; break;
      case QuestionType::MC:
        rec.raw_response = std::string(1, option_letter(rng.below(4)));
        break;
      case QuestionType::FITB:
        if (!q.meta.constituents.empty())
          rec.raw_response = phrase_text(
              q.meta.tokens, q.meta.constituents[rng.below(q.meta.constituents.size())]);
        break;
    }
    out.push_back(std::move(rec));
  }
  std::sort(out.begin(), out.end(), record_less);
  return out;
}

Scoreboard score_run(std::span<const RunRecord> records,
                     std::span<const Question> eval) {
  std::unordered_map<std::string_view, const Question*> by_id;
  for (const auto& q : eval) by_id.emplace(q.id, &q);
  std::vector<AnswerRecord> answers;
  answers.reserve(records.size());
  for (const auto& r : records) {
    auto it = by_id.find(r.question_id);
    if (it == by_id.end())
      throw IntegrityError("run record refers to unknown question '" +
                           r.question_id + "'");
    AnswerRecord a{r.question_id, r.seed, {}};
    a.answer.qtype = it->second->qtype;
    if (!r.error)
      a.answer = parse_answer(it->second->qtype, r.raw_response, it->second->prompt);
    answers.push_back(std::move(a));
  }
  return aggregate(answers, eval);
}

SeriesResult checkpoint_series(std::span<const ModelEndpoint> endpoints,
                               const RunConfig& cfg,
                               std::span<const Question> eval,
                               std::span<const Question> exemplars,
                               const std::filesystem::path& runs_dir,
                               Transport* transport) {
  if (endpoints.empty()) throw ConfigError("series needs at least one endpoint");
  SeriesResult out;
  for (const auto& ep : endpoints) {
    const std::string label = ep.label.empty() ? ep.model_name : ep.label;
    RunConfig c = cfg;
    if (!runs_dir.empty()) c.output = runs_dir / (label + ".jsonl");
    try {
      auto run = run_eval(ep, c, eval, exemplars, transport);
      out.columns.push_back({label, score_run(run.records, eval)});
      out.errors.emplace_back();
      out.diagnostics.push_back(run.diagnostics);
    } catch (const std::exception& e) {
      out.columns.push_back({label, Scoreboard{}});
      out.errors.emplace_back(e.what());
      out.diagnostics.emplace_back();
    }
  }
  return out;
}

}  // namespace synqa
