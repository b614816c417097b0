#include "synqa/serialize.hpp"

#include "synqa/rng.hpp"

namespace synqa {

namespace {

void check_version(const json& j) {
  if (j.contains("v") && j.at("v").get<int>() != kSchemaVersion)
    throw IntegrityError("unsupported schema version " + j.at("v").dump());
}

template <typename T>
void put_optional(json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

json cell(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> cell_from(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

}  // namespace

void to_json(json& j, const Span& s) { j = json::array({s.begin, s.end}); }

void from_json(const json& j, Span& s) {
  s.begin = j.at(0).get<std::size_t>();
  s.end = j.at(1).get<std::size_t>();
  if (s.end < s.begin) throw IntegrityError("span end before begin");
}

void to_json(json& j, const SyntacticFact& f) {
  j = json{{"v", kSchemaVersion},
           {"sentence_id", f.sentence_id},
           {"kp", to_string(f.kp)},
           {"anchor", f.anchor_span},
           {"anchor_text", f.anchor_text},
           {"answer", f.answer_span},
           {"answer_category", f.answer_category},
           {"rule", f.rule}};
  if (!f.chain.empty()) j["chain"] = f.chain;
  if (!f.conjuncts.empty()) j["conjuncts"] = f.conjuncts;
  put_optional(j, "partner", f.partner);
  if (f.attachment) j["attachment"] = to_string(*f.attachment);
}

void from_json(const json& j, SyntacticFact& f) {
  check_version(j);
  f = SyntacticFact{};
  f.sentence_id = j.at("sentence_id").get<std::string>();
  f.kp = parse_knowledge_point(j.at("kp").get<std::string>());
  f.anchor_span = j.at("anchor").get<Span>();
  f.anchor_text = j.at("anchor_text").get<std::string>();
  f.answer_span = j.at("answer").get<Span>();
  f.answer_category = j.at("answer_category").get<std::string>();
  f.rule = j.value("rule", std::string());
  if (j.contains("chain")) f.chain = j.at("chain").get<std::vector<Span>>();
  if (j.contains("conjuncts"))
    f.conjuncts = j.at("conjuncts").get<std::vector<Span>>();
  if (j.contains("partner")) f.partner = j.at("partner").get<Span>();
  if (j.contains("attachment")) {
    auto a = j.at("attachment").get<std::string>();
    if (a == "noun") f.attachment = Attachment::Noun;
    else if (a == "verb") f.attachment = Attachment::Verb;
    else throw IntegrityError("unknown attachment '" + a + "'");
  }
}

void to_json(json& j, const Sentence& s) {
  j = json{{"v", kSchemaVersion}, {"id", s.id}, {"tree", s.root.bracketed()}};
}

void from_json(const json& j, Sentence& s) {
  check_version(j);
  s.id = j.at("id").get<std::string>();
  s.root = parse_tree(j.at("tree").get<std::string>());
  s.tokens = s.root.yield();
}

void to_json(json& j, const Question& q) {
  json meta{{"answer_category", q.meta.answer_category},
            {"fact_ref", q.meta.fact_ref},
            {"template_id", q.meta.template_id},
            {"answer_span", q.meta.answer_span},
            {"option_spans", q.meta.option_spans},
            {"distractors", q.meta.distractors},
            {"tokens", q.meta.tokens},
            {"constituents", q.meta.constituents}};
  if (!q.meta.pair_id.empty()) meta["pair_id"] = q.meta.pair_id;
  if (q.meta.reuse_kp) meta["reuse_kp"] = to_string(*q.meta.reuse_kp);

  j = json{{"v", kSchemaVersion},
           {"id", q.id},
           {"kp", to_string(q.kp)},
           {"qtype", to_string(q.qtype)},
           {"sentence_id", q.sentence_id},
           {"sentence", q.sentence_text},
           {"prompt", q.prompt}};
  if (q.qtype == QuestionType::MC) j["options"] = q.options;
  if (auto* b = std::get_if<bool>(&q.gold)) j["gold"] = *b;
  else if (auto* c = std::get_if<char>(&q.gold)) j["gold"] = std::string(1, *c);
  else j["gold"] = std::get<std::string>(q.gold);
  j["meta"] = std::move(meta);
}

void from_json(const json& j, Question& q) {
  check_version(j);
  q = Question{};
  q.id = j.at("id").get<std::string>();
  q.kp = parse_knowledge_point(j.at("kp").get<std::string>());
  q.qtype = parse_question_type(j.at("qtype").get<std::string>());
  q.sentence_id = j.value("sentence_id", std::string());
  q.sentence_text = j.at("sentence").get<std::string>();
  q.prompt = j.at("prompt").get<std::string>();
  if (j.contains("options")) q.options = j.at("options").get<std::vector<std::string>>();
  const auto& gold = j.at("gold");
  switch (q.qtype) {
    case QuestionType::TF: q.gold = gold.get<bool>(); break;
    case QuestionType::MC: {
      auto s = gold.get<std::string>();
      if (s.size() != 1 || s[0] < 'A' || s[0] > 'D')
        throw IntegrityError("bad MC gold '" + s + "' in " + q.id);
      q.gold = s[0];
      break;
    }
    case QuestionType::FITB: q.gold = gold.get<std::string>(); break;
  }
  if (q.qtype == QuestionType::MC && q.options.size() != 4)
    throw IntegrityError("MC question " + q.id + " needs 4 options");

  const auto& m = j.at("meta");
  q.meta.answer_category = m.at("answer_category").get<std::string>();
  q.meta.fact_ref = m.value("fact_ref", std::string());
  q.meta.template_id = m.value("template_id", std::string());
  q.meta.answer_span = m.at("answer_span").get<Span>();
  q.meta.option_spans = m.value("option_spans", std::vector<Span>{});
  q.meta.distractors = m.value("distractors", std::vector<Span>{});
  q.meta.pair_id = m.value("pair_id", std::string());
  if (m.contains("reuse_kp"))
    q.meta.reuse_kp = parse_knowledge_point(m.at("reuse_kp").get<std::string>());
  q.meta.tokens = m.value("tokens", std::vector<std::string>{});
  q.meta.constituents = m.value("constituents", std::vector<Span>{});
}

void to_json(json& j, const RunRecord& r) {
  j = json{{"v", kSchemaVersion},      {"question_id", r.question_id},
           {"seed", r.seed},           {"endpoint", r.endpoint},
           {"model", r.model},         {"prompt", r.prompt},
           {"raw_response", r.raw_response},
           {"latency_ms", r.latency_ms},
           {"timestamp", r.timestamp}, {"attempts", r.attempts}};
  put_optional(j, "error", r.error);
}

void from_json(const json& j, RunRecord& r) {
  check_version(j);
  r = RunRecord{};
  r.question_id = j.at("question_id").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.endpoint = j.at("endpoint").get<std::string>();
  r.model = j.value("model", std::string());
  r.prompt = j.value("prompt", std::string());
  r.raw_response = j.at("raw_response").get<std::string>();
  r.latency_ms = j.value("latency_ms", 0.0);
  r.timestamp = j.value("timestamp", std::string());
  r.attempts = j.value("attempts", 0);
  if (j.contains("error")) r.error = j.at("error").get<std::string>();
}

void to_json(json& j, const ScoreSet& s) {
  j = json{{"tf_acc", cell(s.tf_acc)},     {"mc_acc", cell(s.mc_acc)},
           {"fitb_acc", cell(s.fitb_acc)}, {"fitb_f1", cell(s.fitb_f1)},
           {"oa", cell(s.oa)},             {"n_tf", s.n_tf},
           {"n_mc", s.n_mc},               {"n_fitb", s.n_fitb},
           {"unparseable", s.unparseable}};
}

void from_json(const json& j, ScoreSet& s) {
  s.tf_acc = cell_from(j, "tf_acc");
  s.mc_acc = cell_from(j, "mc_acc");
  s.fitb_acc = cell_from(j, "fitb_acc");
  s.fitb_f1 = cell_from(j, "fitb_f1");
  s.oa = cell_from(j, "oa");
  s.n_tf = j.value("n_tf", std::size_t{0});
  s.n_mc = j.value("n_mc", std::size_t{0});
  s.n_fitb = j.value("n_fitb", std::size_t{0});
  s.unparseable = j.value("unparseable", std::size_t{0});
}

void to_json(json& j, const Scoreboard& b) {
  json breakdown = json::object();
  for (auto kp : kAllKnowledgePoints)
    breakdown[std::string(to_string(kp))] = b.kp(kp);
  j = json{{"v", kSchemaVersion},
           {"seeds", b.seeds},
           {"overall", b.overall},
           {"breakdown", std::move(breakdown)}};
}

void from_json(const json& j, Scoreboard& b) {
  check_version(j);
  b = Scoreboard{};
  b.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  b.overall = j.at("overall").get<ScoreSet>();
  for (auto kp : kAllKnowledgePoints) {
    auto key = std::string(to_string(kp));
    if (j.at("breakdown").contains(key))
      b.breakdown[static_cast<std::size_t>(kp)] =
          j.at("breakdown").at(key).get<ScoreSet>();
  }
}

json sample_manifest(const SampleConfig& cfg, const SampleResult& result) {
  json strata = json::array();
  for (const auto& s : result.strata)
    strata.push_back({{"qtype", to_string(s.key.qtype)},
                      {"kp", to_string(s.key.kp)},
                      {"answer_category", s.key.answer_category},
                      {"pool", s.pool},
                      {"eval", s.eval},
                      {"exemplar", s.exemplar}});
  return json{{"v", kSchemaVersion},
              {"rng", kRngAlgorithm},
              {"seed", cfg.seed},
              {"k_eval", cfg.k_eval},
              {"k_exemplar", cfg.k_exemplar},
              {"eval_count", result.eval.size()},
              {"exemplar_count", result.exemplars.size()},
              {"strata", std::move(strata)}};
}

json extraction_summary(const ExtractionStats& stats) {
  json per_kp = json::object();
  for (auto kp : kAllKnowledgePoints) {
    auto i = static_cast<std::size_t>(kp);
    per_kp[std::string(to_string(kp))] = {{"matched", stats.matched[i]},
                                          {"emitted", stats.emitted[i]},
                                          {"skipped", stats.skipped[i]}};
  }
  return json{{"sentences", stats.sentences},
              {"sentences_without_facts", stats.sentences_without_facts},
              {"empty_sentences", stats.empty_sentences},
              {"knowledge_points", std::move(per_kp)}};
}

json distribution_json(const DistributionReport& report) {
  json rows = json::object();
  for (auto kp : kAllKnowledgePoints) {
    const auto& r = report.row(kp);
    rows[std::string(to_string(kp))] = {{"tf", r.tf},
                                        {"mc", r.mc},
                                        {"fitb", r.fitb},
                                        {"count", r.count},
                                        {"ratio", r.ratio}};
  }
  return json{{"total", report.total}, {"rows", std::move(rows)}};
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace synqa
