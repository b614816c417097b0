#include "synqa/qgen.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "synqa/error.hpp"
#include "synqa/rng.hpp"

namespace synqa {

std::string_view to_string(QuestionType q) {
  switch (q) {
    case QuestionType::TF: return "TF";
    case QuestionType::MC: return "MC";
    case QuestionType::FITB: return "FITB";
  }
  return "?";
}

QuestionType parse_question_type(std::string_view s) {
  for (auto q : kAllQuestionTypes)
    if (to_string(q) == s) return q;
  throw std::invalid_argument("unknown question type '" + std::string(s) + "'");
}

char option_letter(std::size_t index) {
  return static_cast<char>('A' + index);
}

std::string gold_text(const Question& q) {
  if (auto* b = std::get_if<bool>(&q.gold)) return *b ? "True" : "False";
  if (auto* c = std::get_if<char>(&q.gold)) return std::string(1, *c);
  return std::get<std::string>(q.gold);
}

namespace {

std::string lower(std::string s) {
  for (auto& c : s)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string capitalize(std::string s) {
  if (!s.empty())
    s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

constexpr std::array<std::string_view, 6> kPlaceholders = {
    "SENTENCE", "ANCHOR", "ANSWER", "ROLE", "BLANK", "PARTNER"};

// Names of the {PLACEHOLDERS} in a template, in order of appearance.
std::vector<std::string> placeholders_in(std::string_view tmpl) {
  std::vector<std::string> names;
  std::size_t pos = 0;
  while ((pos = tmpl.find('{', pos)) != std::string_view::npos) {
    auto close = tmpl.find('}', pos);
    if (close == std::string_view::npos)
      throw ConfigError("unterminated placeholder in template: " +
                        std::string(tmpl));
    names.emplace_back(tmpl.substr(pos + 1, close - pos - 1));
    pos = close + 1;
  }
  return names;
}

bool uses(std::string_view tmpl, std::string_view name) {
  auto names = placeholders_in(tmpl);
  return std::find(names.begin(), names.end(), name) != names.end();
}

struct Constituent {
  Span span;
  const TreeNode* node;
};

bool all_punctuation(const TreeNode& node) {
  if (node.is_leaf()) return is_punctuation_pos(node.label().category);
  return std::all_of(node.children().begin(), node.children().end(),
                     [](const TreeNode& c) { return all_punctuation(c); });
}

void collect_constituents(const TreeNode& node, std::set<Span>& seen,
                          std::vector<Constituent>& out) {
  if (node.span().empty() || all_punctuation(node)) return;
  if (seen.insert(node.span()).second) out.push_back({node.span(), &node});
  for (const auto& child : node.children())
    collect_constituents(child, seen, out);
}

std::vector<Constituent> constituents_of(const Sentence& sentence) {
  std::set<Span> seen;
  std::vector<Constituent> out;
  collect_constituents(sentence.root, seen, out);
  return out;
}

std::string partner_text(const SyntacticFact& fact, const Sentence& sentence) {
  return fact.partner ? phrase_text(sentence, *fact.partner) : std::string();
}

Question base_question(const SyntacticFact& fact, const Sentence& sentence,
                       QuestionType qtype, std::vector<Span> constituents) {
  Question q;
  q.sentence_id = fact.sentence_id;
  q.sentence_text = sentence.text();
  q.kp = fact.kp;
  q.qtype = qtype;
  q.meta.answer_category = fact.answer_category;
  q.meta.fact_ref = fact_key(fact);
  q.meta.template_id = TemplateSet::id(fact.kp, qtype);
  q.meta.answer_span = fact.answer_span;
  q.meta.tokens = sentence.tokens;
  q.meta.constituents = std::move(constituents);
  return q;
}

TemplateValues values_for(const SyntacticFact& fact, const Sentence& sentence) {
  TemplateValues v;
  v.sentence = sentence.text();
  v.anchor = fact.anchor_text;
  v.role = std::string(role_name(fact.kp));
  v.partner = partner_text(fact, sentence);
  return v;
}

Question statement(const SyntacticFact& fact, const Sentence& sentence,
                   const Span& asserted, const TemplateSet& templates,
                   std::vector<Span> constituents) {
  if (fact.kp == KnowledgePoint::MVP)
    throw std::invalid_argument(
        "MVP true/false items are taken from GS/SC/DO/IO statements");
  Question q = base_question(fact, sentence, QuestionType::TF,
                             std::move(constituents));
  const bool truth = asserted == fact.answer_span;
  if (!truth && lower(phrase_text(sentence, asserted)) ==
                    lower(phrase_text(sentence, fact.answer_span)))
    throw std::invalid_argument("distractor '" +
                                phrase_text(sentence, asserted) +
                                "' reads the same as the answer");
  auto v = values_for(fact, sentence);
  v.answer = phrase_text(sentence, asserted);
  q.prompt = render_template(templates.at(fact.kp, QuestionType::TF), v);
  q.gold = truth;
  q.id = q.meta.fact_ref + "/TF/" + (truth ? "T" : "F");
  q.meta.pair_id = q.meta.fact_ref + "/TF";
  q.meta.option_spans = {asserted};
  if (!truth) q.meta.distractors = {asserted};
  if (fact.kp == KnowledgePoint::GS || fact.kp == KnowledgePoint::SC ||
      fact.kp == KnowledgePoint::DO || fact.kp == KnowledgePoint::IO)
    q.meta.reuse_kp = KnowledgePoint::MVP;
  return q;
}

DistractorPick pick_distractors(const SyntacticFact& fact,
                                const Sentence& sentence,
                                const std::vector<Constituent>& pool,
                                std::size_t n, std::uint64_t seed,
                                std::span<const Span> exclude) {
  if (n == 0) throw std::invalid_argument("select_distractors: n must be >= 1");
  const Span gold = fact.answer_span;
  const std::string gold_text = lower(phrase_text(sentence, gold));
  auto excluded = [&](const Span& s) {
    return std::find(exclude.begin(), exclude.end(), s) != exclude.end() ||
           std::find(fact.conjuncts.begin(), fact.conjuncts.end(), s) !=
               fact.conjuncts.end();
  };

  std::vector<Span> same, other;
  for (const auto& c : pool) {
    if (gold.contains(c.span) || c.span.contains(gold) || excluded(c.span))
      continue;
    if (lower(phrase_text(sentence, c.span)) == gold_text) continue;
    (answer_category(*c.node) == fact.answer_category ? same : other)
        .push_back(c.span);
  }
  Rng rng(seed, fact_key(fact) + "/distractors");
  rng.shuffle(same);
  rng.shuffle(other);

  DistractorPick pick;
  std::set<std::string> taken;
  for (const auto* list : {&same, &other}) {
    for (const auto& s : *list) {
      if (pick.spans.size() == n) break;
      if (taken.insert(lower(phrase_text(sentence, s))).second)
        pick.spans.push_back(s);
    }
  }
  pick.shortfall = pick.spans.size() < n;
  return pick;
}

std::vector<Span> spans_of(const std::vector<Constituent>& pool) {
  std::vector<Span> out;
  out.reserve(pool.size());
  for (const auto& c : pool) out.push_back(c.span);
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Templates

std::string TemplateSet::id(KnowledgePoint kp, QuestionType q) {
  return std::string(to_string(kp)) + "." + std::string(to_string(q));
}

TemplateSet TemplateSet::parse(std::string_view source) {
  TemplateSet set;
  std::istringstream in{std::string(source)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto fail = [&](const std::string& why) {
      throw ConfigError("template line " + std::to_string(lineno) + ": " + why);
    };
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;

    std::istringstream fields(line);
    std::string kp_s, q_s;
    fields >> kp_s >> q_s;
    std::string text;
    std::getline(fields, text);
    auto b = text.find_first_not_of(" \t");
    auto e = text.find_last_not_of(" \t\r");
    if (b == std::string::npos) fail("missing template text");
    text = text.substr(b, e - b + 1);

    KnowledgePoint kp;
    QuestionType q;
    try {
      kp = parse_knowledge_point(kp_s);
      q = parse_question_type(q_s);
    } catch (const std::invalid_argument& ex) {
      fail(ex.what());
    }
    if (kp == KnowledgePoint::MVP && q == QuestionType::TF)
      fail("MVP.TF cannot be templated; it reuses GS/SC/DO/IO statements");
    for (const auto& name : placeholders_in(text))
      if (std::find(kPlaceholders.begin(), kPlaceholders.end(), name) ==
          kPlaceholders.end())
        fail("unknown placeholder {" + name + "}");
    if (q == QuestionType::TF) {
      if (!uses(text, "ANSWER")) fail(id(kp, q) + " must use {ANSWER}");
    } else {
      if (!uses(text, "BLANK")) fail(id(kp, q) + " must use {BLANK}");
      if (uses(text, "ANSWER")) fail(id(kp, q) + " would reveal {ANSWER}");
    }
    if (!set.templates_.emplace(std::pair{kp, q}, text).second)
      fail("duplicate template for " + id(kp, q));
  }
  return set;
}

TemplateSet TemplateSet::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open template file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

const TemplateSet& TemplateSet::defaults() {
  static const TemplateSet set = parse(default_template_source());
  return set;
}

const std::string* TemplateSet::find(KnowledgePoint kp, QuestionType q) const {
  auto it = templates_.find({kp, q});
  return it == templates_.end() ? nullptr : &it->second;
}

const std::string& TemplateSet::at(KnowledgePoint kp, QuestionType q) const {
  if (const auto* t = find(kp, q)) return *t;
  throw ConfigError("no template for " + id(kp, q));
}

void TemplateSet::require_complete() const {
  for (auto kp : kAllKnowledgePoints)
    for (auto q : kAllQuestionTypes)
      if (!(kp == KnowledgePoint::MVP && q == QuestionType::TF)) at(kp, q);
}

std::string render_template(std::string_view tmpl, const TemplateValues& v) {
  std::string out;
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    auto open = tmpl.find('{', pos);
    if (open == std::string_view::npos) {
      out.append(tmpl.substr(pos));
      break;
    }
    out.append(tmpl.substr(pos, open - pos));
    auto close = tmpl.find('}', open);
    if (close == std::string_view::npos)
      throw ConfigError("unterminated placeholder in template");
    auto name = tmpl.substr(open + 1, close - open - 1);
    if (name == "SENTENCE") out += v.sentence;
    else if (name == "ANCHOR") out += v.anchor;
    else if (name == "ANSWER") out += v.answer;
    else if (name == "ROLE") out += v.role;
    else if (name == "BLANK") out += kBlank;
    else if (name == "PARTNER") {
      if (v.partner.empty())
        throw ConfigError("template needs {PARTNER} but the fact has none");
      out += v.partner;
    } else {
      throw ConfigError("unknown placeholder {" + std::string(name) + "}");
    }
    pos = close + 1;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Questions

std::string fact_key(const SyntacticFact& fact) {
  return fact.sentence_id + "/" + std::string(to_string(fact.kp)) + "/" +
         to_string(fact.anchor_span) + "/" + to_string(fact.answer_span);
}

std::vector<Span> constituent_spans(const Sentence& sentence) {
  return spans_of(constituents_of(sentence));
}

DistractorPick select_distractors(const SyntacticFact& fact,
                                  const Sentence& sentence, std::size_t n,
                                  std::uint64_t seed,
                                  std::span<const Span> exclude) {
  return pick_distractors(fact, sentence, constituents_of(sentence), n, seed,
                          exclude);
}

Question make_true_statement(const SyntacticFact& fact,
                             const Sentence& sentence,
                             const TemplateSet& templates) {
  return statement(fact, sentence, fact.answer_span, templates,
                   constituent_spans(sentence));
}

Question make_false_statement(const SyntacticFact& fact,
                              const Sentence& sentence, const Span& distractor,
                              const TemplateSet& templates) {
  if (distractor == fact.answer_span)
    throw std::invalid_argument("distractor equals the answer span");
  return statement(fact, sentence, distractor, templates,
                   constituent_spans(sentence));
}

std::vector<Question> generate_questions(std::span<const SyntacticFact> facts,
                                         std::span<const Sentence> sentences,
                                         const TemplateSet& templates,
                                         std::uint64_t seed,
                                         GenerationStats* stats) {
  templates.require_complete();
  GenerationStats local;
  GenerationStats& st = stats ? *stats : local;

  std::unordered_map<std::string, const Sentence*> by_id;
  for (const auto& s : sentences) by_id.emplace(s.id, &s);

  // Other correct answers for the same question (several adverbials or PPs
  // on one verb) must not turn up as distractors.
  std::map<std::string, std::vector<Span>> answers_by_question;
  auto question_key = [](const SyntacticFact& f) {
    return f.sentence_id + "/" + std::string(to_string(f.kp)) + "/" +
           to_string(f.anchor_span) + "/" +
           (f.partner ? to_string(*f.partner) : std::string());
  };
  for (const auto& f : facts)
    answers_by_question[question_key(f)].push_back(f.answer_span);

  std::unordered_map<std::string, std::vector<Constituent>> pools;
  std::vector<Question> out;
  for (const auto& fact : facts) {
    ++st.facts;
    auto it = by_id.find(fact.sentence_id);
    if (it == by_id.end())
      throw std::invalid_argument("fact refers to unknown sentence '" +
                                  fact.sentence_id + "'");
    const Sentence& sentence = *it->second;
    auto& pool = pools[sentence.id];
    if (pool.empty()) pool = constituents_of(sentence);

    const auto& fitb_t = templates.at(fact.kp, QuestionType::FITB);
    const auto& mc_t = templates.at(fact.kp, QuestionType::MC);
    if (!fact.partner && (uses(fitb_t, "PARTNER") || uses(mc_t, "PARTNER"))) {
      ++st.no_partner;
      continue;
    }

    const std::string key = fact_key(fact);
    const std::string answer = phrase_text(sentence, fact.answer_span);
    auto values = values_for(fact, sentence);
    const auto& exclude = answers_by_question[question_key(fact)];
    auto pick = pick_distractors(fact, sentence, pool, 3, seed, exclude);
    const auto spans = spans_of(pool);

    Question fitb = base_question(fact, sentence, QuestionType::FITB, spans);
    fitb.id = key + "/FITB";
    fitb.prompt = render_template(fitb_t, values);
    fitb.gold = answer;
    out.push_back(std::move(fitb));
    ++st.emitted[static_cast<std::size_t>(QuestionType::FITB)];

    if (pick.spans.size() >= 3) {
      Question mc = base_question(fact, sentence, QuestionType::MC, spans);
      mc.id = key + "/MC";
      mc.prompt = render_template(mc_t, values);
      Rng rng(seed, key + "/MC");
      const std::size_t gold_pos = rng.below(4);
      std::size_t d = 0;
      for (std::size_t i = 0; i < 4; ++i) {
        Span s = i == gold_pos ? fact.answer_span : pick.spans[d++];
        mc.meta.option_spans.push_back(s);
        mc.options.push_back(capitalize(phrase_text(sentence, s)));
      }
      mc.meta.distractors = pick.spans;
      mc.gold = option_letter(gold_pos);
      out.push_back(std::move(mc));
      ++st.emitted[static_cast<std::size_t>(QuestionType::MC)];
    } else {
      ++st.mc_skipped;
    }

    if (fact.kp == KnowledgePoint::MVP) continue;
    if (pick.spans.empty()) {
      ++st.tf_skipped;
      continue;
    }
    out.push_back(
        statement(fact, sentence, fact.answer_span, templates, spans));
    out.push_back(statement(fact, sentence, pick.spans.front(), templates, spans));
    st.emitted[static_cast<std::size_t>(QuestionType::TF)] += 2;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Distribution

namespace {

void finish(DistributionReport& r) {
  r.total = 0;
  for (const auto& row : r.rows) r.total += row.count;
  for (auto& row : r.rows)
    row.ratio = r.total == 0 ? 0.0 : 100.0 * static_cast<double>(row.count) /
                                         static_cast<double>(r.total);
}

}  // namespace

DistributionReport dataset_stats(std::span<const Question> questions) {
  DistributionReport r;
  auto bump = [&](KnowledgePoint kp, QuestionType q) {
    auto& row = r.rows[static_cast<std::size_t>(kp)];
    switch (q) {
      case QuestionType::TF: ++row.tf; break;
      case QuestionType::MC: ++row.mc; break;
      case QuestionType::FITB: ++row.fitb; break;
    }
    ++row.count;
  };
  for (const auto& q : questions) {
    bump(q.kp, q.qtype);
    if (q.qtype == QuestionType::TF && q.meta.reuse_kp)
      bump(*q.meta.reuse_kp, QuestionType::TF);
  }
  finish(r);
  return r;
}

DistributionReport dataset_stats(std::span<const SyntacticFact> facts) {
  DistributionReport r;
  for (const auto& f : facts) ++r.rows[static_cast<std::size_t>(f.kp)].count;
  finish(r);
  return r;
}

}  // namespace synqa
