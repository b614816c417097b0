#include "synqa/scoring.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <regex>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "synqa/error.hpp"

namespace synqa {

std::size_t lcs_length(std::span<const std::string> a,
                       std::span<const std::string> b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1
                                    : std::max(prev[j], cur[j - 1]);
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double fitb_f1(std::span<const std::string> gold,
               std::span<const std::string> pred) {
  if (gold.empty() || pred.empty()) return 0.0;
  const auto m = static_cast<double>(lcs_length(gold, pred));
  if (m == 0) return 0.0;
  // 2PR/(P+R) reduced to counts, so 4/5 comes out as the double nearest 0.8.
  return 2 * m / static_cast<double>(gold.size() + pred.size());
}

double fitb_acc(std::span<const std::string> gold,
                std::span<const std::string> pred) {
  return std::equal(gold.begin(), gold.end(), pred.begin(), pred.end()) ? 1.0
                                                                        : 0.0;
}

std::string_view to_string(ParseStatus s) {
  switch (s) {
    case ParseStatus::Clean: return "clean";
    case ParseStatus::Salvaged: return "salvaged";
    case ParseStatus::Unparseable: return "unparseable";
  }
  return "?";
}

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool starts_with_icase(std::string_view s, std::string_view prefix) {
  return s.size() >= prefix.size() && lower(s.substr(0, prefix.size())) == lower(prefix);
}

ParsedAnswer parse_tf(std::string_view raw) {
  ParsedAnswer a{QuestionType::TF, {}, ParseStatus::Unparseable};
  static const std::regex word(R"([A-Za-z]+)");
  std::string text(raw);
  std::size_t index = 0;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), word);
       it != std::sregex_iterator(); ++it, ++index) {
    auto w = lower(it->str());
    if (w == "true" || w == "false") {
      a.value = w == "true";
      a.status = index == 0 ? ParseStatus::Clean : ParseStatus::Salvaged;
      break;
    }
  }
  return a;
}

ParsedAnswer parse_mc(std::string_view raw) {
  ParsedAnswer a{QuestionType::MC, {}, ParseStatus::Unparseable};
  auto first = raw.find_first_not_of(" \t\r\n(");
  for (std::size_t i = 0; i < raw.size(); ++i) {
    char c = raw[i];
    if (c < 'A' || c > 'D') continue;
    if (i > 0 && std::isalnum(static_cast<unsigned char>(raw[i - 1]))) continue;
    if (i + 1 < raw.size()) {
      char n = raw[i + 1];
      if (!(n == '.' || n == ')' || n == ':' || n == ',' ||
            std::isspace(static_cast<unsigned char>(n))))
        continue;
    }
    a.value = c;
    a.status = i == first ? ParseStatus::Clean : ParseStatus::Salvaged;
    break;
  }
  return a;
}

bool strip_quotes(std::string_view& s) {
  static const std::pair<std::string_view, std::string_view> kPairs[] = {
      {"\"", "\""}, {"'", "'"}, {"``", "''"}, {"“", "”"},
      {"‘", "’"}};
  for (const auto& [open, close] : kPairs) {
    if (s.size() >= open.size() + close.size() && s.starts_with(open) &&
        s.ends_with(close)) {
      s = trim(s.substr(open.size(), s.size() - open.size() - close.size()));
      return true;
    }
  }
  return false;
}

ParsedAnswer parse_fitb(std::string_view raw, std::string_view prompt) {
  ParsedAnswer a{QuestionType::FITB, {}, ParseStatus::Unparseable};
  std::string_view s = trim(raw);
  bool salvaged = false;

  // Only the first non-empty line is the answer.
  if (auto nl = s.find('\n'); nl != std::string_view::npos) {
    s = trim(s.substr(0, nl));
    salvaged = true;
  }
  if (starts_with_icase(s, "answer:")) {
    s = trim(s.substr(7));
    salvaged = true;
  }
  if (auto blank = prompt.find(kBlank); blank != std::string_view::npos) {
    auto before = trim(prompt.substr(0, blank));
    auto after = trim(prompt.substr(blank + kBlank.size()));
    std::vector<std::string_view> prefixes = {before};
    if (auto comma = before.find(", "); comma != std::string_view::npos)
      prefixes.push_back(before.substr(comma + 2));
    for (auto p : prefixes) {
      if (!p.empty() && starts_with_icase(s, p)) {
        s = trim(s.substr(p.size()));
        salvaged = true;
        break;
      }
    }
    if (!after.empty() && s.size() > after.size() && s.ends_with(after)) {
      s = trim(s.substr(0, s.size() - after.size()));
    }
  }
  while (strip_quotes(s)) salvaged = true;

  if (s.empty()) return a;
  a.value = std::string(s);
  a.status = salvaged ? ParseStatus::Salvaged : ParseStatus::Clean;
  return a;
}

}  // namespace

ParsedAnswer parse_answer(QuestionType qtype, std::string_view raw,
                          std::string_view prompt) {
  switch (qtype) {
    case QuestionType::TF: return parse_tf(raw);
    case QuestionType::MC: return parse_mc(raw);
    case QuestionType::FITB: return parse_fitb(raw, prompt);
  }
  return {};
}

QuestionScore score_question(const Question& q, const ParsedAnswer& a) {
  if (a.qtype != q.qtype)
    throw std::invalid_argument("answer type does not match question " + q.id);
  QuestionScore s;
  if (a.status == ParseStatus::Unparseable) return s;
  switch (q.qtype) {
    case QuestionType::TF:
      s.acc = std::get<bool>(a.value) == std::get<bool>(q.gold) ? 1.0 : 0.0;
      break;
    case QuestionType::MC:
      s.acc = std::get<char>(a.value) == std::get<char>(q.gold) ? 1.0 : 0.0;
      break;
    case QuestionType::FITB: {
      auto gold = normalize_tokens(std::get<std::string>(q.gold));
      auto pred = normalize_tokens(std::get<std::string>(a.value));
      s.acc = fitb_acc(gold, pred);
      s.f1 = fitb_f1(gold, pred);
      break;
    }
  }
  return s;
}

double overall_accuracy(double tf, double mc, double fitb_acc_pct,
                        double fitb_f1_pct) {
  for (double v : {tf, mc, fitb_acc_pct, fitb_f1_pct})
    if (!(v >= 0.0 && v <= 100.0))
      throw std::domain_error("overall_accuracy: input outside [0, 100]");
  return (tf + mc + (fitb_acc_pct + fitb_f1_pct) / 2) / 3;
}

namespace {

struct Sums {
  double tf = 0, mc = 0, fa = 0, ff = 0;
  std::size_t n_tf = 0, n_mc = 0, n_fitb = 0, unparseable = 0;

  void add(QuestionType t, const QuestionScore& s, bool unparsed) {
    switch (t) {
      case QuestionType::TF: tf += s.acc; ++n_tf; break;
      case QuestionType::MC: mc += s.acc; ++n_mc; break;
      case QuestionType::FITB:
        fa += s.acc;
        ff += s.f1;
        ++n_fitb;
        break;
    }
    if (unparsed) ++unparseable;
  }
};

std::optional<double> pct(double sum, std::size_t n) {
  if (n == 0) return std::nullopt;
  return 100.0 * sum / static_cast<double>(n);
}

// Averages present cells over the seeds in which they are present.
ScoreSet average(const std::vector<Sums>& per_seed) {
  ScoreSet out;
  auto mean = [&](auto cell) -> std::optional<double> {
    double total = 0;
    std::size_t k = 0;
    for (const auto& s : per_seed)
      if (auto v = cell(s)) {
        total += *v;
        ++k;
      }
    if (k == 0) return std::nullopt;
    return total / static_cast<double>(k);
  };
  out.tf_acc = mean([](const Sums& s) { return pct(s.tf, s.n_tf); });
  out.mc_acc = mean([](const Sums& s) { return pct(s.mc, s.n_mc); });
  out.fitb_acc = mean([](const Sums& s) { return pct(s.fa, s.n_fitb); });
  out.fitb_f1 = mean([](const Sums& s) { return pct(s.ff, s.n_fitb); });
  for (const auto& s : per_seed) {
    out.n_tf += s.n_tf;
    out.n_mc += s.n_mc;
    out.n_fitb += s.n_fitb;
    out.unparseable += s.unparseable;
  }
  if (out.tf_acc && out.mc_acc && out.fitb_acc && out.fitb_f1)
    out.oa = overall_accuracy(*out.tf_acc, *out.mc_acc, *out.fitb_acc,
                              *out.fitb_f1);
  return out;
}

}  // namespace

Scoreboard aggregate(std::span<const AnswerRecord> records,
                     std::span<const Question> eval) {
  std::unordered_map<std::string_view, const Question*> by_id;
  for (const auto& q : eval) by_id.emplace(q.id, &q);

  std::vector<const AnswerRecord*> sorted;
  sorted.reserve(records.size());
  for (const auto& r : records) {
    if (!by_id.count(r.question_id))
      throw IntegrityError("run record refers to unknown question '" +
                           r.question_id + "'");
    sorted.push_back(&r);
  }
  std::sort(sorted.begin(), sorted.end(), [](const auto* a, const auto* b) {
    return std::tie(a->seed, a->question_id) < std::tie(b->seed, b->question_id);
  });
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i]->seed == sorted[i - 1]->seed &&
        sorted[i]->question_id == sorted[i - 1]->question_id)
      throw IntegrityError("duplicate record for question '" +
                           sorted[i]->question_id + "' seed " +
                           std::to_string(sorted[i]->seed));

  std::map<std::uint64_t, std::pair<Sums, std::array<Sums, 9>>> per_seed;
  for (const auto* r : sorted) {
    const Question& q = *by_id.at(r->question_id);
    const auto score = score_question(q, r->answer);
    const bool unparsed = r->answer.status == ParseStatus::Unparseable;
    auto& [overall, by_kp] = per_seed[r->seed];
    overall.add(q.qtype, score, unparsed);
    by_kp[static_cast<std::size_t>(q.kp)].add(q.qtype, score, unparsed);
    if (q.qtype == QuestionType::TF && q.meta.reuse_kp)
      by_kp[static_cast<std::size_t>(*q.meta.reuse_kp)].add(q.qtype, score,
                                                            unparsed);
  }

  Scoreboard board;
  std::vector<Sums> overall;
  std::array<std::vector<Sums>, 9> by_kp;
  for (const auto& [seed, sums] : per_seed) {
    board.seeds.push_back(seed);
    overall.push_back(sums.first);
    for (std::size_t k = 0; k < 9; ++k) by_kp[k].push_back(sums.second[k]);
  }
  board.overall = average(overall);
  for (std::size_t k = 0; k < 9; ++k) board.breakdown[k] = average(by_kp[k]);
  return board;
}

}  // namespace synqa
