// Port of the NLTK TreebankWordTokenizer substitution cascade.

#include <algorithm>
#include <cctype>
#include <regex>
#include <sstream>

#include "synqa/scoring.hpp"

namespace synqa {

namespace {

struct Rule {
  std::regex re;
  const char* replacement;
};

Rule rule(const char* pattern, const char* replacement, bool icase = false) {
  auto flags = std::regex::ECMAScript | std::regex::optimize;
  if (icase) flags |= std::regex::icase;
  return {std::regex(pattern, flags), replacement};
}

const std::vector<Rule>& before_padding() {
  static const std::vector<Rule> rules = {
      // starting quotes
      rule(R"(^")", "``"),
      rule(R"((``))", " $1 "),
      rule(R"(([ (\[{<])("|''))", "$1 `` "),
      // punctuation
      rule(R"(([:,])([^\d]))", " $1 $2"),
      rule(R"(([:,])$)", " $1 "),
      rule(R"(\.\.\.)", " ... "),
      rule(R"([;@#$%&])", " $& "),
      rule(R"(([^.])(\.)([\])}>"']*)\s*$)", "$1 $2$3 "),
      rule(R"([?!])", " $& "),
      rule(R"(([^'])' )", "$1 ' "),
      // brackets
      rule(R"([\][(){}<>])", " $& "),
      rule(R"(--)", " -- "),
  };
  return rules;
}

const std::vector<Rule>& after_padding() {
  static const std::vector<Rule> rules = {
      // ending quotes
      rule(R"('')", " '' "),
      rule(R"(")", " '' "),
      rule(R"(([^' ])('[sS]|'[mM]|'[dD]|') )", "$1 $2 "),
      rule(R"(([^' ])('ll|'LL|'re|'RE|'ve|'VE|n't|N'T) )", "$1 $2 "),
      // contractions
      rule(R"(\b(can)(not)\b)", " $1 $2 ", true),
      rule(R"(\b(d)('ye)\b)", " $1 $2 ", true),
      rule(R"(\b(gim)(me)\b)", " $1 $2 ", true),
      rule(R"(\b(gon)(na)\b)", " $1 $2 ", true),
      rule(R"(\b(got)(ta)\b)", " $1 $2 ", true),
      rule(R"(\b(lem)(me)\b)", " $1 $2 ", true),
      rule(R"(\b(more)('n)\b)", " $1 $2 ", true),
      rule(R"(\b(wan)(na)(?=\s))", " $1 $2 ", true),
      rule(R"( ('t)(is)\b)", " $1 $2 ", true),
      rule(R"( ('t)(was)\b)", " $1 $2 ", true),
  };
  return rules;
}

bool punctuation_only(const std::string& tok) {
  return std::all_of(tok.begin(), tok.end(), [](unsigned char c) {
    return std::ispunct(c) != 0;
  });
}

}  // namespace

std::vector<std::string> treebank_tokenize(std::string_view text) {
  std::string s(text);
  for (const auto& r : before_padding()) s = std::regex_replace(s, r.re, r.replacement);
  s = " " + s + " ";
  for (const auto& r : after_padding()) s = std::regex_replace(s, r.re, r.replacement);

  std::vector<std::string> tokens;
  std::istringstream in(s);
  for (std::string tok; in >> tok;) tokens.push_back(std::move(tok));
  return tokens;
}

std::vector<std::string> normalize_tokens(std::string_view text) {
  std::vector<std::string> out;
  for (auto& tok : treebank_tokenize(text)) {
    if (punctuation_only(tok)) continue;
    for (auto& c : tok)
      c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    out.push_back(std::move(tok));
  }
  return out;
}

}  // namespace synqa
