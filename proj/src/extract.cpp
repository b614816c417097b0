#include "synqa/extract.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <stdexcept>
#include <thread>
#include <tuple>
#include <unordered_map>

namespace synqa {

std::string_view to_string(KnowledgePoint kp) {
  switch (kp) {
    case KnowledgePoint::GS: return "GS";
    case KnowledgePoint::SC: return "SC";
    case KnowledgePoint::DO: return "DO";
    case KnowledgePoint::IO: return "IO";
    case KnowledgePoint::MVP: return "MVP";
    case KnowledgePoint::ADJ: return "ADJ";
    case KnowledgePoint::ADV: return "ADV";
    case KnowledgePoint::CO: return "CO";
    case KnowledgePoint::PPA: return "PPA";
  }
  return "?";
}

KnowledgePoint parse_knowledge_point(std::string_view abbr) {
  for (auto kp : kAllKnowledgePoints)
    if (to_string(kp) == abbr) return kp;
  throw std::invalid_argument("unknown knowledge point '" + std::string(abbr) +
                              "'");
}

std::string_view role_name(KnowledgePoint kp) {
  switch (kp) {
    case KnowledgePoint::GS: return "grammatical subject";
    case KnowledgePoint::SC: return "subject complement";
    case KnowledgePoint::DO: return "direct object";
    case KnowledgePoint::IO: return "indirect object";
    case KnowledgePoint::MVP: return "main verb phrase";
    case KnowledgePoint::ADJ: return "adjectival modifier";
    case KnowledgePoint::ADV: return "adverbial modifier";
    case KnowledgePoint::CO: return "coordinated phrase";
    case KnowledgePoint::PPA: return "prepositional phrase attachment";
  }
  return "?";
}

std::string_view to_string(Attachment a) {
  return a == Attachment::Noun ? "noun" : "verb";
}

ExtractionStats& ExtractionStats::operator+=(const ExtractionStats& other) {
  for (std::size_t i = 0; i < matched.size(); ++i) {
    matched[i] += other.matched[i];
    emitted[i] += other.emitted[i];
    skipped[i] += other.skipped[i];
  }
  sentences += other.sentences;
  sentences_without_facts += other.sentences_without_facts;
  empty_sentences += other.empty_sentences;
  return *this;
}

namespace {

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

const TreeNode* first_leaf(const TreeNode& node) {
  const TreeNode* n = &node;
  while (!n->is_leaf() && !n->children().empty()) n = &n->children().front();
  return n->is_leaf() ? n : nullptr;
}

}  // namespace

std::string answer_category(const TreeNode& node) {
  const std::string& cat = node.label().category;

  if (cat == "SBAR") {
    const TreeNode* leaf = first_leaf(node);
    std::string word = leaf ? lower(*leaf->token()) : "";
    if (word == "that") return "that-clause";
    if (word == "if" || word == "whether") return "whether-clause";
    if (leaf && (leaf->label().category == "WDT" ||
                 leaf->label().category == "WP" ||
                 leaf->label().category == "WRB" ||
                 leaf->label().category == "WP$"))
      return "wh-clause";
    if (leaf && leaf->label().category == "IN") return "adverbial clause";
    return "clause";
  }
  if (cat == "S") {
    const TreeNode* leaf = first_leaf(node);
    if (leaf && leaf->label().category == "TO") return "to-infinitive clause";
    if (leaf && leaf->label().category == "VBG") return "gerund clause";
    return "clause";
  }
  if (cat == "VP") {
    const TreeNode* leaf = first_leaf(node);
    if (leaf && leaf->label().category == "VBG") return "present participle phrase";
    if (leaf && leaf->label().category == "VBN") return "past participle phrase";
    return "verb phrase";
  }

  static const std::pair<std::string_view, std::string_view> kPhrases[] = {
      {"NP", "noun phrase"},
      {"PP", "prepositional phrase"},
      {"ADJP", "adjective phrase"},
      {"ADVP", "adverb phrase"},
      {"SQ", "question clause"},
      {"SBARQ", "wh-question"},
      {"SINV", "inverted clause"},
      {"QP", "quantifier phrase"},
      {"RRC", "reduced relative clause"},
      {"PRN", "parenthetical"},
      {"WHNP", "wh-noun phrase"},
      {"WHADVP", "wh-adverb phrase"},
      {"WHPP", "wh-prepositional phrase"},
      {"NX", "noun phrase"},
      {"NN", "noun"},
      {"NNS", "noun"},
      {"NNP", "proper noun"},
      {"NNPS", "proper noun"},
      {"PRP", "pronoun"},
      {"RB", "adverb"},
      {"RBR", "adverb"},
      {"RBS", "adverb"},
      {"JJ", "adjective"},
      {"JJR", "adjective"},
      {"JJS", "adjective"},
      {"CD", "number"},
      {"MD", "modal"},
      {"CC", "conjunction"},
      {"IN", "preposition"},
  };
  for (const auto& [label, name] : kPhrases)
    if (cat == label) return std::string(name);
  if (in_pos_family("VB", cat)) return "verb";
  return cat;
}

namespace {

struct Chain {
  std::vector<const TreeNode*> leaves;
};

class SentenceExtractor {
 public:
  SentenceExtractor(const Sentence& sentence, const PatternRuleSet& rules,
                    ExtractionStats& stats)
      : sentence_(sentence), rules_(rules), stats_(stats) {
    index_parents(sentence.root, nullptr);
  }

  std::vector<SyntacticFact> run() {
    if (rules_.contains("GS")) gs();
    if (rules_.contains("MVP")) mvp();
    for (auto kp : {KnowledgePoint::SC, KnowledgePoint::DO})
      if (rules_.contains(to_string(kp))) object_like(kp);
    if (rules_.contains("IO")) io();
    if (rules_.contains("ADJ")) adj();
    if (rules_.contains("ADV")) adv();
    if (rules_.contains("CO")) co();
    if (rules_.contains("PPA")) ppa();

    std::stable_sort(facts_.begin(), facts_.end(),
                     [](const SyntacticFact& a, const SyntacticFact& b) {
                       return std::tie(a.answer_span, a.anchor_span, a.kp) <
                              std::tie(b.answer_span, b.anchor_span, b.kp);
                     });
    return std::move(facts_);
  }

 private:
  void index_parents(const TreeNode& node, const TreeNode* parent) {
    parent_[&node] = parent;
    for (const auto& c : node.children()) index_parents(c, &node);
  }

  const TreeNode* parent_of(const TreeNode* node) const {
    auto it = parent_.find(node);
    return it == parent_.end() ? nullptr : it->second;
  }

  std::vector<MatchBinding> bindings(KnowledgePoint kp) {
    auto out = match_rule(rules_, to_string(kp), sentence_.root);
    stats_.matched[static_cast<std::size_t>(kp)] += out.size();
    return out;
  }

  void skip(KnowledgePoint kp) { ++stats_.skipped[static_cast<std::size_t>(kp)]; }

  // Deepest verb chain for a VP whose parent is not a VP.
  std::optional<Chain> chain_at(const TreeNode& vp) const {
    if (!rules_.contains("MVP")) return std::nullopt;
    std::optional<Chain> best;
    for (auto& b : match_at(rules_, "MVP", vp, parent_of(&vp)))
      if (!best || b.chain.size() > best->leaves.size())
        best = Chain{std::move(b.chain)};
    return best;
  }

  // Verb chain of the clause containing `node` (a VP or an S).
  std::optional<Chain> clause_chain(const TreeNode& node) const {
    const TreeNode* vp = nullptr;
    if (node.label().category == "VP") {
      vp = &node;
      while (const TreeNode* p = parent_of(vp)) {
        if (p->label().category != "VP") break;
        vp = p;
      }
    } else {
      for (const auto& c : node.children())
        if (c.label().category == "VP") {
          vp = &c;
          break;
        }
    }
    if (!vp) return std::nullopt;
    return chain_at(*vp);
  }

  void set_chain_anchor(SyntacticFact& f, const Chain& chain) const {
    f.chain.clear();
    std::string text;
    for (const auto* leaf : chain.leaves) {
      f.chain.push_back(leaf->span());
      if (!text.empty()) text += ' ';
      text += *leaf->token();
    }
    f.anchor_span = {chain.leaves.front()->span().begin,
                     chain.leaves.back()->span().end};
    f.anchor_text = std::move(text);
  }

  SyntacticFact base(KnowledgePoint kp, const std::string& rule) const {
    SyntacticFact f;
    f.sentence_id = sentence_.id;
    f.kp = kp;
    f.rule = rule;
    return f;
  }

  void emit(SyntacticFact f) {
    for (const auto& e : facts_)
      if (e.kp == f.kp && e.anchor_span == f.anchor_span &&
          e.answer_span == f.answer_span)
        return;
    ++stats_.emitted[static_cast<std::size_t>(f.kp)];
    facts_.push_back(std::move(f));
  }

  void gs() {
    for (const auto& b : bindings(KnowledgePoint::GS)) {
      auto subj = b.captures.find("GS");
      if (subj == b.captures.end()) {
        skip(KnowledgePoint::GS);
        continue;
      }
      const TreeNode* pred = nullptr;
      if (auto it = b.captures.find("PRED"); it != b.captures.end())
        pred = it->second;
      std::optional<Chain> chain =
          pred ? chain_at(*pred) : clause_chain(*b.node);
      if (!chain) {
        skip(KnowledgePoint::GS);
        continue;
      }
      SyntacticFact f = base(KnowledgePoint::GS, b.rule);
      set_chain_anchor(f, *chain);
      f.answer_span = subj->second->span();
      f.answer_category = answer_category(*subj->second);
      emit(std::move(f));
    }
  }

  void mvp() {
    auto all = bindings(KnowledgePoint::MVP);
    // Bindings for one node are adjacent; keep the deepest chain per node.
    for (std::size_t i = 0; i < all.size();) {
      std::size_t j = i;
      std::size_t best = i;
      while (j < all.size() && all[j].node == all[i].node) {
        if (all[j].chain.size() > all[best].chain.size()) best = j;
        ++j;
      }
      const MatchBinding& b = all[best];
      SyntacticFact f = base(KnowledgePoint::MVP, b.rule);
      set_chain_anchor(f, Chain{b.chain});
      f.answer_span = f.anchor_span;
      std::string cat;
      for (const auto* leaf : b.chain) {
        if (!cat.empty()) cat += '+';
        cat += leaf->label().category;
      }
      f.answer_category = cat;
      if (const TreeNode* clause = parent_of(b.node))
        for (const auto& c : clause->children())
          if (c.label().has_tag("SBJ") && c.span().end <= b.node->span().begin) {
            f.partner = c.span();
            break;
          }
      emit(std::move(f));
      i = j;
    }
  }

  void object_like(KnowledgePoint kp) {
    const std::string cap(to_string(kp));
    for (const auto& b : bindings(kp)) {
      auto it = b.captures.find(cap);
      if (it == b.captures.end() || b.chain.empty()) {
        skip(kp);
        continue;
      }
      SyntacticFact f = base(kp, b.rule);
      set_chain_anchor(f, Chain{b.chain});
      f.answer_span = it->second->span();
      f.answer_category = answer_category(*it->second);
      emit(std::move(f));
    }
  }

  void io() {
    for (const auto& b : bindings(KnowledgePoint::IO)) {
      auto io = b.captures.find("IO");
      if (io == b.captures.end() || b.chain.empty()) {
        skip(KnowledgePoint::IO);
        continue;
      }
      SyntacticFact f = base(KnowledgePoint::IO, b.rule);
      set_chain_anchor(f, Chain{b.chain});
      f.answer_span = io->second->span();
      f.answer_category = answer_category(*io->second);
      emit(f);

      if (auto d = b.captures.find("DO"); d != b.captures.end()) {
        SyntacticFact g = f;
        g.kp = KnowledgePoint::DO;
        g.answer_span = d->second->span();
        g.answer_category = answer_category(*d->second);
        emit(std::move(g));
      }
    }
  }

  void adj() {
    for (const auto& b : bindings(KnowledgePoint::ADJ)) {
      auto mod = b.captures.find("ADJ");
      if (mod == b.captures.end()) {
        skip(KnowledgePoint::ADJ);
        continue;
      }
      Span anchor;
      if (auto h = b.captures.find("HEAD"); h != b.captures.end())
        anchor = h->second->span();
      else
        anchor = {b.node->span().begin, mod->second->span().begin};
      if (anchor.empty()) {
        skip(KnowledgePoint::ADJ);
        continue;
      }
      SyntacticFact f = base(KnowledgePoint::ADJ, b.rule);
      f.anchor_span = anchor;
      f.anchor_text = phrase_text(sentence_, anchor);
      f.answer_span = mod->second->span();
      f.answer_category = answer_category(*mod->second);
      emit(std::move(f));
    }
  }

  void adv() {
    for (const auto& b : bindings(KnowledgePoint::ADV)) {
      auto mod = b.captures.find("ADV");
      auto chain = clause_chain(*b.node);
      if (mod == b.captures.end() || !chain) {
        skip(KnowledgePoint::ADV);
        continue;
      }
      const Span& a = mod->second->span();
      bool inside_chain = std::any_of(
          chain->leaves.begin(), chain->leaves.end(),
          [&](const TreeNode* leaf) { return a.overlaps(leaf->span()); });
      if (inside_chain) {
        skip(KnowledgePoint::ADV);
        continue;
      }
      SyntacticFact f = base(KnowledgePoint::ADV, b.rule);
      set_chain_anchor(f, *chain);
      f.answer_span = a;
      f.answer_category = answer_category(*mod->second);
      emit(std::move(f));
    }
  }

  void co() {
    for (const auto& b : bindings(KnowledgePoint::CO)) {
      auto conj = b.captures.find("CONJ");
      if (conj == b.captures.end()) {
        skip(KnowledgePoint::CO);
        continue;
      }
      const auto& kids = b.node->children();
      std::size_t k = 0;
      while (k < kids.size() && &kids[k] != conj->second) ++k;

      const TreeNode* left = nullptr;
      const TreeNode* right = nullptr;
      for (std::size_t i = k; i-- > 0;)
        if (!is_punctuation_pos(kids[i].label().category)) {
          left = &kids[i];
          break;
        }
      for (std::size_t i = k + 1; i < kids.size(); ++i)
        if (!is_punctuation_pos(kids[i].label().category)) {
          right = &kids[i];
          break;
        }
      if (!left || !right ||
          left->label().category != right->label().category ||
          left->label().category == "CC" || left->label().category == "CONJP") {
        skip(KnowledgePoint::CO);
        continue;
      }

      SyntacticFact f = base(KnowledgePoint::CO, b.rule);
      f.anchor_span = conj->second->span();
      f.anchor_text = phrase_text(sentence_, f.anchor_span);
      f.answer_span = left->span();
      f.answer_category = answer_category(*left);
      f.partner = right->span();
      for (const auto& c : kids)
        if (c.label().category == left->label().category)
          f.conjuncts.push_back(c.span());
      emit(std::move(f));
    }
  }

  void ppa() {
    for (const auto& b : bindings(KnowledgePoint::PPA)) {
      auto pp = b.captures.find("PP");
      if (pp == b.captures.end()) {
        skip(KnowledgePoint::PPA);
        continue;
      }
      SyntacticFact f = base(KnowledgePoint::PPA, b.rule);
      f.answer_span = pp->second->span();
      f.answer_category = answer_category(*pp->second);
      if (b.node->label().category == "VP") {
        auto chain = clause_chain(*b.node);
        if (!chain) {
          skip(KnowledgePoint::PPA);
          continue;
        }
        set_chain_anchor(f, *chain);
        f.attachment = Attachment::Verb;
      } else {
        Span anchor{b.node->span().begin, f.answer_span.begin};
        if (anchor.empty()) {
          skip(KnowledgePoint::PPA);
          continue;
        }
        f.anchor_span = anchor;
        f.anchor_text = phrase_text(sentence_, anchor);
        f.attachment = Attachment::Noun;
      }
      emit(std::move(f));
    }
  }

  const Sentence& sentence_;
  const PatternRuleSet& rules_;
  ExtractionStats& stats_;
  std::unordered_map<const TreeNode*, const TreeNode*> parent_;
  std::vector<SyntacticFact> facts_;
};

}  // namespace

std::vector<SyntacticFact> extract_facts(const Sentence& sentence,
                                         const PatternRuleSet& rules,
                                         ExtractionStats* stats) {
  ExtractionStats local;
  auto facts = SentenceExtractor(sentence, rules, local).run();
  ++local.sentences;
  if (facts.empty()) ++local.sentences_without_facts;
  if (stats) *stats += local;
  return facts;
}

CorpusExtraction extract_corpus(std::span<const Sentence> sentences,
                                const PatternRuleSet& rules, unsigned threads) {
  struct Slot {
    std::optional<Sentence> stripped;
    std::vector<SyntacticFact> facts;
    ExtractionStats stats;
  };
  std::vector<Slot> slots(sentences.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < sentences.size(); i = next++) {
      Slot& s = slots[i];
      s.stripped = strip_empty_elements(sentences[i]);
      if (!s.stripped) {
        ++s.stats.empty_sentences;
        continue;
      }
      s.facts = extract_facts(*s.stripped, rules, &s.stats);
    }
  };
  threads = std::max(1u, threads);
  if (threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
  }

  std::vector<std::size_t> order(slots.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return sentences[a].id < sentences[b].id;
  });

  CorpusExtraction out;
  for (std::size_t i : order) {
    Slot& s = slots[i];
    out.stats += s.stats;
    if (!s.stripped) continue;
    out.kept.push_back(std::move(*s.stripped));
    for (auto& f : s.facts) out.facts.push_back(std::move(f));
  }
  return out;
}

}  // namespace synqa
