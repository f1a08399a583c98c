// Base feature extractors and decision features for the EDT model.
//
// Extractors are pure functions of the document, a span, the hypothesis
// prefix they are given and the resource bundle. They return named features;
// names carry their class prefix ("lex|w=clinton") so that a disabled class
// never leaks into a model.
#pragma once

#include <algorithm>
#include <array>
#include <bitset>
#include <cmath>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "laso/edt/document.hpp"
#include "laso/edt/hypothesis.hpp"
#include "laso/edt/resources.hpp"
#include "laso/edt/strings.hpp"
#include "laso/search.hpp"

namespace laso::edt {

enum class feature_class : std::uint8_t {
  lexical,
  syntactic,
  pattern,
  count,
  semantic,
  knowledge,
  class_based,
  list,
  inference,
  string_match,
  history,
};
inline constexpr std::size_t feature_class_count = 11;

inline constexpr std::array<feature_class, feature_class_count> all_feature_classes{
    feature_class::lexical,  feature_class::syntactic, feature_class::pattern,     feature_class::count,
    feature_class::semantic, feature_class::knowledge, feature_class::class_based, feature_class::list,
    feature_class::inference, feature_class::string_match, feature_class::history};

// The classes considered by backward elimination (history is detection-only).
inline constexpr std::array<feature_class, 10> ablation_classes{
    feature_class::lexical,  feature_class::syntactic, feature_class::pattern,     feature_class::count,
    feature_class::semantic, feature_class::knowledge, feature_class::class_based, feature_class::list,
    feature_class::inference, feature_class::string_match};

inline std::string_view class_prefix(feature_class c) {
  static constexpr std::array<std::string_view, feature_class_count> p{"lex", "syn", "pat", "cnt", "sem", "kno",
                                                                       "cls", "lst", "inf", "str", "his"};
  return p[static_cast<std::size_t>(c)];
}

inline std::string_view class_name(feature_class c) {
  static constexpr std::array<std::string_view, feature_class_count> n{
      "lexical", "syntactic", "pattern", "count", "semantic", "knowledge",
      "class", "list", "inference", "string-match", "history"};
  return n[static_cast<std::size_t>(c)];
}

inline std::optional<feature_class> parse_feature_class(std::string_view s) {
  for (auto c : all_feature_classes)
    if (class_name(c) == s) return c;
  return std::nullopt;
}

class class_set {
 public:
  static class_set all() {
    class_set s;
    s.bits_.set();
    return s;
  }
  static class_set none() { return {}; }
  bool has(feature_class c) const { return bits_.test(static_cast<std::size_t>(c)); }
  class_set& add(feature_class c) {
    bits_.set(static_cast<std::size_t>(c));
    return *this;
  }
  class_set& remove(feature_class c) {
    bits_.reset(static_cast<std::size_t>(c));
    return *this;
  }
  std::size_t size() const { return bits_.count(); }
  std::vector<feature_class> members() const {
    std::vector<feature_class> out;
    for (auto c : all_feature_classes)
      if (has(c)) out.push_back(c);
    return out;
  }
  friend bool operator==(const class_set&, const class_set&) = default;

 private:
  std::bitset<feature_class_count> bits_;
};

struct named_feature {
  std::string name;
  double value = 1.0;
  friend bool operator==(const named_feature&, const named_feature&) = default;
};
using feature_list = std::vector<named_feature>;

inline bool contains_feature(const feature_list& fs, std::string_view name) {
  return std::any_of(fs.begin(), fs.end(), [&](const named_feature& f) { return f.name == name; });
}

inline double feature_value(const feature_list& fs, std::string_view name) {
  double v = 0.0;
  for (const auto& f : fs)
    if (f.name == name) v += f.value;
  return v;
}

struct token_span {
  std::size_t start = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - start; }
  friend bool operator==(const token_span&, const token_span&) = default;
};

inline std::size_t decile(double v) {
  if (!(v > 0.0)) return 0;
  return std::min<std::size_t>(9, static_cast<std::size_t>(v * 10.0));
}

// Real-valued feature: raw value plus a decile indicator.
inline void emit_real(feature_list& out, const std::string& name, double v) {
  out.push_back({name, v});
  out.push_back({name + "_dec=" + std::to_string(decile(v)), 1.0});
}

inline std::string bucket(std::size_t n, std::size_t cap) {
  return n >= cap ? std::to_string(cap) + "+" : std::to_string(n);
}

// ---- shared word helpers ---------------------------------------------------

inline std::string word_at(const document& doc, std::ptrdiff_t i) {
  if (i < 0) return "<s>";
  if (static_cast<std::size_t>(i) >= doc.size()) return "</s>";
  return lowercase(doc.tokens[static_cast<std::size_t>(i)].text);
}

inline std::string span_text(const document& doc, token_span s) {
  std::string out;
  for (std::size_t i = s.start; i < s.end; ++i) {
    if (i > s.start) out += ' ';
    out += lowercase(doc.tokens[i].text);
  }
  return out;
}

inline std::vector<std::string> span_words(const document& doc, token_span s) {
  std::vector<std::string> out;
  for (std::size_t i = s.start; i < s.end; ++i) out.push_back(doc.tokens[i].text);
  return out;
}

// The head of a mention is its final word.
inline std::string head_word(const document& doc, token_span s) { return lowercase(doc.tokens[s.end - 1].text); }

inline bool is_sentence_start(const document& doc, std::size_t i) {
  if (i == 0) return true;
  return std::find(doc.sentence_ends.begin(), doc.sentence_ends.end(), i) != doc.sentence_ends.end();
}

inline std::optional<gender_number> pronoun_gender_number(std::string_view w) {
  const std::string l = lowercase(w);
  if (l == "he" || l == "him" || l == "his" || l == "himself") return gender_number{gender::male, number::singular};
  if (l == "she" || l == "her" || l == "hers" || l == "herself")
    return gender_number{gender::female, number::singular};
  if (l == "it" || l == "its" || l == "itself") return gender_number{gender::neuter, number::singular};
  if (l == "they" || l == "them" || l == "their" || l == "theirs" || l == "themselves")
    return gender_number{gender::unknown, number::plural};
  return std::nullopt;
}

inline bool is_pronoun(std::string_view w) {
  if (pronoun_gender_number(w)) return true;
  const std::string l = lowercase(w);
  static constexpr std::array<std::string_view, 14> others{"i", "me", "my", "mine", "we", "us", "our",
                                                           "ours", "you", "your", "yours", "myself",
                                                           "ourselves", "yourself"};
  return std::find(others.begin(), others.end(), l) != others.end();
}

inline std::optional<gender_number> infer_gender_number(std::string_view w, const resource_bundle& res) {
  if (auto p = pronoun_gender_number(w)) return p;
  return res.lookup_gender_number(w);
}

namespace detail {
inline std::optional<std::size_t> verb_near(const document& doc, token_span s, bool before) {
  if (!doc.tagged()) return std::nullopt;
  for (std::size_t k = 1; k <= 3; ++k) {
    if (before) {
      if (s.start < k) break;
      if (doc.tokens[s.start - k].pos.starts_with("VB")) return s.start - k;
    } else {
      const std::size_t i = s.end + k - 1;
      if (i >= doc.size()) break;
      if (doc.tokens[i].pos.starts_with("VB")) return i;
    }
  }
  return std::nullopt;
}

inline bool looks_plural(const document& doc, std::size_t i) {
  const auto& t = doc.tokens[i];
  if (!t.pos.empty()) return t.pos == "NNS" || t.pos == "NNPS";
  const auto w = lowercase(t.text);
  return w.size() > 3 && w.ends_with('s') && !w.ends_with("ss") && stem(w) != w;
}
}  // namespace detail

// ---- detection base features (depend on the span only) ----------------------

inline feature_list extract_lexical(const document& doc, token_span s) {
  feature_list out;
  out.push_back({"lex|len=" + std::to_string(s.size())});
  std::string shape;
  for (std::size_t i = s.start; i < s.end; ++i) {
    const auto& text = doc.tokens[i].text;
    const auto w = lowercase(text);
    out.push_back({"lex|w=" + w});
    out.push_back({"lex|stem=" + stem(w)});
    out.push_back({"lex|pre2=" + w.substr(0, 2)});
    out.push_back({"lex|suf2=" + (w.size() > 2 ? w.substr(w.size() - 2) : w)});
    out.push_back({"lex|bikel=" + std::string(bikel_class(text, is_sentence_start(doc, i)))});
    if (i > s.start) {
      out.push_back({"lex|bg=" + lowercase(doc.tokens[i - 1].text) + "_" + w});
      shape += '_';
    }
    shape += word_shape(text);
  }
  out.push_back({"lex|shape=" + shape});
  const auto head = head_word(doc, s);
  out.push_back({"lex|head=" + head});
  if (detail::looks_plural(doc, s.end - 1)) out.push_back({"lex|morph=plural"});
  if (head.size() > 5 && head.ends_with("ing")) out.push_back({"lex|morph=ing"});
  if (head.size() > 4 && head.ends_with("ed")) out.push_back({"lex|morph=ed"});
  if (s.size() == 1 && is_pronoun(head)) {
    static constexpr std::array<std::string_view, 7> first{"i", "me", "my", "mine", "we", "us", "our"};
    static constexpr std::array<std::string_view, 3> second{"you", "your", "yours"};
    const char* person = std::find(first.begin(), first.end(), head) != first.end()     ? "1"
                         : std::find(second.begin(), second.end(), head) != second.end() ? "2"
                                                                                        : "3";
    out.push_back({std::string("lex|person=") + person});
  }
  return out;
}

inline feature_list extract_syntactic(const document& doc, token_span s) {
  feature_list out;
  if (doc.tagged()) {
    for (std::size_t i = s.start; i < s.end; ++i) {
      out.push_back({"syn|pos=" + doc.tokens[i].pos});
      if (i > s.start) out.push_back({"syn|pbg=" + doc.tokens[i - 1].pos + "_" + doc.tokens[i].pos});
    }
    out.push_back({"syn|hpos=" + doc.tokens[s.end - 1].pos});
  }
  if (doc.chunked())
    for (std::size_t i = s.start; i < s.end; ++i) out.push_back({"syn|chk=" + doc.tokens[i].chunk});
  return out;
}

inline bool matches_pleonastic(const document& doc, std::size_t at, const pleonastic_pattern& p) {
  const auto w = word_at(doc, static_cast<std::ptrdiff_t>(at));
  if (std::find(p.target.begin(), p.target.end(), w) == p.target.end()) return false;
  for (std::size_t k = 0; k < p.slots.size(); ++k) {
    const std::size_t i = at + 1 + k;
    if (i >= doc.size()) return false;
    const auto& alts = p.slots[k];
    const auto x = lowercase(doc.tokens[i].text);
    if (std::find(alts.begin(), alts.end(), "*") == alts.end() &&
        std::find(alts.begin(), alts.end(), x) == alts.end())
      return false;
  }
  return true;
}

inline feature_list extract_pattern(const document& doc, token_span s, const resource_bundle& res) {
  feature_list out;
  if (s.size() == 1) {
    for (const auto& p : res.pleonastic_patterns())
      if (matches_pleonastic(doc, s.start, p)) {
        out.push_back({"pat|pleonastic"});
        break;
      }
  }
  if (s.start > 0 && detail::looks_plural(doc, s.start - 1)) out.push_back({"pat|prev_plural"});
  if (s.end < doc.size() && detail::looks_plural(doc, s.end)) out.push_back({"pat|next_plural"});
  if (auto v = detail::verb_near(doc, s, true)) out.push_back({"pat|pverb=" + stem(doc.tokens[*v].text)});
  if (auto v = detail::verb_near(doc, s, false)) out.push_back({"pat|nverb=" + stem(doc.tokens[*v].text)});
  // "the president 's speech": speech carries "president" and vice versa.
  if (s.start >= 2 && doc.tokens[s.start - 1].text == "'s")
    out.push_back({"pat|possessor=" + word_at(doc, static_cast<std::ptrdiff_t>(s.start) - 2)});
  if (s.end + 1 < doc.size() && doc.tokens[s.end].text == "'s")
    out.push_back({"pat|possessed=" + word_at(doc, static_cast<std::ptrdiff_t>(s.end) + 1)});
  return out;
}

inline feature_list extract_semantic(const document& doc, token_span s, const resource_bundle& res) {
  feature_list out;
  if (!res.has_hypernyms()) return out;
  for (std::size_t i = s.start; i < s.end; ++i) {
    const auto* e = res.hypernym_lookup(doc.tokens[i].text);
    if (!e) continue;
    for (std::size_t k = 0; k < e->synsets.size() && k < 2; ++k) out.push_back({"sem|syn=" + e->synsets[k]});
    for (const auto& h : e->hypernyms) out.push_back({"sem|hyp=" + h});
  }
  for (bool before : {true, false}) {
    auto v = detail::verb_near(doc, s, before);
    if (!v) continue;
    if (const auto* e = res.hypernym_lookup(doc.tokens[*v].text))
      for (std::size_t k = 0; k < e->synsets.size() && k < 2; ++k) out.push_back({"sem|vsyn=" + e->synsets[k]});
  }
  return out;
}

inline feature_list extract_class(const document& doc, token_span s, const resource_bundle& res) {
  feature_list out;
  for (std::size_t i = s.start; i < s.end; ++i)
    if (auto c = res.cluster(doc.tokens[i].text)) out.push_back({"cls|c=" + *c});
  if (res.has_collocations()) {
    for (std::size_t i = s.start + 1; i < s.end; ++i)
      if (res.collocation(doc.tokens[i - 1].text, doc.tokens[i].text)) out.push_back({"cls|mwe"});
    if (s.start > 0 && res.collocation(doc.tokens[s.start - 1].text, doc.tokens[s.start].text))
      out.push_back({"cls|mwe_split"});
    if (s.end < doc.size() && res.collocation(doc.tokens[s.end - 1].text, doc.tokens[s.end].text))
      out.push_back({"cls|mwe_split"});
  }
  return out;
}

inline feature_list extract_list(const document& doc, token_span s, const resource_bundle& res) {
  feature_list out;
  if (!res.has_gazetteers()) return out;
  for (const auto& l : res.lists_containing(span_text(doc, s))) out.push_back({"lst|in=" + l});
  if (s.size() > 1)
    for (std::size_t i = s.start; i < s.end; ++i)
      for (const auto& l : res.lists_containing(doc.tokens[i].text)) out.push_back({"lst|win=" + l});
  return out;
}

inline feature_list extract_inference(const document& doc, token_span s, const resource_bundle& res) {
  feature_list out;
  if (!res.has_gender_number()) return out;
  if (auto gn = infer_gender_number(head_word(doc, s), res)) {
    if (gn->g != gender::unknown) out.push_back({"inf|gender=" + std::string(to_string(gn->g))});
    if (gn->n != number::unknown) out.push_back({"inf|number=" + std::string(to_string(gn->n))});
  }
  return out;
}

// All enabled span-only detection classes.
inline feature_list detection_features(const document& doc, token_span s, const resource_bundle& res,
                                       const class_set& classes) {
  feature_list out{{"bias", 1.0}};
  auto append = [&](feature_list fs) { out.insert(out.end(), fs.begin(), fs.end()); };
  if (classes.has(feature_class::lexical)) append(extract_lexical(doc, s));
  if (classes.has(feature_class::syntactic)) append(extract_syntactic(doc, s));
  if (classes.has(feature_class::pattern)) append(extract_pattern(doc, s, res));
  if (classes.has(feature_class::semantic)) append(extract_semantic(doc, s, res));
  if (classes.has(feature_class::class_based)) append(extract_class(doc, s, res));
  if (classes.has(feature_class::list)) append(extract_list(doc, s, res));
  if (classes.has(feature_class::inference)) append(extract_inference(doc, s, res));
  return out;
}

// ---- hypothesis prefix view ------------------------------------------------

struct prior_mention {
  token_span span;
  label lab;
  std::size_t chain = 0;
};

// What the state-dependent extractors may see of a hypothesis: its mentions
// (document order), chains (mention indices, chains by first mention) and the
// labels of its last two chunks.
struct prefix_view {
  std::size_t covered = 0;
  std::vector<prior_mention> mentions;
  std::vector<std::vector<std::size_t>> chains;
  std::string last_label = "^";
  std::string second_last_label = "^";
};

inline prefix_view make_prefix_view(const hypothesis& h, const inventory& inv) {
  prefix_view v;
  v.covered = h.covered();
  for (const auto& m : h.mentions()) v.mentions.push_back({{m.start, m.end}, m.lab, m.chain});
  v.chains = h.chains();
  const auto& chunks = h.chunks();
  auto name = [&](const chunk& c) { return c.entity ? inv.label_name(c.lab) : std::string("O"); };
  if (!chunks.empty()) v.last_label = name(chunks.back());
  if (chunks.size() > 1) v.second_last_label = name(chunks[chunks.size() - 2]);
  return v;
}

// ---- state-dependent features ----------------------------------------------

// Markov label context, surrounding words within three tokens, and the last
// word of the previous mention.
inline feature_list boundary_span_features(const document& doc, token_span s) {
  feature_list out;
  const auto a = static_cast<std::ptrdiff_t>(s.start), b = static_cast<std::ptrdiff_t>(s.end);
  for (std::ptrdiff_t k = 1; k <= 3; ++k) {
    out.push_back({"bnd|w-" + std::to_string(k) + "=" + word_at(doc, a - k)});
    out.push_back({"bnd|w+" + std::to_string(k) + "=" + word_at(doc, b + k - 1)});
  }
  out.push_back({"bnd|first=" + word_at(doc, a)});
  out.push_back({"bnd|last=" + word_at(doc, b - 1)});
  return out;
}

inline feature_list boundary_state_features(const document& doc, const prefix_view& v) {
  feature_list out;
  out.push_back({"bnd|p1=" + v.last_label});
  out.push_back({"bnd|p2=" + v.second_last_label + "_" + v.last_label});
  out.push_back({"bnd|pml=" + (v.mentions.empty() ? std::string("^") : head_word(doc, v.mentions.back().span))});
  return out;
}

inline feature_list boundary_features(const document& doc, token_span s, const prefix_view& v) {
  auto out = boundary_span_features(doc, s);
  auto st = boundary_state_features(doc, v);
  out.insert(out.end(), st.begin(), st.end());
  return out;
}

// Earlier labels given to the same word forms.
inline feature_list extract_history(const document& doc, token_span s, const prefix_view& v, const inventory& inv) {
  std::set<std::string> names;
  for (std::size_t i = s.start; i < s.end; ++i) {
    const auto w = lowercase(doc.tokens[i].text);
    for (const auto& m : v.mentions)
      for (std::size_t j = m.span.start; j < m.span.end; ++j)
        if (lowercase(doc.tokens[j].text) == w) names.insert("his|prev=" + inv.label_name(m.lab));
  }
  feature_list out;
  for (auto& n : names) out.push_back({n});
  return out;
}

// sum over chain members of 0.5^d(m) / sum over all prior mentions, where the
// most recent prior mention has d = 1. `chain` holds indices into the prior
// mention list of length `prior`.
inline double decayed_density(std::span<const std::size_t> chain, std::size_t prior) {
  if (prior == 0) throw contract_violation("decayed density needs a prior mention");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < prior; ++i) den += std::ldexp(1.0, -static_cast<int>(prior - i));
  for (auto i : chain) num += std::ldexp(1.0, -static_cast<int>(prior - i));
  return num / den;
}

inline std::size_t sentence_of(const document& doc, std::size_t token) {
  return static_cast<std::size_t>(std::upper_bound(doc.sentence_ends.begin(), doc.sentence_ends.end(), token) -
                                  doc.sentence_ends.begin());
}

// Noun-chunk units strictly between two spans (Hobbs-style distance without a parse).
inline std::optional<std::size_t> noun_chunk_distance(const document& doc, std::size_t from_end, std::size_t to_start) {
  if (!doc.chunked()) return std::nullopt;
  std::size_t n = 0;
  for (std::size_t i = from_end; i < to_start; ++i)
    if (doc.tokens[i].chunk == "B-NP") ++n;
  return n;
}

// Chain-level count features for a mention at `s`: `chain` is the chain it
// would continue, or nullopt when it would start a new one.
inline feature_list extract_count(const document& doc, const prefix_view& v, token_span s,
                                  std::optional<std::size_t> chain) {
  feature_list out;
  const std::size_t mentions = v.mentions.size() + 1;
  const std::size_t entities = v.chains.size() + (chain ? 0 : 1);
  const std::size_t chain_size = chain ? v.chains.at(*chain).size() + 1 : 1;
  // Ratios per word count tokens up to the mention's first word, so the
  // features do not depend on the mention's length.
  const auto words = static_cast<double>(s.start + 1);
  out.push_back({"cnt|ents=" + bucket(entities, 10)});
  out.push_back({"cnt|ments=" + bucket(mentions, 10)});
  out.push_back({"cnt|csize=" + bucket(chain_size, 10)});
  emit_real(out, "cnt|epm", static_cast<double>(entities) / static_cast<double>(mentions));
  emit_real(out, "cnt|epw", static_cast<double>(entities) / words);
  emit_real(out, "cnt|mpw", static_cast<double>(mentions) / words);
  emit_real(out, "cnt|cfrac", static_cast<double>(chain_size) / static_cast<double>(mentions));
  if (!chain) return out;

  const auto& members = v.chains[*chain];
  emit_real(out, "cnt|dens", decayed_density(members, v.mentions.size()));
  const auto& last = v.mentions[members.back()];
  const std::size_t between = v.mentions.size() - 1 - members.back();
  std::size_t same_type = 0;
  for (std::size_t i = members.back() + 1; i < v.mentions.size(); ++i)
    if (v.mentions[i].lab.type == v.mentions[members.front()].lab.type) ++same_type;
  out.push_back({"cnt|imen=" + bucket(between, 5)});
  emit_real(out, "cnt|imen_r", 1.0 / (1.0 + static_cast<double>(between)));
  out.push_back({"cnt|imst=" + bucket(same_type, 5)});
  const std::size_t sentences = sentence_of(doc, s.start) - sentence_of(doc, last.span.start);
  out.push_back({"cnt|isent=" + bucket(sentences, 3)});
  if (auto h = noun_chunk_distance(doc, last.span.end, s.start)) {
    out.push_back({"cnt|hobbs=" + bucket(*h, 5)});
    emit_real(out, "cnt|hobbs_r", 1.0 / (1.0 + static_cast<double>(*h)));
  }
  return out;
}

// Chain-level bases for start/continue decisions: bias, current words, counts.
inline feature_list chain_features(const document& doc, const prefix_view& v, token_span s,
                                   std::optional<std::size_t> chain, const class_set& classes) {
  feature_list out{{"bias", 1.0}};
  if (classes.has(feature_class::lexical))
    for (std::size_t i = s.start; i < s.end; ++i) out.push_back({"lex|cw=" + lowercase(doc.tokens[i].text)});
  if (classes.has(feature_class::count)) {
    auto c = extract_count(doc, v, s, chain);
    out.insert(out.end(), c.begin(), c.end());
  }
  return out;
}

// ---- pair features (current span against one antecedent span) -------------

inline feature_list extract_string_match(const document& doc, token_span cur, token_span ant) {
  feature_list out;
  const auto x = span_text(doc, cur), a = span_text(doc, ant);
  if (x == a) out.push_back({"str|exact"});
  else if (x.find(a) != std::string::npos || a.find(x) != std::string::npos) out.push_back({"str|sub"});
  bool overlap = false, nat = false;
  for (std::size_t i = cur.start; i < cur.end; ++i)
    for (std::size_t j = ant.start; j < ant.end; ++j) {
      overlap |= lowercase(doc.tokens[i].text) == lowercase(doc.tokens[j].text);
      nat |= nationality_match(doc.tokens[i].text, doc.tokens[j].text);
    }
  if (overlap) out.push_back({"str|overlap"});
  if (nat) out.push_back({"str|nat"});
  if (cur.size() == 1 && ant.size() == 1 && is_pronoun(x) && x == a) out.push_back({"str|pmatch"});
  if (head_word(doc, cur) == head_word(doc, ant)) out.push_back({"str|head"});
  emit_real(out, "str|ned", normalized_edit_distance(x, a));
  emit_real(out, "str|ved", vowel_discounted_edit_distance(x, a));
  emit_real(out, "str|jaro", jaro(x, a));
  if (acronym_match(span_words(doc, cur), span_words(doc, ant))) out.push_back({"str|acro"});
  return out;
}

inline feature_list extract_knowledge(const document& doc, token_span cur, token_span ant,
                                      const resource_bundle& res) {
  feature_list out;
  if (!res.has_knowledge()) return out;
  if (res.knowledge_pair(span_text(doc, ant), head_word(doc, cur)) ||
      res.knowledge_pair(span_text(doc, cur), head_word(doc, ant)))
    out.push_back({"kno|pair"});
  return out;
}

inline feature_list pair_lexical(const document& doc, token_span cur, token_span ant) {
  return {{"lex|ahead=" + head_word(doc, ant)}, {"lex|hh=" + head_word(doc, ant) + "_" + head_word(doc, cur)}};
}

inline feature_list pair_syntactic(const document& doc, token_span cur, token_span ant) {
  if (!doc.tagged()) return {};
  return {{"syn|hpair=" + doc.tokens[ant.end - 1].pos + "_" + doc.tokens[cur.end - 1].pos}};
}

// Mined intervening strings (at most four words) and adjacent possessives.
inline feature_list pair_pattern(const document& doc, token_span cur, token_span ant, const resource_bundle& res) {
  feature_list out;
  if (cur.start < ant.end) return out;
  const std::size_t gap = cur.start - ant.end;
  if (gap >= 1 && gap <= 4) {
    std::vector<std::string> between;
    for (std::size_t i = ant.end; i < cur.start; ++i) between.push_back(lowercase(doc.tokens[i].text));
    for (const auto& p : res.coref_patterns()) {
      if (p.words != between) continue;
      std::string text;
      for (const auto& w : p.words) text += (text.empty() ? "" : "_") + w;
      out.push_back({std::string(p.positive ? "pat|ip+=" : "pat|ip-=") + text});
    }
    if (gap == 1 && doc.tokens[ant.end].text == "'s") out.push_back({"pat|posspair"});
  }
  return out;
}

inline feature_list pair_semantic(const document& doc, token_span cur, token_span ant, const resource_bundle& res) {
  feature_list out;
  if (!res.has_hypernyms()) return out;
  const auto hx = head_word(doc, cur), ha = head_word(doc, ant);
  if (res.part_of(hx, ha) || res.part_of(ha, hx)) out.push_back({"sem|partof"});
  if (auto d = res.graph_distance(hx, ha)) {
    out.push_back({"sem|dist=" + bucket(*d, 6)});
    emit_real(out, "sem|dist_r", 1.0 / (1.0 + static_cast<double>(*d)));
  }
  return out;
}

inline feature_list pair_class(const document& doc, token_span cur, token_span ant, const resource_bundle& res) {
  feature_list out;
  auto cx = res.cluster(head_word(doc, cur)), ca = res.cluster(head_word(doc, ant));
  if (cx && ca) {
    if (*cx == *ca) out.push_back({"cls|samecl"});
    out.push_back({"cls|cpair=" + *ca + "_" + *cx});
  }
  return out;
}

inline feature_list pair_list(const document& doc, token_span cur, token_span ant, const resource_bundle& res) {
  feature_list out;
  if (!res.has_gazetteers()) return out;
  const auto x = span_text(doc, cur), a = span_text(doc, ant);
  const auto& lx = res.lists_containing(x);
  const auto& la = res.lists_containing(a);
  if (x != a)
    for (const auto& l : lx)
      if (la.contains(l)) out.push_back({"lst|same=" + l});
  // "Russia" ... "the country"
  const auto hx = head_word(doc, cur), ha = head_word(doc, ant);
  if ((res.is_list_name(hx) && la.contains(hx)) || (res.is_list_name(ha) && lx.contains(ha)))
    out.push_back({"lst|headlist"});
  return out;
}

inline feature_list pair_inference(const document& doc, token_span cur, token_span ant, const resource_bundle& res) {
  feature_list out;
  if (!res.has_gender_number()) return out;
  auto gx = infer_gender_number(head_word(doc, cur), res);
  auto ga = infer_gender_number(head_word(doc, ant), res);
  if (!gx || !ga) return out;
  if (gx->g != gender::unknown && ga->g != gender::unknown) out.push_back({gx->g == ga->g ? "inf|gmatch" : "inf|gmis"});
  if (gx->n != number::unknown && ga->n != number::unknown) out.push_back({gx->n == ga->n ? "inf|nmatch" : "inf|nmis"});
  return out;
}

inline feature_list pair_features(const document& doc, token_span cur, token_span ant, const resource_bundle& res,
                                  const class_set& classes) {
  feature_list out;
  auto append = [&](feature_list fs) { out.insert(out.end(), fs.begin(), fs.end()); };
  if (classes.has(feature_class::lexical)) append(pair_lexical(doc, cur, ant));
  if (classes.has(feature_class::syntactic)) append(pair_syntactic(doc, cur, ant));
  if (classes.has(feature_class::pattern)) append(pair_pattern(doc, cur, ant, res));
  if (classes.has(feature_class::semantic)) append(pair_semantic(doc, cur, ant, res));
  if (classes.has(feature_class::knowledge)) append(extract_knowledge(doc, cur, ant, res));
  if (classes.has(feature_class::class_based)) append(pair_class(doc, cur, ant, res));
  if (classes.has(feature_class::list)) append(pair_list(doc, cur, ant, res));
  if (classes.has(feature_class::inference)) append(pair_inference(doc, cur, ant, res));
  if (classes.has(feature_class::string_match)) append(extract_string_match(doc, cur, ant));
  return out;
}

// ---- decision features -----------------------------------------------------

// Names of the decision features a step fires, grouped by family.
struct decision_feature_names {
  std::vector<std::string> simple;    // crossed with detection bases
  std::string boundary;               // crossed with boundary bases
  std::vector<std::string> coref;     // crossed with chain and pair bases; empty in detection mode
};

// Label of a chain as seen by coreference decisions: its first mention's.
struct chain_summary {
  label first;
  mention_type last_mtype = mention_type::nam;
};

inline std::vector<std::string> simple_decision_names(const inventory& inv, const mention_decision& d) {
  if (!d.entity) return {"ent=no"};
  const auto& t = inv.type_name(d.lab);
  const auto m = std::string(to_string(d.lab.mtype));
  std::vector<std::string> out{"ent=yes", "type=" + t, "mtype=" + m, "pair=" + t + "+" + m};
  if (d.lab.subtype >= 0) out.push_back("sub=" + t + "." + inv.subtype_name(d.lab));
  return out;
}

inline std::string boundary_decision_name(const inventory& inv, const mention_decision& d) {
  return d.entity ? "lab=" + inv.label_name(d.lab) : std::string("lab=O");
}

inline std::vector<std::string> coref_decision_names(const inventory& inv, const mention_decision& d,
                                                     const std::optional<chain_summary>& chain) {
  if (!d.entity) return {};
  const auto& t = inv.type_name(d.lab);
  const auto m = std::string(to_string(d.lab.mtype));
  if (!chain) {
    std::vector<std::string> out{"chain=start", "stype=" + t, "smt=" + m};
    if (d.lab.subtype >= 0) out.push_back("ssub=" + t + "." + inv.subtype_name(d.lab));
    return out;
  }
  const auto& ct = inv.type_name(chain->first);
  std::vector<std::string> out{"chain=cont", "ctype=" + ct, "cpair=" + std::string(to_string(chain->last_mtype)) + ">" + m,
                               "ctt=" + ct + ">" + t};
  if (chain->first.subtype >= 0) out.push_back("csub=" + ct + "." + inv.subtype_name(chain->first));
  return out;
}

// Every decision feature name the inventory can produce, in a fixed order.
// Interning these first keeps decision ids small and dense.
inline std::vector<std::string> all_decision_names(const inventory& inv) {
  std::vector<std::string> out{"ent=no", "ent=yes", "lab=O", "chain=start", "chain=cont"};
  for (const auto& m : inv.mention_types()) {
    out.push_back("mtype=" + std::string(to_string(m)));
    out.push_back("smt=" + std::string(to_string(m)));
    for (const auto& m2 : inv.mention_types())
      out.push_back("cpair=" + std::string(to_string(m)) + ">" + std::string(to_string(m2)));
  }
  for (const auto& ty : inv.types()) {
    out.push_back("type=" + ty.name);
    out.push_back("stype=" + ty.name);
    out.push_back("ctype=" + ty.name);
    for (const auto& m : inv.mention_types()) out.push_back("pair=" + ty.name + "+" + std::string(to_string(m)));
    for (const auto& sub : ty.subtypes) {
      out.push_back("sub=" + ty.name + "." + sub);
      out.push_back("ssub=" + ty.name + "." + sub);
      out.push_back("csub=" + ty.name + "." + sub);
    }
    for (const auto& ty2 : inv.types()) out.push_back("ctt=" + ty.name + ">" + ty2.name);
  }
  for (const auto& l : inv.labels()) out.push_back("lab=" + inv.label_name(l));
  return out;
}

inline bool is_coref_decision_name(std::string_view name) {
  for (std::string_view p : {"chain=", "stype=", "ssub=", "smt=", "ctype=", "csub=", "cpair=", "ctt="})
    if (name.starts_with(p)) return true;
  return false;
}

}  // namespace laso::edt
