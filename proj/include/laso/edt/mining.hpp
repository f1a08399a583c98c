// Resource mining from gold-annotated corpora: intervening-string coreference
// patterns, collocations and a gender/number lexicon.
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "laso/edt/document.hpp"
#include "laso/edt/features.hpp"
#include "laso/edt/resources.hpp"

namespace laso::edt {

// Average mutual information (nats) of a 2x2 table: n11 = feature and class,
// n10 = feature only, n01 = class only, n00 = neither.
inline double mutual_information(double n11, double n10, double n01, double n00) {
  const double n = n11 + n10 + n01 + n00;
  if (n <= 0) return 0.0;
  const double fx = (n11 + n10) / n, fy = (n11 + n01) / n;
  auto term = [&](double nxy, double px, double py) {
    if (nxy <= 0 || px <= 0 || py <= 0) return 0.0;
    const double pxy = nxy / n;
    return pxy * std::log(pxy / (px * py));
  };
  return term(n11, fx, fy) + term(n10, fx, 1 - fy) + term(n01, 1 - fx, fy) + term(n00, 1 - fx, 1 - fy);
}

// Dunning's log-likelihood ratio G^2 for a bigram (a, b).
// k11 = count(a b), k12 = count(a, not b), k21 = count(not a, b), k22 = rest.
inline double log_likelihood_ratio(double k11, double k12, double k21, double k22) {
  auto xlogx = [](double x) { return x > 0 ? x * std::log(x) : 0.0; };
  const double n = k11 + k12 + k21 + k22;
  const double rows = xlogx(k11 + k12) + xlogx(k21 + k22);
  const double cols = xlogx(k11 + k21) + xlogx(k12 + k22);
  const double cells = xlogx(k11) + xlogx(k12) + xlogx(k21) + xlogx(k22);
  return std::max(0.0, 2.0 * (cells - rows - cols + xlogx(n)));
}

namespace detail {
inline void require_gold(const std::vector<document>& docs) {
  for (const auto& d : docs)
    if (!d.mentions.empty()) return;
  throw std::invalid_argument("resource mining needs a gold-annotated corpus");
}
}  // namespace detail

// Mention pairs separated by 1..max_gap tokens, labeled coreferent or not; the
// intervening word string is the candidate pattern. Ranked by mutual
// information with the label.
inline std::vector<coref_pattern> mine_patterns(const std::vector<document>& docs, std::size_t top = 20,
                                                std::size_t max_gap = 4) {
  detail::require_gold(docs);
  struct counts {
    double coref = 0, other = 0;
  };
  std::map<std::vector<std::string>, counts> table;
  double total_coref = 0, total_other = 0;
  for (const auto& d : docs) {
    auto ms = d.mentions;
    std::stable_sort(ms.begin(), ms.end(), [](const auto& a, const auto& b) { return a.start < b.start; });
    for (std::size_t i = 0; i < ms.size(); ++i)
      for (std::size_t j = i + 1; j < ms.size(); ++j) {
        if (ms[j].start < ms[i].end) continue;
        const std::size_t gap = ms[j].start - ms[i].end;
        if (gap > max_gap) break;
        if (gap == 0) continue;
        std::vector<std::string> words;
        for (std::size_t t = ms[i].end; t < ms[j].start; ++t) words.push_back(lowercase(d.tokens[t].text));
        const bool same = ms[i].entity_id == ms[j].entity_id;
        auto& c = table[words];
        (same ? c.coref : c.other) += 1;
        (same ? total_coref : total_other) += 1;
      }
  }
  std::vector<coref_pattern> out;
  const double base = total_coref / std::max(1.0, total_coref + total_other);
  for (const auto& [words, c] : table) {
    const double mi = mutual_information(c.coref, c.other, total_coref - c.coref, total_other - c.other);
    out.push_back({words, c.coref / (c.coref + c.other) >= base, mi});
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.score > b.score; });
  if (out.size() > top) out.resize(top);
  return out;
}

struct collocation {
  std::string first, second;
  double score = 0;
  std::size_t count = 0;
};

// Adjacent lowercased word pairs within sentences, ranked by G^2.
inline std::vector<collocation> mine_collocations(const std::vector<document>& docs, std::size_t top = 100,
                                                  std::size_t min_count = 2) {
  std::map<std::pair<std::string, std::string>, std::size_t> bigrams;
  std::map<std::string, std::size_t> firsts, seconds;
  std::size_t total = 0;
  for (const auto& d : docs) {
    std::size_t sentence_end = 0, s = 0;
    for (std::size_t i = 0; i + 1 < d.size(); ++i) {
      while (s < d.sentence_ends.size() && d.sentence_ends[s] <= i) ++s;
      sentence_end = s < d.sentence_ends.size() ? d.sentence_ends[s] : d.size();
      if (i + 1 >= sentence_end) continue;
      const auto a = lowercase(d.tokens[i].text), b = lowercase(d.tokens[i + 1].text);
      ++bigrams[{a, b}];
      ++firsts[a];
      ++seconds[b];
      ++total;
    }
  }
  std::vector<collocation> out;
  for (const auto& [ab, k] : bigrams) {
    if (k < min_count) continue;
    const double k11 = static_cast<double>(k);
    const double k12 = static_cast<double>(firsts[ab.first]) - k11;
    const double k21 = static_cast<double>(seconds[ab.second]) - k11;
    const double k22 = static_cast<double>(total) - k11 - k12 - k21;
    out.push_back({ab.first, ab.second, log_likelihood_ratio(k11, k12, k21, k22), k});
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.score > b.score; });
  if (out.size() > top) out.resize(top);
  return out;
}

struct gender_number_entry {
  std::string word;
  gender_number value;
  std::size_t evidence = 0;
};

struct gender_number_mining {
  std::vector<gender_number_entry> entries;
  std::vector<std::string> dropped;  // conflicting evidence
};

// Head words of non-pronoun mentions inherit the gender and number of the
// pronouns they corefer with. Words with conflicting evidence are dropped.
inline gender_number_mining mine_gender_number(const std::vector<document>& docs) {
  detail::require_gold(docs);
  struct evidence {
    std::optional<gender> g;
    std::optional<number> n;
    bool conflict = false;
    std::size_t count = 0;
  };
  std::map<std::string, evidence> words;
  for (const auto& d : docs) {
    std::map<std::string, std::vector<const gold_mention*>> chains;
    for (const auto& m : d.mentions) chains[m.entity_id].push_back(&m);
    for (const auto& [id, ms] : chains) {
      std::vector<gender_number> pronouns;
      for (const auto* m : ms)
        if (m->mtype == mention_type::pro)
          if (auto gn = pronoun_gender_number(d.tokens[m->end - 1].text)) pronouns.push_back(*gn);
      if (pronouns.empty()) continue;
      for (const auto* m : ms) {
        if (m->mtype == mention_type::pro) continue;
        auto& e = words[lowercase(d.tokens[m->end - 1].text)];
        for (const auto& gn : pronouns) {
          ++e.count;
          if (gn.g != gender::unknown) {
            if (e.g && *e.g != gn.g) e.conflict = true;
            e.g = gn.g;
          }
          if (gn.n != number::unknown) {
            if (e.n && *e.n != gn.n) e.conflict = true;
            e.n = gn.n;
          }
        }
      }
    }
  }
  gender_number_mining out;
  for (const auto& [w, e] : words) {
    if (e.conflict) {
      out.dropped.push_back(w);
      continue;
    }
    out.entries.push_back({w, {e.g.value_or(gender::unknown), e.n.value_or(number::unknown)}, e.count});
  }
  return out;
}

inline void write_patterns(std::ostream& out, const std::vector<coref_pattern>& ps) {
  for (const auto& p : ps) {
    std::string text;
    for (const auto& w : p.words) text += (text.empty() ? "" : " ") + w;
    out << text << '\t' << (p.positive ? '+' : '-') << '\t' << p.score << '\n';
  }
}

inline void write_collocations(std::ostream& out, const std::vector<collocation>& cs) {
  for (const auto& c : cs) out << c.first << '\t' << c.second << '\t' << c.score << '\n';
}

inline void write_gender_number(std::ostream& out, const gender_number_mining& m) {
  auto g = [](gender x) { return x == gender::unknown ? std::string("-") : std::string(to_string(x)); };
  auto n = [](number x) { return x == number::unknown ? std::string("-") : std::string(to_string(x)); };
  for (const auto& e : m.entries) out << e.word << '\t' << g(e.value.g) << '\t' << n(e.value.n) << '\n';
}

}  // namespace laso::edt
