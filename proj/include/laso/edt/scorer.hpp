// Mention P/R/F and an ACE-style 0-100 entity score.
//
// Mentions are aligned one-to-one among overlapping pairs, maximizing the
// number of pairs and then the total token overlap. Entities are then aligned
// by the number of aligned mention pairs they share (entity type agreement
// breaks ties). Costs:
//   unmatched reference entity   miss * value(ref)
//   unmatched system entity      fa * value(sys)
//   matched pair                 type * value(ref) if types differ, plus miss/fa
//                                for each mention missing from either side
// where value(e) = type_weight(type(e)) * sum of mtype_weight over e's mentions.
// score = 100 * max(0, 1 - cost / (miss * sum of reference values)).
#pragma once

#include <algorithm>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "laso/edt/document.hpp"

namespace laso::edt {

struct cost_model {
  double miss = 1.0;
  double false_alarm = 0.75;
  double type_error = 0.5;
  std::map<std::string, double> type_weights;  // missing types weigh 1
  double nam_weight = 1.0;
  double nom_weight = 0.5;
  double pro_weight = 0.1;

  double type_weight(const std::string& t) const {
    auto it = type_weights.find(t);
    return it == type_weights.end() ? 1.0 : it->second;
  }
  double mtype_weight(mention_type m) const {
    switch (m) {
      case mention_type::nam: return nam_weight;
      case mention_type::nom: return nom_weight;
      case mention_type::pro: return pro_weight;
    }
    return 1.0;
  }
  void validate() const {
    if (miss < 0 || false_alarm < 0 || type_error < 0 || nam_weight < 0 || nom_weight < 0 || pro_weight < 0)
      throw std::invalid_argument("cost weights must be nonnegative");
    for (const auto& [t, w] : type_weights)
      if (w < 0) throw std::invalid_argument("cost weights must be nonnegative");
  }
};

// Maximum-weight assignment. weight[i][j] <= 0 means "not allowed".
// Returns for each row the matched column or -1.
inline std::vector<int> max_weight_assignment(const std::vector<std::vector<double>>& weight) {
  const std::size_t rows = weight.size();
  if (rows == 0) return {};
  const std::size_t cols = weight[0].size();
  std::vector<int> result(rows, -1);
  if (cols == 0) return result;
  const bool transpose = rows > cols;
  const std::size_t n = transpose ? cols : rows;
  const std::size_t m = transpose ? rows : cols;
  auto cost = [&](std::size_t i, std::size_t j) {
    const double w = transpose ? weight[j][i] : weight[i][j];
    return w > 0 ? -w : 0.0;
  };
  // Shortest augmenting paths with potentials, 1-based.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<bool> used(m + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) minv[j] = cur, way[j] = j0;
        if (minv[j] < delta) delta = minv[j], j1 = j;
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) u[p[j]] += delta, v[j] -= delta;
        else minv[j] -= delta;
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  for (std::size_t j = 1; j <= m; ++j) {
    if (p[j] == 0) continue;
    const std::size_t i = p[j] - 1, c = j - 1;
    const std::size_t r = transpose ? c : i, k = transpose ? i : c;
    if (weight[r][k] > 0) result[r] = static_cast<int>(k);
  }
  return result;
}

struct scored_mention {
  std::size_t start = 0, end = 0;
  std::string type;
  mention_type mtype = mention_type::nam;
  std::size_t entity = 0;
};

struct scored_entity {
  std::vector<std::size_t> mentions;  // indices, document order
  std::string type;                   // majority type, first mention on ties
};

struct annotation {
  std::vector<scored_mention> mentions;
  std::vector<scored_entity> entities;  // ordered by first mention
};

// `own_entities`: every mention becomes its own entity.
inline annotation annotation_of(const document& doc, bool own_entities = false) {
  annotation a;
  std::vector<gold_mention> ms = doc.mentions;
  std::stable_sort(ms.begin(), ms.end(), [](const auto& x, const auto& y) { return x.start < y.start; });
  std::unordered_map<std::string, std::size_t> index;
  for (const auto& m : ms) {
    std::size_t e;
    if (own_entities) {
      e = a.entities.size();
      a.entities.emplace_back();
    } else {
      auto [it, fresh] = index.emplace(m.entity_id, a.entities.size());
      if (fresh) a.entities.emplace_back();
      e = it->second;
    }
    a.entities[e].mentions.push_back(a.mentions.size());
    a.mentions.push_back({m.start, m.end, m.entity_type, m.mtype, e});
  }
  for (auto& e : a.entities) {
    std::vector<std::pair<std::string, std::size_t>> counts;
    for (auto i : e.mentions) {
      auto it = std::find_if(counts.begin(), counts.end(), [&](const auto& c) { return c.first == a.mentions[i].type; });
      if (it == counts.end()) counts.emplace_back(a.mentions[i].type, 1);
      else ++it->second;
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < counts.size(); ++i)
      if (counts[i].second > counts[best].second) best = i;
    e.type = counts[best].first;
  }
  return a;
}

inline std::size_t overlap(const scored_mention& a, const scored_mention& b) {
  const auto lo = std::max(a.start, b.start), hi = std::min(a.end, b.end);
  return hi > lo ? hi - lo : 0;
}

// For each system mention, the aligned reference mention or -1.
inline std::vector<int> align_mentions(const annotation& sys, const annotation& ref) {
  std::size_t tokens = 0;
  for (const auto& m : sys.mentions) tokens += m.end - m.start;
  for (const auto& m : ref.mentions) tokens += m.end - m.start;
  const double big = static_cast<double>(tokens + 1);
  std::vector<std::vector<double>> w(sys.mentions.size(), std::vector<double>(ref.mentions.size(), 0.0));
  for (std::size_t i = 0; i < sys.mentions.size(); ++i)
    for (std::size_t j = 0; j < ref.mentions.size(); ++j)
      if (auto o = overlap(sys.mentions[i], ref.mentions[j])) w[i][j] = big + static_cast<double>(o);
  return max_weight_assignment(w);
}

// For each system entity, the aligned reference entity or -1.
inline std::vector<int> align_entities(const annotation& sys, const annotation& ref,
                                       const std::vector<int>& mention_alignment) {
  std::vector<std::vector<double>> shared(sys.entities.size(), std::vector<double>(ref.entities.size(), 0.0));
  for (std::size_t i = 0; i < sys.mentions.size(); ++i)
    if (mention_alignment[i] >= 0)
      shared[sys.mentions[i].entity][ref.mentions[static_cast<std::size_t>(mention_alignment[i])].entity] += 1.0;
  const double big = static_cast<double>(sys.entities.size() + ref.entities.size() + 1);
  for (std::size_t i = 0; i < sys.entities.size(); ++i)
    for (std::size_t j = 0; j < ref.entities.size(); ++j)
      if (shared[i][j] > 0) shared[i][j] = shared[i][j] * big + (sys.entities[i].type == ref.entities[j].type ? 1 : 0);
  return max_weight_assignment(shared);
}

struct prf {
  std::size_t system = 0, reference = 0, correct = 0;
  double precision() const { return system ? static_cast<double>(correct) / static_cast<double>(system) : 1.0; }
  double recall() const { return reference ? static_cast<double>(correct) / static_cast<double>(reference) : 1.0; }
  double f1() const {
    const double p = precision(), r = recall();
    return p + r > 0 ? 2 * p * r / (p + r) : 0.0;
  }
  prf& operator+=(const prf& o) {
    system += o.system;
    reference += o.reference;
    correct += o.correct;
    return *this;
  }
};

struct score_report {
  prf mentions;                       // exact span and entity type
  std::map<std::string, prf> by_type;
  double cost = 0.0;
  double max_cost = 0.0;
  double miss_cost = 0.0, false_alarm_cost = 0.0, type_cost = 0.0;
  std::size_t documents = 0;
  struct pair {
    std::string doc;
    std::size_t sys_start, sys_end, ref_start, ref_end;
  };
  std::vector<pair> alignment;

  double score() const {
    if (max_cost <= 0) return cost <= 0 ? 100.0 : 0.0;
    return 100.0 * std::max(0.0, 1.0 - cost / max_cost);
  }

  score_report& operator+=(const score_report& o) {
    mentions += o.mentions;
    for (const auto& [t, p] : o.by_type) by_type[t] += p;
    cost += o.cost;
    max_cost += o.max_cost;
    miss_cost += o.miss_cost;
    false_alarm_cost += o.false_alarm_cost;
    type_cost += o.type_cost;
    documents += o.documents;
    alignment.insert(alignment.end(), o.alignment.begin(), o.alignment.end());
    return *this;
  }

  nlohmann::json to_json() const {
    nlohmann::json j{{"documents", documents},
                     {"ace_like", score()},
                     {"cost", cost},
                     {"max_cost", max_cost},
                     {"miss_cost", miss_cost},
                     {"false_alarm_cost", false_alarm_cost},
                     {"type_cost", type_cost},
                     {"mention", {{"precision", mentions.precision()},
                                  {"recall", mentions.recall()},
                                  {"f1", mentions.f1()},
                                  {"system", mentions.system},
                                  {"reference", mentions.reference},
                                  {"correct", mentions.correct}}}};
    for (const auto& [t, p] : by_type)
      j["by_type"][t] = {{"precision", p.precision()}, {"recall", p.recall()}, {"f1", p.f1()},
                         {"system", p.system}, {"reference", p.reference}, {"correct", p.correct}};
    return j;
  }

  std::string table() const {
    std::ostringstream out;
    out << std::fixed << std::setprecision(2);
    out << "documents  " << documents << "\n";
    out << "ace-like   " << score() << "\n";
    out << "cost       " << cost << " / " << max_cost << " (miss " << miss_cost << ", fa " << false_alarm_cost
        << ", type " << type_cost << ")\n\n";
    out << std::left << std::setw(8) << "type" << std::right << std::setw(8) << "sys" << std::setw(8) << "ref"
        << std::setw(8) << "ok" << std::setw(8) << "P" << std::setw(8) << "R" << std::setw(8) << "F" << "\n";
    auto row = [&](const std::string& name, const prf& p) {
      out << std::left << std::setw(8) << name << std::right << std::setw(8) << p.system << std::setw(8)
          << p.reference << std::setw(8) << p.correct << std::setw(8) << 100 * p.precision() << std::setw(8)
          << 100 * p.recall() << std::setw(8) << 100 * p.f1() << "\n";
    };
    for (const auto& [t, p] : by_type) row(t, p);
    row("all", mentions);
    return out.str();
  }
};

inline score_report score_annotations(const annotation& sys, const annotation& ref, const cost_model& costs,
                                      const std::string& doc_id = {}) {
  score_report r;
  r.documents = 1;
  for (const auto& m : ref.mentions) {
    ++r.mentions.reference;
    ++r.by_type[m.type].reference;
  }
  for (const auto& m : sys.mentions) {
    ++r.mentions.system;
    ++r.by_type[m.type].system;
  }
  const auto malign = align_mentions(sys, ref);
  for (std::size_t i = 0; i < sys.mentions.size(); ++i) {
    if (malign[i] < 0) continue;
    const auto& s = sys.mentions[i];
    const auto& g = ref.mentions[static_cast<std::size_t>(malign[i])];
    r.alignment.push_back({doc_id, s.start, s.end, g.start, g.end});
    if (s.start == g.start && s.end == g.end && s.type == g.type) {
      ++r.mentions.correct;
      ++r.by_type[s.type].correct;
    }
  }
  const auto ealign = align_entities(sys, ref, malign);

  auto mention_value = [&](const scored_mention& m, const std::string& type) {
    return costs.type_weight(type) * costs.mtype_weight(m.mtype);
  };
  auto entity_value = [&](const annotation& a, const scored_entity& e) {
    double v = 0;
    for (auto i : e.mentions) v += mention_value(a.mentions[i], e.type);
    return v;
  };

  for (const auto& e : ref.entities) r.max_cost += costs.miss * entity_value(ref, e);

  std::vector<bool> ref_matched(ref.entities.size(), false);
  for (std::size_t si = 0; si < sys.entities.size(); ++si) {
    const auto& se = sys.entities[si];
    if (ealign[si] < 0) {
      r.false_alarm_cost += costs.false_alarm * entity_value(sys, se);
      continue;
    }
    const auto ri = static_cast<std::size_t>(ealign[si]);
    ref_matched[ri] = true;
    const auto& re = ref.entities[ri];
    if (se.type != re.type) r.type_cost += costs.type_error * entity_value(ref, re);
    std::vector<bool> covered(ref.mentions.size(), false);
    for (auto i : se.mentions) {
      const bool inside = malign[i] >= 0 && ref.mentions[static_cast<std::size_t>(malign[i])].entity == ri;
      if (inside) covered[static_cast<std::size_t>(malign[i])] = true;
      else r.false_alarm_cost += costs.false_alarm * mention_value(sys.mentions[i], se.type);
    }
    for (auto j : re.mentions)
      if (!covered[j]) r.miss_cost += costs.miss * mention_value(ref.mentions[j], re.type);
  }
  for (std::size_t ri = 0; ri < ref.entities.size(); ++ri)
    if (!ref_matched[ri]) r.miss_cost += costs.miss * entity_value(ref, ref.entities[ri]);
  r.cost = r.miss_cost + r.false_alarm_cost + r.type_cost;
  return r;
}

// `detection_only`: every mention is its own entity on both sides.
inline score_report score_document(const document& sys, const document& ref, const cost_model& costs = {},
                                   bool detection_only = false) {
  return score_annotations(annotation_of(sys, detection_only), annotation_of(ref, detection_only), costs, ref.id);
}

// Documents are paired by id; costs are summed before normalizing.
inline score_report score_corpus(const std::vector<document>& sys, const std::vector<document>& ref,
                                 const cost_model& costs = {}, bool detection_only = false) {
  std::unordered_map<std::string, const document*> by_id;
  for (const auto& d : sys)
    if (!by_id.emplace(d.id, &d).second) throw std::invalid_argument("duplicate system document '" + d.id + "'");
  score_report total;
  for (const auto& r : ref) {
    auto it = by_id.find(r.id);
    if (it == by_id.end()) throw std::invalid_argument("no system output for document '" + r.id + "'");
    total += score_document(*it->second, r, costs, detection_only);
    by_id.erase(it);
  }
  if (!by_id.empty()) throw std::invalid_argument("system document '" + by_id.begin()->first + "' has no reference");
  return total;
}

}  // namespace laso::edt
