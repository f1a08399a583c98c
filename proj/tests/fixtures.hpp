// Shared fixtures and reference implementations for the tests.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "laso/edt/corpus.hpp"
#include "laso/edt/hypothesis.hpp"
#include "laso/edt/linkage.hpp"
#include "laso/edt/problem.hpp"
#include "laso/sparse_vector.hpp"

namespace fixtures {

using namespace laso;
using namespace laso::edt;

inline document make_doc(const std::string& id, const std::vector<std::string>& words,
                         std::vector<gold_mention> mentions = {}, std::vector<std::size_t> sentences = {}) {
  document d;
  d.id = id;
  for (const auto& w : words) d.tokens.push_back({w, "", ""});
  d.mentions = std::move(mentions);
  d.sentence_ends = std::move(sentences);
  validate_document(d);
  return d;
}

// "Bill Clinton gave a speech today to the Senate . The President outlined
// his plan for budget reform to them ."
inline document clinton() {
  return make_doc("clinton",
                  {"Bill", "Clinton", "gave", "a", "speech", "today", "to", "the", "Senate", ".", "The",
                   "President", "outlined", "his", "plan", "for", "budget", "reform", "to", "them", "."},
                  {{0, 2, "PER", "", mention_type::nam, "e1"},
                   {7, 9, "ORG", "", mention_type::nam, "e2"},
                   {10, 12, "PER", "", mention_type::nom, "e1"},
                   {13, 14, "PER", "", mention_type::pro, "e1"},
                   {19, 20, "ORG", "", mention_type::pro, "e2"}},
                  {10, 21});
}

inline const char* clinton_jsonl =
    R"({"id":"clinton","tokens":["Bill","Clinton","gave","a","speech","today","to","the","Senate",".","The","President","outlined","his","plan","for","budget","reform","to","them","."],"sentences":[10,21],"mentions":[{"start":0,"end":2,"type":"PER","mtype":"NAM","entity":"e1"},{"start":7,"end":9,"type":"ORG","mtype":"NAM","entity":"e2"},{"start":10,"end":12,"type":"PER","mtype":"NOM","entity":"e1"},{"start":13,"end":14,"type":"PER","mtype":"PRO","entity":"e1"},{"start":19,"end":20,"type":"ORG","mtype":"PRO","entity":"e2"}]})";

inline inventory types_of(std::initializer_list<const char*> names,
                          std::vector<mention_type> mtypes = {mention_type::nam, mention_type::nom, mention_type::pro}) {
  std::vector<entity_type_spec> ts;
  for (const auto* n : names) ts.push_back({n, {}});
  return inventory(std::move(ts), std::move(mtypes));
}

// Walks decisions from the root.
inline node_ptr walk(const std::vector<mention_decision>& path) {
  node_ptr n = make_root();
  for (const auto& d : path) n = make_child(n, d, 0.0);
  return n;
}

// Exhaustive search: every complete decision sequence, each scored as
// w . Phi(path) from materialized step features.
struct exhaustive_result {
  double best = -std::numeric_limits<double>::infinity();
  std::vector<mention_decision> argmax;
  std::size_t goals = 0;
  std::size_t near_best = 0;  // goals within `tie` of best (filled by a second pass)
};

inline exhaustive_result exhaustive_search(const edt_problem& p, const weight_vector& w, double tie = 1e-9) {
  exhaustive_result r;
  std::vector<double> finals;
  const std::size_t n = p.doc().size();
  std::function<void(const node_ptr&, double)> dfs = [&](const node_ptr& node, double score) {
    if (node->covered == n) {
      ++r.goals;
      finals.push_back(score);
      if (score > r.best) {
        r.best = score;
        r.argmax = decision_path(*node);
      }
      return;
    }
    for (const auto& d : successor_decisions(node->covered, node->chain_count, n, p.space())) {
      auto child = make_child(node, d, 0.0);
      dfs(child, score + w.dot(p.step_features(*child, w)));
    }
  };
  dfs(make_root(), 0.0);
  for (double s : finals)
    if (s >= r.best - tie) ++r.near_best;
  return r;
}

// Brute force over all partial injective matchings on positive weights: the
// largest total weight.
inline double brute_force_matching(const std::vector<std::vector<double>>& w) {
  const std::size_t rows = w.size();
  const std::size_t cols = rows ? w[0].size() : 0;
  double best = 0;
  std::vector<bool> used(cols, false);
  std::function<void(std::size_t, double)> go = [&](std::size_t i, double acc) {
    if (i == rows) {
      best = std::max(best, acc);
      return;
    }
    go(i + 1, acc);
    for (std::size_t j = 0; j < cols; ++j)
      if (!used[j] && w[i][j] > 0) {
        used[j] = true;
        go(i + 1, acc + w[i][j]);
        used[j] = false;
      }
  };
  go(0, 0);
  return best;
}

// Intelligent link as a rule table: per current mention type, rules tried in
// order; each names the chain members it selects and how they combine.
inline link_selection intelligent_by_table(mention_type current, const std::vector<mention_type>& chain) {
  enum class pick { first, last, all };
  struct rule {
    std::vector<mention_type> members;
    pick which;
    aggregation agg;
  };
  using mt = mention_type;
  static const std::vector<rule> nam{{{mt::nam}, pick::first, aggregation::sum},
                                     {{mt::nom}, pick::last, aggregation::sum}};
  static const std::vector<rule> nom{{{mt::nom}, pick::all, aggregation::max},
                                     {{mt::nam}, pick::last, aggregation::sum}};
  static const std::vector<rule> pro{{{mt::pro, mt::nam}, pick::all, aggregation::mean}};
  const auto& rules = current == mt::nam ? nam : current == mt::nom ? nom : pro;
  for (const auto& r : rules) {
    std::vector<std::size_t> hits;
    for (std::size_t i = 0; i < chain.size(); ++i)
      if (std::find(r.members.begin(), r.members.end(), chain[i]) != r.members.end()) hits.push_back(i);
    if (hits.empty()) continue;
    if (r.which == pick::first) return {{hits.front()}, r.agg};
    if (r.which == pick::last) return {{hits.back()}, r.agg};
    return {hits, r.agg};
  }
  link_selection all{{}, aggregation::max};
  for (std::size_t i = 0; i < chain.size(); ++i) all.targets.push_back(i);
  return all;
}

// Every chain of 1..max_size mention types.
inline std::vector<std::vector<mention_type>> chain_compositions(std::size_t max_size) {
  std::vector<std::vector<mention_type>> out, frontier{{}};
  for (std::size_t size = 1; size <= max_size; ++size) {
    std::vector<std::vector<mention_type>> next;
    for (const auto& c : frontier)
      for (auto m : {mention_type::nam, mention_type::nom, mention_type::pro}) {
        auto d = c;
        d.push_back(m);
        next.push_back(d);
      }
    out.insert(out.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  return out;
}

// Gaussian weights on every (base, decision) pair known to the model.
inline weight_vector gaussian_weights(const edt_model& m, std::uint64_t seed, double sd = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, sd);
  weight_vector w;
  const auto decisions = static_cast<feature_id>(m.decisions.size());
  for (feature_id b = 0; b < m.registry.size(); ++b)
    for (feature_id d = 0; d < decisions; ++d) w.set(make_meta_key(b, d), g(rng));
  return w;
}

}  // namespace fixtures
