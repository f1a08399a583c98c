// Training and decoding drivers: counting pass, cutoff, online passes with
// the joint-training compensation, and corpus-level prediction.
#pragma once

#include <algorithm>
#include <chrono>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "laso/edt/config.hpp"
#include "laso/edt/corpus.hpp"
#include "laso/edt/hypothesis.hpp"
#include "laso/edt/problem.hpp"
#include "laso/edt/scorer.hpp"
#include "laso/search.hpp"

namespace laso::edt {

struct trained_model {
  run_config config;
  std::shared_ptr<const resource_bundle> resources;
  std::unique_ptr<edt_model> model;
  weight_vector w;
  std::size_t k = 1;
};

struct pass_stats {
  std::size_t pass = 0;
  std::size_t updates = 0;
  std::size_t documents_with_updates = 0;
  std::size_t expansions = 0;
  double seconds = 0;
};

struct train_report {
  std::vector<pass_stats> passes;
  std::size_t counted_features = 0;
  std::size_t active_features = 0;
};

struct train_options {
  std::function<void(const pass_stats&)> on_pass;
  // Called after every update; `gated` tells whether coreference entries were removed.
  std::function<void(const update_event<node_ptr>&, bool gated)> on_update;
  bool audit_monotonicity = false;
};

// Skeleton of a document's annotated mentions under an inventory.
inline skeleton skeleton_of(const document& doc, const inventory& inv) {
  std::vector<skeleton::entry> entries;
  for (const auto& m : doc.mentions) {
    auto lab = resolve_label(m, inv);
    if (!lab)
      throw unreachable_gold("document '" + doc.id + "': mention at token " + std::to_string(m.start) +
                             " has a label outside the inventory");
    entries.push_back({m.start, m.end, *lab});
  }
  return skeleton(std::move(entries), doc.size());
}

// True when the node's path equals the gold path in everything but links.
inline bool mentions_match_gold(const hyp_node& node, const gold_standard& gold) {
  if (node.depth > gold.path.size()) return false;
  const hyp_node* n = &node;
  for (std::size_t i = node.depth; i-- > 0; n = n->parent.get()) {
    const auto& a = n->decision;
    const auto& b = gold.path[i];
    if (a.length != b.length || a.entity != b.entity || (a.entity && !(a.lab == b.lab))) return false;
  }
  return true;
}

namespace detail {
struct prepared_document {
  const document* doc = nullptr;
  gold_standard gold;
  std::unique_ptr<skeleton> mentions;
  std::unique_ptr<edt_problem> problem;
  // head-start: detection-only gold and problem for the first pass
  std::unique_ptr<gold_standard> detect_gold;
  std::unique_ptr<edt_problem> detect_problem;
};

inline search_space space_for(const run_config& cfg, search_mode mode, const skeleton* sk) {
  search_space s;
  s.mode = mode;
  s.mentions = sk;
  s.pronoun_types_given = cfg.pronoun_types_given();
  return s;
}
}  // namespace detail

inline trained_model make_untrained(const run_config& cfg, std::shared_ptr<const resource_bundle> res) {
  cfg.validate();
  trained_model m;
  m.config = cfg;
  m.resources = res ? std::move(res) : std::make_shared<const resource_bundle>();
  m.model = std::make_unique<edt_model>(cfg.spec(), *m.resources);
  m.model->grow = false;
  return m;
}

inline trained_model train_model(const run_config& cfg, std::shared_ptr<const resource_bundle> res,
                                 const std::vector<document>& docs, const train_options& opts = {},
                                 train_report* report = nullptr) {
  trained_model tm = make_untrained(cfg, std::move(res));
  edt_model& model = *tm.model;
  const auto& inv = model.spec.labels;
  const bool detect = cfg.mode == run_mode::pipeline_detect;
  const bool head_start = cfg.mode == run_mode::joint && cfg.comp == compensation::head_start;

  std::vector<detail::prepared_document> prepared(docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) {
    auto& p = prepared[i];
    p.doc = &docs[i];
    p.gold = make_gold(docs[i], inv, cfg.max_length, detect);
    if (cfg.search() == search_mode::coref) p.mentions = std::make_unique<skeleton>(skeleton_of(docs[i], inv));
    if (head_start) p.detect_gold = std::make_unique<gold_standard>(make_gold(docs[i], inv, cfg.max_length, true));
  }

  // Counting pass along the gold paths, then the cutoff.
  model.grow = true;
  {
    const weight_vector zero;
    for (auto& p : prepared) {
      edt_problem prob(model, *p.doc, detail::space_for(cfg, cfg.search(), p.mentions.get()), &p.gold);
      const auto path = prob.gold_path();
      for (std::size_t i = 1; i < path.size(); ++i)
        for (const auto& e : prob.step_features(*path[i], zero)) model.registry.add_count(e.key);
    }
  }
  model.registry.apply_cutoff(cfg.cutoff);
  model.grow = false;
  if (report) {
    report->counted_features = model.registry.counted();
    report->active_features = model.registry.active_keys().size();
  }

  for (auto& p : prepared) {
    p.problem = std::make_unique<edt_problem>(model, *p.doc, detail::space_for(cfg, cfg.search(), p.mentions.get()),
                                              &p.gold);
    if (head_start)
      p.detect_problem = std::make_unique<edt_problem>(
          model, *p.doc, detail::space_for(cfg, search_mode::detect, nullptr), p.detect_gold.get());
  }

  learner_state st;
  st.c = cfg.c;
  st.beam_size = cfg.beam;
  std::vector<std::size_t> order(prepared.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(cfg.seed);

  for (std::size_t pass = 1; pass <= cfg.passes; ++pass) {
    const auto t0 = std::chrono::steady_clock::now();
    std::shuffle(order.begin(), order.end(), rng);
    pass_stats ps;
    ps.pass = pass;
    const bool detect_pass = head_start && pass == 1;
    for (auto idx : order) {
      auto& p = prepared[idx];
      const edt_problem& prob = detect_pass ? *p.detect_problem : *p.problem;
      const gold_standard& gold = detect_pass ? *p.detect_gold : p.gold;
      learn_options<node_ptr> lo;
      lo.audit_monotonicity = opts.audit_monotonicity;
      bool gated = false;
      if (cfg.mode == run_mode::joint && cfg.comp == compensation::gated) {
        lo.filter_difference = [&](sparse_vector& diff, const node_ptr& popped) {
          gated = !mentions_match_gold(*popped, gold);
          if (!gated) return;
          std::vector<sparse_entry> kept;
          for (const auto& e : diff)
            if (!model.decisions.is_coref(decision_of(e.key))) kept.push_back(e);
          diff = sparse_vector::from_entries(std::move(kept));
        };
      }
      if (opts.on_update) lo.on_update = [&](const update_event<node_ptr>& ev) { opts.on_update(ev, gated); };
      const auto r = learn_one_example(prob, st, lo);
      ps.updates += r.updates;
      ps.expansions += r.expansions;
      if (r.updates) ++ps.documents_with_updates;
    }
    ps.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (report) report->passes.push_back(ps);
    if (opts.on_pass) opts.on_pass(ps);
    if (cfg.stop_when_separated && ps.updates == 0 && !detect_pass) break;
  }
  tm.w = std::move(st.w);
  tm.k = st.k;
  return tm;
}

// `beam`: overrides the configured beam (0 = unbounded).
inline node_ptr decode_node(const trained_model& m, const document& doc, std::optional<std::size_t> beam = {}) {
  const auto& cfg = m.config;
  std::unique_ptr<skeleton> sk;
  if (cfg.search() == search_mode::coref) sk = std::make_unique<skeleton>(skeleton_of(doc, m.model->spec.labels));
  edt_problem prob(*m.model, doc, detail::space_for(cfg, cfg.search(), sk.get()));
  return decode(prob, m.w, beam.value_or(cfg.beam));
}

inline document predict(const trained_model& m, const document& doc, std::optional<std::size_t> beam = {}) {
  return write_predictions(doc, materialize(*decode_node(m, doc, beam)), m.model->spec.labels);
}

inline std::vector<document> predict_corpus(const trained_model& m, const std::vector<document>& docs,
                                            std::optional<std::size_t> beam = {}) {
  std::vector<document> out;
  out.reserve(docs.size());
  for (const auto& d : docs) out.push_back(predict(m, d, beam));
  return out;
}

// Mention detection models are scored with every mention as its own entity.
inline score_report evaluate(const trained_model& m, const std::vector<document>& gold) {
  return score_corpus(predict_corpus(m, gold), gold, m.config.costs, m.config.mode == run_mode::pipeline_detect);
}

// Fraction of documents whose decoded labeling equals the gold labeling
// (mentions, labels and partition).
inline double exact_match_rate(const trained_model& m, const std::vector<document>& docs) {
  if (docs.empty()) return 1.0;
  std::size_t ok = 0;
  for (const auto& d : docs) {
    const auto gold = make_gold(d, m.model->spec.labels, m.config.max_length,
                                m.config.mode == run_mode::pipeline_detect);
    if (is_y_good(materialize(*decode_node(m, d)), gold)) ++ok;
  }
  return static_cast<double>(ok) / static_cast<double>(docs.size());
}

}  // namespace laso::edt
