// Experiment protocols: pipelined detection then coreference, greedy backward
// feature-class elimination, and linkage comparison.
#pragma once

#include <algorithm>
#include <functional>
#include <iomanip>
#include <memory>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "laso/edt/config.hpp"
#include "laso/edt/scorer.hpp"
#include "laso/edt/training.hpp"

namespace laso::edt {

struct pipeline_models {
  trained_model detect;
  trained_model coref;
};

// Detection model (every mention in its own chain) plus a coreference model
// trained on gold mentions with their types given.
inline pipeline_models train_pipeline(const run_config& cfg, std::shared_ptr<const resource_bundle> res,
                                      const std::vector<document>& docs) {
  run_config d = cfg, c = cfg;
  d.mode = run_mode::pipeline_detect;
  c.mode = run_mode::pipeline_coref;
  return {train_model(d, res, docs), train_model(c, res, docs)};
}

inline std::vector<document> predict_pipeline(const pipeline_models& m, const std::vector<document>& docs) {
  return predict_corpus(m.coref, predict_corpus(m.detect, docs));
}

struct split {
  std::vector<document> train, dev;
};

// Seeded document-level split; `dev_fraction` of the documents (at least one)
// go to dev.
inline split split_corpus(const std::vector<document>& docs, std::uint64_t seed, double dev_fraction = 0.1) {
  if (docs.size() < 2) throw std::invalid_argument("need at least two documents to split");
  std::vector<std::size_t> order(docs.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto dev_n = std::clamp<std::size_t>(static_cast<std::size_t>(dev_fraction * static_cast<double>(docs.size()) + 0.5),
                                             1, docs.size() - 1);
  split s;
  for (std::size_t i = 0; i < order.size(); ++i) (i < dev_n ? s.dev : s.train).push_back(docs[order[i]]);
  return s;
}

struct ablation_row {
  std::size_t round = 0;                 // 0: all classes
  std::string removed;                   // class dropped in this round
  double score = 0;                      // dev score without it
  std::vector<std::pair<std::string, double>> candidates;  // every class tried this round
};

struct ablation_result {
  std::vector<ablation_row> rows;
  std::vector<std::size_t> cycles_per_round;
  std::size_t cycles = 0;  // train/evaluate runs, baseline included

  std::string csv() const {
    std::ostringstream out;
    out << std::fixed << std::setprecision(2) << "round,removed,score\n";
    for (const auto& r : rows) out << r.round << "," << (r.removed.empty() ? "none" : r.removed) << "," << r.score << "\n";
    return out.str();
  }
  std::string table() const {
    std::ostringstream out;
    out << std::fixed << std::setprecision(2);
    out << std::left << std::setw(7) << "round" << std::setw(16) << "removed" << std::right << std::setw(8) << "score"
        << "\n";
    for (const auto& r : rows)
      out << std::left << std::setw(7) << r.round << std::setw(16) << (r.removed.empty() ? "(none)" : r.removed)
          << std::right << std::setw(8) << r.score << "\n";
    return out.str();
  }
};

// Scores a configuration: train on `s.train`, ACE-like score on `s.dev`.
using evaluator = std::function<double(const run_config&, const split&)>;

inline evaluator default_evaluator(std::shared_ptr<const resource_bundle> res) {
  return [res](const run_config& cfg, const split& s) { return evaluate(train_model(cfg, res, s.train), s.dev).score(); };
}

// Greedy backward elimination: each round removes the class whose removal
// gives the best dev score (ties: earliest class in canonical order), until no
// class is left.
inline ablation_result ablate(const run_config& cfg, const split& data, const evaluator& eval) {
  if (cfg.mode != run_mode::coref_gold_mentions)
    throw config_error("ablation runs in coref-gold-mentions mode");
  std::vector<feature_class> remaining;
  for (auto c : ablation_classes)
    if (cfg.classes.has(c)) remaining.push_back(c);
  if (remaining.size() < 2) throw config_error("ablation needs at least two enabled feature classes");

  ablation_result out;
  run_config current = cfg;
  out.rows.push_back({0, "", eval(current, data), {}});
  out.cycles = 1;
  for (std::size_t round = 1; !remaining.empty(); ++round) {
    ablation_row row;
    row.round = round;
    std::size_t best = 0;
    double best_score = -1;
    for (std::size_t i = 0; i < remaining.size(); ++i) {
      run_config trial = current;
      trial.classes.remove(remaining[i]);
      const double s = eval(trial, data);
      row.candidates.emplace_back(class_name(remaining[i]), s);
      if (s > best_score) best = i, best_score = s;
    }
    out.cycles_per_round.push_back(remaining.size());
    out.cycles += remaining.size();
    row.removed = class_name(remaining[best]);
    row.score = best_score;
    current.classes.remove(remaining[best]);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best));
    out.rows.push_back(std::move(row));
  }
  return out;
}

inline constexpr linkage_type compared_linkages[] = {linkage_type::intelligent, linkage_type::min,
                                                     linkage_type::average,     linkage_type::max,
                                                     linkage_type::last,        linkage_type::first};

struct linkage_result {
  std::vector<std::pair<std::string, double>> rows;

  std::string csv() const {
    std::ostringstream out;
    out << std::fixed << std::setprecision(2) << "linkage,score\n";
    for (const auto& [n, s] : rows) out << n << "," << s << "\n";
    return out.str();
  }
  std::string table() const {
    std::ostringstream out;
    out << std::fixed << std::setprecision(2);
    for (const auto& [n, s] : rows) out << std::left << std::setw(14) << n << std::right << std::setw(8) << s << "\n";
    return out.str();
  }
};

inline linkage_result compare_linkages(const run_config& cfg, const split& data, const evaluator& eval) {
  if (cfg.mode != run_mode::coref_gold_mentions)
    throw config_error("linkage comparison runs in coref-gold-mentions mode");
  linkage_result out;
  for (auto l : compared_linkages) {
    run_config trial = cfg;
    trial.linkage = l;
    out.rows.emplace_back(std::string(to_string(l)), eval(trial, data));
  }
  return out;
}

}  // namespace laso::edt
