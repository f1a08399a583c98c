#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <sstream>

#include "fixtures.hpp"
#include "laso/edt/experiments.hpp"
#include "laso/edt/model_io.hpp"
#include "laso/edt/synthetic.hpp"
#include "laso/edt/training.hpp"

using namespace laso;
using namespace laso::edt;

namespace {

struct corpus_fixture {
  synthetic_world world{{"PER", "ORG"}, 7};
  std::shared_ptr<const resource_bundle> res = std::make_shared<const resource_bundle>(world.resources());

  std::vector<document> docs(std::size_t n, std::uint64_t seed = 1) const {
    synthetic_params p;
    p.docs = n;
    p.seed = seed;
    p.types = {"PER", "ORG"};
    p.max_sentences = 2;
    return generate_synthetic(world, p);
  }
};

run_config small_config() {
  run_config c;
  c.types = {{"PER", {}}, {"ORG", {}}};
  c.max_length = 4;
  c.beam = 4;
  c.cutoff = 1;
  c.passes = 3;
  return c;
}

std::string bytes_of(const trained_model& m) {
  std::ostringstream out(std::ios::binary);
  save_model(out, m);
  return out.str();
}

}  // namespace

TEST(Train, ZeroPassesLeavesZeroWeights) {
  corpus_fixture f;
  auto cfg = small_config();
  cfg.passes = 0;
  train_report rep;
  auto m = train_model(cfg, f.res, f.docs(10), {}, &rep);
  EXPECT_TRUE(m.w.to_sparse().empty());
  EXPECT_TRUE(rep.passes.empty());
  EXPECT_GT(rep.active_features, 0u);
  EXPECT_LE(rep.active_features, rep.counted_features);
}

TEST(Train, EmptyCorpus) {
  corpus_fixture f;
  auto m = train_model(small_config(), f.res, {});
  EXPECT_TRUE(m.w.to_sparse().empty());
  EXPECT_TRUE(predict_corpus(m, {}).empty());
  EXPECT_DOUBLE_EQ(exact_match_rate(m, {}), 1.0);
}

TEST(Train, Deterministic) {
  corpus_fixture f;
  const auto docs = f.docs(15);
  EXPECT_EQ(bytes_of(train_model(small_config(), f.res, docs)), bytes_of(train_model(small_config(), f.res, docs)));
  auto other = small_config();
  other.seed = 2;
  EXPECT_NE(bytes_of(train_model(small_config(), f.res, docs)), bytes_of(train_model(other, f.res, docs)));
}

TEST(Train, CutoffDropsRareFeatures) {
  corpus_fixture f;
  const auto docs = f.docs(15);
  auto cfg = small_config();
  cfg.passes = 0;
  train_report one, many;
  train_model(cfg, f.res, docs, {}, &one);
  cfg.cutoff = 5;
  train_model(cfg, f.res, docs, {}, &many);
  EXPECT_EQ(one.counted_features, many.counted_features);
  EXPECT_LT(many.active_features, one.active_features);
}

TEST(Train, GatedStepsCarryNoCoreferenceEntries) {
  corpus_fixture f;
  auto cfg = small_config();
  cfg.beam = 1;
  std::size_t gated = 0, open_with_coref = 0;
  train_options opts;
  const edt_model* model = nullptr;
  opts.on_update = [&](const update_event<node_ptr>& ev, bool g) {
    ASSERT_NE(model, nullptr);
    bool coref = false;
    for (const auto& e : ev.difference) coref |= model->decisions.is_coref(decision_of(e.key));
    if (g) {
      ++gated;
      EXPECT_FALSE(coref);
    } else {
      open_with_coref += coref;
    }
  };
  // the model is built inside train_model; its decision table depends only on
  // the inventory, so an identical untrained model classifies the keys
  auto probe = make_untrained(cfg, f.res);
  model = probe.model.get();
  train_model(cfg, f.res, f.docs(30), opts);
  EXPECT_GT(gated, 0u);
  EXPECT_GT(open_with_coref, 0u);
}

TEST(Train, UngatedUpdatesKeepCoreferenceEntries) {
  corpus_fixture f;
  auto cfg = small_config();
  cfg.beam = 1;
  cfg.comp = compensation::none;
  std::size_t flagged = 0;
  train_options opts;
  opts.on_update = [&](const update_event<node_ptr>&, bool g) { flagged += g; };
  train_model(cfg, f.res, f.docs(20), opts);
  EXPECT_EQ(flagged, 0u);
}

TEST(Train, DetectionModelHasNoCoreferenceWeights) {
  corpus_fixture f;
  auto cfg = small_config();
  cfg.mode = run_mode::pipeline_detect;
  auto m = train_model(cfg, f.res, f.docs(20));
  std::ostringstream out;
  dump_weights(out, m);
  std::istringstream lines(out.str());
  std::string line;
  std::size_t n = 0;
  while (std::getline(lines, line)) {
    const auto bar = line.rfind('|', line.find('\t'));
    ASSERT_NE(bar, std::string::npos);
    EXPECT_FALSE(is_coref_decision_name(line.substr(bar + 1, line.find('\t') - bar - 1))) << line;
    ++n;
  }
  EXPECT_GT(n, 0u);
  // every mention scored as its own entity
  for (const auto& d : predict_corpus(m, f.docs(5, 9))) {
    std::set<std::string> ids;
    for (const auto& mm : d.mentions) EXPECT_TRUE(ids.insert(mm.entity_id).second);
  }
}

TEST(Train, MemorizesASmallCorpus) {
  corpus_fixture f;
  auto cfg = small_config();
  cfg.passes = 40;
  cfg.beam = 8;
  const auto docs = f.docs(8);
  train_report rep;
  auto m = train_model(cfg, f.res, docs, {}, &rep);
  ASSERT_FALSE(rep.passes.empty());
  EXPECT_EQ(rep.passes.back().updates, 0u);
  EXPECT_DOUBLE_EQ(exact_match_rate(m, docs), 1.0);
  EXPECT_DOUBLE_EQ(evaluate(m, docs).score(), 100.0);
}

TEST(Train, CorefWithGoldMentionsKeepsTheMentions) {
  corpus_fixture f;
  auto cfg = small_config();
  cfg.mode = run_mode::coref_gold_mentions;
  auto m = train_model(cfg, f.res, f.docs(20));
  for (const auto& d : f.docs(5, 4)) {
    auto out = predict(m, d);
    ASSERT_EQ(out.mentions.size(), d.mentions.size());
    for (std::size_t i = 0; i < d.mentions.size(); ++i) {
      EXPECT_EQ(out.mentions[i].start, d.mentions[i].start);
      EXPECT_EQ(out.mentions[i].end, d.mentions[i].end);
    }
  }
}

TEST(Pipeline, DetectThenLink) {
  corpus_fixture f;
  auto models = train_pipeline(small_config(), f.res, f.docs(20));
  const auto test = f.docs(5, 3);
  auto out = predict_pipeline(models, test);
  ASSERT_EQ(out.size(), test.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    EXPECT_EQ(out[i].id, test[i].id);
    EXPECT_NO_THROW(validate_document(out[i], nullptr));
  }
  EXPECT_NO_THROW(score_corpus(out, test));
}

TEST(Split, SeededAndDisjoint) {
  corpus_fixture f;
  const auto docs = f.docs(30);
  auto a = split_corpus(docs, 5, 0.2);
  EXPECT_EQ(a.dev.size(), 6u);
  EXPECT_EQ(a.train.size(), 24u);
  std::set<std::string> ids;
  for (const auto& d : a.train) ids.insert(d.id);
  for (const auto& d : a.dev) EXPECT_TRUE(ids.insert(d.id).second);
  EXPECT_EQ(ids.size(), docs.size());
  EXPECT_EQ(split_corpus(docs, 5, 0.2).dev, a.dev);
  EXPECT_NE(split_corpus(docs, 6, 0.2).dev, a.dev);
  EXPECT_EQ(split_corpus({docs[0], docs[1]}, 1, 0.0).dev.size(), 1u);
  EXPECT_THROW(split_corpus({docs[0]}, 1), std::invalid_argument);
}

TEST(Ablation, RemovesTheLeastUsefulClassEachRound) {
  // each class contributes a fixed amount; two classes tie
  std::map<std::string, double> value{{"lexical", 5},   {"syntactic", 1}, {"pattern", 3}, {"count", 1},
                                      {"semantic", 9},  {"knowledge", 2}, {"class", 7},   {"list", 4},
                                      {"inference", 6}, {"string-match", 8}};
  evaluator eval = [&](const run_config& cfg, const split&) {
    double s = 0;
    for (auto c : ablation_classes)
      if (cfg.classes.has(c)) s += value.at(std::string(class_name(c)));
    return s;
  };
  auto cfg = small_config();
  cfg.mode = run_mode::coref_gold_mentions;
  auto r = ablate(cfg, split{}, eval);
  ASSERT_EQ(r.rows.size(), 11u);
  EXPECT_EQ(r.rows[0].score, 46.0);
  EXPECT_EQ(r.cycles_per_round, (std::vector<std::size_t>{10, 9, 8, 7, 6, 5, 4, 3, 2, 1}));
  EXPECT_EQ(r.cycles, 56u);

  // oracle: ascending value, ties broken by canonical class order
  std::vector<std::string> expected;
  for (auto c : ablation_classes) expected.emplace_back(class_name(c));
  std::stable_sort(expected.begin(), expected.end(),
                   [&](const std::string& a, const std::string& b) { return value[a] < value[b]; });
  double left = 46;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    left -= value[expected[i]];
    EXPECT_EQ(r.rows[i + 1].removed, expected[i]);
    EXPECT_DOUBLE_EQ(r.rows[i + 1].score, left);
    EXPECT_EQ(r.rows[i + 1].candidates.size(), 10 - i);
  }
  EXPECT_NE(r.csv().find("1,syntactic,45.00"), std::string::npos);

  cfg.mode = run_mode::joint;
  EXPECT_THROW(ablate(cfg, split{}, eval), config_error);
  cfg.mode = run_mode::coref_gold_mentions;
  cfg.classes = class_set::none().add(feature_class::lexical);
  EXPECT_THROW(ablate(cfg, split{}, eval), config_error);
}

TEST(Linkages, OneRowPerLinkage) {
  auto cfg = small_config();
  cfg.mode = run_mode::coref_gold_mentions;
  std::vector<linkage_type> seen;
  auto r = compare_linkages(cfg, split{}, [&](const run_config& c, const split&) {
    seen.push_back(c.linkage);
    return static_cast<double>(seen.size());
  });
  ASSERT_EQ(r.rows.size(), 6u);
  EXPECT_EQ(r.rows[0].first, "intelligent");
  std::set<std::string> names;
  for (const auto& [n, s] : r.rows) names.insert(n);
  EXPECT_EQ(names.size(), 6u);
  EXPECT_EQ(std::count(seen.begin(), seen.end(), linkage_type::intelligent), 1);
  cfg.mode = run_mode::joint;
  EXPECT_THROW(compare_linkages(cfg, split{}, [](const run_config&, const split&) { return 0.0; }), config_error);
}
