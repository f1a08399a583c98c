#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "fixtures.hpp"
#include "laso/edt/hypothesis.hpp"
#include "laso/edt/synthetic.hpp"

using namespace laso;
using namespace laso::edt;

namespace {

search_space space_for(const inventory& inv, std::size_t max_length = 10, search_mode mode = search_mode::joint) {
  search_space s;
  s.labels = &inv;
  s.max_length = max_length;
  s.mode = mode;
  return s;
}

label lab(const inventory& inv, const char* type, mention_type m) {
  return {static_cast<std::uint8_t>(*inv.type_index(type)), -1, m};
}

std::size_t closed_form(std::size_t remaining, std::size_t max_length, std::size_t labels, std::size_t chains) {
  return 1 + std::min(remaining, max_length) * labels * (1 + chains);
}

}  // namespace

TEST(Successors, SixtyFourForOneTokenSevenTypesTwoChains) {
  inventory inv;
  EXPECT_EQ(successor_decisions(4, 2, 5, space_for(inv)).size(), 64u);
}

TEST(Successors, SmallestCase) {
  auto inv = fixtures::types_of({"PER"}, {mention_type::nam});
  auto ds = successor_decisions(0, 0, 1, space_for(inv));
  ASSERT_EQ(ds.size(), 2u);
  EXPECT_FALSE(ds[0].entity);
  EXPECT_TRUE(ds[1].entity);
  EXPECT_EQ(ds[1].link, new_chain);
}

TEST(Successors, ClosedFormAcrossTheDocument) {
  inventory inv;
  for (std::size_t n : {1u, 3u, 12u, 20u})
    for (std::size_t covered = 0; covered < n; ++covered)
      for (std::size_t chains : {0u, 1u, 4u})
        EXPECT_EQ(successor_decisions(covered, chains, n, space_for(inv, 10)).size(),
                  closed_form(n - covered, 10, inv.labels().size(), chains));
  EXPECT_TRUE(successor_decisions(5, 0, 5, space_for(inv)).empty());
}

TEST(Successors, DetectionModeNeverLinks) {
  inventory inv;
  for (const auto& d : successor_decisions(0, 3, 4, space_for(inv, 10, search_mode::detect)))
    EXPECT_EQ(d.link, new_chain);
  EXPECT_EQ(successor_decisions(0, 3, 4, space_for(inv, 10, search_mode::detect)).size(), 1 + 4 * 21u);
}

TEST(Successors, CorefModeFollowsTheSkeleton) {
  inventory inv;
  const auto per_pro = lab(inv, "PER", mention_type::pro);
  skeleton sk({{1, 2, per_pro}}, 3);
  auto s = space_for(inv, 10, search_mode::coref);
  s.mentions = &sk;
  auto at0 = successor_decisions(0, 1, 3, s);
  ASSERT_EQ(at0.size(), 1u);
  EXPECT_FALSE(at0[0].entity);
  EXPECT_EQ(successor_decisions(1, 1, 3, s).size(), 2u);
  s.pronoun_types_given = false;
  EXPECT_EQ(successor_decisions(1, 1, 3, s).size(), 7u * 2u);
}

TEST(Gold, ClintonPath) {
  auto doc = fixtures::clinton();
  inventory inv;
  auto g = make_gold(doc, inv, 10);
  EXPECT_EQ(g.full.mentions().size(), 5u);
  EXPECT_EQ(g.full.chains().size(), 2u);
  EXPECT_EQ(g.boundaries.back(), doc.size());
  EXPECT_EQ(g.path.size(), doc.size() - 3);
  EXPECT_EQ(g.full.chains()[0], (std::vector<std::size_t>{0, 2, 3}));
  EXPECT_EQ(g.full.chains()[1], (std::vector<std::size_t>{1, 4}));
}

TEST(Gold, TooLongMentionIsUnreachable) {
  auto doc = fixtures::clinton();
  EXPECT_THROW(make_gold(doc, inventory{}, 1), unreachable_gold);
  EXPECT_THROW(make_gold(doc, fixtures::types_of({"PER"}), 10), unreachable_gold);
}

TEST(Gold, OwnChainsStartsAChainPerMention) {
  auto g = make_gold(fixtures::clinton(), inventory{}, 10, true);
  EXPECT_EQ(g.full.chains().size(), 5u);
}

TEST(YGood, EmptyHypothesisIsGood) {
  auto g = make_gold(fixtures::clinton(), inventory{}, 10);
  EXPECT_TRUE(is_y_good(hypothesis{}, g));
  EXPECT_TRUE(is_y_good(*make_root(), g));
}

TEST(YGood, SplittingBillClintonIsNotGood) {
  inventory inv;
  auto g = make_gold(fixtures::clinton(), inv, 10);
  const auto per = lab(inv, "PER", mention_type::nam);
  hypothesis h({{0, 1, true, per, 0}});
  EXPECT_FALSE(is_y_good(h, g));
  EXPECT_FALSE(is_y_good(*fixtures::walk({{1, true, per, new_chain}}), g));
  hypothesis whole({{0, 2, true, per, 0}});
  EXPECT_TRUE(is_y_good(whole, g));
}

TEST(YGood, HisLinkedToTheSenateIsNotGood) {
  inventory inv;
  auto g = make_gold(fixtures::clinton(), inv, 10);
  auto chunks = g.full.chunks();
  std::vector<chunk> prefix;
  for (const auto& c : chunks) {
    prefix.push_back(c);
    if (c.end == 14) break;
  }
  EXPECT_TRUE(is_y_good(hypothesis(prefix), g));
  prefix.back().chain = 1;  // "his" in the Senate chain
  EXPECT_FALSE(is_y_good(hypothesis(prefix), g));
}

TEST(YGood, ChainLabelsDoNotMatter) {
  inventory inv;
  auto g = make_gold(fixtures::clinton(), inv, 10);
  auto chunks = g.full.chunks();
  for (auto& c : chunks)
    if (c.entity) c.chain = c.chain == 0 ? 42 : 7;
  EXPECT_TRUE(is_y_good(hypothesis(chunks), g));
}

TEST(YGood, ThemScenario) {
  inventory inv;
  auto doc = fixtures::clinton();
  auto g = make_gold(doc, inv, 10);
  // prefix up to "them"
  std::vector<mention_decision> path;
  for (std::size_t i = 0; g.boundaries[i] < 19; ++i) path.push_back(g.path[i]);
  auto node = fixtures::walk(path);
  ASSERT_EQ(node->covered, 19u);
  ASSERT_EQ(node->chain_count, 2u);
  ASSERT_TRUE(is_y_good(*node, g));
  const mention_decision org_pro{1, true, lab(inv, "ORG", mention_type::pro), 1};
  auto ds = successor_decisions(node->covered, node->chain_count, doc.size(), space_for(inv));
  EXPECT_NE(std::find(ds.begin(), ds.end(), org_pro), ds.end());
  EXPECT_NE(std::find(ds.begin(), ds.end(), mention_decision::nae()), ds.end());
  std::vector<mention_decision> good;
  for (const auto& d : ds)
    if (is_y_good(*make_child(node, d, 0), g)) good.push_back(d);
  ASSERT_EQ(good.size(), 1u);
  EXPECT_EQ(good[0], org_pro);
}

TEST(YGood, ExactlyOneGoodSuccessorOnSyntheticGold) {
  synthetic_params p;
  p.docs = 20;
  p.seed = 5;
  auto docs = generate_synthetic(p);
  auto inv = fixtures::types_of({"PER", "ORG", "GPE"});
  for (const auto& doc : docs) {
    auto g = make_gold(doc, inv, 4);
    node_ptr node = make_root();
    for (const auto& step : g.path) {
      std::size_t good = 0;
      for (const auto& d : successor_decisions(node->covered, node->chain_count, doc.size(), space_for(inv, 4)))
        good += is_y_good(*make_child(node, d, 0), g);
      ASSERT_EQ(good, 1u);
      node = make_child(node, step, 0);
    }
    EXPECT_TRUE(is_y_good(materialize(*node), g));
    EXPECT_TRUE(successor_decisions(node->covered, node->chain_count, doc.size(), space_for(inv, 4)).empty());
  }
}

TEST(YGood, NodeAndHypothesisFormsAgree) {
  auto inv = fixtures::types_of({"PER", "ORG"});
  auto doc = fixtures::make_doc("d", {"Ann", "met", "Bo", "and", "she"},
                                {{0, 1, "PER", "", mention_type::nam, "a"},
                                 {2, 3, "PER", "", mention_type::nam, "b"},
                                 {4, 5, "PER", "", mention_type::pro, "a"}});
  auto g = make_gold(doc, inv, 3);
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 2000; ++trial) {
    node_ptr n = make_root();
    while (n->covered < doc.size()) {
      auto ds = successor_decisions(n->covered, n->chain_count, doc.size(), space_for(inv, 3));
      n = make_child(n, ds[rng() % ds.size()], 0);
      ASSERT_EQ(is_y_good(*n, g), is_y_good(materialize(*n), g));
    }
  }
}

TEST(Hypothesis, RenumbersChainsByFirstMention) {
  label l{};
  hypothesis h({{0, 1, true, l, 9}, {1, 2, false, {}, -1}, {2, 3, true, l, 4}, {3, 4, true, l, 9}});
  ASSERT_EQ(h.chains().size(), 2u);
  EXPECT_EQ(h.mentions()[0].chain, 0u);
  EXPECT_EQ(h.mentions()[1].chain, 1u);
  EXPECT_EQ(h.mentions()[2].chain, 0u);
}

TEST(Hypothesis, AllNaeHasNoMentions) {
  hypothesis h({{0, 1, false, {}, -1}, {1, 2, false, {}, -1}});
  EXPECT_TRUE(h.mentions().empty());
  EXPECT_EQ(h.covered(), 2u);
}

TEST(Hypothesis, ChunksMustTile) {
  label l{};
  EXPECT_THROW(hypothesis({{1, 2, true, l, 0}}), std::invalid_argument);
  EXPECT_THROW(hypothesis({{0, 0, true, l, 0}}), std::invalid_argument);
}

TEST(Hypothesis, MaterializeRoundTripsDecisions) {
  inventory inv;
  auto g = make_gold(fixtures::clinton(), inv, 10);
  auto node = fixtures::walk(g.path);
  EXPECT_EQ(decision_path(*node), g.path);
  auto h = materialize(*node);
  EXPECT_EQ(h.chunks(), g.full.chunks());
}

TEST(Hypothesis, LinkToMissingChainThrows) {
  EXPECT_THROW(make_child(make_root(), {1, true, {}, 0}, 0), std::out_of_range);
}
