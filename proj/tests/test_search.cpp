#include <gtest/gtest.h>

#include <memory>
#include <random>
#include <vector>

#include "laso/search.hpp"

using namespace laso;

namespace {

// A chain of binary choices. Features: (position, bit) and (previous bit, bit).
struct toy_node {
  std::shared_ptr<const toy_node> parent;
  int bit = -1;
  std::size_t depth = 0;
  double score = 0.0;
};
using toy_ptr = std::shared_ptr<const toy_node>;

struct toy_problem {
  using node_ptr = toy_ptr;
  std::size_t length = 1;
  std::vector<int> gold;

  static feature_key pos_key(std::size_t i, int b) { return make_meta_key(static_cast<feature_id>(i), b); }
  static feature_key pair_key(int a, int b) { return make_meta_key(1000, static_cast<feature_id>(a * 2 + b)); }

  sparse_vector step(const toy_node& n) const {
    std::vector<sparse_entry> e{{pos_key(n.depth - 1, n.bit), 1.0}};
    if (n.parent && n.parent->bit >= 0) e.push_back({pair_key(n.parent->bit, n.bit), 1.0});
    return sparse_vector::from_entries(std::move(e));
  }

  node_ptr initial() const { return std::make_shared<toy_node>(); }
  bool is_goal(const toy_node& n) const { return n.depth == length; }
  std::size_t progress(const toy_node& n) const { return n.depth; }
  template <class Sink>
  void expand(const node_ptr& n, const weight_vector& w, Sink& sink) const {
    if (n->depth >= length) return;
    for (int b : {0, 1}) {
      auto c = std::make_shared<toy_node>();
      c->parent = n;
      c->bit = b;
      c->depth = n->depth + 1;
      c->score = n->score + w.dot(step(*c));
      if (sink.admits(c->depth, c->score)) sink.push(c);
    }
  }
  bool is_good(const toy_node& n) const {
    for (const toy_node* p = &n; p->parent; p = p->parent.get())
      if (p->bit != gold[p->depth - 1]) return false;
    return true;
  }
  std::vector<node_ptr> good_successors(const node_ptr& n, const weight_vector& w) const {
    struct all {
      std::vector<node_ptr> v;
      bool admits(std::size_t, double) const { return true; }
      void push(node_ptr x) { v.push_back(std::move(x)); }
    } sink;
    expand(n, w, sink);
    std::vector<node_ptr> out;
    for (auto& c : sink.v)
      if (is_good(*c)) out.push_back(c);
    return out;
  }
  sparse_vector features(const node_ptr& n, const weight_vector&) const {
    sparse_vector out;
    for (const toy_node* p = n.get(); p->parent; p = p->parent.get()) out += step(*p);
    return out;
  }
  node_ptr rescore(const node_ptr& n, const weight_vector& w) const {
    auto c = std::make_shared<toy_node>(*n);
    c->score = w.dot(features(n, w));
    return c;
  }
};
static_assert(learnable_problem<toy_problem>);

std::vector<int> bits_of(const toy_ptr& n) {
  std::vector<int> out(n->depth);
  for (const toy_node* p = n.get(); p->parent; p = p->parent.get()) out[p->depth - 1] = p->bit;
  return out;
}

double best_by_enumeration(const toy_problem& p, const weight_vector& w) {
  double best = -1e300;
  for (std::size_t mask = 0; mask < (1u << p.length); ++mask) {
    toy_ptr n = p.initial();
    double s = 0;
    for (std::size_t i = 0; i < p.length; ++i) {
      auto c = std::make_shared<toy_node>();
      c->parent = n;
      c->bit = static_cast<int>((mask >> i) & 1);
      c->depth = i + 1;
      s += w.dot(p.step(*c));
      n = c;
    }
    best = std::max(best, s);
  }
  return best;
}

struct scored {
  double score;
  std::size_t depth = 1;
};
using scored_ptr = std::shared_ptr<const scored>;

}  // namespace

TEST(BeamQueue, KeepsEverythingWhenLargeEnough) {
  beam_queue<scored_ptr> q(10);
  for (double s : {1.0, 5.0, 3.0}) q.push(std::make_shared<scored>(scored{s}), 1);
  auto nodes = q.nodes();
  ASSERT_EQ(nodes.size(), 3u);
  EXPECT_EQ(nodes[0]->score, 5.0);
  EXPECT_EQ(nodes[1]->score, 3.0);
  EXPECT_EQ(nodes[2]->score, 1.0);
}

TEST(BeamQueue, TopK) {
  beam_queue<scored_ptr> q(2);
  for (double s : {5.0, 3.0, 1.0}) q.push(std::make_shared<scored>(scored{s}), 1);
  auto nodes = q.nodes();
  ASSERT_EQ(nodes.size(), 2u);
  EXPECT_EQ(nodes[0]->score, 5.0);
  EXPECT_EQ(nodes[1]->score, 3.0);
  EXPECT_FALSE(q.admits(1, 2.0));
  EXPECT_TRUE(q.admits(2, -100.0));
}

TEST(BeamQueue, EqualScoresKeepEarlierInsertion) {
  beam_queue<scored_ptr> q(1);
  auto first = std::make_shared<scored>(scored{2.0});
  auto second = std::make_shared<scored>(scored{2.0});
  q.push(first, 1);
  q.push(second, 1);
  ASSERT_EQ(q.size(), 1u);
  EXPECT_EQ(q.pop_front().node, first);
}

TEST(BeamQueue, EqualScoresPreferShallowerNode) {
  beam_queue<scored_ptr> q(1);
  auto deep = std::make_shared<scored>(scored{2.0, 5});
  auto shallow = std::make_shared<scored>(scored{2.0, 2});
  q.push(deep, 3);
  q.push(shallow, 3);
  EXPECT_EQ(q.pop_front().node, shallow);
}

TEST(BeamQueue, PopsLowestProgressFirstAndTracksGoodNodes) {
  beam_queue<scored_ptr> q(4);
  q.push(std::make_shared<scored>(scored{9.0}), 3, false);
  q.push(std::make_shared<scored>(scored{1.0}), 1, true);
  EXPECT_EQ(q.good_count(), 1u);
  auto e = q.pop_front();
  EXPECT_EQ(e.progress, 1u);
  EXPECT_TRUE(e.good);
  EXPECT_EQ(q.good_count(), 0u);
}

TEST(BeamQueue, PushBehindThePopFrontIsAContractViolation) {
  beam_queue<scored_ptr> q(4);
  q.push(std::make_shared<scored>(scored{1.0}), 2);
  q.push(std::make_shared<scored>(scored{0.0}), 2);
  q.pop_front();
  EXPECT_THROW(q.push(std::make_shared<scored>(scored{3.0}), 2), contract_violation);
}

TEST(BeamQueue, EnqueueHelperUsesProgress) {
  beam_queue<scored_ptr> q(1);
  std::vector<scored_ptr> cands{std::make_shared<scored>(scored{1.0}), std::make_shared<scored>(scored{4.0})};
  beam_enqueue(q, std::span<const scored_ptr>(cands), [](const scored&) { return std::size_t{1}; });
  EXPECT_EQ(q.size(), 1u);
  EXPECT_EQ(q.pop_front().node->score, 4.0);
}

TEST(Learn, SeparatingWeightsNeedNoUpdate) {
  toy_problem p{3, {1, 0, 1}};
  learner_state st;
  st.w.set(toy_problem::pos_key(0, 1), 0.5);
  st.w.set(toy_problem::pos_key(1, 0), 0.5);
  st.w.set(toy_problem::pos_key(2, 1), 0.5);
  const auto before = st.w.to_sparse();
  auto r = learn_one_example(p, st);
  EXPECT_EQ(r.updates, 0u);
  EXPECT_EQ(st.w.to_sparse(), before);
  EXPECT_EQ(st.k, 1u);
}

TEST(Learn, AdversarialOneDecisionProblemNeedsOneUpdate) {
  toy_problem p{1, {0}};
  learner_state st;
  st.beam_size = 1;
  st.w.set(toy_problem::pos_key(0, 1), 0.5);
  const auto wrong_before = st.w.get(toy_problem::pos_key(0, 1));
  auto r = learn_one_example(p, st);
  EXPECT_EQ(r.updates, 1u);
  // pre-projection: w + delta with delta = (1/sqrt2, -1/sqrt2) on (gold, wrong)
  const double d = 1.0 / std::sqrt(2.0);
  EXPECT_GT(0.0 + d, wrong_before - d);
  EXPECT_GT(st.w.get(toy_problem::pos_key(0, 0)), st.w.get(toy_problem::pos_key(0, 1)));
  EXPECT_EQ(bits_of(decode(p, st.w, 1)), std::vector<int>{0});
}

TEST(Learn, SeparableProblemsAreLearned) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    toy_problem p;
    p.length = 8;
    for (std::size_t i = 0; i < p.length; ++i) p.gold.push_back(static_cast<int>(rng() & 1));
    learner_state st;
    st.beam_size = 2;
    std::size_t pass = 0;
    while (learn_one_example(p, st).updates > 0 && pass < 50) ++pass;
    EXPECT_LT(pass, 50u);
    EXPECT_EQ(bits_of(decode(p, st.w, 2)), p.gold);
  }
}

TEST(Learn, InitialNodeMustBeGood) {
  struct bad_problem : toy_problem {
    bool is_good(const toy_node&) const { return false; }
  };
  bad_problem p;
  p.length = 1;
  p.gold = {0};
  learner_state st;
  EXPECT_THROW(learn_one_example(p, st), contract_violation);
}

TEST(Decode, SingleDecisionReturnsArgmax) {
  toy_problem p{1, {0}};
  weight_vector w;
  w.set(toy_problem::pos_key(0, 1), 0.3);
  EXPECT_EQ(bits_of(decode(p, w, 1)), std::vector<int>{1});
}

TEST(Decode, UnboundedBeamIsExactAndBoundedBeamsNeverBeatIt) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 100; ++trial) {
    toy_problem p;
    p.length = 7;
    weight_vector w;
    for (std::size_t i = 0; i < p.length; ++i)
      for (int b : {0, 1}) w.set(toy_problem::pos_key(i, b), g(rng));
    for (int a : {0, 1})
      for (int b : {0, 1}) w.set(toy_problem::pair_key(a, b), g(rng));
    const double exact = best_by_enumeration(p, w);
    EXPECT_NEAR(decode(p, w, unbounded_beam)->score, exact, 1e-9);
    for (std::size_t beam : {1, 2, 4, 16}) EXPECT_LE(decode(p, w, beam)->score, exact + 1e-9);
    EXPECT_NEAR(decode(p, w, 128)->score, exact, 1e-9);
  }
}
