// Learning as search optimization: beam queue, large-margin update, the
// generic learn loop and its test-time counterpart.
//
// A search problem is bound to one input (and, for learning, one gold output)
// and supplies nodes through a shared pointer type whose pointee exposes
// `score` and `depth`. Successors must have strictly larger `progress` than
// their parent; the queue keeps one beam per progress value and always pops
// from the lowest one, so the first goal popped is the best goal that
// survived pruning.
#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include "laso/sparse_vector.hpp"

namespace laso {

// A broken problem definition or oracle (e.g. no y-good successor).
class contract_violation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class search_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t unbounded_beam = 0;

struct learner_state {
  weight_vector w;
  std::uint64_t k = 1;  // number of the next update
  double c = 1.0;
  std::size_t beam_size = 16;
};

inline double step_scale(double c, std::uint64_t k) { return c / std::sqrt(static_cast<double>(k)); }

inline sparse_vector project_unit(sparse_vector v) {
  const double n = v.norm();
  if (n > 1.0) v.scale(1.0 / n);
  return v;
}

inline sparse_vector mean_of(std::span<const sparse_vector> vectors) {
  if (vectors.empty()) return {};
  const double inv = 1.0 / static_cast<double>(vectors.size());
  std::size_t total = 0;
  for (const auto& v : vectors) total += v.size();
  std::vector<sparse_entry> all;
  all.reserve(total);
  for (const auto& v : vectors)
    for (const auto& e : v) all.push_back({e.key, e.value * inv});
  return sparse_vector::from_entries(std::move(all));
}

struct update_record {
  sparse_vector delta;  // projected direction
  double step = 0.0;    // C * k^{-1/2}
  std::uint64_t k = 0;  // update number used
};

// delta = proj(difference); w <- proj(w + C k^{-1/2} delta); k <- k + 1.
inline update_record apply_margin_step(learner_state& st, const sparse_vector& difference) {
  update_record rec;
  rec.delta = project_unit(difference);
  rec.step = step_scale(st.c, st.k);
  rec.k = st.k;
  st.w.add_scaled(rec.delta, rec.step);
  st.w.project_unit();
  ++st.k;
  return rec;
}

inline update_record margin_update(learner_state& st, std::span<const sparse_vector> sibs,
                                   std::span<const sparse_vector> bad) {
  if (sibs.empty()) throw contract_violation("margin update needs at least one y-good sibling");
  if (bad.empty()) throw contract_violation("margin update needs at least one offending node");
  return apply_margin_step(st, mean_of(sibs) - mean_of(bad));
}

// Bounded queue with one beam per progress value. Order inside a beam: higher
// score, then lower depth, then earlier insertion.
template <class NodePtr>
class beam_queue {
 public:
  struct entry {
    NodePtr node;
    std::uint64_t seq = 0;
    std::size_t progress = 0;
    bool good = false;
  };

  explicit beam_queue(std::size_t beam_size) : beam_size_(beam_size) {}

  std::size_t beam_size() const noexcept { return beam_size_; }
  bool empty() const noexcept { return size_ == 0; }
  std::size_t size() const noexcept { return size_; }
  std::size_t good_count() const noexcept { return good_; }

  // False only when a node with this score is certain to be pruned.
  bool admits(std::size_t progress, double score) const {
    if (beam_size_ == unbounded_beam) return true;
    auto it = beams_.find(progress);
    if (it == beams_.end() || it->second.items.size() < beam_size_) return true;
    return score >= it->second.items[it->second.worst].node->score;
  }

  void push(NodePtr node, std::size_t progress, bool good = false) {
    auto& beam = beams_[progress];
    if (beam.popping) throw contract_violation("successor progress must exceed its parent's");
    entry e{std::move(node), next_seq_++, progress, good};
    if (beam_size_ == unbounded_beam || beam.items.size() < beam_size_) {
      beam.items.push_back(std::move(e));
      ++size_;
      good_ += good;
      if (beam_size_ != unbounded_beam) beam.refresh_worst();
      return;
    }
    auto& worst = beam.items[beam.worst];
    if (!better(e, worst)) return;
    good_ -= worst.good;
    good_ += good;
    worst = std::move(e);
    beam.refresh_worst();
  }

  entry pop_front() {
    if (empty()) throw contract_violation("pop from an empty queue");
    auto it = beams_.begin();
    while (it->second.next == it->second.items.size()) it = beams_.erase(it);
    auto& beam = it->second;
    if (!beam.popping) {
      std::sort(beam.items.begin(), beam.items.end(), better);
      beam.popping = true;
    }
    entry e = std::move(beam.items[beam.next++]);
    --size_;
    good_ -= e.good;
    if (beam.next == beam.items.size()) beams_.erase(it);
    return e;
  }

  void clear() {
    beams_.clear();
    size_ = 0;
    good_ = 0;
  }

  // Remaining entries, each beam in priority order, lowest progress first.
  std::vector<NodePtr> nodes() const {
    std::vector<NodePtr> out;
    out.reserve(size_);
    for (const auto& [progress, beam] : beams_) {
      std::vector<const entry*> live;
      for (std::size_t i = beam.next; i < beam.items.size(); ++i) live.push_back(&beam.items[i]);
      if (!beam.popping)
        std::sort(live.begin(), live.end(), [](const entry* a, const entry* b) { return better(*a, *b); });
      for (const auto* e : live) out.push_back(e->node);
    }
    return out;
  }

  static bool better(const entry& a, const entry& b) {
    if (a.node->score != b.node->score) return a.node->score > b.node->score;
    if (a.node->depth != b.node->depth) return a.node->depth < b.node->depth;
    return a.seq < b.seq;
  }

 private:
  struct beam {
    std::vector<entry> items;
    std::size_t worst = 0;
    std::size_t next = 0;
    bool popping = false;

    void refresh_worst() {
      worst = 0;
      for (std::size_t i = 1; i < items.size(); ++i)
        if (better(items[worst], items[i])) worst = i;
    }
  };

  std::size_t beam_size_;
  std::map<std::size_t, beam> beams_;
  std::size_t size_ = 0;
  std::size_t good_ = 0;
  std::uint64_t next_seq_ = 0;
};

// Adds candidates to the queue, keeping the top beam_size per progress value.
template <class NodePtr, class Progress>
void beam_enqueue(beam_queue<NodePtr>& queue, std::span<const NodePtr> candidates, Progress&& progress) {
  for (const auto& n : candidates) queue.push(n, progress(*n));
}

namespace detail {
template <class NodePtr>
struct sink_archetype {
  bool admits(std::size_t, double) const { return true; }
  void push(NodePtr) {}
};
}  // namespace detail

template <class P>
concept search_problem = requires(const P& p, const typename P::node_ptr& n, const weight_vector& w,
                                  detail::sink_archetype<typename P::node_ptr>& sink) {
  { p.initial() } -> std::convertible_to<typename P::node_ptr>;
  p.expand(n, w, sink);
  { p.is_goal(*n) } -> std::convertible_to<bool>;
  { p.progress(*n) } -> std::convertible_to<std::size_t>;
  { n->score } -> std::convertible_to<double>;
  { n->depth } -> std::convertible_to<std::size_t>;
};

template <class P>
concept learnable_problem =
    search_problem<P> && requires(const P& p, const typename P::node_ptr& n, const weight_vector& w) {
      { p.is_good(*n) } -> std::convertible_to<bool>;
      { p.good_successors(n, w) } -> std::convertible_to<std::vector<typename P::node_ptr>>;
      { p.features(n, w) } -> std::convertible_to<sparse_vector>;
      { p.rescore(n, w) } -> std::convertible_to<typename P::node_ptr>;
    };

template <class NodePtr>
struct update_event {
  const NodePtr& popped;
  const sparse_vector& difference;  // after any filtering
  const update_record& record;
  std::size_t offending = 0;  // |{node} u nodes|
};

template <class NodePtr>
struct learn_options {
  // May zero out parts of the sibling/offender difference before projection.
  std::function<void(sparse_vector& difference, const NodePtr& popped)> filter_difference;
  std::function<void(const update_event<NodePtr>&)> on_update;
  // Evaluates the y-good test on every successor and throws if a y-good node
  // appears under a parent that is not.
  bool audit_monotonicity = false;
};

struct learn_report {
  std::size_t updates = 0;
  std::size_t expansions = 0;
};

namespace detail {
template <class P>
struct learning_sink {
  const P& problem;
  beam_queue<typename P::node_ptr>& queue;
  bool parent_good;
  bool audit;

  bool admits(std::size_t progress, double score) const { return queue.admits(progress, score); }
  void push(typename P::node_ptr n) {
    bool good = false;
    if (parent_good || audit) good = problem.is_good(*n);
    if (good && !parent_good) throw contract_violation("y-good node below a node that is not y-good");
    const auto progress = problem.progress(*n);
    queue.push(std::move(n), progress, good);
  }
};

template <class P>
struct decoding_sink {
  const P& problem;
  beam_queue<typename P::node_ptr>& queue;

  bool admits(std::size_t progress, double score) const { return queue.admits(progress, score); }
  void push(typename P::node_ptr n) {
    const auto progress = problem.progress(*n);
    queue.push(std::move(n), progress);
  }
};
}  // namespace detail

// One online pass over a single (input, gold) pair bound into `problem`.
template <learnable_problem P>
learn_report learn_one_example(const P& problem, learner_state& st,
                               const learn_options<typename P::node_ptr>& opts = {}) {
  using node_ptr = typename P::node_ptr;
  learn_report report;
  beam_queue<node_ptr> queue(st.beam_size);
  node_ptr start = problem.initial();
  if (!problem.is_good(*start)) throw contract_violation("initial node is not y-good");
  queue.push(start, problem.progress(*start), true);
  node_ptr anchor;  // most recently expanded y-good node

  while (!queue.empty()) {
    auto popped = queue.pop_front();
    const node_ptr& node = popped.node;
    const bool goal = problem.is_goal(*node);

    if ((!popped.good && queue.good_count() == 0) || (goal && !popped.good)) {
      if (!anchor) throw contract_violation("search left the gold path before expanding any y-good node");
      std::vector<node_ptr> sibs = problem.good_successors(anchor, st.w);
      std::vector<node_ptr> unique;
      for (auto& s : sibs)
        if (std::none_of(unique.begin(), unique.end(), [&](const node_ptr& u) { return u == s; }))
          unique.push_back(std::move(s));
      if (unique.empty()) throw contract_violation("y-good node without y-good successors");

      std::vector<node_ptr> offenders = queue.nodes();
      offenders.insert(offenders.begin(), node);
      std::vector<sparse_vector> good_features;
      std::vector<sparse_vector> bad_features;
      for (const auto& s : unique) good_features.push_back(problem.features(s, st.w));
      for (const auto& b : offenders) bad_features.push_back(problem.features(b, st.w));

      sparse_vector difference = mean_of(good_features) - mean_of(bad_features);
      if (opts.filter_difference) opts.filter_difference(difference, node);
      const update_record rec = apply_margin_step(st, difference);
      ++report.updates;
      if (opts.on_update) opts.on_update(update_event<node_ptr>{node, difference, rec, offenders.size()});

      queue.clear();
      for (const auto& s : unique) {
        node_ptr rescored = problem.rescore(s, st.w);
        const auto progress = problem.progress(*rescored);
        queue.push(std::move(rescored), progress, true);
      }
      continue;
    }

    if (goal) return report;
    if (popped.good) anchor = node;
    detail::learning_sink<P> sink{problem, queue, popped.good, opts.audit_monotonicity};
    problem.expand(node, st.w, sink);
    ++report.expansions;
  }
  throw search_error("queue exhausted before reaching a goal");
}

// Beam search with frozen weights; returns the first goal popped.
template <search_problem P>
typename P::node_ptr decode(const P& problem, const weight_vector& w, std::size_t beam_size) {
  using node_ptr = typename P::node_ptr;
  beam_queue<node_ptr> queue(beam_size);
  node_ptr start = problem.initial();
  queue.push(start, problem.progress(*start));
  while (!queue.empty()) {
    auto popped = queue.pop_front();
    if (problem.is_goal(*popped.node)) return popped.node;
    detail::decoding_sink<P> sink{problem, queue};
    problem.expand(popped.node, w, sink);
  }
  throw search_error("no goal node reachable");
}

}  // namespace laso
