// Left-to-right EDT hypotheses: decisions, search nodes, gold paths and y-goodness.
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "laso/edt/document.hpp"
#include "laso/sparse_vector.hpp"

namespace laso::edt {

inline constexpr std::int32_t new_chain = -1;

// One search operator: consume `length` tokens as NAE (length 1 only) or as a
// mention with a label that starts a chain or continues chain `link`.
struct mention_decision {
  std::uint16_t length = 1;
  bool entity = false;
  label lab{};
  std::int32_t link = new_chain;

  static mention_decision nae() { return {}; }
  friend bool operator==(const mention_decision&, const mention_decision&) = default;
};

struct hyp_node {
  std::shared_ptr<const hyp_node> parent;
  mention_decision decision;
  std::uint32_t covered = 0;
  std::uint32_t depth = 0;
  std::uint32_t chain_count = 0;
  std::uint32_t mention_count = 0;
  std::int32_t chain = -1;  // chain of the mention added by this step
  double score = 0.0;
  // Features of the step from `parent`, filled on first use; the version of
  // the weights they were built with matters only when they depend on them.
  mutable std::shared_ptr<const sparse_vector> step_features;
  mutable std::uint64_t step_features_version = 0;
};
using node_ptr = std::shared_ptr<const hyp_node>;

inline node_ptr make_root() { return std::make_shared<const hyp_node>(); }

inline node_ptr make_child(const node_ptr& parent, const mention_decision& d, double score) {
  auto n = std::make_shared<hyp_node>();
  n->parent = parent;
  n->decision = d;
  n->covered = parent->covered + d.length;
  n->depth = parent->depth + 1;
  n->chain_count = parent->chain_count;
  n->mention_count = parent->mention_count;
  if (d.entity) {
    ++n->mention_count;
    if (d.link == new_chain) {
      n->chain = static_cast<std::int32_t>(n->chain_count++);
    } else {
      if (d.link < 0 || static_cast<std::uint32_t>(d.link) >= parent->chain_count)
        throw std::out_of_range("link refers to a chain that does not exist");
      n->chain = d.link;
    }
  }
  n->score = score;
  return n;
}

struct chunk {
  std::size_t start = 0;
  std::size_t end = 0;
  bool entity = false;
  label lab{};
  std::int32_t chain = -1;
  friend bool operator==(const chunk&, const chunk&) = default;
};

struct hyp_mention {
  std::size_t start = 0;
  std::size_t end = 0;
  label lab{};
  std::size_t chain = 0;
};

// A complete labeling of a document prefix. Chain labels in `chunks` are
// arbitrary; the derived views renumber them densely by first mention.
class hypothesis {
 public:
  hypothesis() = default;
  explicit hypothesis(std::vector<chunk> chunks) : chunks_(std::move(chunks)) {
    for (const auto& c : chunks_) {
      if (c.start != covered_) throw std::invalid_argument("chunks must tile the prefix");
      if (c.end <= c.start) throw std::invalid_argument("empty chunk");
      covered_ = c.end;
    }
    std::unordered_map<std::int32_t, std::size_t> dense;
    for (const auto& c : chunks_) {
      if (!c.entity) continue;
      auto [it, fresh] = dense.emplace(c.chain, chains_.size());
      if (fresh) chains_.emplace_back();
      chains_[it->second].push_back(mentions_.size());
      mentions_.push_back({c.start, c.end, c.lab, it->second});
    }
  }

  std::size_t covered() const noexcept { return covered_; }
  const std::vector<chunk>& chunks() const noexcept { return chunks_; }
  const std::vector<hyp_mention>& mentions() const noexcept { return mentions_; }
  // Mention indices of each chain, chains ordered by first mention.
  const std::vector<std::vector<std::size_t>>& chains() const noexcept { return chains_; }

 private:
  std::size_t covered_ = 0;
  std::vector<chunk> chunks_;
  std::vector<hyp_mention> mentions_;
  std::vector<std::vector<std::size_t>> chains_;
};

inline std::vector<mention_decision> decision_path(const hyp_node& node) {
  std::vector<mention_decision> path(node.depth);
  const hyp_node* n = &node;
  for (std::size_t i = node.depth; i-- > 0; n = n->parent.get()) path[i] = n->decision;
  return path;
}

inline hypothesis materialize(const hyp_node& node) {
  std::vector<chunk> chunks;
  chunks.reserve(node.depth);
  std::vector<const hyp_node*> steps(node.depth);
  const hyp_node* n = &node;
  for (std::size_t i = node.depth; i-- > 0; n = n->parent.get()) steps[i] = n;
  std::size_t pos = 0;
  for (const auto* s : steps) {
    chunks.push_back({pos, pos + s->decision.length, s->decision.entity, s->decision.lab, s->chain});
    pos += s->decision.length;
  }
  return hypothesis(std::move(chunks));
}

enum class search_mode {
  joint,   // segmentation, labels and links together
  detect,  // every mention starts its own chain; no coreference decisions
  coref,   // mentions fixed by a skeleton; only links (and unknown pronoun types) vary
};

// Mentions handed to the coreference-only search.
struct skeleton {
  struct entry {
    std::size_t start = 0;
    std::size_t end = 0;
    label lab{};
  };
  std::vector<entry> entries;
  std::vector<std::int32_t> starting_at;  // token -> entry index or -1

  skeleton() = default;
  skeleton(std::vector<entry> e, std::size_t doc_size) : entries(std::move(e)), starting_at(doc_size, -1) {
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (entries[i].end > doc_size || entries[i].end <= entries[i].start)
        throw std::invalid_argument("skeleton mention outside the document");
      starting_at[entries[i].start] = static_cast<std::int32_t>(i);
    }
  }
};

struct search_space {
  const inventory* labels = nullptr;
  std::size_t max_length = 10;
  search_mode mode = search_mode::joint;
  const skeleton* mentions = nullptr;  // required in coref mode
  bool pronoun_types_given = true;     // coref mode: PRO labels fixed by the skeleton
};

// All legal operators at a prefix of `covered` tokens holding `chains` chains.
inline std::vector<mention_decision> successor_decisions(std::size_t covered, std::size_t chains,
                                                         std::size_t doc_size, const search_space& space) {
  std::vector<mention_decision> out;
  if (covered >= doc_size) return out;
  const auto& labels = space.labels->labels();
  auto add_links = [&](std::uint16_t len, const label& lab) {
    out.push_back({len, true, lab, new_chain});
    if (space.mode == search_mode::detect) return;
    for (std::size_t c = 0; c < chains; ++c) out.push_back({len, true, lab, static_cast<std::int32_t>(c)});
  };

  if (space.mode == search_mode::coref) {
    const std::int32_t at = space.mentions->starting_at.at(covered);
    if (at < 0) {
      out.push_back(mention_decision::nae());
      return out;
    }
    const auto& e = space.mentions->entries[static_cast<std::size_t>(at)];
    const auto len = static_cast<std::uint16_t>(e.end - e.start);
    if (e.lab.mtype == mention_type::pro && !space.pronoun_types_given) {
      for (const auto& lab : labels)
        if (lab.mtype == mention_type::pro) add_links(len, lab);
    } else {
      add_links(len, e.lab);
    }
    return out;
  }

  out.push_back(mention_decision::nae());
  const std::size_t longest = std::min(space.max_length, doc_size - covered);
  for (std::size_t len = 1; len <= longest; ++len)
    for (const auto& lab : labels) add_links(static_cast<std::uint16_t>(len), lab);
  return out;
}

class unreachable_gold : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The unique decision sequence producing a document's gold annotation.
struct gold_standard {
  std::vector<mention_decision> path;
  hypothesis full;
  std::vector<std::size_t> boundaries;  // covered after 0..n steps
};

inline std::optional<label> resolve_label(const gold_mention& m, const inventory& inv) {
  auto t = inv.type_index(m.entity_type);
  if (!t) return std::nullopt;
  auto s = inv.subtype_index(*t, m.subtype);
  if (!s) {
    // Annotated subtypes are ignored when the inventory does not model them.
    if (!inv.types()[*t].subtypes.empty()) return std::nullopt;
    s = -1;
  }
  if (!inv.has_mention_type(m.mtype)) return std::nullopt;
  return label{static_cast<std::uint8_t>(*t), *s, m.mtype};
}

// `own_chains`: every mention starts a new chain (mention-detection training).
inline gold_standard make_gold(const document& doc, const inventory& inv, std::size_t max_length,
                               bool own_chains = false) {
  gold_standard g;
  std::unordered_map<std::string, std::int32_t> chain_of;
  std::vector<chunk> chunks;
  std::size_t pos = 0;
  std::size_t next = 0;
  std::int32_t chains = 0;
  g.boundaries.push_back(0);
  while (pos < doc.size()) {
    if (next < doc.mentions.size() && doc.mentions[next].start == pos) {
      const auto& m = doc.mentions[next++];
      const std::size_t len = m.end - m.start;
      if (len > max_length)
        throw unreachable_gold("document '" + doc.id + "': mention at token " + std::to_string(m.start) +
                               " is longer than the maximum mention length");
      auto lab = resolve_label(m, inv);
      if (!lab)
        throw unreachable_gold("document '" + doc.id + "': mention at token " + std::to_string(m.start) +
                               " has a label outside the inventory");
      mention_decision d{static_cast<std::uint16_t>(len), true, *lab, new_chain};
      std::int32_t chain = chains;
      if (own_chains) {
        ++chains;
      } else if (auto it = chain_of.find(m.entity_id); it != chain_of.end()) {
        d.link = it->second;
        chain = it->second;
      } else {
        chain_of.emplace(m.entity_id, chains++);
      }
      g.path.push_back(d);
      chunks.push_back({pos, m.end, true, *lab, chain});
      pos = m.end;
    } else {
      if (next < doc.mentions.size() && doc.mentions[next].start < pos)
        throw unreachable_gold("document '" + doc.id + "': overlapping mentions");
      g.path.push_back(mention_decision::nae());
      chunks.push_back({pos, pos + 1, false, {}, -1});
      ++pos;
    }
    g.boundaries.push_back(pos);
  }
  g.full = hypothesis(std::move(chunks));
  return g;
}

namespace detail {
inline std::vector<std::size_t> canonical_chain_sequence(const std::vector<chunk>& chunks, std::size_t count) {
  std::unordered_map<std::int32_t, std::size_t> seen;
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < count; ++i) {
    if (!chunks[i].entity) continue;
    auto [it, fresh] = seen.emplace(chunks[i].chain, seen.size());
    out.push_back(it->second);
  }
  return out;
}
}  // namespace detail

// True iff the gold labeling is still reachable: the prefix ends on a gold
// boundary, its chunks and labels equal gold's, and its coreference partition
// equals gold's restricted to the prefix (compared as partitions).
inline bool is_y_good(const hypothesis& h, const gold_standard& gold) {
  const auto& mine = h.chunks();
  const auto& theirs = gold.full.chunks();
  if (mine.size() > theirs.size() || gold.boundaries[mine.size()] != h.covered()) return false;
  for (std::size_t i = 0; i < mine.size(); ++i) {
    const auto& a = mine[i];
    const auto& b = theirs[i];
    if (a.start != b.start || a.end != b.end || a.entity != b.entity) return false;
    if (a.entity && !(a.lab == b.lab)) return false;
  }
  return detail::canonical_chain_sequence(mine, mine.size()) ==
         detail::canonical_chain_sequence(theirs, mine.size());
}

// Same predicate on a search node: node chain ids are already dense by first
// mention, so decision equality along the path is partition equality.
inline bool is_y_good(const hyp_node& node, const gold_standard& gold) {
  if (node.depth > gold.path.size()) return false;
  const hyp_node* n = &node;
  for (std::size_t i = node.depth; i-- > 0; n = n->parent.get())
    if (!(n->decision == gold.path[i])) return false;
  return true;
}

}  // namespace laso::edt
