// The EDT search problem for one document: successor scoring, step feature
// materialization and the gold oracle.
//
// Scoring never builds meta-feature vectors. For each base feature list the
// weight rows are accumulated into a dense array indexed by decision id
// (decision names are interned first, so their ids are small); a decision's
// score is then a sum of a few array entries. Materialized step features are
// built from the same base lists and are only needed for updates.
#pragma once

#include <array>
#include <cstring>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "laso/edt/document.hpp"
#include "laso/edt/features.hpp"
#include "laso/edt/hypothesis.hpp"
#include "laso/edt/linkage.hpp"
#include "laso/edt/resources.hpp"
#include "laso/feature_registry.hpp"
#include "laso/search.hpp"

namespace laso::edt {

struct model_spec {
  inventory labels;
  class_set classes = class_set::all();
  linkage_type linkage = linkage_type::intelligent;
  std::size_t max_length = 10;
};

// Up to six decision ids fired by one step in one family.
struct decision_ids {
  std::array<feature_id, 6> ids{};
  std::uint8_t n = 0;
  void push(feature_id id) { ids[n++] = id; }
  const feature_id* begin() const { return ids.data(); }
  const feature_id* end() const { return ids.data() + n; }
};

class decision_table {
 public:
  decision_table(const inventory& inv, feature_registry& reg) {
    for (const auto& name : all_decision_names(inv)) reg.intern(name);
    auto id = [&](const std::string& name) { return *reg.find(name); };
    ent_no = id("ent=no");
    lab_o = id("lab=O");
    const auto& labels = inv.labels();
    for (std::size_t li = 0; li < labels.size(); ++li) {
      const mention_decision d{1, true, labels[li], new_chain};
      decision_ids s, st;
      for (const auto& n : simple_decision_names(inv, d)) s.push(id(n));
      for (const auto& n : coref_decision_names(inv, d, std::nullopt)) st.push(id(n));
      simple_.push_back(s);
      start_.push_back(st);
      lab_.push_back(id(boundary_decision_name(inv, d)));
      label_index_.emplace(pack(labels[li]), li);
    }
    chain_cont_ = id("chain=cont");
    const auto& types = inv.types();
    for (std::size_t t = 0; t < types.size(); ++t) {
      ctype_.push_back(id("ctype=" + types[t].name));
      csub_.emplace_back();
      for (const auto& sub : types[t].subtypes) csub_.back().push_back(id("csub=" + types[t].name + "." + sub));
      ctt_.emplace_back();
      for (std::size_t u = 0; u < types.size(); ++u) ctt_.back().push_back(id("ctt=" + types[t].name + ">" + types[u].name));
    }
    for (auto a : inv.mention_types())
      for (auto b : inv.mention_types())
        cpair_[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
            id("cpair=" + std::string(to_string(a)) + ">" + std::string(to_string(b)));

    for (const auto& name : all_decision_names(inv)) size_ = std::max<std::size_t>(size_, id(name) + 1);
    coref_.assign(size_, false);
    for (const auto& name : all_decision_names(inv))
      if (is_coref_decision_name(name)) coref_[id(name)] = true;
  }

  feature_id ent_no = 0;
  feature_id lab_o = 0;

  std::size_t size() const noexcept { return size_; }
  std::size_t label_index(const label& l) const { return label_index_.at(pack(l)); }
  const decision_ids& simple(std::size_t li) const { return simple_[li]; }
  feature_id lab(std::size_t li) const { return lab_[li]; }
  const decision_ids& start(std::size_t li) const { return start_[li]; }

  decision_ids cont(const label& current, const chain_summary& chain) const {
    decision_ids out;
    out.push(chain_cont_);
    out.push(ctype_[chain.first.type]);
    out.push(cpair_[static_cast<std::size_t>(chain.last_mtype)][static_cast<std::size_t>(current.mtype)]);
    out.push(ctt_[chain.first.type][current.type]);
    if (chain.first.subtype >= 0) out.push(csub_[chain.first.type][static_cast<std::size_t>(chain.first.subtype)]);
    return out;
  }

  bool is_coref(feature_id decision) const { return decision < size_ && coref_[decision]; }

 private:
  static std::uint32_t pack(const label& l) {
    return (static_cast<std::uint32_t>(l.type) << 16) | (static_cast<std::uint32_t>(l.subtype + 1) << 8) |
           static_cast<std::uint32_t>(l.mtype);
  }

  std::vector<decision_ids> simple_, start_;
  std::vector<feature_id> lab_;
  feature_id chain_cont_ = 0;
  std::vector<feature_id> ctype_;
  std::vector<std::vector<feature_id>> csub_, ctt_;
  std::array<std::array<feature_id, mention_type_count>, mention_type_count> cpair_{};
  std::unordered_map<std::uint32_t, std::size_t> label_index_;
  std::size_t size_ = 0;
  std::vector<bool> coref_;
};

// Feature space shared by every document: spec, resources, names and
// decision ids. While `grow` is set, unseen base names are interned;
// afterwards they are dropped (their weights are zero anyway).
class edt_model {
 public:
  edt_model(model_spec s, const resource_bundle& res)
      : spec(std::move(s)), resources(&res), decisions(spec.labels, registry) {}
  edt_model(model_spec s, const resource_bundle& res, feature_registry reg)
      : spec(std::move(s)), resources(&res), registry(std::move(reg)), decisions(spec.labels, registry) {}

  model_spec spec;
  const resource_bundle* resources;
  feature_registry registry;
  decision_table decisions;
  bool grow = true;

  std::optional<feature_id> base(std::string_view name) {
    if (grow) return registry.intern(name);
    return registry.find(name);
  }
};

class edt_problem {
 public:
  using node_ptr = edt::node_ptr;
  using id_value = std::pair<feature_id, double>;
  using id_list = std::vector<id_value>;

  edt_problem(edt_model& model, const document& doc, search_space space, const gold_standard* gold = nullptr)
      : model_(&model), doc_(&doc), space_(space), gold_(gold) {
    space_.labels = &model.spec.labels;
    space_.max_length = model.spec.max_length;
    if (space_.mode == search_mode::coref && !space_.mentions)
      throw std::invalid_argument("coreference-only search needs a mention skeleton");
    const std::size_t n = doc.size();
    max_len_ = std::min(space_.max_length, n);
    if (space_.mode == search_mode::coref) {
      max_len_ = 1;
      for (const auto& e : space_.mentions->entries) max_len_ = std::max(max_len_, e.end - e.start);
    }
    if (max_len_ == 0) max_len_ = 1;
    spans_.resize(n * max_len_);
    lower_.reserve(n);
    for (const auto& t : doc.tokens) lower_.push_back(lowercase(t.text));
    word_ids_.reserve(n);
    std::unordered_map<std::string, std::uint32_t> ids;
    for (const auto& w : lower_) word_ids_.push_back(ids.emplace(w, static_cast<std::uint32_t>(ids.size())).first->second);
    const auto& labels = model.spec.labels.labels();
    for (const auto& l : labels) {
      label_names_.push_back(model.spec.labels.label_name(l));
      history_names_.push_back("his|prev=" + label_names_.back());
    }
  }

  const document& doc() const noexcept { return *doc_; }
  const search_space& space() const noexcept { return space_; }
  const gold_standard* gold() const noexcept { return gold_; }
  edt_model& model() const noexcept { return *model_; }

  node_ptr initial() const { return make_root(); }
  bool is_goal(const hyp_node& n) const { return n.covered == doc_->size(); }
  std::size_t progress(const hyp_node& n) const { return n.covered; }

  bool is_good(const hyp_node& n) const {
    if (!gold_) throw contract_violation("y-good test without a gold annotation");
    return is_y_good(n, *gold_);
  }

  template <class Sink>
  void expand(const node_ptr& node, const weight_vector& w, Sink& sink) const {
    sync(w);
    const hyp_node& parent = *node;
    const std::size_t n = doc_->size();
    if (parent.covered >= n) return;
    const prefix_view pv = view_of(parent);
    const auto decisions = successor_decisions(parent.covered, parent.chain_count, n, space_);
    expansion_state st = prepare(pv, parent, w);
    const double scale = w.scale();
    std::vector<std::unique_ptr<span_state>> by_len(max_len_ + 1);
    for (const auto& d : decisions) {
      auto& ss = by_len[d.length];
      if (!ss) ss = std::make_unique<span_state>(prepare_span(pv, st, {parent.covered, parent.covered + d.length}, w));
      const double total = parent.score + scale * raw_step_score(d, pv, st, *ss, w);
      if (!sink.admits(parent.covered + d.length, total)) continue;
      sink.push(make_child(node, d, total));
    }
  }

  std::vector<node_ptr> successors(const node_ptr& node, const weight_vector& w) const {
    collector c;
    expand(node, w, c);
    return std::move(c.nodes);
  }

  std::vector<node_ptr> good_successors(const node_ptr& node, const weight_vector& w) const {
    std::vector<node_ptr> out;
    for (auto& s : successors(node, w))
      if (is_good(*s)) out.push_back(std::move(s));
    return out;
  }

  // Features of the step that produced `n` (n must not be the root).
  const sparse_vector& step_features(const hyp_node& n, const weight_vector& w) const {
    if (!n.parent) throw contract_violation("the initial node has no step features");
    const bool weight_dependent = n.decision.entity && n.decision.link != new_chain &&
                                  space_.mode != search_mode::detect &&
                                  (model_->spec.linkage == linkage_type::max ||
                                   model_->spec.linkage == linkage_type::min ||
                                   model_->spec.linkage == linkage_type::intelligent);
    if (n.step_features && (!weight_dependent || n.step_features_version == w.version())) return *n.step_features;
    n.step_features = std::make_shared<const sparse_vector>(materialize_step(*n.parent, n.decision, w));
    n.step_features_version = w.version();
    return *n.step_features;
  }

  // Phi of the whole path from the root.
  sparse_vector features(const node_ptr& n, const weight_vector& w) const {
    std::vector<sparse_entry> all;
    for (const hyp_node* p = n.get(); p->parent; p = p->parent.get()) {
      const auto& f = step_features(*p, w);
      all.insert(all.end(), f.begin(), f.end());
    }
    return sparse_vector::from_entries(std::move(all));
  }

  node_ptr rescore(const node_ptr& n, const weight_vector& w) const {
    auto copy = std::make_shared<hyp_node>(*n);
    copy->score = w.dot(features(n, w));
    return copy;
  }

  // Follows the gold decisions from the root (scores left at zero).
  std::vector<node_ptr> gold_path() const {
    if (!gold_) throw contract_violation("gold path without a gold annotation");
    std::vector<node_ptr> out{make_root()};
    for (const auto& d : gold_->path) out.push_back(make_child(out.back(), d, 0.0));
    return out;
  }

  // The hypothesis prefix as seen by feature extractors.
  prefix_view view_of(const hyp_node& n) const {
    std::vector<const hyp_node*> steps(n.depth);
    const hyp_node* p = &n;
    for (std::size_t i = n.depth; i-- > 0; p = p->parent.get()) steps[i] = p;
    prefix_view v;
    v.covered = n.covered;
    v.chains.resize(n.chain_count);
    std::size_t pos = 0;
    for (const auto* s : steps) {
      if (s->decision.entity) {
        v.chains[static_cast<std::size_t>(s->chain)].push_back(v.mentions.size());
        v.mentions.push_back({{pos, pos + s->decision.length}, s->decision.lab, static_cast<std::size_t>(s->chain)});
      }
      pos += s->decision.length;
    }
    auto name = [&](const hyp_node* s) {
      return s->decision.entity ? label_names_[model_->decisions.label_index(s->decision.lab)] : std::string("O");
    };
    if (!steps.empty()) v.last_label = name(steps.back());
    if (steps.size() > 1) v.second_last_label = name(steps[steps.size() - 2]);
    return v;
  }

 private:
  struct collector {
    std::vector<node_ptr> nodes;
    bool admits(std::size_t, double) const { return true; }
    void push(node_ptr n) { nodes.push_back(std::move(n)); }
  };

  struct span_static {
    bool ready = false;
    id_list det;  // detection bases (crossed with simple decisions)
    id_list bnd;  // span part of the boundary bases (crossed with the label)
    id_list cw;   // current words for chain decisions
  };

  struct chain_info {
    chain_summary summary;
    std::vector<mention_type> mtypes;
    std::vector<double> acc;  // bias and count bases
  };

  struct expansion_state {
    std::vector<double> bnd_acc;    // state part of the boundary bases
    std::vector<double> start_acc;  // bias and count bases of a new chain
    std::vector<chain_info> chains;
  };

  struct span_state {
    token_span span;
    std::vector<double> acc;     // detection bases, read at simple decisions
    std::vector<double> bacc;    // boundary bases, read at the label decision
    const std::vector<double>* cw = nullptr;
    // per chain, per mention type: selected targets
    std::vector<std::array<std::optional<link_selection>, mention_type_count>> selections;
  };

  // ---- base lists ------------------------------------------------------------

  id_list to_ids(const feature_list& fs) const {
    id_list out;
    out.reserve(fs.size());
    for (const auto& f : fs)
      if (auto id = model_->base(f.name)) out.emplace_back(*id, f.value);
    return out;
  }

  const span_static& statics(token_span s) const {
    auto& c = spans_[s.start * max_len_ + (s.size() - 1)];
    if (!c.ready) {
      const auto& classes = model_->spec.classes;
      c.det = to_ids(detection_features(*doc_, s, *model_->resources, classes));
      c.bnd = to_ids(boundary_span_features(*doc_, s));
      if (classes.has(feature_class::lexical)) {
        feature_list cw;
        for (std::size_t i = s.start; i < s.end; ++i) cw.push_back({"lex|cw=" + lower_[i]});
        c.cw = to_ids(cw);
      }
      c.ready = true;
    }
    return c;
  }

  id_list history_ids(token_span s, const prefix_view& v) const {
    if (!model_->spec.classes.has(feature_class::history)) return {};
    std::vector<bool> seen(label_names_.size(), false);
    for (const auto& m : v.mentions) {
      bool hit = false;
      for (std::size_t i = s.start; i < s.end && !hit; ++i)
        for (std::size_t j = m.span.start; j < m.span.end && !hit; ++j) hit = word_ids_[i] == word_ids_[j];
      if (hit) seen[model_->decisions.label_index(m.lab)] = true;
    }
    feature_list fs;
    for (std::size_t li = 0; li < seen.size(); ++li)
      if (seen[li]) fs.push_back({history_names_[li]});
    return to_ids(fs);
  }

  id_list boundary_state_ids(const prefix_view& v) const { return to_ids(boundary_state_features(*doc_, v)); }

  // Bias plus count features for starting (nullopt) or continuing a chain.
  id_list chain_ids(const prefix_view& v, token_span s, std::optional<std::size_t> chain) const {
    feature_list fs{{"bias", 1.0}};
    if (model_->spec.classes.has(feature_class::count)) {
      auto c = extract_count(*doc_, v, s, chain);
      fs.insert(fs.end(), c.begin(), c.end());
    }
    return to_ids(fs);
  }

  static std::uint64_t pair_key(token_span cur, token_span ant) {
    return (static_cast<std::uint64_t>(cur.start) << 48) | (static_cast<std::uint64_t>(cur.size()) << 32) |
           (static_cast<std::uint64_t>(ant.start) << 16) | static_cast<std::uint64_t>(ant.size());
  }

  const id_list& pair_ids(token_span cur, token_span ant) const {
    const auto key = pair_key(cur, ant);
    auto it = pairs_.find(key);
    if (it == pairs_.end())
      it = pairs_.emplace(key, to_ids(pair_features(*doc_, cur, ant, *model_->resources, model_->spec.classes))).first;
    return it->second;
  }

  // ---- dense accumulation ----------------------------------------------------

  void sync(const weight_vector& w) const {
    if (acc_version_ == w.version()) return;
    acc_version_ = w.version();
    span_acc_.assign(spans_.size(), {});
    bnd_acc_.assign(spans_.size(), {});
    cw_acc_.assign(spans_.size(), {});
    pair_acc_.clear();
    count_acc_.clear();
  }

  void accumulate(const id_list& ids, const weight_vector& w, std::vector<double>& acc) const {
    const std::size_t size = acc.size();
    for (const auto& [id, v] : ids)
      for (const auto& c : w.row(id))
        if (c.decision < size) acc[c.decision] += v * c.raw;
  }

  std::vector<double> zeros() const { return std::vector<double>(model_->decisions.size(), 0.0); }

  const std::vector<double>& span_acc(token_span s, const weight_vector& w, bool boundary) const {
    const std::size_t idx = s.start * max_len_ + (s.size() - 1);
    auto& acc = (boundary ? bnd_acc_ : span_acc_)[idx];
    if (acc.empty()) {
      acc = zeros();
      accumulate(boundary ? statics(s).bnd : statics(s).det, w, acc);
    }
    return acc;
  }

  const std::vector<double>& cw_acc(token_span s, const weight_vector& w) const {
    const std::size_t idx = s.start * max_len_ + (s.size() - 1);
    auto& acc = cw_acc_[idx];
    if (acc.empty()) {
      acc = zeros();
      accumulate(statics(s).cw, w, acc);
    }
    return acc;
  }

  const std::vector<double>& pair_acc(token_span cur, token_span ant, const weight_vector& w) const {
    const auto key = pair_key(cur, ant);
    auto it = pair_acc_.find(key);
    if (it == pair_acc_.end()) {
      auto acc = zeros();
      accumulate(pair_ids(cur, ant), w, acc);
      it = pair_acc_.emplace(key, std::move(acc)).first;
    }
    return it->second;
  }

  // Count features depend on the prefix only through a few integers, so
  // their accumulated rows are shared between beam entries.
  const std::vector<double>& count_acc(const prefix_view& v, token_span s, std::optional<std::size_t> chain,
                                       const weight_vector& w) const {
    std::string key;
    key.reserve(64);
    auto put = [&](std::uint64_t x) { key.append(reinterpret_cast<const char*>(&x), sizeof x); };
    put(s.start);
    put(v.mentions.size());
    put(v.chains.size());
    put(chain ? 1 : 0);
    if (chain && model_->spec.classes.has(feature_class::count)) {
      const auto& members = v.chains[*chain];
      put(members.size());
      put(members.back());
      put(v.mentions[members.back()].span.start);
      put(v.mentions[members.back()].span.end);
      put(v.mentions[members.front()].lab.type);
      for (std::size_t i = members.back() + 1; i < v.mentions.size(); ++i) put(v.mentions[i].lab.type);
      const double dens = decayed_density(members, v.mentions.size());
      std::uint64_t bits;
      std::memcpy(&bits, &dens, sizeof bits);
      put(bits);
    }
    auto it = count_acc_.find(key);
    if (it == count_acc_.end()) {
      auto acc = zeros();
      accumulate(chain_ids(v, s, chain), w, acc);
      it = count_acc_.emplace(std::move(key), std::move(acc)).first;
    }
    return it->second;
  }

  expansion_state prepare(const prefix_view& v, const hyp_node& parent, const weight_vector& w) const {
    expansion_state st;
    st.bnd_acc = zeros();
    accumulate(boundary_state_ids(v), w, st.bnd_acc);
    if (space_.mode == search_mode::detect) return st;
    const token_span at{parent.covered, parent.covered + 1};
    st.start_acc = count_acc(v, at, std::nullopt, w);
    st.chains.resize(v.chains.size());
    for (std::size_t c = 0; c < v.chains.size(); ++c) {
      auto& ci = st.chains[c];
      const auto& members = v.chains[c];
      ci.summary = {v.mentions[members.front()].lab, v.mentions[members.back()].lab.mtype};
      for (auto m : members) ci.mtypes.push_back(v.mentions[m].lab.mtype);
      ci.acc = count_acc(v, at, c, w);
    }
    return st;
  }

  span_state prepare_span(const prefix_view& v, const expansion_state& st, token_span s, const weight_vector& w) const {
    span_state ss;
    ss.span = s;
    ss.acc = span_acc(s, w, false);
    accumulate(history_ids(s, v), w, ss.acc);
    ss.bacc = span_acc(s, w, true);
    for (std::size_t i = 0; i < ss.bacc.size(); ++i) ss.bacc[i] += st.bnd_acc[i];
    if (space_.mode != search_mode::detect) {
      ss.cw = &cw_acc(s, w);
      ss.selections.resize(st.chains.size());
    }
    return ss;
  }

  static double sum_at(const std::vector<double>& acc, const decision_ids& ids) {
    double s = 0.0;
    for (auto id : ids) s += acc[id];
    return s;
  }

  // Step score before the weight scale is applied.
  double raw_step_score(const mention_decision& d, const prefix_view& v, const expansion_state& st,
                        span_state& ss, const weight_vector& w) const {
    const auto& table = model_->decisions;
    if (!d.entity) return ss.acc[table.ent_no] + ss.bacc[table.lab_o];
    const std::size_t li = table.label_index(d.lab);
    double score = sum_at(ss.acc, table.simple(li)) + ss.bacc[table.lab(li)];
    if (space_.mode == search_mode::detect) return score;

    if (d.link == new_chain) {
      const auto& ids = table.start(li);
      return score + sum_at(st.start_acc, ids) + sum_at(*ss.cw, ids);
    }
    const auto c = static_cast<std::size_t>(d.link);
    const auto& ci = st.chains[c];
    const auto ids = table.cont(d.lab, ci.summary);
    score += sum_at(ci.acc, ids) + sum_at(*ss.cw, ids);

    auto& sel = ss.selections[c][static_cast<std::size_t>(d.lab.mtype)];
    if (!sel) sel = select_link_targets(d.lab.mtype, ci.mtypes, model_->spec.linkage);
    const auto& members = v.chains[c];
    auto target_score = [&](std::size_t t) {
      return sum_at(pair_acc(ss.span, v.mentions[members[sel->targets[t]]].span, w), ids);
    };
    if (sel->agg == aggregation::max || sel->agg == aggregation::min) {
      double best = target_score(0);
      for (std::size_t t = 1; t < sel->targets.size(); ++t) {
        const double s = target_score(t);
        if (sel->agg == aggregation::max ? s > best : s < best) best = s;
      }
      return score + best;
    }
    double sum = 0.0;
    for (std::size_t t = 0; t < sel->targets.size(); ++t) sum += target_score(t);
    if (sel->agg == aggregation::mean) sum /= static_cast<double>(sel->targets.size());
    return score + sum;
  }

  // ---- materialization -------------------------------------------------------

  static sparse_vector base_vector(std::initializer_list<const id_list*> lists) {
    std::vector<sparse_entry> all;
    for (const auto* l : lists)
      for (const auto& [id, v] : *l) all.push_back({id, v});
    return sparse_vector::from_entries(std::move(all));
  }

  static sparse_vector decision_vector(const decision_ids& ids) {
    std::vector<sparse_entry> all;
    for (auto id : ids) all.push_back({id, 1.0});
    return sparse_vector::from_entries(std::move(all));
  }

  sparse_vector materialize_step(const hyp_node& parent, const mention_decision& d, const weight_vector& w) const {
    const auto& table = model_->decisions;
    const prefix_view v = view_of(parent);
    const token_span s{parent.covered, parent.covered + d.length};
    const auto& st = statics(s);
    const auto hist = history_ids(s, v);
    const auto bstate = boundary_state_ids(v);
    const sparse_vector det = base_vector({&st.det, &hist});
    const sparse_vector bnd = base_vector({&st.bnd, &bstate});

    decision_ids simple, lab;
    if (!d.entity) {
      simple.push(table.ent_no);
      lab.push(table.lab_o);
    } else {
      const std::size_t li = table.label_index(d.lab);
      simple = table.simple(li);
      lab.push(table.lab(li));
    }
    sparse_vector out = cross_features(det, decision_vector(simple));
    out += cross_features(bnd, decision_vector(lab));

    if (d.entity && space_.mode != search_mode::detect) {
      const std::size_t li = table.label_index(d.lab);
      const token_span at{parent.covered, parent.covered + 1};
      if (d.link == new_chain) {
        const auto counts = chain_ids(v, at, std::nullopt);
        out += cross_features(base_vector({&counts, &st.cw}), decision_vector(table.start(li)));
      } else {
        const auto c = static_cast<std::size_t>(d.link);
        const auto& members = v.chains.at(c);
        const chain_summary summary{v.mentions[members.front()].lab, v.mentions[members.back()].lab.mtype};
        const auto ids = table.cont(d.lab, summary);
        std::vector<mention_type> mtypes;
        for (auto m : members) mtypes.push_back(v.mentions[m].lab.mtype);
        const auto sel = select_link_targets(d.lab.mtype, mtypes, model_->spec.linkage);
        std::vector<sparse_vector> per_target;
        for (auto t : sel.targets) per_target.push_back(base_vector({&pair_ids(s, v.mentions[members[t]].span)}));
        const auto pair_part = combine_link_vectors(per_target, sel.agg, [&](std::size_t t) {
          double sc = 0.0;
          for (const auto& e : per_target[t])
            for (auto id : ids) sc += e.value * w.get(make_meta_key(static_cast<feature_id>(e.key), id));
          return sc;
        });
        const auto counts = chain_ids(v, at, c);
        sparse_vector bases = base_vector({&counts, &st.cw});
        bases += pair_part;
        out += cross_features(bases, decision_vector(ids));
      }
    }
    return model_->registry.filter_active(out);
  }

  edt_model* model_;
  const document* doc_;
  search_space space_;
  const gold_standard* gold_;
  std::size_t max_len_ = 1;
  std::vector<std::string> lower_;
  std::vector<std::uint32_t> word_ids_;
  std::vector<std::string> label_names_;
  std::vector<std::string> history_names_;

  mutable std::vector<span_static> spans_;
  mutable std::unordered_map<std::uint64_t, id_list> pairs_;

  mutable std::uint64_t acc_version_ = 0;
  mutable std::vector<std::vector<double>> span_acc_;
  mutable std::vector<std::vector<double>> bnd_acc_;
  mutable std::vector<std::vector<double>> cw_acc_;
  mutable std::unordered_map<std::uint64_t, std::vector<double>> pair_acc_;
  mutable std::unordered_map<std::string, std::vector<double>> count_acc_;
};

}  // namespace laso::edt
