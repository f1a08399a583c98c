// Feature-name interning, frequency counts, count cutoff and base x decision crossing.
#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "laso/sparse_vector.hpp"

namespace laso {

struct string_hash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const noexcept { return std::hash<std::string_view>{}(s); }
};

// Bijection between canonical feature names and dense ids, plus the meta-feature
// counts gathered before training and the active set left after the cutoff.
class feature_registry {
 public:
  feature_id intern(std::string_view name) {
    if (name.empty()) throw std::invalid_argument("feature name must be nonempty");
    if (auto it = ids_.find(name); it != ids_.end()) return it->second;
    const auto id = static_cast<feature_id>(names_.size());
    names_.emplace_back(name);
    ids_.emplace(names_.back(), id);
    return id;
  }

  std::optional<feature_id> find(std::string_view name) const {
    if (auto it = ids_.find(name); it != ids_.end()) return it->second;
    return std::nullopt;
  }

  const std::string& name(feature_id id) const { return names_.at(id); }
  std::size_t size() const noexcept { return names_.size(); }

  // Canonical meta-feature text: "class|base-key|decision-key".
  std::string meta_name(feature_key key) const {
    return name(base_of(key)) + "|" + name(decision_of(key));
  }

  void add_count(feature_key key, std::uint32_t n = 1) { counts_[key] += n; }
  std::uint32_t count(feature_key key) const {
    auto it = counts_.find(key);
    return it == counts_.end() ? 0 : it->second;
  }
  std::size_t counted() const noexcept { return counts_.size(); }

  // Active set becomes { f : count(f) >= threshold }.
  void apply_cutoff(std::uint32_t threshold) {
    if (threshold == 0) throw std::invalid_argument("cutoff threshold must be positive");
    active_.clear();
    for (const auto& [key, c] : counts_)
      if (c >= threshold) active_.insert(key);
    cutoff_applied_ = true;
  }

  // Replaces the active set wholesale (model loading).
  void restore_active(const std::vector<feature_key>& keys) {
    active_ = {keys.begin(), keys.end()};
    cutoff_applied_ = true;
  }

  bool cutoff_applied() const noexcept { return cutoff_applied_; }

  // Every feature is active until a cutoff has been applied.
  bool is_active(feature_key key) const {
    return !cutoff_applied_ || active_.contains(key);
  }

  std::vector<feature_key> active_keys() const {
    std::vector<feature_key> out(active_.begin(), active_.end());
    std::sort(out.begin(), out.end());
    return out;
  }

  sparse_vector filter_active(const sparse_vector& v) const {
    if (!cutoff_applied_) return v;
    std::vector<sparse_entry> kept;
    kept.reserve(v.size());
    for (const auto& e : v)
      if (active_.contains(e.key)) kept.push_back(e);
    return sparse_vector::from_entries(std::move(kept));
  }

  const std::vector<std::string>& names() const noexcept { return names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, feature_id, string_hash, std::equal_to<>> ids_;
  std::unordered_map<feature_key, std::uint32_t> counts_;
  std::unordered_set<feature_key> active_;
  bool cutoff_applied_ = false;
};

inline feature_registry count_cutoff_filter(feature_registry registry, std::uint32_t threshold) {
  registry.apply_cutoff(threshold);
  return registry;
}

// Every (base, decision) pair becomes one meta-feature whose value is the
// product of the two values. Both inputs are keyed by plain feature ids.
inline sparse_vector cross_features(const sparse_vector& base, const sparse_vector& decision) {
  std::vector<sparse_entry> out;
  out.reserve(base.size() * decision.size());
  for (const auto& b : base)
    for (const auto& d : decision)
      out.push_back({make_meta_key(static_cast<feature_id>(b.key), static_cast<feature_id>(d.key)),
                     b.value * d.value});
  return sparse_vector::from_entries(std::move(out));
}

}  // namespace laso
