// Sparse feature vectors and the online weight store used by the linear scorer.
#pragma once

#include <algorithm>
#include <atomic>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

namespace laso {

using feature_id = std::uint32_t;
using feature_key = std::uint64_t;

// A meta-feature is the product of a base feature and a decision feature; its
// key packs both interned ids so the weight store can be laid out by base row.
constexpr feature_key make_meta_key(feature_id base, feature_id decision) noexcept {
  return (static_cast<feature_key>(base) << 32) | decision;
}
constexpr feature_id base_of(feature_key key) noexcept { return static_cast<feature_id>(key >> 32); }
constexpr feature_id decision_of(feature_key key) noexcept {
  return static_cast<feature_id>(key & 0xffffffffu);
}

struct sparse_entry {
  feature_key key;
  double value;
  friend bool operator==(const sparse_entry&, const sparse_entry&) = default;
};

// Sorted (key, value) list. Keys are unique and no stored value is zero.
class sparse_vector {
 public:
  sparse_vector() = default;

  // Sums duplicate keys and drops zeros; input order is irrelevant.
  static sparse_vector from_entries(std::vector<sparse_entry> entries) {
    std::sort(entries.begin(), entries.end(),
              [](const sparse_entry& a, const sparse_entry& b) { return a.key < b.key; });
    sparse_vector out;
    out.entries_.reserve(entries.size());
    for (const auto& e : entries) {
      if (!out.entries_.empty() && out.entries_.back().key == e.key)
        out.entries_.back().value += e.value;
      else
        out.entries_.push_back(e);
    }
    out.drop_zeros();
    return out;
  }

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  auto begin() const noexcept { return entries_.begin(); }
  auto end() const noexcept { return entries_.end(); }
  const std::vector<sparse_entry>& entries() const noexcept { return entries_; }

  double get(feature_key key) const noexcept {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), key,
                               [](const sparse_entry& e, feature_key k) { return e.key < k; });
    return it != entries_.end() && it->key == key ? it->value : 0.0;
  }

  // this += alpha * other, by a linear merge.
  void add_scaled(const sparse_vector& other, double alpha) {
    if (alpha == 0.0 || other.empty()) return;
    std::vector<sparse_entry> merged;
    merged.reserve(entries_.size() + other.entries_.size());
    auto a = entries_.begin();
    auto b = other.entries_.begin();
    while (a != entries_.end() || b != other.entries_.end()) {
      if (b == other.entries_.end() || (a != entries_.end() && a->key < b->key)) {
        merged.push_back(*a++);
      } else if (a == entries_.end() || b->key < a->key) {
        merged.push_back({b->key, alpha * b->value});
        ++b;
      } else {
        merged.push_back({a->key, a->value + alpha * b->value});
        ++a;
        ++b;
      }
    }
    entries_ = std::move(merged);
    drop_zeros();
  }

  sparse_vector& operator+=(const sparse_vector& other) {
    add_scaled(other, 1.0);
    return *this;
  }
  sparse_vector& operator-=(const sparse_vector& other) {
    add_scaled(other, -1.0);
    return *this;
  }
  friend sparse_vector operator+(sparse_vector a, const sparse_vector& b) { return a += b; }
  friend sparse_vector operator-(sparse_vector a, const sparse_vector& b) { return a -= b; }

  void scale(double alpha) {
    if (alpha == 0.0) {
      entries_.clear();
      return;
    }
    for (auto& e : entries_) e.value *= alpha;
    drop_zeros();
  }

  double squared_norm() const noexcept {
    double s = 0.0;
    for (const auto& e : entries_) s += e.value * e.value;
    return s;
  }
  double norm() const noexcept { return std::sqrt(squared_norm()); }

  friend bool operator==(const sparse_vector&, const sparse_vector&) = default;

 private:
  void drop_zeros() {
    std::erase_if(entries_, [](const sparse_entry& e) { return e.value == 0.0; });
  }

  std::vector<sparse_entry> entries_;
};

inline double dot(const sparse_vector& a, const sparse_vector& b) noexcept {
  double s = 0.0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (i->key < j->key)
      ++i;
    else if (j->key < i->key)
      ++j;
    else
      s += (i++)->value * (j++)->value;
  }
  return s;
}

// Model parameters. Stored row-major by base feature so that scoring a set of
// base features against every decision touches one hash lookup per base.
// The vector is kept as scale * raw so that projection onto the unit ball is
// O(1); the squared norm is tracked incrementally.
class weight_vector {
 public:
  struct cell {
    feature_id decision;
    double raw;
  };

  weight_vector() : version_(next_version()) {}

  // Changes on every mutation and is unique across instances, so it can key
  // caches of derived scores. Copies share the version of their source.
  std::uint64_t version() const noexcept { return version_; }

  double scale() const noexcept { return scale_; }

  std::span<const cell> row(feature_id base) const noexcept {
    auto it = rows_.find(base);
    if (it == rows_.end()) return {};
    return it->second;
  }

  double get(feature_key key) const noexcept {
    auto cells = row(base_of(key));
    auto it = std::lower_bound(cells.begin(), cells.end(), decision_of(key),
                               [](const cell& c, feature_id d) { return c.decision < d; });
    return it != cells.end() && it->decision == decision_of(key) ? scale_ * it->raw : 0.0;
  }

  void set(feature_key key, double value) {
    double& raw = slot(key);
    raw_sq_ += (value / scale_) * (value / scale_) - raw * raw;
    raw = value / scale_;
    version_ = next_version();
  }

  double dot(const sparse_vector& v) const noexcept {
    double s = 0.0;
    for (const auto& e : v) {
      auto cells = row(base_of(e.key));
      if (cells.empty()) continue;
      auto it = std::lower_bound(cells.begin(), cells.end(), decision_of(e.key),
                                 [](const cell& c, feature_id d) { return c.decision < d; });
      if (it != cells.end() && it->decision == decision_of(e.key)) s += it->raw * e.value;
    }
    return scale_ * s;
  }

  // w += alpha * v
  void add_scaled(const sparse_vector& v, double alpha) {
    if (alpha == 0.0) return;
    const double step = alpha / scale_;
    for (const auto& e : v) {
      double& raw = slot(e.key);
      const double updated = raw + step * e.value;
      raw_sq_ += updated * updated - raw * raw;
      raw = updated;
    }
    if (++since_refresh_ >= 256) refresh_norm();
    version_ = next_version();
  }

  double squared_norm() const noexcept { return scale_ * scale_ * std::max(raw_sq_, 0.0); }
  double norm() const noexcept { return std::sqrt(squared_norm()); }

  // w <- w / max(1, |w|)
  void project_unit() {
    const double n = norm();
    if (n > 1.0) {
      scale_ /= n;
      version_ = next_version();
    }
    if (scale_ < 1e-100) fold_scale();
  }

  std::size_t size() const noexcept {
    std::size_t n = 0;
    for (const auto& [base, cells] : rows_) n += cells.size();
    return n;
  }

  // All stored weights, sorted by key, scale applied, zeros omitted.
  sparse_vector to_sparse() const {
    std::vector<sparse_entry> out;
    out.reserve(size());
    for (const auto& [base, cells] : rows_)
      for (const auto& c : cells) out.push_back({make_meta_key(base, c.decision), scale_ * c.raw});
    return sparse_vector::from_entries(std::move(out));
  }

 private:
  static std::uint64_t next_version() {
    static std::atomic<std::uint64_t> counter{0};
    return ++counter;
  }

  double& slot(feature_key key) {
    auto& cells = rows_[base_of(key)];
    const feature_id d = decision_of(key);
    auto it = std::lower_bound(cells.begin(), cells.end(), d,
                               [](const cell& c, feature_id x) { return c.decision < x; });
    if (it == cells.end() || it->decision != d) it = cells.insert(it, cell{d, 0.0});
    return it->raw;
  }

  void refresh_norm() {
    since_refresh_ = 0;
    raw_sq_ = 0.0;
    for (const auto& [base, cells] : rows_)
      for (const auto& c : cells) raw_sq_ += c.raw * c.raw;
  }

  void fold_scale() {
    for (auto& [base, cells] : rows_)
      for (auto& c : cells) c.raw *= scale_;
    scale_ = 1.0;
    refresh_norm();
  }

  std::unordered_map<feature_id, std::vector<cell>> rows_;
  double scale_ = 1.0;
  double raw_sq_ = 0.0;
  std::size_t since_refresh_ = 0;
  std::uint64_t version_;
};

}  // namespace laso
