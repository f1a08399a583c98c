// Documents, gold mentions and the entity/mention label inventory.
#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace laso::edt {

enum class mention_type : std::uint8_t { nam = 0, nom = 1, pro = 2 };
inline constexpr std::size_t mention_type_count = 3;

inline std::string_view to_string(mention_type m) {
  switch (m) {
    case mention_type::nam: return "NAM";
    case mention_type::nom: return "NOM";
    case mention_type::pro: return "PRO";
  }
  return "?";
}

inline std::optional<mention_type> parse_mention_type(std::string_view s) {
  if (s == "NAM") return mention_type::nam;
  if (s == "NOM") return mention_type::nom;
  if (s == "PRO") return mention_type::pro;
  return std::nullopt;
}

struct token {
  std::string text;
  std::string pos;    // empty when untagged
  std::string chunk;  // empty when untagged
  friend bool operator==(const token&, const token&) = default;
};

struct gold_mention {
  std::size_t start = 0;  // [start, end)
  std::size_t end = 0;
  std::string entity_type;
  std::string subtype;  // empty when not annotated
  mention_type mtype = mention_type::nam;
  std::string entity_id;
  friend bool operator==(const gold_mention&, const gold_mention&) = default;
};

struct document {
  std::string id;
  std::vector<token> tokens;
  std::vector<std::size_t> sentence_ends;  // exclusive end offsets, strictly increasing
  std::vector<gold_mention> mentions;      // sorted by start, non-overlapping

  std::size_t size() const noexcept { return tokens.size(); }
  bool tagged() const noexcept {
    return !tokens.empty() && std::all_of(tokens.begin(), tokens.end(), [](const token& t) { return !t.pos.empty(); });
  }
  bool chunked() const noexcept {
    return !tokens.empty() &&
           std::all_of(tokens.begin(), tokens.end(), [](const token& t) { return !t.chunk.empty(); });
  }
  friend bool operator==(const document&, const document&) = default;
};

struct entity_type_spec {
  std::string name;
  std::vector<std::string> subtypes;
};

// A full mention label: entity type, optional subtype, mention type.
struct label {
  std::uint8_t type = 0;
  std::int8_t subtype = -1;  // -1: type has no subtypes
  mention_type mtype = mention_type::nam;
  friend bool operator==(const label&, const label&) = default;
};

class inventory {
 public:
  inventory() : inventory(ace2004_types()) {}
  explicit inventory(std::vector<entity_type_spec> types,
                     std::vector<mention_type> mtypes = {mention_type::nam, mention_type::nom, mention_type::pro})
      : types_(std::move(types)), mtypes_(std::move(mtypes)) {
    if (types_.empty()) throw std::invalid_argument("entity type inventory is empty");
    if (types_.size() > 64) throw std::invalid_argument("at most 64 entity types are supported");
    if (mtypes_.empty()) throw std::invalid_argument("mention type inventory is empty");
    for (std::size_t t = 0; t < types_.size(); ++t) {
      if (types_[t].subtypes.size() > 100) throw std::invalid_argument("too many subtypes");
      const auto type = static_cast<std::uint8_t>(t);
      if (types_[t].subtypes.empty()) {
        for (auto m : mtypes_) labels_.push_back({type, -1, m});
        continue;
      }
      for (std::size_t s = 0; s < types_[t].subtypes.size(); ++s)
        for (auto m : mtypes_) labels_.push_back({type, static_cast<std::int8_t>(s), m});
    }
  }

  static std::vector<entity_type_spec> ace2004_types() {
    return {{"PER", {}}, {"ORG", {}}, {"GPE", {}}, {"LOC", {}}, {"FAC", {}}, {"VEH", {}}, {"WEA", {}}};
  }

  const std::vector<entity_type_spec>& types() const noexcept { return types_; }
  const std::vector<mention_type>& mention_types() const noexcept { return mtypes_; }
  // Every (type, subtype, mention type) combination, in a fixed order.
  const std::vector<label>& labels() const noexcept { return labels_; }

  std::optional<std::size_t> type_index(std::string_view name) const {
    for (std::size_t i = 0; i < types_.size(); ++i)
      if (types_[i].name == name) return i;
    return std::nullopt;
  }

  std::optional<std::int8_t> subtype_index(std::size_t type, std::string_view name) const {
    const auto& subs = types_.at(type).subtypes;
    if (subs.empty()) return name.empty() ? std::optional<std::int8_t>(-1) : std::nullopt;
    for (std::size_t i = 0; i < subs.size(); ++i)
      if (subs[i] == name) return static_cast<std::int8_t>(i);
    return std::nullopt;
  }

  bool has_mention_type(mention_type m) const {
    return std::find(mtypes_.begin(), mtypes_.end(), m) != mtypes_.end();
  }

  std::optional<std::size_t> label_index(const label& l) const {
    for (std::size_t i = 0; i < labels_.size(); ++i)
      if (labels_[i] == l) return i;
    return std::nullopt;
  }

  const std::string& type_name(const label& l) const { return types_.at(l.type).name; }
  std::string subtype_name(const label& l) const {
    return l.subtype < 0 ? std::string{} : types_.at(l.type).subtypes.at(static_cast<std::size_t>(l.subtype));
  }

  // "PER/NAM" or "PER.Individual/NAM"
  std::string label_name(const label& l) const {
    std::string out = type_name(l);
    if (l.subtype >= 0) out += "." + subtype_name(l);
    out += "/";
    out += to_string(l.mtype);
    return out;
  }

 private:
  std::vector<entity_type_spec> types_;
  std::vector<mention_type> mtypes_;
  std::vector<label> labels_;
};

}  // namespace laso::edt
