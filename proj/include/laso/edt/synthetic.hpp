// Seeded synthetic corpora with planted cues.
//
// A world fixes the lexicons: names per entity type (person names carry a
// gender), nominal heads tied to names through knowledge pairs, and filler
// pseudo-words. Documents draw from a world:
//   - a new entity is introduced by name;
//   - reuse repeats the name, uses "the <head>" (only when no other entity in
//     the document shares that head), or a pronoun for the previous mention's
//     entity (he/she for persons, it otherwise);
//   - at least one filler token separates two mentions;
//   - with `ambiguous_rate`, persons and organizations may get a name listed
//     under both types, followed four fillers later by a disambiguating
//     pronoun.
#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "laso/edt/document.hpp"
#include "laso/edt/resources.hpp"

namespace laso::edt {

struct synthetic_params {
  std::size_t docs = 100;
  std::uint64_t seed = 1;
  std::uint64_t world_seed = 7;
  std::size_t min_sentences = 2;
  std::size_t max_sentences = 4;
  std::size_t min_sentence_length = 6;
  std::size_t max_sentence_length = 10;
  double entity_rate = 0.3;      // P(mention) at a slot not directly after a mention
  double reuse_rate = 0.5;       // P(existing entity | some entity exists)
  double pronoun_rate = 0.4;     // share of reuses that are pronouns
  double nominal_rate = 0.5;     // share of other reuses that are nominals, when possible
  double ambiguous_rate = 0.0;   // P(ambiguous name | new PER or ORG)
  bool noise_pos = false;        // random POS tags everywhere
  std::vector<std::string> types{"PER", "ORG", "GPE"};

  void validate() const {
    auto rate = [](double r, const char* what) {
      if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument(std::string(what) + " must be in [0, 1]");
    };
    rate(entity_rate, "entity_rate");
    rate(reuse_rate, "reuse_rate");
    rate(pronoun_rate, "pronoun_rate");
    rate(nominal_rate, "nominal_rate");
    rate(ambiguous_rate, "ambiguous_rate");
    if (types.empty()) throw std::invalid_argument("no entity types");
    if (min_sentences == 0 || min_sentences > max_sentences) throw std::invalid_argument("bad sentence count range");
    if (min_sentence_length < 2 || min_sentence_length > max_sentence_length)
      throw std::invalid_argument("bad sentence length range");
  }
};

class synthetic_world {
 public:
  struct name_entry {
    std::vector<std::string> words;
    gender g = gender::neuter;
    std::vector<std::string> heads;
  };

  explicit synthetic_world(const std::vector<std::string>& types, std::uint64_t seed = 7) : types_(types) {
    std::mt19937_64 rng(seed);
    std::set<std::string> used{"the", "he", "she", "it", "."};
    auto fresh = [&](bool capital, std::size_t syllables) {
      static constexpr const char* onsets[] = {"b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z",
                                               "br", "dr", "gr", "kl", "st", "tr"};
      static constexpr const char* vowels[] = {"a", "e", "i", "o", "u"};
      for (;;) {
        std::string w;
        for (std::size_t i = 0; i < syllables; ++i) {
          w += onsets[rng() % std::size(onsets)];
          w += vowels[rng() % std::size(vowels)];
        }
        if (rng() % 2) w += "n";
        if (!used.insert(w).second) continue;
        if (capital) w[0] = static_cast<char>(w[0] - 'a' + 'A');
        return w;
      }
    };

    for (std::size_t i = 0; i < 150; ++i) {
      fillers_.push_back(fresh(false, 2 + rng() % 2));
      filler_tags_.push_back(filler_tag_set()[rng() % filler_tag_set().size()]);
    }

    static const std::map<std::string, std::vector<std::string>> head_table{
        {"PER", {"president", "minister", "director", "chairman", "senator", "leader", "officer", "spokesman"}},
        {"ORG", {"company", "firm", "agency", "bank", "ministry", "union", "party", "council"}},
        {"GPE", {"country", "city", "nation", "state", "capital", "province", "republic", "region"}},
    };
    for (const auto& t : types_) {
      auto& heads = heads_[t];
      if (auto it = head_table.find(t); it != head_table.end()) {
        heads = it->second;
      } else {
        std::string base = lowercase(t);
        for (int i = 0; i < 6; ++i) heads.push_back(base + "site" + std::to_string(i));
      }
    }

    for (const auto& t : types_) {
      auto& names = names_[t];
      const auto& heads = heads_[t];
      for (std::size_t i = 0; i < 60; ++i) {
        name_entry e;
        if (t == "PER") {
          e.g = i % 2 ? gender::female : gender::male;
          e.words = {fresh(true, 2), fresh(true, 2 + rng() % 2)};
        } else if (t == "ORG") {
          static constexpr const char* suffix[] = {"Corp", "Group", "Institute", "Holdings"};
          e.words = {fresh(true, 2 + rng() % 2)};
          if (rng() % 2) e.words.push_back(suffix[rng() % std::size(suffix)]);
        } else {
          e.words = {fresh(true, 2 + rng() % 2)};
          if (rng() % 4 == 0) e.words.push_back(fresh(true, 2));
        }
        const std::size_t a = rng() % heads.size();
        e.heads.push_back(heads[a]);
        if (rng() % 2) {
          const std::size_t b = rng() % heads.size();
          if (b != a) e.heads.push_back(heads[b]);
        }
        names.push_back(std::move(e));
      }
    }
    if (has_type("PER") && has_type("ORG"))
      for (std::size_t i = 0; i < 20; ++i) {
        name_entry e;
        e.words = {fresh(true, 2)};
        e.g = i % 2 ? gender::female : gender::male;
        ambiguous_.push_back(std::move(e));
      }
  }

  const std::vector<std::string>& types() const noexcept { return types_; }
  bool has_type(const std::string& t) const { return std::find(types_.begin(), types_.end(), t) != types_.end(); }
  const std::vector<name_entry>& names(const std::string& type) const { return names_.at(type); }
  const std::vector<name_entry>& ambiguous_names() const noexcept { return ambiguous_; }
  const std::vector<std::string>& heads(const std::string& type) const { return heads_.at(type); }
  const std::vector<std::string>& fillers() const noexcept { return fillers_; }
  const std::vector<std::string>& filler_tags() const noexcept { return filler_tags_; }

  static const std::vector<std::string>& filler_tag_set() {
    static const std::vector<std::string> tags{"VB", "VBD", "VBZ", "IN", "JJ", "RB", "CC", "CD"};
    return tags;
  }

  static std::string list_name(const std::string& type) { return lowercase(type) + "-names"; }

  // Gazetteers, knowledge pairs, gender/number entries and word clusters.
  resource_bundle resources() const {
    resource_bundle r;
    for (const auto& [line, list] : gazetteer_lines()) r.add_gazetteer(list, {line});
    for (const auto& [name, head] : knowledge_lines()) r.add_knowledge_pair(name, head);
    for (const auto& [word, gn] : gender_lines()) r.add_gender_number(word, gn);
    for (const auto& [word, c] : cluster_lines()) r.add_cluster(word, c);
    return r;
  }

  // Writes the resource files and returns their paths keyed by resource kind.
  std::map<std::string, std::filesystem::path> write_resources(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    std::map<std::string, std::filesystem::path> out;
    std::map<std::string, std::vector<std::string>> lists;
    for (const auto& [line, list] : gazetteer_lines()) lists[list].push_back(line);
    for (const auto& [list, lines] : lists) {
      const auto p = dir / (list + ".txt");
      write_lines(p, lines);
      out["gazetteer:" + list] = p;
    }
    std::vector<std::string> lines;
    for (const auto& [name, head] : knowledge_lines()) lines.push_back(name + "\t" + head);
    write_lines(out["knowledge"] = dir / "knowledge.tsv", lines);
    lines.clear();
    for (const auto& [word, gn] : gender_lines())
      lines.push_back(word + "\t" + std::string(to_string(gn.g)) + "\t" + std::string(to_string(gn.n)));
    write_lines(out["gender_number"] = dir / "gender_number.tsv", lines);
    lines.clear();
    for (const auto& [word, c] : cluster_lines()) lines.push_back(word + "\t" + c);
    write_lines(out["clusters"] = dir / "clusters.tsv", lines);
    return out;
  }

 private:
  static void write_lines(const std::filesystem::path& p, const std::vector<std::string>& lines) {
    std::ofstream f(p);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    for (const auto& l : lines) f << l << '\n';
  }

  static std::string joined(const std::vector<std::string>& words) {
    std::string s;
    for (const auto& w : words) s += (s.empty() ? "" : " ") + w;
    return lowercase(s);
  }

  std::vector<std::pair<std::string, std::string>> gazetteer_lines() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& t : types_)
      for (const auto& e : names_.at(t)) out.emplace_back(joined(e.words), list_name(t));
    for (const auto& e : ambiguous_) {
      out.emplace_back(joined(e.words), list_name("PER"));
      out.emplace_back(joined(e.words), list_name("ORG"));
    }
    return out;
  }

  std::vector<std::pair<std::string, std::string>> knowledge_lines() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& t : types_)
      for (const auto& e : names_.at(t))
        for (const auto& h : e.heads) out.emplace_back(joined(e.words), h);
    return out;
  }

  std::vector<std::pair<std::string, gender_number>> gender_lines() const {
    std::map<std::string, gender_number> out;
    for (const auto& t : types_) {
      for (const auto& e : names_.at(t)) out[lowercase(e.words.back())] = {e.g, number::singular};
      for (const auto& h : heads_.at(t)) out[h] = {t == "PER" ? gender::unknown : gender::neuter, number::singular};
    }
    for (const auto& e : ambiguous_) out[lowercase(e.words.back())] = {gender::unknown, number::singular};
    return {out.begin(), out.end()};
  }

  std::vector<std::pair<std::string, std::string>> cluster_lines() const {
    std::map<std::string, std::string> out;
    for (const auto& t : types_) {
      for (const auto& e : names_.at(t))
        for (const auto& w : e.words) out.emplace(lowercase(w), "c-" + lowercase(t));
      for (const auto& h : heads_.at(t)) out.emplace(h, "c-" + lowercase(t) + "-head");
    }
    for (const auto& f : fillers_) out.emplace(f, "c-filler");
    return {out.begin(), out.end()};
  }

  std::vector<std::string> types_;
  std::map<std::string, std::vector<name_entry>> names_;
  std::map<std::string, std::vector<std::string>> heads_;
  std::vector<name_entry> ambiguous_;
  std::vector<std::string> fillers_;
  std::vector<std::string> filler_tags_;
};

namespace detail {
struct synthetic_entity {
  std::string id;
  std::string type;
  const synthetic_world::name_entry* name;
};

inline std::string pronoun_for(const synthetic_entity& e) {
  if (e.type != "PER") return "it";
  return e.name->g == gender::female ? "she" : "he";
}
}  // namespace detail

inline std::vector<document> generate_synthetic(const synthetic_world& world, const synthetic_params& p) {
  p.validate();
  for (const auto& t : p.types)
    if (!world.has_type(t)) throw std::invalid_argument("type '" + t + "' is not part of the synthetic world");
  std::mt19937_64 rng(p.seed);
  auto uniform = [&]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
  auto between = [&](std::size_t lo, std::size_t hi) { return lo + pick(hi - lo + 1); };
  const auto& tags = synthetic_world::filler_tag_set();
  const bool ambiguous_ok = world.has_type("PER") && world.has_type("ORG") &&
                            std::find(p.types.begin(), p.types.end(), "PER") != p.types.end() &&
                            std::find(p.types.begin(), p.types.end(), "ORG") != p.types.end();

  std::vector<document> out;
  for (std::size_t di = 0; di < p.docs; ++di) {
    document doc;
    doc.id = "syn-" + std::to_string(p.seed) + "-" + std::to_string(di);
    std::vector<detail::synthetic_entity> entities;
    std::unordered_set<const synthetic_world::name_entry*> used_names;
    std::unordered_set<std::string> used_words;
    std::unordered_map<std::string, std::size_t> head_owners;  // head -> number of entities able to use it
    std::size_t previous_entity = 0;
    bool any_mention = false;

    auto tag = [&](const std::string& t) { return p.noise_pos ? tags[pick(tags.size())] : t; };
    auto push_token = [&](std::string text, const std::string& pos, const std::string& chunk) {
      doc.tokens.push_back({std::move(text), tag(pos), chunk});
    };
    auto push_filler = [&]() {
      const std::size_t f = pick(world.fillers().size());
      push_token(world.fillers()[f], world.filler_tags()[f], "O");
    };
    auto push_mention = [&](const std::vector<std::string>& words, const std::vector<std::string>& pos,
                            std::size_t entity, mention_type mt) {
      const std::size_t start = doc.size();
      for (std::size_t i = 0; i < words.size(); ++i) push_token(words[i], pos[i], i == 0 ? "B-NP" : "I-NP");
      doc.mentions.push_back({start, doc.size(), entities[entity].type, "", mt, entities[entity].id});
      previous_entity = entity;
      any_mention = true;
    };
    auto name_pos = [](const synthetic_world::name_entry& e) { return std::vector<std::string>(e.words.size(), "NNP"); };

    auto usable_heads = [&](std::size_t entity) {
      std::vector<std::string> hs;
      for (const auto& h : entities[entity].name->heads)
        if (head_owners[h] == 1) hs.push_back(h);
      return hs;
    };

    // Returns true when the new entity needs a trailing pronoun.
    auto new_entity = [&]() {
      const std::string type = p.types[pick(p.types.size())];
      const synthetic_world::name_entry* name = nullptr;
      bool ambiguous = false;
      if (ambiguous_ok && (type == "PER" || type == "ORG") && uniform() < p.ambiguous_rate) {
        for (int tries = 0; tries < 50 && !name; ++tries) {
          const auto* e = &world.ambiguous_names()[pick(world.ambiguous_names().size())];
          if (!used_names.contains(e)) name = e;
        }
        ambiguous = name != nullptr;
      }
      for (int tries = 0; !name; ++tries) {
        const auto& pool = world.names(type);
        const auto* e = &pool[pick(pool.size())];
        bool clash = used_names.contains(e);
        for (const auto& w : e->words) clash |= used_words.contains(w) && w != "Corp" && w != "Group" &&
                                                w != "Institute" && w != "Holdings";
        if (!clash || tries > 200) name = e;
      }
      used_names.insert(name);
      for (const auto& w : name->words) used_words.insert(w);
      for (const auto& h : name->heads) ++head_owners[h];
      entities.push_back({"e" + std::to_string(entities.size() + 1), type, name});
      push_mention(name->words, name_pos(*name), entities.size() - 1, mention_type::nam);
      return ambiguous;
    };

    auto reuse = [&]() {
      if (uniform() < p.pronoun_rate) {
        push_mention({detail::pronoun_for(entities[previous_entity])}, {"PRP"}, previous_entity, mention_type::pro);
        return;
      }
      const std::size_t e = pick(entities.size());
      if (uniform() < p.nominal_rate) {
        const auto hs = usable_heads(e);
        if (!hs.empty()) {
          push_mention({"the", hs[pick(hs.size())]}, {"DT", "NN"}, e, mention_type::nom);
          return;
        }
      }
      push_mention(entities[e].name->words, name_pos(*entities[e].name), e, mention_type::nam);
    };

    const std::size_t sentences = between(p.min_sentences, p.max_sentences);
    for (std::size_t si = 0; si < sentences; ++si) {
      const std::size_t target = doc.size() + between(p.min_sentence_length, p.max_sentence_length) - 1;
      bool after_mention = false;
      while (doc.size() < target) {
        if (after_mention || uniform() >= p.entity_rate) {
          push_filler();
          after_mention = false;
          continue;
        }
        after_mention = true;
        if (any_mention && uniform() < p.reuse_rate) {
          reuse();
          continue;
        }
        if (new_entity()) {
          for (int i = 0; i < 4; ++i) push_filler();
          push_mention({detail::pronoun_for(entities.back())}, {"PRP"}, entities.size() - 1, mention_type::pro);
        }
      }
      push_token(".", ".", "O");
      doc.sentence_ends.push_back(doc.size());
    }
    out.push_back(std::move(doc));
  }
  return out;
}

inline std::vector<document> generate_synthetic(const synthetic_params& p) {
  return generate_synthetic(synthetic_world(p.types, p.world_seed), p);
}

}  // namespace laso::edt
