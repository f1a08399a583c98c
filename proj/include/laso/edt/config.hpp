// Run configuration: JSON keys mirror the struct fields.
//
//   {"beam": 16, "cutoff": 5, "C": 1.0, "max_length": 10, "linkage": "intelligent",
//    "classes": ["lexical", ...], "mode": "joint", "passes": 10, "seed": 1,
//    "compensation": "gated", "stop_when_separated": true,
//    "types": [{"name": "PER", "subtypes": []}, ...], "mention_types": ["NAM", "NOM", "PRO"],
//    "train": "train.jsonl", "test": "test.jsonl",
//    "resources": {"gazetteers": {"country": "lists/country.txt"}, "knowledge": "knowledge.tsv", ...},
//    "costs": {"miss": 1.0, "false_alarm": 0.75, "type_error": 0.5}}
//
// Relative resource paths are resolved against $EDT_RESOURCE_ROOT when set.
#pragma once

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "laso/edt/document.hpp"
#include "laso/edt/features.hpp"
#include "laso/edt/linkage.hpp"
#include "laso/edt/problem.hpp"
#include "laso/edt/resources.hpp"
#include "laso/edt/scorer.hpp"

namespace laso::edt {

class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class run_mode { joint, pipeline_detect, pipeline_coref, coref_gold_mentions };
enum class compensation { gated, head_start, none };

inline std::string_view to_string(run_mode m) {
  switch (m) {
    case run_mode::joint: return "joint";
    case run_mode::pipeline_detect: return "pipeline-detect";
    case run_mode::pipeline_coref: return "pipeline-coref";
    case run_mode::coref_gold_mentions: return "coref-gold-mentions";
  }
  return "?";
}

inline std::optional<run_mode> parse_run_mode(std::string_view s) {
  for (auto m : {run_mode::joint, run_mode::pipeline_detect, run_mode::pipeline_coref, run_mode::coref_gold_mentions})
    if (to_string(m) == s) return m;
  return std::nullopt;
}

inline std::string_view to_string(compensation c) {
  switch (c) {
    case compensation::gated: return "gated";
    case compensation::head_start: return "head-start";
    case compensation::none: return "none";
  }
  return "?";
}

inline std::optional<compensation> parse_compensation(std::string_view s) {
  for (auto c : {compensation::gated, compensation::head_start, compensation::none})
    if (to_string(c) == s) return c;
  return std::nullopt;
}

struct resource_paths {
  std::map<std::string, std::string> gazetteers;  // list name -> file
  std::string knowledge, clusters, collocations, gender_number, coref_patterns, pleonastic, hypernyms;
  friend bool operator==(const resource_paths&, const resource_paths&) = default;
};

struct run_config {
  std::string train, test;
  resource_paths resources;
  std::size_t beam = 16;  // 0: unbounded
  std::uint32_t cutoff = 5;
  double c = 1.0;
  std::size_t max_length = 10;
  linkage_type linkage = linkage_type::intelligent;
  class_set classes = class_set::all();
  run_mode mode = run_mode::joint;
  std::size_t passes = 10;
  std::uint64_t seed = 1;
  compensation comp = compensation::gated;
  bool stop_when_separated = true;  // stop after a pass without updates
  std::vector<entity_type_spec> types = inventory::ace2004_types();
  std::vector<mention_type> mention_types{mention_type::nam, mention_type::nom, mention_type::pro};
  cost_model costs;

  search_mode search() const {
    switch (mode) {
      case run_mode::joint: return search_mode::joint;
      case run_mode::pipeline_detect: return search_mode::detect;
      default: return search_mode::coref;
    }
  }
  // Coreference with gold mentions predicts pronoun entity types.
  bool pronoun_types_given() const { return mode != run_mode::coref_gold_mentions; }

  model_spec spec() const { return {inventory(types, mention_types), classes, linkage, max_length}; }

  void validate() const {
    if (c <= 0) throw config_error("C must be positive");
    if (cutoff == 0) throw config_error("cutoff must be positive");
    if (max_length == 0) throw config_error("max_length must be positive");
    if (types.empty()) throw config_error("no entity types configured");
    if (mention_types.empty()) throw config_error("no mention types configured");
    costs.validate();
  }
};

inline nlohmann::json to_json(const run_config& c) {
  nlohmann::json j;
  j["train"] = c.train;
  j["test"] = c.test;
  auto& r = j["resources"];
  r["gazetteers"] = c.resources.gazetteers;
  r["knowledge"] = c.resources.knowledge;
  r["clusters"] = c.resources.clusters;
  r["collocations"] = c.resources.collocations;
  r["gender_number"] = c.resources.gender_number;
  r["coref_patterns"] = c.resources.coref_patterns;
  r["pleonastic"] = c.resources.pleonastic;
  r["hypernyms"] = c.resources.hypernyms;
  j["beam"] = c.beam;
  j["cutoff"] = c.cutoff;
  j["C"] = c.c;
  j["max_length"] = c.max_length;
  j["linkage"] = std::string(to_string(c.linkage));
  std::vector<std::string> classes;
  for (auto k : c.classes.members()) classes.emplace_back(class_name(k));
  j["classes"] = classes;
  j["mode"] = std::string(to_string(c.mode));
  j["passes"] = c.passes;
  j["seed"] = c.seed;
  j["compensation"] = std::string(to_string(c.comp));
  j["stop_when_separated"] = c.stop_when_separated;
  auto types = nlohmann::json::array();
  for (const auto& t : c.types) types.push_back({{"name", t.name}, {"subtypes", t.subtypes}});
  j["types"] = types;
  std::vector<std::string> mts;
  for (auto m : c.mention_types) mts.emplace_back(to_string(m));
  j["mention_types"] = mts;
  j["costs"] = {{"miss", c.costs.miss},
                {"false_alarm", c.costs.false_alarm},
                {"type_error", c.costs.type_error},
                {"type_weights", c.costs.type_weights},
                {"nam_weight", c.costs.nam_weight},
                {"nom_weight", c.costs.nom_weight},
                {"pro_weight", c.costs.pro_weight}};
  return j;
}

// Keys absent from `j` keep their current values in `c`.
inline void merge_json(run_config& c, const nlohmann::json& j) {
  static const std::set<std::string> known{"train",   "test",   "resources", "beam",         "cutoff",
                                           "C",       "max_length", "linkage", "classes",    "mode",
                                           "passes",  "seed",   "compensation", "stop_when_separated",
                                           "types",   "mention_types", "costs"};
  if (!j.is_object()) throw config_error("config must be a JSON object");
  for (const auto& item : j.items())
    if (!known.contains(item.key())) throw config_error("unknown config key '" + item.key() + "'");
  try {
    if (j.contains("train")) c.train = j["train"].get<std::string>();
    if (j.contains("test")) c.test = j["test"].get<std::string>();
    if (j.contains("resources")) {
      const auto& r = j["resources"];
      if (r.contains("gazetteers")) c.resources.gazetteers = r["gazetteers"].get<std::map<std::string, std::string>>();
      auto str = [&](const char* key, std::string& out) {
        if (r.contains(key)) out = r[key].get<std::string>();
      };
      str("knowledge", c.resources.knowledge);
      str("clusters", c.resources.clusters);
      str("collocations", c.resources.collocations);
      str("gender_number", c.resources.gender_number);
      str("coref_patterns", c.resources.coref_patterns);
      str("pleonastic", c.resources.pleonastic);
      str("hypernyms", c.resources.hypernyms);
    }
    if (j.contains("beam")) c.beam = j["beam"].get<std::size_t>();
    if (j.contains("cutoff")) c.cutoff = j["cutoff"].get<std::uint32_t>();
    if (j.contains("C")) c.c = j["C"].get<double>();
    if (j.contains("max_length")) c.max_length = j["max_length"].get<std::size_t>();
    if (j.contains("linkage")) {
      auto l = parse_linkage_type(j["linkage"].get<std::string>());
      if (!l) throw config_error("unknown linkage type '" + j["linkage"].get<std::string>() + "'");
      c.linkage = *l;
    }
    if (j.contains("classes")) {
      c.classes = class_set::none();
      for (const auto& name : j["classes"].get<std::vector<std::string>>()) {
        auto k = parse_feature_class(name);
        if (!k) throw config_error("unknown feature class '" + name + "'");
        c.classes.add(*k);
      }
    }
    if (j.contains("mode")) {
      auto m = parse_run_mode(j["mode"].get<std::string>());
      if (!m) throw config_error("unknown mode '" + j["mode"].get<std::string>() + "'");
      c.mode = *m;
    }
    if (j.contains("passes")) c.passes = j["passes"].get<std::size_t>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("compensation")) {
      auto m = parse_compensation(j["compensation"].get<std::string>());
      if (!m) throw config_error("unknown compensation '" + j["compensation"].get<std::string>() + "'");
      c.comp = *m;
    }
    if (j.contains("stop_when_separated")) c.stop_when_separated = j["stop_when_separated"].get<bool>();
    if (j.contains("types")) {
      c.types.clear();
      for (const auto& t : j["types"]) {
        if (t.is_string()) c.types.push_back({t.get<std::string>(), {}});
        else c.types.push_back({t.at("name").get<std::string>(), t.value("subtypes", std::vector<std::string>{})});
      }
    }
    if (j.contains("mention_types")) {
      c.mention_types.clear();
      for (const auto& name : j["mention_types"].get<std::vector<std::string>>()) {
        auto m = parse_mention_type(name);
        if (!m) throw config_error("unknown mention type '" + name + "'");
        c.mention_types.push_back(*m);
      }
    }
    if (j.contains("costs")) {
      const auto& k = j["costs"];
      c.costs.miss = k.value("miss", c.costs.miss);
      c.costs.false_alarm = k.value("false_alarm", c.costs.false_alarm);
      c.costs.type_error = k.value("type_error", c.costs.type_error);
      if (k.contains("type_weights")) c.costs.type_weights = k["type_weights"].get<std::map<std::string, double>>();
      c.costs.nam_weight = k.value("nam_weight", c.costs.nam_weight);
      c.costs.nom_weight = k.value("nom_weight", c.costs.nom_weight);
      c.costs.pro_weight = k.value("pro_weight", c.costs.pro_weight);
    }
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("bad config value: ") + e.what());
  }
  c.validate();
}

inline run_config config_from_json(const nlohmann::json& j) {
  run_config c;
  merge_json(c, j);
  return c;
}

inline run_config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot read config " + path.string());
  try {
    return config_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw config_error("malformed config " + path.string() + ": " + e.what());
  }
}

inline std::filesystem::path resolve_resource(const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative())
    if (const char* root = std::getenv("EDT_RESOURCE_ROOT"); root && *root) return std::filesystem::path(root) / path;
  return path;
}

inline resource_bundle load_resources(const resource_paths& paths) {
  resource_bundle r;
  auto load = [&](const std::string& p, auto&& fn) {
    if (p.empty()) return;
    const auto full = resolve_resource(p);
    if (!std::filesystem::exists(full)) throw resource_error("cannot read resource " + full.string());
    fn(full);
  };
  for (const auto& [list, p] : paths.gazetteers) load(p, [&](const auto& f) { r.load_gazetteer(list, f); });
  load(paths.knowledge, [&](const auto& f) { r.load_knowledge(f); });
  load(paths.clusters, [&](const auto& f) { r.load_clusters(f); });
  load(paths.collocations, [&](const auto& f) { r.load_collocations(f); });
  load(paths.gender_number, [&](const auto& f) { r.load_gender_number(f); });
  load(paths.coref_patterns, [&](const auto& f) { r.load_coref_patterns(f); });
  load(paths.pleonastic, [&](const auto& f) { r.load_pleonastic(f); });
  load(paths.hypernyms, [&](const auto& f) { r.load_hypernyms(f); });
  return r;
}

}  // namespace laso::edt
