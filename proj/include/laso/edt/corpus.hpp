// JSON-lines corpus format: one document per line.
//
//   {"id": "d1", "tokens": ["Bill", "Clinton", ...], "pos": [...], "chunk": [...],
//    "sentences": [12, 20],
//    "mentions": [{"start": 0, "end": 2, "type": "PER", "subtype": "", "mtype": "NAM", "entity": "e1"}]}
//
// `pos`, `chunk`, `subtype` and `mentions` are optional. Sentence offsets are
// exclusive ends; when absent the document is one sentence.
#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "laso/edt/document.hpp"
#include "laso/edt/hypothesis.hpp"
#include "laso/search.hpp"

namespace laso::edt {

class corpus_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {
[[noreturn]] inline void fail(const std::string& id, const std::string& field, const std::string& what) {
  throw corpus_error("document '" + id + "', field '" + field + "': " + what);
}

inline std::vector<std::string> string_array(const nlohmann::json& j, const std::string& id, const std::string& field) {
  if (!j.is_array()) fail(id, field, "expected an array of strings");
  std::vector<std::string> out;
  for (const auto& x : j) {
    if (!x.is_string()) fail(id, field, "expected an array of strings");
    out.push_back(x.get<std::string>());
  }
  return out;
}
}  // namespace detail

// Checks offsets, ordering and overlap; with an inventory also the labels.
inline void validate_document(document& doc, const inventory* inv = nullptr) {
  const auto n = doc.size();
  if (doc.sentence_ends.empty() && n > 0) doc.sentence_ends.push_back(n);
  for (std::size_t i = 0; i < doc.sentence_ends.size(); ++i) {
    if (doc.sentence_ends[i] == 0 || doc.sentence_ends[i] > n)
      detail::fail(doc.id, "sentences", "offset outside the document");
    if (i > 0 && doc.sentence_ends[i] <= doc.sentence_ends[i - 1])
      detail::fail(doc.id, "sentences", "offsets must be strictly increasing");
  }
  std::stable_sort(doc.mentions.begin(), doc.mentions.end(),
                   [](const gold_mention& a, const gold_mention& b) { return a.start < b.start; });
  for (std::size_t i = 0; i < doc.mentions.size(); ++i) {
    const auto& m = doc.mentions[i];
    if (m.end <= m.start) detail::fail(doc.id, "mentions", "mention end must exceed its start");
    if (m.end > n) detail::fail(doc.id, "mentions", "mention outside the document");
    if (i > 0 && m.start < doc.mentions[i - 1].end) detail::fail(doc.id, "mentions", "overlapping mentions");
    if (m.entity_id.empty()) detail::fail(doc.id, "mentions", "empty entity id");
    if (inv) {
      const auto t = inv->type_index(m.entity_type);
      if (!t) detail::fail(doc.id, "mentions", "unknown entity type '" + m.entity_type + "'");
      if (!m.subtype.empty() && !inv->types()[*t].subtypes.empty() && !inv->subtype_index(*t, m.subtype))
        detail::fail(doc.id, "mentions", "unknown subtype '" + m.subtype + "'");
    }
  }
}

inline document parse_document(const nlohmann::json& j, const inventory* inv = nullptr) {
  if (!j.is_object()) throw corpus_error("corpus record is not an object");
  document doc;
  if (!j.contains("id") || !j["id"].is_string()) throw corpus_error("corpus record without a string 'id'");
  doc.id = j["id"].get<std::string>();
  if (!j.contains("tokens")) detail::fail(doc.id, "tokens", "missing");
  const auto words = detail::string_array(j["tokens"], doc.id, "tokens");
  std::vector<std::string> pos, chunk;
  if (j.contains("pos")) pos = detail::string_array(j["pos"], doc.id, "pos");
  if (j.contains("chunk")) chunk = detail::string_array(j["chunk"], doc.id, "chunk");
  if (!pos.empty() && pos.size() != words.size()) detail::fail(doc.id, "pos", "length differs from tokens");
  if (!chunk.empty() && chunk.size() != words.size()) detail::fail(doc.id, "chunk", "length differs from tokens");
  for (std::size_t i = 0; i < words.size(); ++i)
    doc.tokens.push_back({words[i], pos.empty() ? "" : pos[i], chunk.empty() ? "" : chunk[i]});

  if (j.contains("sentences")) {
    if (!j["sentences"].is_array()) detail::fail(doc.id, "sentences", "expected an array of offsets");
    for (const auto& x : j["sentences"]) {
      if (!x.is_number_unsigned() && !(x.is_number_integer() && x.get<long long>() >= 0))
        detail::fail(doc.id, "sentences", "expected nonnegative integers");
      doc.sentence_ends.push_back(x.get<std::size_t>());
    }
  }
  if (j.contains("mentions")) {
    if (!j["mentions"].is_array()) detail::fail(doc.id, "mentions", "expected an array");
    for (const auto& m : j["mentions"]) {
      if (!m.is_object()) detail::fail(doc.id, "mentions", "expected objects");
      gold_mention g;
      try {
        const auto start = m.at("start").get<long long>();
        const auto end = m.at("end").get<long long>();
        if (start < 0 || end < 0) detail::fail(doc.id, "mentions", "negative offset");
        g.start = static_cast<std::size_t>(start);
        g.end = static_cast<std::size_t>(end);
        g.entity_type = m.at("type").get<std::string>();
        g.subtype = m.value("subtype", std::string{});
        const auto mt = m.at("mtype").get<std::string>();
        const auto parsed = parse_mention_type(mt);
        if (!parsed) detail::fail(doc.id, "mentions", "unknown mention type '" + mt + "'");
        g.mtype = *parsed;
        g.entity_id = m.at("entity").get<std::string>();
      } catch (const nlohmann::json::exception& e) {
        detail::fail(doc.id, "mentions", e.what());
      }
      doc.mentions.push_back(std::move(g));
    }
  }
  validate_document(doc, inv);
  return doc;
}

inline nlohmann::json to_json(const document& doc) {
  nlohmann::json j;
  j["id"] = doc.id;
  std::vector<std::string> words, pos, chunk;
  bool has_pos = false, has_chunk = false;
  for (const auto& t : doc.tokens) {
    words.push_back(t.text);
    pos.push_back(t.pos);
    chunk.push_back(t.chunk);
    has_pos |= !t.pos.empty();
    has_chunk |= !t.chunk.empty();
  }
  j["tokens"] = words;
  if (has_pos) j["pos"] = pos;
  if (has_chunk) j["chunk"] = chunk;
  j["sentences"] = doc.sentence_ends;
  auto mentions = nlohmann::json::array();
  for (const auto& m : doc.mentions) {
    nlohmann::json x{{"start", m.start}, {"end", m.end}, {"type", m.entity_type},
                     {"mtype", std::string(to_string(m.mtype))}, {"entity", m.entity_id}};
    if (!m.subtype.empty()) x["subtype"] = m.subtype;
    mentions.push_back(std::move(x));
  }
  j["mentions"] = std::move(mentions);
  return j;
}

inline std::vector<document> read_corpus(std::istream& in, const inventory* inv = nullptr) {
  std::vector<document> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw corpus_error("line " + std::to_string(lineno) + ": malformed JSON: " + e.what());
    }
    out.push_back(parse_document(j, inv));
  }
  return out;
}

inline std::vector<document> read_corpus(const std::filesystem::path& path, const inventory* inv = nullptr) {
  std::ifstream in(path);
  if (!in) throw corpus_error("cannot read corpus " + path.string());
  return read_corpus(in, inv);
}

inline void write_corpus(std::ostream& out, const std::vector<document>& docs) {
  for (const auto& d : docs) out << to_json(d).dump() << '\n';
}

inline void write_corpus(const std::filesystem::path& path, const std::vector<document>& docs) {
  std::ofstream out(path);
  if (!out) throw corpus_error("cannot write " + path.string());
  write_corpus(out, docs);
}

// The document annotated with a complete hypothesis. Entity ids are "e1",
// "e2", ... in order of first mention.
inline document write_predictions(const document& doc, const hypothesis& h, const inventory& inv) {
  if (h.covered() != doc.size()) throw contract_violation("predictions need a complete hypothesis");
  document out = doc;
  out.mentions.clear();
  for (const auto& m : h.mentions())
    out.mentions.push_back({m.start, m.end, inv.type_name(m.lab), inv.subtype_name(m.lab), m.lab.mtype,
                            "e" + std::to_string(m.chain + 1)});
  return out;
}

// Every document must have a gold decision path under the given search limits.
inline void validate_gold_paths(const std::vector<document>& docs, const inventory& inv, std::size_t max_length) {
  for (const auto& d : docs) (void)make_gold(d, inv, max_length);
}

}  // namespace laso::edt
