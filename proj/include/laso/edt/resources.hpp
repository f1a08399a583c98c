// External lexical resources. Every lookup is total: a miss returns nothing.
//
// File formats (UTF-8, '#' starts a comment line, columns are tab-separated):
//   gazetteer       one entry per line (multi-word entries allowed)
//   knowledge       name <TAB> nominal [<TAB> count]
//   clusters        word <TAB> cluster-id
//   collocations    word1 <TAB> word2 [<TAB> score]
//   gender-number   word <TAB> male|female|neuter|- <TAB> singular|plural|-
//   coref patterns  space-separated pattern <TAB> +|- [<TAB> score]
//   pleonastic      one template per line; [it] marks the target word, * any word, a|b alternatives
//   hypernyms       word <TAB> synset,synset <TAB> hypernym,... [<TAB> whole,... (part-of)]
#pragma once

#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "laso/edt/strings.hpp"

namespace laso::edt {

class resource_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {
inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

// Non-empty, non-comment lines of a file.
inline std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw resource_error("cannot read resource file " + path.string());
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    out.push_back(line);
  }
  return out;
}
}  // namespace detail

enum class gender { unknown, male, female, neuter };
enum class number { unknown, singular, plural };

inline std::string_view to_string(gender g) {
  switch (g) {
    case gender::male: return "male";
    case gender::female: return "female";
    case gender::neuter: return "neuter";
    default: return "-";
  }
}
inline std::string_view to_string(number n) {
  switch (n) {
    case number::singular: return "singular";
    case number::plural: return "plural";
    default: return "-";
  }
}

struct gender_number {
  gender g = gender::unknown;
  number n = number::unknown;
  friend bool operator==(const gender_number&, const gender_number&) = default;
};

struct coref_pattern {
  std::vector<std::string> words;  // lowercased
  bool positive = true;
  double score = 0.0;
};

// One pleonastic template: target word alternatives plus following slots.
struct pleonastic_pattern {
  std::vector<std::string> target;             // e.g. {"it"}
  std::vector<std::vector<std::string>> slots;  // each slot: alternatives; {"*"} matches anything
  std::string text;
};

inline pleonastic_pattern parse_pleonastic(std::string_view line) {
  pleonastic_pattern p;
  p.text = detail::trim(line);
  std::istringstream in(p.text);
  std::string tok;
  bool seen_target = false;
  while (in >> tok) {
    if (tok.size() > 2 && tok.front() == '[' && tok.back() == ']') {
      if (seen_target) throw resource_error("pleonastic template with two targets: " + p.text);
      p.target = detail::split(lowercase(tok.substr(1, tok.size() - 2)), '|');
      seen_target = true;
    } else if (!seen_target) {
      throw resource_error("pleonastic template must start with its [target]: " + p.text);
    } else {
      p.slots.push_back(detail::split(lowercase(tok), '|'));
    }
  }
  if (!seen_target) throw resource_error("pleonastic template without target: " + p.text);
  return p;
}

class resource_bundle {
 public:
  // ---- loading -------------------------------------------------------------
  void add_gazetteer(const std::string& list, const std::vector<std::string>& entries) {
    auto& set = gazetteers_[list];
    for (const auto& e : entries) {
      const auto key = lowercase(detail::trim(e));
      set.insert(key);
      membership_[key].insert(list);
    }
  }
  void load_gazetteer(const std::string& list, const std::filesystem::path& path) {
    add_gazetteer(list, detail::read_lines(path));
  }

  void add_knowledge_pair(std::string_view name, std::string_view nominal) {
    knowledge_.insert(lowercase(name) + '\t' + lowercase(nominal));
  }
  void load_knowledge(const std::filesystem::path& path) {
    for (const auto& line : detail::read_lines(path)) {
      auto cols = detail::split(line, '\t');
      if (cols.size() < 2) throw resource_error("knowledge line needs two columns: " + line);
      add_knowledge_pair(detail::trim(cols[0]), detail::trim(cols[1]));
    }
  }

  void add_cluster(std::string_view word, std::string_view cluster) { clusters_[lowercase(word)] = cluster; }
  void load_clusters(const std::filesystem::path& path) {
    for (const auto& line : detail::read_lines(path)) {
      auto cols = detail::split(line, '\t');
      if (cols.size() < 2) throw resource_error("cluster line needs two columns: " + line);
      add_cluster(detail::trim(cols[0]), detail::trim(cols[1]));
    }
  }

  void add_collocation(std::string_view a, std::string_view b) {
    collocations_.insert(lowercase(a) + ' ' + lowercase(b));
  }
  void load_collocations(const std::filesystem::path& path) {
    for (const auto& line : detail::read_lines(path)) {
      auto cols = detail::split(line, '\t');
      if (cols.size() < 2) throw resource_error("collocation line needs two columns: " + line);
      add_collocation(detail::trim(cols[0]), detail::trim(cols[1]));
    }
  }

  void add_gender_number(std::string_view word, gender_number gn) { gender_number_[lowercase(word)] = gn; }
  void load_gender_number(const std::filesystem::path& path) {
    for (const auto& line : detail::read_lines(path)) {
      auto cols = detail::split(line, '\t');
      if (cols.size() < 3) throw resource_error("gender-number line needs three columns: " + line);
      gender_number gn;
      const auto g = detail::trim(cols[1]);
      const auto n = detail::trim(cols[2]);
      if (g == "male") gn.g = gender::male;
      else if (g == "female") gn.g = gender::female;
      else if (g == "neuter") gn.g = gender::neuter;
      else if (g != "-") throw resource_error("unknown gender '" + g + "'");
      if (n == "singular") gn.n = number::singular;
      else if (n == "plural") gn.n = number::plural;
      else if (n != "-") throw resource_error("unknown number '" + n + "'");
      add_gender_number(detail::trim(cols[0]), gn);
    }
  }

  void add_coref_pattern(coref_pattern p) {
    for (auto& w : p.words) w = lowercase(w);
    coref_patterns_.push_back(std::move(p));
  }
  void load_coref_patterns(const std::filesystem::path& path) {
    for (const auto& line : detail::read_lines(path)) {
      auto cols = detail::split(line, '\t');
      if (cols.size() < 2) throw resource_error("pattern line needs two columns: " + line);
      coref_pattern p;
      std::istringstream in(cols[0]);
      for (std::string w; in >> w;) p.words.push_back(w);
      const auto pol = detail::trim(cols[1]);
      if (pol != "+" && pol != "-") throw resource_error("pattern polarity must be + or -: " + line);
      p.positive = pol == "+";
      if (cols.size() > 2) p.score = std::stod(cols[2]);
      add_coref_pattern(std::move(p));
    }
  }

  void add_pleonastic(std::string_view line) { pleonastic_.push_back(parse_pleonastic(line)); }
  void load_pleonastic(const std::filesystem::path& path) {
    for (const auto& line : detail::read_lines(path)) add_pleonastic(line);
  }

  void add_hypernym_entry(std::string_view word, std::vector<std::string> synsets, std::vector<std::string> hypernyms,
                          std::vector<std::string> wholes = {}) {
    auto& e = hypernyms_[lowercase(word)];
    e.synsets = std::move(synsets);
    e.hypernyms = std::move(hypernyms);
    e.wholes.clear();
    for (auto& w : wholes) e.wholes.push_back(lowercase(w));
    auto link = [&](const std::string& u, const std::string& v) {
      graph_[u].insert(v);
      graph_[v].insert(u);
    };
    const auto key = "w:" + lowercase(word);
    for (const auto& s : e.synsets) {
      link(key, "s:" + s);
      for (const auto& h : e.hypernyms) link("s:" + s, "s:" + h);
    }
  }
  void load_hypernyms(const std::filesystem::path& path) {
    auto list = [](const std::string& col) {
      std::vector<std::string> out;
      for (auto& s : detail::split(col, ','))
        if (auto t = detail::trim(s); !t.empty()) out.push_back(t);
      return out;
    };
    for (const auto& line : detail::read_lines(path)) {
      auto cols = detail::split(line, '\t');
      if (cols.size() < 3) throw resource_error("hypernym line needs three columns: " + line);
      add_hypernym_entry(detail::trim(cols[0]), list(cols[1]), list(cols[2]),
                         cols.size() > 3 ? list(cols[3]) : std::vector<std::string>{});
    }
  }

  // ---- lookups ---------------------------------------------------------------
  bool has_gazetteers() const noexcept { return !gazetteers_.empty(); }
  bool has_knowledge() const noexcept { return !knowledge_.empty(); }
  bool has_clusters() const noexcept { return !clusters_.empty(); }
  bool has_collocations() const noexcept { return !collocations_.empty(); }
  bool has_gender_number() const noexcept { return !gender_number_.empty(); }
  bool has_hypernyms() const noexcept { return !hypernyms_.empty(); }

  const std::set<std::string>& lists_containing(std::string_view entry) const {
    static const std::set<std::string> none;
    auto it = membership_.find(lowercase(entry));
    return it == membership_.end() ? none : it->second;
  }
  bool is_list_name(std::string_view word) const { return gazetteers_.contains(lowercase(word)); }

  // Name and nominal in either order.
  bool knowledge_pair(std::string_view a, std::string_view b) const {
    const auto x = lowercase(a), y = lowercase(b);
    return knowledge_.contains(x + '\t' + y) || knowledge_.contains(y + '\t' + x);
  }

  std::optional<std::string> cluster(std::string_view word) const {
    auto it = clusters_.find(lowercase(word));
    if (it == clusters_.end()) return std::nullopt;
    return it->second;
  }

  bool collocation(std::string_view a, std::string_view b) const {
    return collocations_.contains(lowercase(a) + ' ' + lowercase(b));
  }

  std::optional<gender_number> lookup_gender_number(std::string_view word) const {
    auto it = gender_number_.find(lowercase(word));
    if (it == gender_number_.end()) return std::nullopt;
    return it->second;
  }

  const std::vector<coref_pattern>& coref_patterns() const noexcept { return coref_patterns_; }
  const std::vector<pleonastic_pattern>& pleonastic_patterns() const noexcept { return pleonastic_; }

  struct hypernym_entry {
    std::vector<std::string> synsets;
    std::vector<std::string> hypernyms;
    std::vector<std::string> wholes;
  };
  const hypernym_entry* hypernym_lookup(std::string_view word) const {
    auto it = hypernyms_.find(lowercase(word));
    return it == hypernyms_.end() ? nullptr : &it->second;
  }

  bool part_of(std::string_view part, std::string_view whole) const {
    const auto* e = hypernym_lookup(part);
    if (!e) return false;
    const auto w = lowercase(whole);
    return std::find(e->wholes.begin(), e->wholes.end(), w) != e->wholes.end();
  }

  // Shortest path between two words in the graph linking each word to its
  // synsets and each synset to the word's hypernyms. nullopt if unconnected
  // or farther than `limit`.
  std::optional<std::size_t> graph_distance(std::string_view a, std::string_view b, std::size_t limit = 8) const {
    const auto x = lowercase(a), y = lowercase(b);
    if (!hypernyms_.contains(x) || !hypernyms_.contains(y)) return std::nullopt;
    if (x == y) return 0;
    const auto start = "w:" + x, goal = "w:" + y;
    std::unordered_map<std::string, std::size_t> dist{{start, 0}};
    std::queue<std::string> q;
    q.push(start);
    while (!q.empty()) {
      auto cur = q.front();
      q.pop();
      const auto d = dist[cur];
      if (d >= limit) continue;
      auto it = graph_.find(cur);
      if (it == graph_.end()) continue;
      for (const auto& next : it->second) {
        if (dist.contains(next)) continue;
        if (next == goal) return d + 1;
        dist[next] = d + 1;
        q.push(next);
      }
    }
    return std::nullopt;
  }

 private:
  std::map<std::string, std::unordered_set<std::string>> gazetteers_;
  std::unordered_map<std::string, std::set<std::string>> membership_;
  std::unordered_set<std::string> knowledge_;
  std::unordered_map<std::string, std::string> clusters_;
  std::unordered_set<std::string> collocations_;
  std::unordered_map<std::string, gender_number> gender_number_;
  std::vector<coref_pattern> coref_patterns_;
  std::vector<pleonastic_pattern> pleonastic_;
  std::unordered_map<std::string, hypernym_entry> hypernyms_;
  std::unordered_map<std::string, std::set<std::string>> graph_;
};

}  // namespace laso::edt
