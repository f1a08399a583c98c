// How a new mention is compared against an existing chain.
#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "laso/edt/document.hpp"
#include "laso/search.hpp"

namespace laso::edt {

enum class linkage_type { all_pairs, average, max, min, first, last, intelligent };
enum class aggregation { sum, mean, max, min };

inline constexpr linkage_type all_linkage_types[] = {linkage_type::all_pairs, linkage_type::average,
                                                     linkage_type::max,       linkage_type::min,
                                                     linkage_type::first,     linkage_type::last,
                                                     linkage_type::intelligent};

inline std::string_view to_string(linkage_type t) {
  switch (t) {
    case linkage_type::all_pairs: return "all-pairs";
    case linkage_type::average: return "average";
    case linkage_type::max: return "max";
    case linkage_type::min: return "min";
    case linkage_type::first: return "first";
    case linkage_type::last: return "last";
    case linkage_type::intelligent: return "intelligent";
  }
  return "?";
}

inline std::optional<linkage_type> parse_linkage_type(std::string_view s) {
  for (auto t : all_linkage_types)
    if (to_string(t) == s) return t;
  return std::nullopt;
}

inline std::string_view to_string(aggregation a) {
  switch (a) {
    case aggregation::sum: return "sum";
    case aggregation::mean: return "mean";
    case aggregation::max: return "max";
    case aggregation::min: return "min";
  }
  return "?";
}

struct link_selection {
  std::vector<std::size_t> targets;  // positions in the chain, ascending
  aggregation agg = aggregation::sum;
  friend bool operator==(const link_selection&, const link_selection&) = default;
};

// `chain` lists the mention types of the chain's mentions in document order.
inline link_selection select_link_targets(mention_type current, std::span<const mention_type> chain,
                                          linkage_type mode) {
  if (chain.empty()) throw contract_violation("link target selection on an empty chain");
  auto all = [&](aggregation agg) {
    link_selection s{{}, agg};
    for (std::size_t i = 0; i < chain.size(); ++i) s.targets.push_back(i);
    return s;
  };
  auto first_of = [&](mention_type t) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < chain.size(); ++i)
      if (chain[i] == t) return i;
    return std::nullopt;
  };
  auto last_of = [&](mention_type t) -> std::optional<std::size_t> {
    for (std::size_t i = chain.size(); i-- > 0;)
      if (chain[i] == t) return i;
    return std::nullopt;
  };

  switch (mode) {
    case linkage_type::all_pairs: return all(aggregation::sum);
    case linkage_type::average: return all(aggregation::mean);
    case linkage_type::max: return all(aggregation::max);
    case linkage_type::min: return all(aggregation::min);
    case linkage_type::first: return {{0}, aggregation::sum};
    case linkage_type::last: return {{chain.size() - 1}, aggregation::sum};
    case linkage_type::intelligent: break;
  }

  switch (current) {
    case mention_type::nam:
      if (auto i = first_of(mention_type::nam)) return {{*i}, aggregation::sum};
      if (auto i = last_of(mention_type::nom)) return {{*i}, aggregation::sum};
      return all(aggregation::max);
    case mention_type::nom: {
      link_selection s{{}, aggregation::max};
      for (std::size_t i = 0; i < chain.size(); ++i)
        if (chain[i] == mention_type::nom) s.targets.push_back(i);
      if (!s.targets.empty()) return s;
      if (auto i = last_of(mention_type::nam)) return {{*i}, aggregation::sum};
      return all(aggregation::max);
    }
    case mention_type::pro: {
      link_selection s{{}, aggregation::mean};
      for (std::size_t i = 0; i < chain.size(); ++i)
        if (chain[i] == mention_type::pro || chain[i] == mention_type::nam) s.targets.push_back(i);
      if (!s.targets.empty()) return s;
      return all(aggregation::max);
    }
  }
  return all(aggregation::max);
}

// Combines per-target pair vectors. For max/min, `pair_score(i)` is the
// model score of target i; the extremal pair's vector is returned (ties go to
// the earliest target).
template <class Vec, class Score>
Vec combine_link_vectors(const std::vector<Vec>& per_target, aggregation agg, Score&& pair_score) {
  if (per_target.empty()) throw contract_violation("no link targets");
  if (agg == aggregation::max || agg == aggregation::min) {
    std::size_t best = 0;
    double best_score = pair_score(0);
    for (std::size_t i = 1; i < per_target.size(); ++i) {
      const double s = pair_score(i);
      if (agg == aggregation::max ? s > best_score : s < best_score) best = i, best_score = s;
    }
    return per_target[best];
  }
  Vec out;
  for (const auto& v : per_target) out += v;
  if (agg == aggregation::mean) out.scale(1.0 / static_cast<double>(per_target.size()));
  return out;
}

}  // namespace laso::edt
