// String similarity and word-shape helpers used by the lexical and
// string-match feature classes.
#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace laso::edt {

inline std::string lowercase(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline bool is_vowel(char c) {
  switch (std::tolower(static_cast<unsigned char>(c))) {
    case 'a': case 'e': case 'i': case 'o': case 'u': return true;
    default: return false;
  }
}

inline std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

// Distance divided by the longer length; 0 for two empty strings.
inline double normalized_edit_distance(std::string_view a, std::string_view b) {
  const std::size_t n = std::max(a.size(), b.size());
  return n == 0 ? 0.0 : static_cast<double>(edit_distance(a, b)) / static_cast<double>(n);
}

// Levenshtein distance where inserting, deleting or substituting a vowel
// costs half, so "Mohammed"/"Muhammad" come out close. Normalized like above.
inline double vowel_discounted_edit_distance(std::string_view a, std::string_view b) {
  auto cost = [](char c) { return is_vowel(c) ? 0.5 : 1.0; };
  std::vector<double> row(b.size() + 1, 0.0);
  for (std::size_t j = 1; j <= b.size(); ++j) row[j] = row[j - 1] + cost(b[j - 1]);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    double diag = row[0];
    row[0] += cost(a[i - 1]);
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const double up = row[j];
      const double sub =
          a[i - 1] == b[j - 1] ? 0.0 : (is_vowel(a[i - 1]) && is_vowel(b[j - 1]) ? 0.5 : 1.0);
      row[j] = std::min({row[j] + cost(a[i - 1]), row[j - 1] + cost(b[j - 1]), diag + sub});
      diag = up;
    }
  }
  const std::size_t n = std::max(a.size(), b.size());
  return n == 0 ? 0.0 : row[b.size()] / static_cast<double>(n);
}

// Jaro similarity in [0, 1].
inline double jaro(std::string_view a, std::string_view b) {
  if (a.empty() && b.empty()) return 1.0;
  if (a.empty() || b.empty()) return 0.0;
  const std::size_t window = std::max(a.size(), b.size()) / 2 == 0 ? 0 : std::max(a.size(), b.size()) / 2 - 1;
  std::vector<bool> ma(a.size()), mb(b.size());
  std::size_t matches = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::size_t lo = i > window ? i - window : 0;
    const std::size_t hi = std::min(b.size(), i + window + 1);
    for (std::size_t j = lo; j < hi; ++j) {
      if (mb[j] || a[i] != b[j]) continue;
      ma[i] = mb[j] = true;
      ++matches;
      break;
    }
  }
  if (matches == 0) return 0.0;
  std::size_t half_transpositions = 0;
  for (std::size_t i = 0, j = 0; i < a.size(); ++i) {
    if (!ma[i]) continue;
    while (!mb[j]) ++j;
    if (a[i] != b[j]) ++half_transpositions;
    ++j;
  }
  const double m = static_cast<double>(matches);
  const double t = static_cast<double>(half_transpositions) / 2.0;
  return (m / static_cast<double>(a.size()) + m / static_cast<double>(b.size()) + (m - t) / m) / 3.0;
}

// "Israel"/"Israeli", "Russia"/"Russian": the longer word ends in a common
// nationality suffix and starts with the first half of the shorter one.
inline bool nationality_match(std::string_view a, std::string_view b) {
  std::string x = lowercase(a), y = lowercase(b);
  if (x == y || x.empty() || y.empty()) return false;
  if (x.size() > y.size()) std::swap(x, y);
  if (y.size() - x.size() > 4) return false;
  static constexpr std::array<std::string_view, 8> suffixes{"i", "n", "an", "ian", "ese", "ish", "ic", "ean"};
  const bool suffixed = std::any_of(suffixes.begin(), suffixes.end(), [&](std::string_view s) {
    return y.size() > s.size() && y.ends_with(s);
  });
  if (!suffixed) return false;
  const std::size_t half = (x.size() + 1) / 2;
  return y.compare(0, half, x, 0, half) == 0;
}

inline bool is_acronym_stopword(std::string_view w) {
  const std::string l = lowercase(w);
  return l == "of" || l == "and" || l == "the" || l == "for" || l == "&";
}

// "International Business Machines" vs "IBM" (either order, periods ignored).
inline bool acronym_match(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  auto check = [](const std::vector<std::string>& words, const std::vector<std::string>& acr) {
    if (words.size() < 2 || acr.size() != 1) return false;
    std::string letters;
    for (char c : acr[0])
      if (c != '.') letters += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (letters.size() < 2) return false;
    std::string initials;
    for (const auto& w : words)
      if (!w.empty() && !is_acronym_stopword(w))
        initials += static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
    return initials == letters;
  };
  return check(a, b) || check(b, a);
}

// Suffix-stripping stemmer: ies->y, sses->ss, s->"" (not after s or u),
// ing/ed dropped when at least three letters remain, ly dropped likewise.
inline std::string stem(std::string_view word) {
  std::string w = lowercase(word);
  auto strip = [&](std::string_view suf, std::string_view rep, std::size_t keep) {
    if (w.size() >= suf.size() + keep && w.ends_with(suf)) {
      w.resize(w.size() - suf.size());
      w += rep;
      return true;
    }
    return false;
  };
  if (strip("ies", "y", 2) || strip("sses", "ss", 1)) return w;
  if (w.size() > 3 && w.ends_with('s') && !w.ends_with("ss") && !w.ends_with("us")) {
    w.pop_back();
    return w;
  }
  if (strip("ing", "", 3) || strip("ed", "", 3) || strip("ly", "", 3)) return w;
  return w;
}

// Character-class shape with runs collapsed: "Clinton" -> "Xx", "U.S." -> "X.X.", "1999" -> "d".
inline std::string word_shape(std::string_view word) {
  std::string out;
  for (char c : word) {
    const auto u = static_cast<unsigned char>(c);
    char k = std::isupper(u) ? 'X' : std::islower(u) ? 'x' : std::isdigit(u) ? 'd' : c;
    if (out.empty() || out.back() != k || (k != 'X' && k != 'x' && k != 'd')) out += k;
  }
  return out;
}

// Word classes in the style of Bikel et al.'s name finder.
inline std::string_view bikel_class(std::string_view w, bool sentence_initial) {
  bool digit = false, alpha = false, upper_all = true, dash = false, slash = false, comma = false, period = false;
  std::size_t digits = 0;
  for (char c : w) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isdigit(u)) digit = true, ++digits;
    if (std::isalpha(u)) {
      alpha = true;
      if (!std::isupper(u)) upper_all = false;
    }
    dash |= c == '-';
    slash |= c == '/';
    comma |= c == ',';
    period |= c == '.';
  }
  if (digit && !alpha && digits == w.size()) {
    if (digits == 2) return "twoDigitNum";
    if (digits == 4) return "fourDigitNum";
  }
  if (digit && alpha) return "containsDigitAndAlpha";
  if (digit && dash) return "containsDigitAndDash";
  if (digit && slash) return "containsDigitAndSlash";
  if (digit && comma) return "containsDigitAndComma";
  if (digit && period) return "containsDigitAndPeriod";
  if (digit) return "otherNum";
  if (!alpha) return "other";
  if (upper_all) return w.size() == 2 && period ? "capPeriod" : "allCaps";
  if (w.size() == 2 && std::isupper(static_cast<unsigned char>(w[0])) && w[1] == '.') return "capPeriod";
  if (sentence_initial) return "firstWord";
  if (std::isupper(static_cast<unsigned char>(w[0]))) return "initCap";
  if (std::islower(static_cast<unsigned char>(w[0]))) return "lowerCase";
  return "other";
}

}  // namespace laso::edt
