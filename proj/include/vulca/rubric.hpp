#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "vulca/errors.hpp"

namespace vulca {

/// Capability subscores on the 5 / 7 / 5 point scales plus the composite
/// (10 x mean of the normalized subscores; 10 iff every subscore is maximal).
struct RubricScore {
  int element_recognition = 0;   // 0..5
  int cultural_understanding = 0;  // 0..7
  int language_usage = 0;        // 0..5
  double composite = 0.0;        // 0..10

  static double composite_of(int er, int cu, int lu) {
    return 10.0 * (er / 5.0 + cu / 7.0 + lu / 5.0) / 3.0;
  }
};

/// Ground truth for one painting: the correct element, symbol->meaning, and
/// terminology sets the structured template is scored against.
struct AnnotationKey {
  std::set<std::string> elements_major;
  std::set<std::string> elements_minor;
  std::map<std::string, std::string> symbol_meanings;
  std::set<std::string> terminology;

  static AnnotationKey from_json(const nlohmann::json& j) {
    AnnotationKey key;
    auto need = [&](const char* field) -> const nlohmann::json& {
      if (!j.contains(field)) {
        throw Error(ErrorCode::MissingKey, std::string("annotation key lacks '") + field + "'");
      }
      return j.at(field);
    };
    for (const auto& e : need("elements_major")) key.elements_major.insert(e.get<std::string>());
    for (const auto& e : need("elements_minor")) key.elements_minor.insert(e.get<std::string>());
    for (auto& [sym, meaning] : need("symbol_meanings").items()) {
      key.symbol_meanings[sym] = meaning.get<std::string>();
    }
    for (const auto& t : need("terminology")) key.terminology.insert(t.get<std::string>());
    if (key.elements_major.empty() && key.elements_minor.empty()) {
      throw Error(ErrorCode::MissingKey, "annotation key has no elements");
    }
    if (key.symbol_meanings.empty()) {
      throw Error(ErrorCode::MissingKey, "annotation key has no symbol meanings");
    }
    if (key.terminology.empty()) {
      throw Error(ErrorCode::MissingKey, "annotation key has no terminology");
    }
    return key;
  }
};

namespace detail {

inline std::string normalize_term(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  std::string out = s.substr(b, e - b + 1);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

inline std::set<std::string> normalize_set(const std::set<std::string>& in) {
  std::set<std::string> out;
  for (const auto& s : in) {
    auto n = normalize_term(s);
    if (!n.empty()) out.insert(n);
  }
  return out;
}

}  // namespace detail

/// Scores a structured evaluation object against the annotation key.
///
/// Expected object shape (extra fields are ignored):
///   {"primary_visual_elements": [string],
///    "symbolic_content": {symbol: meaning},
///    "key_terminology": [string]}
///
/// Banding is count-based: element recognition follows the 0/1-2/3-4/5+ bands
/// with upgrades for full major coverage (+several minors) and for complete,
/// error-free identification; cultural understanding is the number of
/// correctly matched symbol->meaning pairs capped at 7; language usage counts
/// correct terminology, reaching 5 only with full, error-free coverage and
/// dropping one band when incorrect terms appear.
inline RubricScore score_structured_template(const nlohmann::json& response,
                                             const AnnotationKey& key) {
  if (!response.is_object()) {
    throw Error(ErrorCode::SchemaInvalid, "structured evaluation must be a JSON object");
  }
  auto need_array = [&](const char* field) -> const nlohmann::json& {
    if (!response.contains(field) || !response.at(field).is_array()) {
      throw Error(ErrorCode::SchemaInvalid,
                  std::string("'") + field + "' must be an array of strings");
    }
    return response.at(field);
  };
  if (!response.contains("symbolic_content") || !response.at("symbolic_content").is_object()) {
    throw Error(ErrorCode::SchemaInvalid, "'symbolic_content' must be an object");
  }

  // Element recognition (0..5).
  auto major = detail::normalize_set(key.elements_major);
  auto minor = detail::normalize_set(key.elements_minor);
  std::size_t major_hits = 0, minor_hits = 0, wrong_elements = 0;
  std::set<std::string> seen;
  for (const auto& e : need_array("primary_visual_elements")) {
    if (!e.is_string()) throw Error(ErrorCode::SchemaInvalid, "element entries must be strings");
    auto n = detail::normalize_term(e.get<std::string>());
    if (n.empty() || !seen.insert(n).second) continue;
    if (major.count(n)) ++major_hits;
    else if (minor.count(n)) ++minor_hits;
    else ++wrong_elements;
  }
  std::size_t correct = major_hits + minor_hits;
  int er = 0;
  if (correct == 0) er = 0;
  else if (correct <= 2) er = 1;
  else if (correct <= 4) er = 2;
  else er = 3;
  bool all_major = major_hits == major.size() && !major.empty();
  if (all_major && minor_hits >= 3) er = std::max(er, 4);
  if (all_major && minor_hits == minor.size() && wrong_elements == 0) er = 5;

  // Cultural understanding (0..7): correctly matched symbol->meaning pairs.
  std::map<std::string, std::string> key_symbols;
  for (const auto& [sym, meaning] : key.symbol_meanings) {
    key_symbols[detail::normalize_term(sym)] = detail::normalize_term(meaning);
  }
  int matched_pairs = 0;
  for (auto& [sym, meaning] : response.at("symbolic_content").items()) {
    if (!meaning.is_string()) {
      throw Error(ErrorCode::SchemaInvalid, "symbol meanings must be strings");
    }
    auto it = key_symbols.find(detail::normalize_term(sym));
    if (it != key_symbols.end() &&
        it->second == detail::normalize_term(meaning.get<std::string>())) {
      ++matched_pairs;
    }
  }
  int cu = std::min(7, matched_pairs);

  // Language usage (0..5): terminology coverage with an error penalty.
  auto terms = detail::normalize_set(key.terminology);
  std::size_t term_hits = 0, term_errors = 0;
  std::set<std::string> seen_terms;
  for (const auto& t : need_array("key_terminology")) {
    if (!t.is_string()) throw Error(ErrorCode::SchemaInvalid, "terminology entries must be strings");
    auto n = detail::normalize_term(t.get<std::string>());
    if (n.empty() || !seen_terms.insert(n).second) continue;
    if (terms.count(n)) ++term_hits;
    else ++term_errors;
  }
  int lu = 0;
  if (term_hits > 0) {
    if (term_hits >= terms.size() && term_errors == 0) {
      lu = 5;
    } else {
      lu = static_cast<int>(std::min<std::size_t>(4, term_hits));
      if (term_errors > 0) lu = std::max(1, lu - 1);
    }
  }

  RubricScore score;
  score.element_recognition = er;
  score.cultural_understanding = cu;
  score.language_usage = lu;
  score.composite = RubricScore::composite_of(er, cu, lu);
  return score;
}

}  // namespace vulca
