#pragma once

#include <cstddef>
#include <string>

#include <json.hpp>

#include "vulca/errors.hpp"

namespace vulca {

/// A model response split into its prose commentary and the trailing
/// structured evaluation object.
struct StructuredResponse {
  std::string commentary_text;
  nlohmann::json evaluation_object;
};

namespace detail {

// Extent of a braced span starting at '{', with JSON string/escape awareness.
// Returns one past the closing brace, or npos if the span never closes.
inline std::size_t braced_extent(const std::string& text, std::size_t start) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = start; i < text.size(); ++i) {
    char c = text[i];
    if (in_string) {
      if (c == '\\') ++i;
      else if (c == '"') in_string = false;
    } else if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      --depth;
      if (depth == 0) return i + 1;
    }
  }
  return std::string::npos;
}

inline bool whitespace_only(const std::string& text, std::size_t from, std::size_t to) {
  for (std::size_t i = from; i < to; ++i) {
    char c = text[i];
    if (c != ' ' && c != '\t' && c != '\r' && c != '\n') return false;
  }
  return true;
}

}  // namespace detail

/// Splits a raw response into prose commentary and the trailing structured
/// object: the last top-level balanced {...} followed only by whitespace.
/// Braced snippets inline in the prose are ignored. Errors:
///   NoStructuredObject  - no trailing object exists
///   MalformedObject     - trailing object is unclosed or not valid JSON
///                         (message carries the 0-based byte offset)
///   EmptyCommentary     - nothing but whitespace precedes the object
inline StructuredResponse parse_structured_response(const std::string& raw) {
  if (raw.empty()) throw Error(ErrorCode::SchemaError, "response is empty");

  // Rightmost '{' whose balanced extent runs to the end of the text. Starting
  // the scan at each candidate brace gives a fresh lexical state, so stray
  // quotes earlier in the prose cannot derail it.
  std::size_t last_open = std::string::npos;
  for (std::size_t pos = raw.rfind('{'); pos != std::string::npos;
       pos = pos == 0 ? std::string::npos : raw.rfind('{', pos - 1)) {
    if (last_open == std::string::npos) last_open = pos;
    std::size_t end = detail::braced_extent(raw, pos);
    if (end == std::string::npos) continue;
    if (!detail::whitespace_only(raw, end, raw.size())) continue;

    nlohmann::json object;
    try {
      object = nlohmann::json::parse(raw.substr(pos, end - pos));
    } catch (const nlohmann::json::parse_error& e) {
      std::size_t offset = pos + (e.byte > 0 ? e.byte - 1 : 0);
      throw Error(ErrorCode::MalformedObject,
                  std::string("invalid JSON at byte ") + std::to_string(offset) + ": " +
                      e.what());
    }
    if (detail::whitespace_only(raw, 0, pos)) {
      throw Error(ErrorCode::EmptyCommentary, "no prose precedes the structured object");
    }
    StructuredResponse out;
    std::size_t prose_end = pos;
    while (prose_end > 0 && detail::whitespace_only(raw, prose_end - 1, prose_end)) {
      --prose_end;
    }
    out.commentary_text = raw.substr(0, prose_end);
    out.evaluation_object = std::move(object);
    return out;
  }

  // The rightmost '{' never closing at all reads as an attempted-but-cut-off
  // object rather than prose.
  if (last_open != std::string::npos &&
      detail::braced_extent(raw, last_open) == std::string::npos) {
    throw Error(ErrorCode::MalformedObject,
                "unclosed object starting at byte " + std::to_string(last_open));
  }
  throw Error(ErrorCode::NoStructuredObject, "no trailing structured object found");
}

}  // namespace vulca
