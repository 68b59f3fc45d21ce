#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "vulca/errors.hpp"
#include "vulca/hash.hpp"
#include "vulca/io.hpp"
#include "vulca/taxonomy.hpp"

namespace vulca {

// Human experts form one reserved ground-truth group; model outputs group by
// (model_name, intervention).
inline constexpr const char* kHumanGroup = "human_expert";

inline std::string group_key(const CommentaryDoc& doc) {
  if (doc.source_type == SourceType::Human) return kHumanGroup;
  return doc.model_name + "/" + intervention_name(doc.intervention);
}

struct Corpus {
  std::vector<CommentaryDoc> docs;
  std::map<std::string, std::size_t> group_counts;  // manifest

  const CommentaryDoc& by_id(const std::string& id) const {
    for (const auto& d : docs) {
      if (d.id == id) return d;
    }
    throw Error(ErrorCode::SchemaError, "unknown doc id '" + id + "'");
  }

  std::map<std::string, std::string> texts_by_id() const {
    std::map<std::string, std::string> out;
    for (const auto& d : docs) out[d.id] = d.text;
    return out;
  }

  // Stable fingerprint over every field that influences downstream stages.
  std::string content_hash() const {
    Fnv1a64 h;
    for (const auto& d : docs) {
      h.field(d.id);
      h.field(source_type_name(d.source_type));
      h.field(d.model_name);
      h.field(d.persona);
      h.field(intervention_name(d.intervention));
      h.field(d.language);
      h.field(d.text);
    }
    return h.hex();
  }

  nlohmann::json manifest_json() const {
    nlohmann::json groups = nlohmann::json::object();
    for (const auto& [g, n] : group_counts) groups[g] = n;
    return nlohmann::json{{"total", docs.size()}, {"groups", groups}};
  }
};

namespace detail {

inline std::string require_string(const nlohmann::json& row, const char* field,
                                  std::size_t line_no) {
  if (!row.contains(field) || !row.at(field).is_string() ||
      row.at(field).get<std::string>().empty()) {
    throw Error(ErrorCode::SchemaError,
                "line " + std::to_string(line_no) + ": missing or empty '" + field + "'");
  }
  return row.at(field).get<std::string>();
}

}  // namespace detail

/// Parses a JSONL corpus. Each line:
///   {"id", "source_type", "model_name"?, "persona"?, "intervention"?,
///    "language"?, "text"}
/// Human docs default to (and must use) the ground_truth intervention.
inline Corpus ingest_corpus(const std::string& jsonl) {
  Corpus corpus;
  std::set<std::string> ids;
  for_each_line(jsonl, [&](std::size_t line_no, const std::string& line) {
    nlohmann::json row;
    try {
      row = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::SchemaError,
                  "line " + std::to_string(line_no) + ": " + e.what());
    }
    CommentaryDoc doc;
    doc.id = detail::require_string(row, "id", line_no);
    doc.source_type = parse_source_type(detail::require_string(row, "source_type", line_no));
    doc.model_name = row.value("model_name", std::string());
    doc.persona = row.value("persona", std::string());
    doc.language = row.value("language", std::string());
    doc.text = detail::require_string(row, "text", line_no);
    if (doc.source_type == SourceType::Human) {
      std::string iv = row.value("intervention", std::string("ground_truth"));
      doc.intervention = parse_intervention(iv);
    } else {
      doc.intervention = parse_intervention(detail::require_string(row, "intervention", line_no));
      if (doc.model_name.empty()) {
        throw Error(ErrorCode::SchemaError,
                    "line " + std::to_string(line_no) + ": model docs need 'model_name'");
      }
    }
    try {
      doc.validate();
    } catch (const Error& e) {
      throw Error(ErrorCode::SchemaError,
                  "line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!ids.insert(doc.id).second) {
      throw Error(ErrorCode::DuplicateId,
                  "line " + std::to_string(line_no) + ": doc id '" + doc.id + "'");
    }
    corpus.group_counts[group_key(doc)]++;
    corpus.docs.push_back(std::move(doc));
  });
  return corpus;
}

inline std::string corpus_to_jsonl(const Corpus& corpus) {
  std::string out;
  for (const auto& d : corpus.docs) {
    nlohmann::json row{{"id", d.id},
                       {"source_type", source_type_name(d.source_type)},
                       {"model_name", d.model_name},
                       {"persona", d.persona},
                       {"intervention", intervention_name(d.intervention)},
                       {"language", d.language},
                       {"text", d.text}};
    out += row.dump();
    out += '\n';
  }
  return out;
}

}  // namespace vulca
