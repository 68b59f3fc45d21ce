#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "vulca/errors.hpp"
#include "vulca/version.hpp"

namespace vulca {

// ---------------------------------------------------------------------------
// Label taxonomy
// ---------------------------------------------------------------------------

enum class Dimension {
  EvaluativeStance,
  FeatureFocus,
  ArgumentativeQuality,
  ProfileAlignment,
  Supplementary,
};

inline constexpr std::size_t kStanceCount = 10;
inline constexpr std::size_t kFocusCount = 17;
inline constexpr std::size_t kQualityCount = 11;
inline constexpr std::size_t kProfileAlignmentCount = 5;
inline constexpr std::size_t kSupplementaryCount = 4;
inline constexpr std::size_t kPrimaryCount = kStanceCount + kFocusCount + kQualityCount;  // 38
inline constexpr std::size_t kVectorDim = kPrimaryCount + kProfileAlignmentCount + kSupplementaryCount;  // 47

// Index of the first label of each dimension in the canonical vector layout:
// stance, focus, quality, profile-alignment, supplementary.
inline constexpr std::size_t kStanceOffset = 0;
inline constexpr std::size_t kFocusOffset = kStanceCount;
inline constexpr std::size_t kQualityOffset = kFocusOffset + kFocusCount;
inline constexpr std::size_t kProfileAlignmentOffset = kQualityOffset + kQualityCount;
inline constexpr std::size_t kSupplementaryOffset = kProfileAlignmentOffset + kProfileAlignmentCount;

inline const char* dimension_name(Dimension d) {
  switch (d) {
    case Dimension::EvaluativeStance: return "evaluative_stance";
    case Dimension::FeatureFocus: return "feature_focus";
    case Dimension::ArgumentativeQuality: return "argumentative_quality";
    case Dimension::ProfileAlignment: return "profile_alignment";
    case Dimension::Supplementary: return "supplementary";
  }
  return "?";
}

inline std::size_t dimension_expected_count(Dimension d) {
  switch (d) {
    case Dimension::EvaluativeStance: return kStanceCount;
    case Dimension::FeatureFocus: return kFocusCount;
    case Dimension::ArgumentativeQuality: return kQualityCount;
    case Dimension::ProfileAlignment: return kProfileAlignmentCount;
    case Dimension::Supplementary: return kSupplementaryCount;
  }
  return 0;
}

struct LabelId {
  Dimension dimension;
  std::string canonical_name;  // unique across the taxonomy; lookups use this
  std::string alt_name;        // transliteration/translation, may be empty
};

/// Complete label registry with stable indices defining the 47-dim layout.
class LabelSet {
 public:
  LabelSet(std::vector<LabelId> labels, std::string version)
      : labels_(std::move(labels)), version_(std::move(version)) {
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      auto [it, inserted] = index_.emplace(labels_[i].canonical_name, i);
      if (!inserted) {
        throw Error(ErrorCode::DuplicateLabel, labels_[i].canonical_name);
      }
    }
    validate_counts();
  }

  const std::vector<LabelId>& labels() const { return labels_; }
  const std::string& version() const { return version_; }
  std::size_t size() const { return labels_.size(); }
  const LabelId& at(std::size_t i) const { return labels_.at(i); }

  std::optional<std::size_t> find(const std::string& canonical) const {
    auto it = index_.find(canonical);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t index_of(const std::string& canonical) const {
    auto idx = find(canonical);
    if (!idx) throw Error(ErrorCode::UnknownLabel, canonical);
    return *idx;
  }

  std::vector<std::string> names_in(Dimension d) const {
    std::vector<std::string> out;
    for (const auto& l : labels_) {
      if (l.dimension == d) out.push_back(l.canonical_name);
    }
    return out;
  }

  // The 38 + 3 labels scored by the zero-shot classifier (everything except
  // the profile-alignment block and the computed Overall Coherence slot).
  std::vector<std::string> primary_names() const {
    std::vector<std::string> out;
    for (const auto& l : labels_) {
      if (l.dimension != Dimension::ProfileAlignment &&
          l.dimension != Dimension::Supplementary) {
        out.push_back(l.canonical_name);
      }
    }
    return out;
  }

  nlohmann::json to_json() const {
    nlohmann::json dims = nlohmann::json::object();
    static const Dimension order[] = {
        Dimension::EvaluativeStance, Dimension::FeatureFocus,
        Dimension::ArgumentativeQuality, Dimension::ProfileAlignment,
        Dimension::Supplementary};
    for (Dimension d : order) {
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& l : labels_) {
        if (l.dimension == d) {
          arr.push_back(nlohmann::json::array({l.canonical_name, l.alt_name}));
        }
      }
      dims[dimension_name(d)] = arr;
    }
    return nlohmann::json{{"version", version_}, {"dimensions", dims}};
  }

 private:
  void validate_counts() const {
    std::map<Dimension, std::size_t> counts;
    for (const auto& l : labels_) counts[l.dimension]++;
    static const Dimension order[] = {
        Dimension::EvaluativeStance, Dimension::FeatureFocus,
        Dimension::ArgumentativeQuality, Dimension::ProfileAlignment,
        Dimension::Supplementary};
    for (Dimension d : order) {
      if (counts[d] != dimension_expected_count(d)) {
        throw Error(ErrorCode::WrongDimensionCount,
                    std::string(dimension_name(d)) + ": expected " +
                        std::to_string(dimension_expected_count(d)) + ", got " +
                        std::to_string(counts[d]));
      }
    }
    // Canonical layout requires dimension blocks in declaration order.
    std::size_t i = 0;
    for (Dimension d : order) {
      for (std::size_t k = 0; k < dimension_expected_count(d); ++k, ++i) {
        if (labels_[i].dimension != d) {
          throw Error(ErrorCode::WrongDimensionCount,
                      "labels out of canonical dimension order at index " +
                          std::to_string(i));
        }
      }
    }
  }

  std::vector<LabelId> labels_;
  std::string version_;
  std::unordered_map<std::string, std::size_t> index_;
};

inline Dimension parse_dimension(const std::string& s) {
  if (s == "evaluative_stance") return Dimension::EvaluativeStance;
  if (s == "feature_focus") return Dimension::FeatureFocus;
  if (s == "argumentative_quality") return Dimension::ArgumentativeQuality;
  if (s == "profile_alignment") return Dimension::ProfileAlignment;
  if (s == "supplementary") return Dimension::Supplementary;
  throw Error(ErrorCode::SchemaError, "unknown dimension '" + s + "'");
}

/// Loads a taxonomy config (JSON, dimension -> [[canonical, alt], ...]).
/// Dimension blocks are assembled in canonical order regardless of key order
/// in the file.
inline LabelSet load_taxonomy(const nlohmann::json& config) {
  if (!config.is_object() || !config.contains("dimensions")) {
    throw Error(ErrorCode::SchemaError, "taxonomy config needs a 'dimensions' object");
  }
  std::string version = config.value("version", std::string("unversioned"));
  const auto& dims = config.at("dimensions");
  std::vector<LabelId> labels;
  static const Dimension order[] = {
      Dimension::EvaluativeStance, Dimension::FeatureFocus,
      Dimension::ArgumentativeQuality, Dimension::ProfileAlignment,
      Dimension::Supplementary};
  for (Dimension d : order) {
    const char* key = dimension_name(d);
    if (!dims.contains(key)) {
      throw Error(ErrorCode::WrongDimensionCount,
                  std::string(key) + ": expected " +
                      std::to_string(dimension_expected_count(d)) + ", got 0");
    }
    for (const auto& entry : dims.at(key)) {
      if (!entry.is_array() || entry.empty()) {
        throw Error(ErrorCode::SchemaError,
                    std::string("bad label entry under ") + key);
      }
      LabelId label;
      label.dimension = d;
      label.canonical_name = entry.at(0).get<std::string>();
      label.alt_name = entry.size() > 1 ? entry.at(1).get<std::string>() : "";
      labels.push_back(std::move(label));
    }
    std::size_t got = dims.at(key).size();
    if (got != dimension_expected_count(d)) {
      throw Error(ErrorCode::WrongDimensionCount,
                  std::string(key) + ": expected " +
                      std::to_string(dimension_expected_count(d)) + ", got " +
                      std::to_string(got));
    }
  }
  return LabelSet(std::move(labels), version);
}

// ---------------------------------------------------------------------------
// Presence rule
// ---------------------------------------------------------------------------

/// A label is present iff its probability strictly exceeds 0.5.
inline bool is_present(double score) {
  if (!(score >= 0.0 && score <= 1.0)) {
    throw Error(ErrorCode::OutOfRange,
                "probability " + std::to_string(score) + " outside [0,1]");
  }
  return score > 0.5;
}

// ---------------------------------------------------------------------------
// Documents and score containers
// ---------------------------------------------------------------------------

enum class SourceType { Human, Model };
enum class Intervention { GroundTruth, Baseline, Persona, PersonaKb };

inline const char* source_type_name(SourceType s) {
  return s == SourceType::Human ? "human" : "model";
}

inline SourceType parse_source_type(const std::string& s) {
  if (s == "human") return SourceType::Human;
  if (s == "model") return SourceType::Model;
  throw Error(ErrorCode::SchemaError, "unknown source_type '" + s + "'");
}

inline const char* intervention_name(Intervention i) {
  switch (i) {
    case Intervention::GroundTruth: return "ground_truth";
    case Intervention::Baseline: return "baseline";
    case Intervention::Persona: return "persona";
    case Intervention::PersonaKb: return "persona_kb";
  }
  return "?";
}

inline Intervention parse_intervention(const std::string& s) {
  if (s == "ground_truth") return Intervention::GroundTruth;
  if (s == "baseline") return Intervention::Baseline;
  if (s == "persona") return Intervention::Persona;
  if (s == "persona_kb") return Intervention::PersonaKb;
  throw Error(ErrorCode::SchemaError, "unknown intervention '" + s + "'");
}

struct CommentaryDoc {
  std::string id;
  SourceType source_type = SourceType::Human;
  std::string model_name;  // empty for human
  std::string persona;     // empty if none
  Intervention intervention = Intervention::GroundTruth;
  std::string language;    // BCP-47 style tag, informational
  std::string text;

  void validate() const {
    if (id.empty()) throw Error(ErrorCode::SchemaError, "doc id empty");
    if (text.empty()) throw Error(ErrorCode::SchemaError, "doc " + id + " has empty text");
    if (source_type == SourceType::Human && intervention != Intervention::GroundTruth) {
      throw Error(ErrorCode::SchemaError,
                  "doc " + id + ": human source requires ground_truth intervention");
    }
  }
};

/// Per-document classifier probabilities, keyed by canonical label name.
struct LabelScoreMap {
  std::string doc_id;
  std::map<std::string, double> scores;

  double at(const std::string& label) const {
    auto it = scores.find(label);
    if (it == scores.end()) throw Error(ErrorCode::MissingLabel, label);
    return it->second;
  }

  void set(const std::string& label, double score) {
    if (!(score >= 0.0 && score <= 1.0)) {
      throw Error(ErrorCode::OutOfRangeScore,
                  "doc " + doc_id + " label " + label + ": " + std::to_string(score));
    }
    scores[label] = score;
  }
};

/// Ordered 47-dim feature vector; range and length checked on construction.
class FeatureVector47 {
 public:
  FeatureVector47() : values_{} {}

  FeatureVector47(std::string doc_id, const std::array<double, kVectorDim>& values,
                  std::string layout_version = kLayoutVersion)
      : doc_id_(std::move(doc_id)),
        values_(values),
        layout_version_(std::move(layout_version)) {
    for (std::size_t i = 0; i < kVectorDim; ++i) {
      if (!(values_[i] >= 0.0 && values_[i] <= 1.0) || !std::isfinite(values_[i])) {
        throw Error(ErrorCode::OutOfRange,
                    "component " + std::to_string(i) + " of doc " + doc_id_ +
                        " outside [0,1]");
      }
    }
  }

  const std::string& doc_id() const { return doc_id_; }
  const std::string& layout_version() const { return layout_version_; }
  const std::array<double, kVectorDim>& values() const { return values_; }
  double operator[](std::size_t i) const { return values_.at(i); }

 private:
  std::string doc_id_;
  std::array<double, kVectorDim> values_;
  std::string layout_version_ = kLayoutVersion;
};

struct EmbeddingVector {
  std::string doc_id;
  std::vector<double> values;

  std::size_t dim() const { return values.size(); }
};

}  // namespace vulca
