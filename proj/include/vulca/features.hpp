#pragma once

#include <array>
#include <string>
#include <vector>

#include <json.hpp>

#include "vulca/errors.hpp"
#include "vulca/io.hpp"
#include "vulca/taxonomy.hpp"

namespace vulca {

// Quality labels split by polarity, canonical order. Overall Coherence is an
// affine map of mean(positive) - mean(negative) from [-1,1] into [0,1]; the
// source framework names this dimension without defining it, so this formula
// is this library's own definition (documented in the README).
inline const std::array<const char*, 6> kPositiveQualityLabels = {
    "Profound Insight", "Strong Argumentation",  "Clear Logic",
    "Detailed Analysis", "Classical Citations", "Objective Viewpoint",
};
inline const std::array<const char*, 5> kNegativeQualityLabels = {
    "Superficial Treatment", "Overly General Content", "Lacks Examples",
    "Logical Gaps", "Subjective/Biased View",
};

/// quality_scores in canonical quality order (6 positive then 5 negative).
inline double overall_coherence(const std::array<double, kQualityCount>& quality_scores) {
  double pos = 0.0, neg = 0.0;
  for (std::size_t i = 0; i < kQualityCount; ++i) {
    double s = quality_scores[i];
    if (!(s >= 0.0 && s <= 1.0)) {
      throw Error(ErrorCode::OutOfRange,
                  "quality score " + std::to_string(s) + " outside [0,1]");
    }
    if (i < kPositiveQualityLabels.size()) pos += s;
    else neg += s;
  }
  pos /= static_cast<double>(kPositiveQualityLabels.size());
  neg /= static_cast<double>(kNegativeQualityLabels.size());
  double shifted = std::clamp(pos - neg + 1.0, 0.0, 2.0);
  return shifted / 2.0;
}

/// The three-stage assembly: which labels are scored by the classifier in
/// stage 1 (the 38 primary), which in stage 2 (3 supplementary classifier
/// labels plus the computed Overall Coherence), and which slots stage 3 fills
/// (the 5 profile-alignment scores, computed from stages 1+2 only).
struct AssemblyPlan {
  std::vector<std::string> stage1_labels;       // 38 classifier labels
  std::vector<std::string> stage2_zsl_labels;   // 3 supplementary classifier labels
  std::string stage2_computed_label;            // Overall Coherence Score
  std::vector<std::string> stage3_profiles;     // 5 profile names

  static AssemblyPlan from(const LabelSet& labels) {
    AssemblyPlan plan;
    plan.stage1_labels = labels.primary_names();
    auto supp = labels.names_in(Dimension::Supplementary);
    for (const auto& name : supp) {
      if (name == "Overall Coherence Score") plan.stage2_computed_label = name;
      else plan.stage2_zsl_labels.push_back(name);
    }
    if (plan.stage2_computed_label.empty()) {
      throw Error(ErrorCode::SchemaError,
                  "taxonomy lacks the 'Overall Coherence Score' supplementary slot");
    }
    for (const auto& name : labels.names_in(Dimension::ProfileAlignment)) {
      std::string profile = name;
      // "<profile> Score" -> profile name
      const std::string suffix = " Score";
      if (profile.size() > suffix.size() &&
          profile.compare(profile.size() - suffix.size(), suffix.size(), suffix) == 0) {
        profile.resize(profile.size() - suffix.size());
      }
      plan.stage3_profiles.push_back(profile);
    }
    return plan;
  }
};

/// Places primary scores, supplementary scores, and the five alignment scores
/// at their taxonomy indices. Pure; map iteration order never matters because
/// the layout comes from the label registry.
inline FeatureVector47 assemble_vector(const CommentaryDoc& doc,
                                       const LabelScoreMap& primary,
                                       const LabelScoreMap& supplementary,
                                       const std::array<double, kProfileAlignmentCount>& alignment,
                                       const LabelSet& labels) {
  std::array<double, kVectorDim> values{};
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const LabelId& label = labels.at(i);
    switch (label.dimension) {
      case Dimension::EvaluativeStance:
      case Dimension::FeatureFocus:
      case Dimension::ArgumentativeQuality: {
        auto it = primary.scores.find(label.canonical_name);
        if (it == primary.scores.end()) {
          throw Error(ErrorCode::MissingLabel, label.canonical_name);
        }
        values[i] = it->second;
        break;
      }
      case Dimension::Supplementary: {
        auto it = supplementary.scores.find(label.canonical_name);
        if (it == supplementary.scores.end()) {
          throw Error(ErrorCode::MissingLabel, label.canonical_name);
        }
        values[i] = it->second;
        break;
      }
      case Dimension::ProfileAlignment: {
        std::size_t slot = i - kProfileAlignmentOffset;
        double a = alignment[slot];
        if (!(a >= 0.0 && a <= 1.0)) {
          throw Error(ErrorCode::OutOfRange,
                      "alignment slot " + std::to_string(slot) + " outside [0,1]");
        }
        values[i] = a;
        break;
      }
    }
  }
  return FeatureVector47(doc.id, values);
}

// ---------------------------------------------------------------------------
// Vector dump format (JSON Lines): the interchange format between stages.
// ---------------------------------------------------------------------------

inline std::string vectors_to_jsonl(const std::vector<FeatureVector47>& vectors) {
  std::string out;
  for (const auto& v : vectors) {
    nlohmann::json row{{"doc_id", v.doc_id()},
                       {"layout_version", v.layout_version()},
                       {"values", v.values()}};
    out += row.dump();
    out += '\n';
  }
  return out;
}

inline std::vector<FeatureVector47> vectors_from_jsonl(const std::string& content) {
  std::vector<FeatureVector47> out;
  for_each_line(content, [&](std::size_t line_no, const std::string& line) {
    nlohmann::json row;
    try {
      row = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::SchemaError,
                  "vector dump line " + std::to_string(line_no) + ": " + e.what());
    }
    std::string layout = row.value("layout_version", std::string());
    if (layout != kLayoutVersion) {
      throw Error(ErrorCode::SchemaError,
                  "vector dump line " + std::to_string(line_no) +
                      ": layout_version '" + layout + "' != '" + kLayoutVersion + "'");
    }
    const auto& vals = row.at("values");
    if (vals.size() != kVectorDim) {
      throw Error(ErrorCode::SchemaError,
                  "vector dump line " + std::to_string(line_no) + ": expected " +
                      std::to_string(kVectorDim) + " values");
    }
    std::array<double, kVectorDim> values{};
    for (std::size_t i = 0; i < kVectorDim; ++i) values[i] = vals.at(i).get<double>();
    out.emplace_back(row.at("doc_id").get<std::string>(), values);
  });
  return out;
}

}  // namespace vulca
