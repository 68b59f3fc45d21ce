#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "vulca/errors.hpp"
#include "vulca/stats.hpp"
#include "vulca/taxonomy.hpp"

namespace vulca {

// Declaration order fixed; it is also the order of the five profile-alignment
// slots in the 47-dim layout and the tie-break order for assignment.
inline const std::array<const char*, kProfileAlignmentCount> kProfileNames = {
    "Comprehensive Analyst",
    "Historically Focused Critic",
    "Technique & Style Focused Critic",
    "Theory & Comparison Focused Critic",
    "General Descriptive Profile",
};

enum class RuleKind { Stance, Feature, Quality };

inline const char* rule_kind_name(RuleKind k) {
  switch (k) {
    case RuleKind::Stance: return "stance";
    case RuleKind::Feature: return "feature";
    case RuleKind::Quality: return "quality";
  }
  return "?";
}

inline RuleKind parse_rule_kind(const std::string& s) {
  if (s == "stance") return RuleKind::Stance;
  if (s == "feature") return RuleKind::Feature;
  if (s == "quality") return RuleKind::Quality;
  throw Error(ErrorCode::SchemaError, "unknown rule kind '" + s + "'");
}

struct ProfileRule {
  std::string label;       // canonical label name
  double min_score = 0.0;
  double max_score = 1.0;  // defaults to 1.0; rule configs rarely set it
  RuleKind kind = RuleKind::Feature;
};

// "At least min_count pool features mentioned, averaging >= min_avg": the
// clause passes iff at least min_count pool components are positive and the
// mean of the min_count largest ones reaches min_avg.
struct PooledClause {
  std::vector<std::string> pool;
  std::size_t min_count = 0;
  double min_avg = 0.0;
};

struct ProfileDef {
  std::string name;
  std::optional<ProfileRule> required_stance;
  std::vector<ProfileRule> flexible_rules;
  std::size_t min_flexible_to_pass = 0;
  std::optional<PooledClause> pooled;
};

struct ProfileMatch {
  std::string doc_id;
  std::set<std::string> matched;                      // rule-level matches
  std::map<std::string, double> alignment_scores;     // profile -> [0,1]
  std::optional<std::string> assigned_profile;        // set iff similarity > 0.7
  std::optional<double> assigned_similarity;
  double best_similarity = 0.0;                       // max over centroids
};

struct ProfileCentroid {
  std::string profile;
  std::array<double, kVectorDim> centroid{};
  std::size_t support_count = 0;
};

inline constexpr double kExpertAlignmentThreshold = 0.7;

// ---------------------------------------------------------------------------
// Stance contribution (S_C)
// ---------------------------------------------------------------------------

/// Piecewise contribution of an observed (label, score) against a rule:
///   (s - min) / (max - min)  when labels match, s >= min, max != min
///   1                        when labels match, s >= min, max == min
///   0                        otherwise
/// Values past the rule maximum saturate at 1 so the range is exactly [0,1].
inline double stance_contribution(const std::string& actual_label, double s_actual,
                                  const ProfileRule& rule) {
  if (actual_label != rule.label) return 0.0;
  if (s_actual < rule.min_score) return 0.0;
  if (rule.max_score == rule.min_score) return 1.0;
  double c = (s_actual - rule.min_score) / (rule.max_score - rule.min_score);
  return std::min(1.0, c);
}

namespace detail {

// Contribution of a vector component against a rule (label always matches
// here; the component is looked up by the rule's own label).
inline double component_contribution(double s, double min_score, double max_score) {
  if (s < min_score) return 0.0;
  if (max_score == min_score) return 1.0;
  return std::min(1.0, (s - min_score) / (max_score - min_score));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Rule configuration
// ---------------------------------------------------------------------------

inline ProfileRule parse_rule(const nlohmann::json& j, const LabelSet& labels) {
  ProfileRule r;
  r.label = j.at("label").get<std::string>();
  r.min_score = j.at("min").get<double>();
  r.max_score = j.value("max", 1.0);
  r.kind = parse_rule_kind(j.value("kind", std::string("feature")));
  std::size_t idx = labels.index_of(r.label);  // throws UnknownLabel
  if (labels.at(idx).dimension == Dimension::ProfileAlignment) {
    throw Error(ErrorCode::SchemaError,
                "rule may not target profile-alignment dimension '" + r.label + "'");
  }
  if (r.min_score > r.max_score) {
    throw Error(ErrorCode::SchemaError,
                "rule for '" + r.label + "' has min > max");
  }
  if (r.min_score < 0.0 || r.max_score > 1.0) {
    throw Error(ErrorCode::SchemaError,
                "rule for '" + r.label + "' outside [0,1]");
  }
  return r;
}

inline std::vector<ProfileDef> load_profiles(const nlohmann::json& config,
                                             const LabelSet& labels) {
  if (!config.is_object() || !config.contains("profiles")) {
    throw Error(ErrorCode::SchemaError, "profile config needs a 'profiles' array");
  }
  std::vector<ProfileDef> out;
  for (const auto& p : config.at("profiles")) {
    ProfileDef def;
    def.name = p.at("name").get<std::string>();
    if (std::find_if(kProfileNames.begin(), kProfileNames.end(),
                     [&](const char* n) { return def.name == n; }) ==
        kProfileNames.end()) {
      throw Error(ErrorCode::SchemaError, "unknown profile name '" + def.name + "'");
    }
    for (const auto& existing : out) {
      if (existing.name == def.name) {
        throw Error(ErrorCode::SchemaError, "duplicate profile '" + def.name + "'");
      }
    }
    if (p.contains("required_stance") && !p.at("required_stance").is_null()) {
      def.required_stance = parse_rule(p.at("required_stance"), labels);
    }
    for (const auto& r : p.at("flexible_rules")) {
      def.flexible_rules.push_back(parse_rule(r, labels));
    }
    def.min_flexible_to_pass = p.at("min_flexible_to_pass").get<std::size_t>();
    if (def.min_flexible_to_pass < 1 ||
        def.min_flexible_to_pass > def.flexible_rules.size()) {
      throw Error(ErrorCode::SchemaError,
                  "profile '" + def.name + "': min_flexible_to_pass out of range");
    }
    if (p.contains("pooled_clause") && !p.at("pooled_clause").is_null()) {
      const auto& pc = p.at("pooled_clause");
      PooledClause clause;
      for (const auto& lbl : pc.at("pool")) {
        std::string name = lbl.get<std::string>();
        labels.index_of(name);
        clause.pool.push_back(name);
      }
      clause.min_count = pc.at("min_count").get<std::size_t>();
      clause.min_avg = pc.at("min_avg").get<double>();
      if (clause.min_count < 1 || clause.min_count > clause.pool.size()) {
        throw Error(ErrorCode::SchemaError,
                    "profile '" + def.name + "': pooled min_count out of range");
      }
      def.pooled = std::move(clause);
    }
    out.push_back(std::move(def));
  }
  if (out.empty()) throw Error(ErrorCode::SchemaError, "no profiles defined");
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

struct ProfileEvaluation {
  bool matched = false;
  double alignment = 0.0;  // mean per-rule contribution, in [0,1]
};

/// Applies one profile definition to a feature vector. Matching needs the
/// required stance (if any), at least min_flexible_to_pass flexible rules, and
/// the pooled clause (if any). The alignment score is the mean contribution
/// over every rule the profile names: required + flexible + pool members,
/// pool members normalized over [min_avg, 1].
inline ProfileEvaluation evaluate_profile(const FeatureVector47& v,
                                          const ProfileDef& def,
                                          const LabelSet& labels) {
  ProfileEvaluation result;
  double contribution_sum = 0.0;
  std::size_t rule_count = 0;

  bool stance_ok = true;
  if (def.required_stance) {
    double s = v[labels.index_of(def.required_stance->label)];
    stance_ok = s >= def.required_stance->min_score;
    contribution_sum += detail::component_contribution(
        s, def.required_stance->min_score, def.required_stance->max_score);
    ++rule_count;
  }

  std::size_t flexible_passed = 0;
  for (const auto& rule : def.flexible_rules) {
    double s = v[labels.index_of(rule.label)];
    if (s >= rule.min_score) ++flexible_passed;
    contribution_sum += detail::component_contribution(s, rule.min_score, rule.max_score);
    ++rule_count;
  }

  bool pooled_ok = true;
  if (def.pooled) {
    std::vector<double> pool_scores;
    for (const auto& name : def.pooled->pool) {
      double s = v[labels.index_of(name)];
      pool_scores.push_back(s);
      contribution_sum += detail::component_contribution(s, def.pooled->min_avg, 1.0);
      ++rule_count;
    }
    std::sort(pool_scores.begin(), pool_scores.end(), std::greater<double>());
    std::size_t mentioned = 0;
    for (double s : pool_scores)
      if (s > 0.0) ++mentioned;
    if (mentioned < def.pooled->min_count) {
      pooled_ok = false;
    } else {
      double top_sum = 0.0;
      for (std::size_t i = 0; i < def.pooled->min_count; ++i) top_sum += pool_scores[i];
      pooled_ok = top_sum / static_cast<double>(def.pooled->min_count) >= def.pooled->min_avg;
    }
  }

  result.matched = stance_ok && flexible_passed >= def.min_flexible_to_pass && pooled_ok;
  result.alignment = rule_count == 0 ? 0.0 : contribution_sum / static_cast<double>(rule_count);
  return result;
}

// ---------------------------------------------------------------------------
// Centroids and expert alignment
// ---------------------------------------------------------------------------

/// Component-wise mean vector per profile over the vectors assigned to it.
/// memberships[i] lists the profiles vector i contributes to (its rule-level
/// matches). Every profile in profile_order must have support.
inline std::vector<ProfileCentroid> compute_centroids(
    const std::vector<FeatureVector47>& vectors,
    const std::vector<std::set<std::string>>& memberships,
    const std::vector<std::string>& profile_order) {
  if (vectors.size() != memberships.size()) {
    throw Error(ErrorCode::DimMismatch, "vectors and memberships differ in length");
  }
  std::vector<ProfileCentroid> out;
  for (const auto& profile : profile_order) {
    ProfileCentroid c;
    c.profile = profile;
    for (std::size_t i = 0; i < vectors.size(); ++i) {
      if (!memberships[i].count(profile)) continue;
      for (std::size_t d = 0; d < kVectorDim; ++d) c.centroid[d] += vectors[i][d];
      ++c.support_count;
    }
    if (c.support_count == 0) throw Error(ErrorCode::EmptyProfile, profile);
    for (double& x : c.centroid) x /= static_cast<double>(c.support_count);
    out.push_back(std::move(c));
  }
  return out;
}

struct ExpertAlignment {
  std::optional<std::string> assigned;
  std::optional<double> assigned_similarity;
  double best_similarity = 0.0;
};

/// Cosine similarity of a 47-dim vector against each profile centroid;
/// assignment only when the best similarity strictly exceeds 0.7. Ties keep
/// the earliest profile in centroid order.
inline ExpertAlignment expert_alignment(const FeatureVector47& v,
                                        const std::vector<ProfileCentroid>& centroids) {
  if (centroids.empty()) throw Error(ErrorCode::EmptyCollection, "no centroids");
  std::vector<double> vv(v.values().begin(), v.values().end());
  ExpertAlignment result;
  const std::string* best = nullptr;
  double best_sim = 0.0;
  for (const auto& c : centroids) {
    std::vector<double> cv(c.centroid.begin(), c.centroid.end());
    double sim = cosine_similarity(vv, cv);  // throws ZeroVector on all-zero v
    if (best == nullptr || sim > best_sim) {
      best = &c.profile;
      best_sim = sim;
    }
  }
  result.best_similarity = best_sim;
  if (best_sim > kExpertAlignmentThreshold) {
    result.assigned = *best;
    result.assigned_similarity = best_sim;
  }
  return result;
}

/// Percentage of matches carrying an assigned profile.
inline double alignment_rate(const std::vector<ProfileMatch>& matches) {
  if (matches.empty()) throw Error(ErrorCode::EmptyCollection, "no matches");
  std::size_t assigned = 0;
  for (const auto& m : matches)
    if (m.assigned_profile) ++assigned;
  return 100.0 * static_cast<double>(assigned) / static_cast<double>(matches.size());
}

}  // namespace vulca
