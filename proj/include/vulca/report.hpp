#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vulca/corpus.hpp"
#include "vulca/errors.hpp"
#include "vulca/io.hpp"
#include "vulca/profiles.hpp"
#include "vulca/projection.hpp"
#include "vulca/stats.hpp"
#include "vulca/version.hpp"

namespace vulca {

// Radar chart axes: the eight argumentative-quality dimensions reported per
// group.
inline const std::array<const char*, 8> kRadarDimensions = {
    "Profound Insight", "Strong Argumentation", "Detailed Analysis",
    "Clear Logic",      "Objective Viewpoint",  "Classical Citations",
    "Logical Gaps",     "Subjective/Biased View",
};

struct ReportData {
  const Corpus* corpus = nullptr;
  std::vector<FeatureVector47> vectors;          // corpus order
  std::vector<ProfileMatch> matches;             // corpus order
  std::vector<ProfileCentroid> centroids;
  std::map<std::string, double> alignment_rates; // group -> percent
  nlohmann::json statistics;                     // stats stage output
  std::vector<CoordRow> coords;                  // projection rows, corpus order
  nlohmann::json projection_meta;
  std::map<std::string, double> rubric_composites;  // group -> mean composite
};

namespace detail {

// Ranking composite: mean rubric composite when rubric scoring ran, otherwise
// 10 x the group's mean Overall Coherence (both on a 0-10 scale; the fallback
// is this library's own definition, not a reproduction of any published
// composite).
inline double group_composite(const ReportData& data, const std::string& group) {
  auto it = data.rubric_composites.find(group);
  if (it != data.rubric_composites.end()) return it->second;
  const auto& means = data.statistics.at("group_means");
  if (means.contains(group) && means.at(group).contains("Overall Coherence Score")) {
    return 10.0 * means.at(group).at("Overall Coherence Score").get<double>();
  }
  return 0.0;
}

}  // namespace detail

inline nlohmann::json build_ranking(const ReportData& data) {
  struct Row {
    std::string group;
    double composite;
    double alignment;
  };
  std::vector<Row> rows;
  for (const auto& [group, count] : data.corpus->group_counts) {
    (void)count;
    double rate = 0.0;
    auto it = data.alignment_rates.find(group);
    if (it != data.alignment_rates.end()) rate = it->second;
    rows.push_back({group, detail::group_composite(data, group), rate});
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (a.composite != b.composite) return a.composite > b.composite;
    if (a.alignment != b.alignment) return a.alignment > b.alignment;
    return a.group < b.group;
  });
  nlohmann::json out = nlohmann::json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.push_back({{"rank", i + 1},
                   {"configuration", rows[i].group},
                   {"composite", rows[i].composite},
                   {"expert_alignment_pct", rows[i].alignment}});
  }
  return out;
}

// Per-model deltas between the baseline group and the strongest intervened
// group present (persona_kb preferred over persona).
inline nlohmann::json build_radar_deltas(const ReportData& data) {
  const auto& radar = data.statistics.at("radar");
  const auto& groups = radar.at("groups");
  nlohmann::json deltas = nlohmann::json::object();
  std::map<std::string, std::map<std::string, std::string>> by_model;  // model -> intervention -> group
  for (const auto& doc : data.corpus->docs) {
    if (doc.source_type != SourceType::Model) continue;
    by_model[doc.model_name][intervention_name(doc.intervention)] = group_key(doc);
  }
  for (const auto& [model, conditions] : by_model) {
    auto base = conditions.find("baseline");
    if (base == conditions.end()) continue;
    auto intervened = conditions.find("persona_kb");
    if (intervened == conditions.end()) intervened = conditions.find("persona");
    if (intervened == conditions.end()) continue;
    if (!groups.contains(base->second) || !groups.contains(intervened->second)) continue;
    nlohmann::json by_dim = nlohmann::json::object();
    const auto& dims = radar.at("dimensions");
    for (std::size_t i = 0; i < dims.size(); ++i) {
      double b = groups.at(base->second).at(i).get<double>();
      double v = groups.at(intervened->second).at(i).get<double>();
      by_dim[dims.at(i).get<std::string>()] = v - b;
    }
    deltas[model] = {{"baseline", base->second},
                     {"intervened", intervened->second},
                     {"by_dimension", by_dim}};
  }
  return deltas;
}

inline nlohmann::json build_report(const ReportData& data) {
  nlohmann::json matches = nlohmann::json::array();
  for (std::size_t i = 0; i < data.corpus->docs.size(); ++i) {
    const auto& doc = data.corpus->docs[i];
    const auto& m = data.matches.at(i);
    nlohmann::json scores = nlohmann::json::object();
    for (const auto& [profile, score] : m.alignment_scores) scores[profile] = score;
    nlohmann::json row{{"doc_id", doc.id},
                       {"group", group_key(doc)},
                       {"matched_profiles", m.matched},
                       {"alignment_scores", scores},
                       {"best_similarity", m.best_similarity}};
    if (m.assigned_profile) {
      row["assigned_profile"] = *m.assigned_profile;
      row["assigned_similarity"] = *m.assigned_similarity;
    } else {
      row["assigned_profile"] = nullptr;
      row["assigned_similarity"] = nullptr;
    }
    matches.push_back(std::move(row));
  }

  nlohmann::json centroids = nlohmann::json::object();
  for (const auto& c : data.centroids) {
    centroids[c.profile] = {{"support_count", c.support_count}, {"centroid", c.centroid}};
  }

  nlohmann::json coords = nlohmann::json::array();
  std::map<std::string, std::vector<std::pair<double, double>>> group_points;
  for (std::size_t i = 0; i < data.coords.size(); ++i) {
    const auto& r = data.coords[i];
    std::string group = data.corpus->docs.at(i).source_type == SourceType::Human
                            ? kHumanGroup
                            : r.model_name + "/" + r.intervention;
    coords.push_back({{"doc_id", r.file_id},
                      {"group", group},
                      {"x", r.x},
                      {"y", r.y}});
    group_points[group].emplace_back(r.x, r.y);
  }
  nlohmann::json centroids2d = nlohmann::json::object();
  for (const auto& [group, pts] : group_points) {
    auto [cx, cy] = centroid2d(pts);
    centroids2d[group] = nlohmann::json::array({cx, cy});
  }

  nlohmann::json radar = data.statistics.contains("radar") ? data.statistics.at("radar")
                                                           : nlohmann::json::object();
  radar["deltas"] = build_radar_deltas(data);

  nlohmann::json report{
      {"schema_version", kReportSchemaVersion},
      {"layout_version", kLayoutVersion},
      {"manifest", data.corpus->manifest_json()},
      {"radar", radar},
      {"profile_matches", matches},
      {"profile_centroids", centroids},
      {"alignment_rates", data.alignment_rates},
      {"ranking", build_ranking(data)},
      {"statistics", data.statistics},
      {"projection",
       {{"coords", coords}, {"group_centroids", centroids2d}, {"meta", data.projection_meta}}},
  };
  if (!data.rubric_composites.empty()) {
    report["rubric_composites"] = data.rubric_composites;
  }
  return report;
}

// ---------------------------------------------------------------------------
// CSV renderers
// ---------------------------------------------------------------------------

inline std::string ranking_to_csv(const nlohmann::json& report) {
  std::string out = "rank,configuration,composite,expert_alignment_pct\n";
  for (const auto& row : report.at("ranking")) {
    out += std::to_string(row.at("rank").get<std::size_t>()) + "," +
           csv_escape(row.at("configuration").get<std::string>()) + "," +
           fmt_double(row.at("composite").get<double>()) + "," +
           fmt_double(row.at("expert_alignment_pct").get<double>()) + "\n";
  }
  return out;
}

inline std::string radar_to_csv(const nlohmann::json& report) {
  const auto& radar = report.at("radar");
  std::string out = "group";
  for (const auto& d : radar.at("dimensions")) {
    out += "," + csv_escape(d.get<std::string>());
  }
  out += "\n";
  for (const auto& [group, values] : radar.at("groups").items()) {
    out += csv_escape(group);
    for (const auto& v : values) out += "," + fmt_double(v.get<double>());
    out += "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// SVG renderers
// ---------------------------------------------------------------------------

namespace detail {

inline const std::array<const char*, 10> kPalette = {
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
};

inline std::string svg_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace detail

/// Radar chart over the report's radar section; one polygon per group.
inline std::string radar_to_svg(const nlohmann::json& report) {
  const auto& radar = report.at("radar");
  const auto& dims = radar.at("dimensions");
  const std::size_t n_axes = dims.size();
  const double cx = 320, cy = 270, radius = 190;
  const double pi = 3.141592653589793238462643383279502884;

  std::string svg =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"560\" "
      "viewBox=\"0 0 640 560\">\n<rect width=\"640\" height=\"560\" fill=\"white\"/>\n";
  auto point_at = [&](std::size_t axis, double value) {
    double angle = -pi / 2.0 + 2.0 * pi * static_cast<double>(axis) / static_cast<double>(n_axes);
    return std::pair<double, double>{cx + radius * value * std::cos(angle),
                                     cy + radius * value * std::sin(angle)};
  };
  for (double ring : {0.25, 0.5, 0.75, 1.0}) {
    svg += "<polygon points=\"";
    for (std::size_t a = 0; a < n_axes; ++a) {
      auto [x, y] = point_at(a, ring);
      svg += fmt_double(x) + "," + fmt_double(y) + " ";
    }
    svg += "\" fill=\"none\" stroke=\"#cccccc\" stroke-width=\"1\"/>\n";
  }
  for (std::size_t a = 0; a < n_axes; ++a) {
    auto [x, y] = point_at(a, 1.0);
    svg += "<line x1=\"" + fmt_double(cx) + "\" y1=\"" + fmt_double(cy) + "\" x2=\"" +
           fmt_double(x) + "\" y2=\"" + fmt_double(y) +
           "\" stroke=\"#cccccc\" stroke-width=\"1\"/>\n";
    auto [lx, ly] = point_at(a, 1.12);
    svg += "<text x=\"" + fmt_double(lx) + "\" y=\"" + fmt_double(ly) +
           "\" font-size=\"11\" text-anchor=\"middle\" font-family=\"sans-serif\">" +
           detail::svg_escape(dims.at(a).get<std::string>()) + "</text>\n";
  }
  std::size_t color = 0;
  double legend_y = 24;
  for (const auto& [group, values] : radar.at("groups").items()) {
    const char* stroke = detail::kPalette[color % detail::kPalette.size()];
    svg += "<polygon points=\"";
    for (std::size_t a = 0; a < n_axes; ++a) {
      auto [x, y] = point_at(a, values.at(a).get<double>());
      svg += fmt_double(x) + "," + fmt_double(y) + " ";
    }
    svg += std::string("\" fill=\"") + stroke + "\" fill-opacity=\"0.12\" stroke=\"" +
           stroke + "\" stroke-width=\"2\"/>\n";
    svg += std::string("<rect x=\"8\" y=\"") + fmt_double(legend_y - 10) +
           "\" width=\"12\" height=\"12\" fill=\"" + stroke + "\"/>\n";
    svg += "<text x=\"26\" y=\"" + fmt_double(legend_y) +
           "\" font-size=\"11\" font-family=\"sans-serif\">" + detail::svg_escape(group) +
           "</text>\n";
    legend_y += 16;
    ++color;
  }
  svg += "</svg>\n";
  return svg;
}

/// Scatter of projection coordinates, group-colored, with group centroids.
inline std::string scatter_to_svg(const nlohmann::json& report) {
  const auto& proj = report.at("projection");
  const auto& coords = proj.at("coords");
  double min_x = 0, max_x = 1, min_y = 0, max_y = 1;
  bool first = true;
  for (const auto& c : coords) {
    double x = c.at("x").get<double>(), y = c.at("y").get<double>();
    if (first) {
      min_x = max_x = x;
      min_y = max_y = y;
      first = false;
    }
    min_x = std::min(min_x, x);
    max_x = std::max(max_x, x);
    min_y = std::min(min_y, y);
    max_y = std::max(max_y, y);
  }
  double span_x = max_x - min_x, span_y = max_y - min_y;
  if (span_x <= 0) span_x = 1;
  if (span_y <= 0) span_y = 1;
  const double w = 640, h = 520, margin = 50;
  auto sx = [&](double x) { return margin + (x - min_x) / span_x * (w - 2 * margin); };
  auto sy = [&](double y) { return h - margin - (y - min_y) / span_y * (h - 2 * margin); };

  std::map<std::string, std::size_t> group_color;
  for (const auto& c : coords) {
    std::string g = c.at("group").get<std::string>();
    if (!group_color.count(g)) {
      std::size_t idx = group_color.size();
      group_color[g] = idx;
    }
  }

  std::string svg =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"520\" "
      "viewBox=\"0 0 640 520\">\n<rect width=\"640\" height=\"520\" fill=\"white\"/>\n";
  for (const auto& c : coords) {
    const char* fill =
        detail::kPalette[group_color[c.at("group").get<std::string>()] % detail::kPalette.size()];
    svg += std::string("<circle cx=\"") + fmt_double(sx(c.at("x").get<double>())) +
           "\" cy=\"" + fmt_double(sy(c.at("y").get<double>())) + "\" r=\"4\" fill=\"" +
           fill + "\" fill-opacity=\"0.75\"/>\n";
  }
  if (proj.contains("group_centroids")) {
    for (const auto& [group, xy] : proj.at("group_centroids").items()) {
      const char* stroke = detail::kPalette[group_color[group] % detail::kPalette.size()];
      double x = sx(xy.at(0).get<double>()), y = sy(xy.at(1).get<double>());
      svg += std::string("<path d=\"M") + fmt_double(x - 7) + " " + fmt_double(y - 7) +
             " L" + fmt_double(x + 7) + " " + fmt_double(y + 7) + " M" + fmt_double(x - 7) +
             " " + fmt_double(y + 7) + " L" + fmt_double(x + 7) + " " + fmt_double(y - 7) +
             "\" stroke=\"" + stroke + "\" stroke-width=\"3\"/>\n";
    }
  }
  double legend_y = 24;
  for (const auto& [group, idx] : group_color) {
    const char* fill = detail::kPalette[idx % detail::kPalette.size()];
    svg += std::string("<rect x=\"8\" y=\"") + fmt_double(legend_y - 10) +
           "\" width=\"12\" height=\"12\" fill=\"" + fill + "\"/>\n";
    svg += "<text x=\"26\" y=\"" + fmt_double(legend_y) +
           "\" font-size=\"11\" font-family=\"sans-serif\">" + detail::svg_escape(group) +
           "</text>\n";
    legend_y += 16;
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace vulca
