#pragma once

#include <atomic>
#include <exception>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "vulca/corpus.hpp"
#include "vulca/errors.hpp"
#include "vulca/features.hpp"
#include "vulca/inference.hpp"
#include "vulca/io.hpp"
#include "vulca/profiles.hpp"
#include "vulca/projection.hpp"
#include "vulca/report.hpp"
#include "vulca/rubric.hpp"
#include "vulca/stats.hpp"

namespace vulca {

struct PipelineConfig {
  InferenceEndpointConfig endpoint;
  TsneConfig tsne;
  int emd_projections = 64;
  std::uint64_t seed = 0;
  int workers = 4;
  bool offline = false;
  bool normalize_per_dimension = false;
  std::size_t cluster_k = 0;            // 0 disables the clustering side-output
  std::set<std::string> formats{"csv"}; // report.json is always written
};

struct StageStatus {
  std::string name;
  bool recomputed = false;
};

struct PipelineResult {
  std::vector<StageStatus> stages;
  nlohmann::json report;
};

namespace detail {

template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
  int threads = std::max(1, std::min<int>(workers, static_cast<int>(n)));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

inline std::vector<LabelScoreMap> scores_from_jsonl(const std::string& content) {
  std::vector<LabelScoreMap> out;
  for_each_line(content, [&](std::size_t line_no, const std::string& line) {
    nlohmann::json row;
    try {
      row = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::SchemaError,
                  "score file line " + std::to_string(line_no) + ": " + e.what());
    }
    LabelScoreMap m;
    m.doc_id = row.at("doc_id").get<std::string>();
    for (auto& [label, v] : row.at("scores").items()) m.set(label, v.get<double>());
    out.push_back(std::move(m));
  });
  return out;
}

inline std::string scores_to_jsonl(const std::vector<LabelScoreMap>& scores) {
  std::string out;
  for (const auto& s : scores) {
    nlohmann::json obj = nlohmann::json::object();
    for (const auto& [label, v] : s.scores) obj[label] = v;
    out += nlohmann::json{{"doc_id", s.doc_id}, {"scores", obj}}.dump();
    out += '\n';
  }
  return out;
}

}  // namespace detail

/// Orchestrates classify -> vectorize -> profile -> stats -> project ->
/// report over a fixed output directory. Stage outputs are persisted and
/// fingerprinted: re-running with unchanged inputs skips every stage.
class Pipeline {
 public:
  Pipeline(Corpus corpus, LabelSet labels,
           std::vector<ProfileDef> profiles, std::string profiles_fingerprint,
           PipelineConfig config, std::filesystem::path out_dir, ScoreCache* cache,
           Transport transport = {})
      : corpus_(std::move(corpus)),
        labels_(std::move(labels)),
        profiles_(std::move(profiles)),
        profiles_fp_(std::move(profiles_fingerprint)),
        config_(std::move(config)),
        out_(std::move(out_dir)),
        cache_(cache),
        client_(config_.endpoint, cache_, std::move(transport)),
        plan_(AssemblyPlan::from(labels_)) {
    std::filesystem::create_directories(out_);
    taxonomy_fp_ = Fnv1a64().field(labels_.to_json().dump()).hex();
    for (const auto& name : plan_.stage3_profiles) {
      if (!find_profile(name)) {
        throw Error(ErrorCode::SchemaError, "profile config lacks '" + name + "'");
      }
    }
  }

  // --- individual stages (each returns true when recomputed) ---------------

  bool stage_classify() {
    std::string fp = Fnv1a64()
                         .field(corpus_.content_hash())
                         .field(taxonomy_fp_)
                         .field(config_.endpoint.zsl_model_id)
                         .field(config_.endpoint.hypothesis_template)
                         .hex();
    if (up_to_date("classify", fp, {"scores.jsonl"})) return false;

    std::vector<std::string> zsl_labels = plan_.stage1_labels;
    zsl_labels.insert(zsl_labels.end(), plan_.stage2_zsl_labels.begin(),
                      plan_.stage2_zsl_labels.end());
    std::vector<LabelScoreMap> scores(corpus_.docs.size());
    detail::parallel_for(corpus_.docs.size(), config_.workers, [&](std::size_t i) {
      const auto& doc = corpus_.docs[i];
      try {
        scores[i] = client_.classify_zero_shot(doc.id, doc.text, zsl_labels,
                                               config_.offline);
      } catch (const Error& e) {
        throw Error(e.code(), "stage classify, doc " + doc.id + ": " + e.what());
      }
    });
    write_file_atomic(out_ / "scores.jsonl", detail::scores_to_jsonl(scores));
    mark_done("classify", fp);
    return true;
  }

  bool stage_vectorize() {
    std::string scores_content = read_artifact("scores.jsonl", "classify");
    std::string fp = Fnv1a64()
                         .field(Fnv1a64().field(scores_content).hex())
                         .field(taxonomy_fp_)
                         .field(profiles_fp_)
                         .field(config_.normalize_per_dimension ? "norm" : "raw")
                         .hex();
    if (up_to_date("vectorize", fp, {"vectors.jsonl"})) return false;

    auto rows = detail::scores_from_jsonl(scores_content);
    std::map<std::string, const LabelScoreMap*> by_doc;
    for (const auto& r : rows) by_doc[r.doc_id] = &r;

    std::vector<FeatureVector47> vectors(corpus_.docs.size());
    detail::parallel_for(corpus_.docs.size(), config_.workers, [&](std::size_t i) {
      const auto& doc = corpus_.docs[i];
      auto it = by_doc.find(doc.id);
      if (it == by_doc.end()) {
        throw Error(ErrorCode::MissingScore,
                    "stage vectorize, doc " + doc.id + ": no classifier scores");
      }
      try {
        vectors[i] = assemble_from_scores(doc, *it->second);
      } catch (const Error& e) {
        throw Error(e.code(), "stage vectorize, doc " + doc.id + ": " + e.what());
      }
    });
    write_file_atomic(out_ / "vectors.jsonl", vectors_to_jsonl(vectors));
    mark_done("vectorize", fp);
    return true;
  }

  bool stage_profile() {
    std::string vectors_content = read_artifact("vectors.jsonl", "vectorize");
    std::string fp = Fnv1a64()
                         .field(Fnv1a64().field(vectors_content).hex())
                         .field(profiles_fp_)
                         .hex();
    if (up_to_date("profile", fp,
                   {"profile_matches.jsonl", "centroids.json", "alignment_rates.json"})) {
      return false;
    }

    auto vectors = align_vectors(vectors_from_jsonl(vectors_content));

    // Rule-level matching for every doc.
    std::vector<std::set<std::string>> memberships(vectors.size());
    std::vector<std::map<std::string, double>> alignment_scores(vectors.size());
    for (std::size_t i = 0; i < vectors.size(); ++i) {
      for (const auto& def : profiles_) {
        auto eval = evaluate_profile(vectors[i], def, labels_);
        if (eval.matched) memberships[i].insert(def.name);
        alignment_scores[i][def.name] = eval.alignment;
      }
    }

    // Centroids come from human ground-truth docs only.
    std::vector<FeatureVector47> human_vectors;
    std::vector<std::set<std::string>> human_memberships;
    for (std::size_t i = 0; i < corpus_.docs.size(); ++i) {
      if (corpus_.docs[i].source_type == SourceType::Human) {
        human_vectors.push_back(vectors[i]);
        human_memberships.push_back(memberships[i]);
      }
    }
    std::vector<std::string> profile_order;
    for (const auto& def : profiles_) profile_order.push_back(def.name);
    std::vector<ProfileCentroid> centroids;
    try {
      centroids = compute_centroids(human_vectors, human_memberships, profile_order);
    } catch (const Error& e) {
      throw Error(e.code(), std::string("stage profile (centroids): ") + e.what());
    }

    // Expert alignment for every doc against the human centroids.
    std::vector<ProfileMatch> matches(vectors.size());
    for (std::size_t i = 0; i < vectors.size(); ++i) {
      ProfileMatch m;
      m.doc_id = corpus_.docs[i].id;
      m.matched = memberships[i];
      m.alignment_scores = alignment_scores[i];
      try {
        auto aligned = expert_alignment(vectors[i], centroids);
        m.assigned_profile = aligned.assigned;
        m.assigned_similarity = aligned.assigned_similarity;
        m.best_similarity = aligned.best_similarity;
      } catch (const Error& e) {
        throw Error(e.code(), "stage profile, doc " + m.doc_id + ": " + e.what());
      }
      matches[i] = std::move(m);
    }

    // Alignment rate per group plus overall.
    std::map<std::string, std::vector<ProfileMatch>> by_group;
    for (std::size_t i = 0; i < matches.size(); ++i) {
      by_group[group_key(corpus_.docs[i])].push_back(matches[i]);
    }
    nlohmann::json rates = nlohmann::json::object();
    for (const auto& [group, ms] : by_group) rates[group] = alignment_rate(ms);
    rates["overall"] = alignment_rate(matches);

    std::string matches_out;
    for (std::size_t i = 0; i < matches.size(); ++i) {
      const auto& m = matches[i];
      nlohmann::json scores = nlohmann::json::object();
      for (const auto& [p, s] : m.alignment_scores) scores[p] = s;
      nlohmann::json row{{"doc_id", m.doc_id},
                         {"group", group_key(corpus_.docs[i])},
                         {"matched_profiles", m.matched},
                         {"alignment_scores", scores},
                         {"best_similarity", m.best_similarity}};
      row["assigned_profile"] =
          m.assigned_profile ? nlohmann::json(*m.assigned_profile) : nlohmann::json();
      row["assigned_similarity"] =
          m.assigned_similarity ? nlohmann::json(*m.assigned_similarity) : nlohmann::json();
      matches_out += row.dump();
      matches_out += '\n';
    }
    nlohmann::json centroids_json = nlohmann::json::object();
    for (const auto& c : centroids) {
      centroids_json[c.profile] = {{"support_count", c.support_count},
                                   {"centroid", c.centroid}};
    }
    write_file_atomic(out_ / "profile_matches.jsonl", matches_out);
    write_file_atomic(out_ / "centroids.json", centroids_json.dump(2) + "\n");
    write_file_atomic(out_ / "alignment_rates.json", rates.dump(2) + "\n");
    mark_done("profile", fp);
    return true;
  }

  bool stage_stats() {
    std::string vectors_content = read_artifact("vectors.jsonl", "vectorize");
    std::string fp = Fnv1a64()
                         .field(Fnv1a64().field(vectors_content).hex())
                         .field(std::to_string(config_.emd_projections))
                         .field(std::to_string(config_.seed))
                         .hex();
    if (up_to_date("stats", fp, {"stats.json", "stats.csv"})) return false;

    auto vectors = align_vectors(vectors_from_jsonl(vectors_content));
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < corpus_.docs.size(); ++i) {
      groups[group_key(corpus_.docs[i])].push_back(i);
    }

    nlohmann::json group_means = nlohmann::json::object();
    std::string csv = "group,dimension,mean\n";
    for (const auto& [group, idxs] : groups) {
      nlohmann::json means = nlohmann::json::object();
      for (std::size_t d = 0; d < labels_.size(); ++d) {
        std::vector<double> column;
        column.reserve(idxs.size());
        for (std::size_t i : idxs) column.push_back(vectors[i][d]);
        double mean = group_quality_mean(column);
        const std::string& name = labels_.at(d).canonical_name;
        means[name] = mean;
        csv += csv_escape(group) + "," + csv_escape(name) + "," + fmt_double(mean) + "\n";
      }
      group_means[group] = std::move(means);
    }

    nlohmann::json radar_groups = nlohmann::json::object();
    nlohmann::json radar_dims = nlohmann::json::array();
    for (const char* dim : kRadarDimensions) radar_dims.push_back(dim);
    for (const auto& [group, means] : group_means.items()) {
      nlohmann::json row = nlohmann::json::array();
      for (const char* dim : kRadarDimensions) row.push_back(means.at(dim));
      radar_groups[group] = std::move(row);
    }

    // Effect sizes and transport distance against the human benchmark group.
    nlohmann::json cohens = nlohmann::json::object();
    nlohmann::json emd = nlohmann::json::object();
    auto human = groups.find(kHumanGroup);
    if (human != groups.end()) {
      std::vector<std::vector<double>> human_set;
      for (std::size_t i : human->second) {
        human_set.emplace_back(vectors[i].values().begin(), vectors[i].values().end());
      }
      for (const auto& [group, idxs] : groups) {
        if (group == kHumanGroup) continue;
        nlohmann::json per_dim = nlohmann::json::object();
        for (const char* dim : kRadarDimensions) {
          std::size_t d = labels_.index_of(dim);
          std::vector<double> a, b;
          for (std::size_t i : idxs) a.push_back(vectors[i][d]);
          for (std::size_t i : human->second) b.push_back(vectors[i][d]);
          try {
            per_dim[dim] = cohens_d(a, b);
          } catch (const Error&) {
            per_dim[dim] = nullptr;  // too few samples or zero pooled variance
          }
        }
        cohens[group] = std::move(per_dim);
        std::vector<std::vector<double>> set;
        for (std::size_t i : idxs) {
          set.emplace_back(vectors[i].values().begin(), vectors[i].values().end());
        }
        emd[group] = sliced_emd(set, human_set, config_.emd_projections, config_.seed);
      }
    }

    nlohmann::json stats{
        {"group_means", group_means},
        {"radar", {{"dimensions", radar_dims}, {"groups", radar_groups}}},
        {"cohens_d_vs_human", cohens},
        {"sliced_emd_vs_human", emd},
        {"emd_config",
         {{"n_projections", config_.emd_projections}, {"seed", config_.seed}}},
    };
    write_file_atomic(out_ / "stats.json", stats.dump(2) + "\n");
    write_file_atomic(out_ / "stats.csv", csv);
    mark_done("stats", fp);
    return true;
  }

  bool stage_project() {
    std::string vectors_content = read_artifact("vectors.jsonl", "vectorize");
    TsneConfig tsne_config = config_.tsne;
    tsne_config.seed = config_.seed;
    std::string fp = Fnv1a64()
                         .field(Fnv1a64().field(vectors_content).hex())
                         .field(std::to_string(tsne_config.perplexity))
                         .field(std::to_string(tsne_config.n_iter))
                         .field(std::to_string(tsne_config.learning_rate))
                         .field(std::to_string(tsne_config.early_exaggeration))
                         .field(std::to_string(tsne_config.seed))
                         .field(std::to_string(config_.cluster_k))
                         .hex();
    std::vector<std::string> outputs{"projection.csv", "projection_meta.json"};
    if (config_.cluster_k > 0) outputs.push_back("clusters.csv");
    if (up_to_date("project", fp, outputs)) return false;

    auto vectors = align_vectors(vectors_from_jsonl(vectors_content));
    std::vector<std::vector<double>> rows;
    std::vector<std::string> ids;
    for (const auto& v : vectors) {
      rows.emplace_back(v.values().begin(), v.values().end());
      ids.push_back(v.doc_id());
    }
    Projection2D proj;
    try {
      proj = tsne(rows, tsne_config, ids);
    } catch (const Error& e) {
      throw Error(e.code(), std::string("stage project: ") + e.what());
    }

    std::vector<CoordRow> coords;
    for (std::size_t i = 0; i < corpus_.docs.size(); ++i) {
      const auto& doc = corpus_.docs[i];
      coords.push_back({doc.model_name, source_type_name(doc.source_type),
                        intervention_name(doc.intervention), proj.coords[i][0],
                        proj.coords[i][1], doc.id});
    }
    std::size_t converged = 0;
    for (bool c : proj.row_converged) converged += c ? 1 : 0;
    nlohmann::json meta{
        {"config",
         {{"perplexity", tsne_config.perplexity},
          {"n_iter", tsne_config.n_iter},
          {"learning_rate", tsne_config.learning_rate},
          {"early_exaggeration", tsne_config.early_exaggeration},
          {"seed", tsne_config.seed},
          {"entropy_tolerance", tsne_config.entropy_tolerance},
          {"max_bisection_steps", tsne_config.max_bisection_steps}}},
        {"final_kl", proj.final_kl},
        {"rows_converged", converged},
        {"rows_total", proj.row_converged.size()},
        {"max_entropy_error_bits", proj.max_entropy_error_bits},
    };
    write_file_atomic(out_ / "projection.csv", coords_to_csv(coords));
    write_file_atomic(out_ / "projection_meta.json", meta.dump(2) + "\n");
    if (config_.cluster_k > 0) {
      auto cluster_labels =
          hierarchical_cluster(rows, Linkage::Average, ClusterDistance::Cosine,
                               config_.cluster_k);
      std::string cluster_csv = "doc_id,cluster\n";
      for (std::size_t i = 0; i < ids.size(); ++i) {
        cluster_csv += csv_escape(ids[i]) + "," + std::to_string(cluster_labels[i]) + "\n";
      }
      write_file_atomic(out_ / "clusters.csv", cluster_csv);
    }
    mark_done("project", fp);
    return true;
  }

  bool stage_report(const std::map<std::string, double>& rubric_composites = {}) {
    std::string vectors_content = read_artifact("vectors.jsonl", "vectorize");
    std::string matches_content = read_artifact("profile_matches.jsonl", "profile");
    std::string centroids_content = read_artifact("centroids.json", "profile");
    std::string rates_content = read_artifact("alignment_rates.json", "profile");
    std::string stats_content = read_artifact("stats.json", "stats");
    std::string proj_content = read_artifact("projection.csv", "project");
    std::string meta_content = read_artifact("projection_meta.json", "project");

    Fnv1a64 h;
    for (const auto* c : {&vectors_content, &matches_content, &centroids_content,
                          &rates_content, &stats_content, &proj_content, &meta_content}) {
      h.field(*c);
    }
    for (const auto& f : config_.formats) h.field(f);
    for (const auto& [g, v] : rubric_composites) {
      h.field(g).field(fmt_double(v));
    }
    std::string fp = h.hex();
    std::vector<std::string> outputs{"report.json"};
    if (config_.formats.count("csv")) {
      outputs.push_back("report.csv");
      outputs.push_back("radar.csv");
    }
    if (config_.formats.count("svg")) {
      outputs.push_back("radar.svg");
      outputs.push_back("scatter.svg");
    }
    if (up_to_date("report", fp, outputs)) return false;

    ReportData data;
    data.corpus = &corpus_;
    data.vectors = align_vectors(vectors_from_jsonl(vectors_content));
    data.statistics = nlohmann::json::parse(stats_content);
    data.projection_meta = nlohmann::json::parse(meta_content);
    data.rubric_composites = rubric_composites;

    nlohmann::json rates = nlohmann::json::parse(rates_content);
    for (const auto& [group, v] : rates.items()) {
      if (group != "overall") data.alignment_rates[group] = v.get<double>();
    }

    std::map<std::string, ProfileMatch> match_by_doc;
    for_each_line(matches_content, [&](std::size_t, const std::string& line) {
      nlohmann::json row = nlohmann::json::parse(line);
      ProfileMatch m;
      m.doc_id = row.at("doc_id").get<std::string>();
      for (const auto& p : row.at("matched_profiles")) m.matched.insert(p.get<std::string>());
      for (const auto& [p, s] : row.at("alignment_scores").items()) {
        m.alignment_scores[p] = s.get<double>();
      }
      m.best_similarity = row.at("best_similarity").get<double>();
      if (!row.at("assigned_profile").is_null()) {
        m.assigned_profile = row.at("assigned_profile").get<std::string>();
        m.assigned_similarity = row.at("assigned_similarity").get<double>();
      }
      match_by_doc[m.doc_id] = std::move(m);
    });
    for (const auto& doc : corpus_.docs) {
      auto it = match_by_doc.find(doc.id);
      if (it == match_by_doc.end()) {
        throw Error(ErrorCode::SchemaError,
                    "stage report: no profile match for doc " + doc.id);
      }
      data.matches.push_back(it->second);
    }

    nlohmann::json centroids_json = nlohmann::json::parse(centroids_content);
    for (const auto& def : profiles_) {
      if (!centroids_json.contains(def.name)) continue;
      ProfileCentroid c;
      c.profile = def.name;
      c.support_count = centroids_json.at(def.name).at("support_count").get<std::size_t>();
      const auto& vals = centroids_json.at(def.name).at("centroid");
      for (std::size_t d = 0; d < kVectorDim; ++d) c.centroid[d] = vals.at(d).get<double>();
      data.centroids.push_back(std::move(c));
    }

    data.coords = coords_from_csv(proj_content);

    nlohmann::json report = build_report(data);
    write_file_atomic(out_ / "report.json", report.dump(2) + "\n");
    if (config_.formats.count("csv")) {
      write_file_atomic(out_ / "report.csv", ranking_to_csv(report));
      write_file_atomic(out_ / "radar.csv", radar_to_csv(report));
    }
    if (config_.formats.count("svg")) {
      write_file_atomic(out_ / "radar.svg", radar_to_svg(report));
      write_file_atomic(out_ / "scatter.svg", scatter_to_svg(report));
    }
    mark_done("report", fp);
    return true;
  }

  PipelineResult run(const std::map<std::string, double>& rubric_composites = {}) {
    PipelineResult result;
    result.stages.push_back({"classify", stage_classify()});
    result.stages.push_back({"vectorize", stage_vectorize()});
    result.stages.push_back({"profile", stage_profile()});
    result.stages.push_back({"stats", stage_stats()});
    result.stages.push_back({"project", stage_project()});
    result.stages.push_back({"report", stage_report(rubric_composites)});
    result.report = nlohmann::json::parse(read_file(out_ / "report.json"));
    return result;
  }

  const std::filesystem::path& out_dir() const { return out_; }
  InferenceClient& client() { return client_; }
  const AssemblyPlan& plan() const { return plan_; }

  /// Stage-2/3 vector assembly for one document from its raw classifier
  /// scores: optional per-dimension normalization, the computed Overall
  /// Coherence slot, then the five profile-alignment scores evaluated on the
  /// partial vector (alignment slots zero, so stage 3 only ever reads stages
  /// 1+2).
  FeatureVector47 assemble_from_scores(const CommentaryDoc& doc,
                                       const LabelScoreMap& raw) const {
    LabelScoreMap scores = raw;
    if (config_.normalize_per_dimension) {
      normalize_scores_per_dimension(scores, labels_);
    }
    LabelScoreMap primary;
    primary.doc_id = doc.id;
    for (const auto& name : plan_.stage1_labels) {
      auto it = scores.scores.find(name);
      if (it == scores.scores.end()) throw Error(ErrorCode::MissingLabel, name);
      primary.scores[name] = it->second;
    }
    std::array<double, kQualityCount> quality{};
    for (std::size_t q = 0; q < kQualityCount; ++q) {
      quality[q] = primary.scores.at(labels_.at(kQualityOffset + q).canonical_name);
    }
    LabelScoreMap supp;
    supp.doc_id = doc.id;
    for (const auto& name : plan_.stage2_zsl_labels) {
      auto it = scores.scores.find(name);
      if (it == scores.scores.end()) throw Error(ErrorCode::MissingLabel, name);
      supp.scores[name] = it->second;
    }
    supp.scores[plan_.stage2_computed_label] = overall_coherence(quality);

    std::array<double, kProfileAlignmentCount> zero_alignment{};
    FeatureVector47 partial = assemble_vector(doc, primary, supp, zero_alignment, labels_);
    std::array<double, kProfileAlignmentCount> alignment{};
    for (std::size_t slot = 0; slot < plan_.stage3_profiles.size(); ++slot) {
      const ProfileDef* def = find_profile(plan_.stage3_profiles[slot]);
      alignment[slot] = evaluate_profile(partial, *def, labels_).alignment;
    }
    return assemble_vector(doc, primary, supp, alignment, labels_);
  }

 private:
  const ProfileDef* find_profile(const std::string& name) const {
    for (const auto& def : profiles_) {
      if (def.name == name) return &def;
    }
    return nullptr;
  }

  // Reorders a vector dump into corpus order; every doc must be present.
  std::vector<FeatureVector47> align_vectors(std::vector<FeatureVector47> loaded) const {
    std::map<std::string, FeatureVector47*> by_id;
    for (auto& v : loaded) by_id[v.doc_id()] = &v;
    std::vector<FeatureVector47> out;
    out.reserve(corpus_.docs.size());
    for (const auto& doc : corpus_.docs) {
      auto it = by_id.find(doc.id);
      if (it == by_id.end()) {
        throw Error(ErrorCode::MissingScore, "no feature vector for doc " + doc.id);
      }
      out.push_back(*it->second);
    }
    return out;
  }

  std::string read_artifact(const std::string& name, const std::string& producer) const {
    std::filesystem::path path = out_ / name;
    if (!std::filesystem::exists(path)) {
      throw Error(ErrorCode::IoError,
                  name + " missing; run the '" + producer + "' stage first");
    }
    return read_file(path);
  }

  nlohmann::json load_state() const {
    std::filesystem::path path = out_ / ".stage_state.json";
    if (!std::filesystem::exists(path)) return nlohmann::json::object();
    try {
      return nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception&) {
      return nlohmann::json::object();
    }
  }

  bool up_to_date(const std::string& stage, const std::string& fingerprint,
                  const std::vector<std::string>& outputs) const {
    nlohmann::json state = load_state();
    if (!state.contains(stage) || state.at(stage).get<std::string>() != fingerprint) {
      return false;
    }
    for (const auto& o : outputs) {
      if (!std::filesystem::exists(out_ / o)) return false;
    }
    return true;
  }

  void mark_done(const std::string& stage, const std::string& fingerprint) {
    nlohmann::json state = load_state();
    state[stage] = fingerprint;
    write_file_atomic(out_ / ".stage_state.json", state.dump(2) + "\n");
  }

  Corpus corpus_;
  LabelSet labels_;
  std::vector<ProfileDef> profiles_;
  std::string profiles_fp_;
  PipelineConfig config_;
  std::filesystem::path out_;
  ScoreCache* cache_;
  InferenceClient client_;
  AssemblyPlan plan_;
  std::string taxonomy_fp_;
};

}  // namespace vulca
