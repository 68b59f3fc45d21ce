// vulca: corpus analytics for art commentary -- ingestion, zero-shot scoring,
// 47-dim feature vectors, expert-profile matching, comparison statistics, 2-D
// projection, and report generation.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <vulca/vulca.hpp>

namespace fs = std::filesystem;
using namespace vulca;

namespace {

struct CliOptions {
  std::string config_path;
  std::string corpus_path;
  std::string cache_dir;
  std::string rules_path;
  std::string taxonomy_path;
  std::string out_dir = "out";
  std::string endpoint_url;
  std::string auth_token;
  std::uint64_t seed = 0;
  bool offline = false;
};

nlohmann::json load_json_file(const std::string& path) {
  try {
    return nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SchemaError, path + ": " + e.what());
  }
}

// Precedence: defaults < config file < environment < CLI flags.
PipelineConfig make_pipeline_config(const CliOptions& cli) {
  PipelineConfig config;
  if (!cli.config_path.empty()) {
    auto j = load_json_file(cli.config_path);
    if (j.contains("endpoint")) {
      const auto& e = j.at("endpoint");
      config.endpoint.base_url = e.value("base_url", config.endpoint.base_url);
      config.endpoint.auth_token = e.value("auth_token", config.endpoint.auth_token);
      config.endpoint.timeout =
          std::chrono::milliseconds(e.value("timeout_ms", 30000));
      config.endpoint.max_in_flight =
          e.value("max_in_flight", config.endpoint.max_in_flight);
      config.endpoint.embedding_dim =
          e.value("embedding_dim", config.endpoint.embedding_dim);
      config.endpoint.hypothesis_template =
          e.value("hypothesis_template", config.endpoint.hypothesis_template);
      if (e.contains("model_ids")) {
        config.endpoint.zsl_model_id =
            e.at("model_ids").value("zsl", config.endpoint.zsl_model_id);
        config.endpoint.embed_model_id =
            e.at("model_ids").value("embed", config.endpoint.embed_model_id);
      }
    }
    if (j.contains("zsl")) {
      config.normalize_per_dimension =
          j.at("zsl").value("normalize_per_dimension", false);
    }
    if (j.contains("tsne")) {
      const auto& t = j.at("tsne");
      config.tsne.perplexity = t.value("perplexity", config.tsne.perplexity);
      config.tsne.n_iter = t.value("n_iter", config.tsne.n_iter);
      config.tsne.learning_rate = t.value("learning_rate", config.tsne.learning_rate);
      config.tsne.early_exaggeration =
          t.value("early_exaggeration", config.tsne.early_exaggeration);
      config.tsne.entropy_tolerance =
          t.value("entropy_tolerance", config.tsne.entropy_tolerance);
      config.tsne.max_bisection_steps =
          t.value("max_bisection_steps", config.tsne.max_bisection_steps);
    }
    if (j.contains("emd")) {
      config.emd_projections = j.at("emd").value("n_projections", config.emd_projections);
    }
    config.workers = j.value("workers", config.workers);
  }
  if (const char* env = std::getenv("VULCA_ENDPOINT")) config.endpoint.base_url = env;
  if (const char* env = std::getenv("VULCA_AUTH_TOKEN")) config.endpoint.auth_token = env;
  if (!cli.endpoint_url.empty()) config.endpoint.base_url = cli.endpoint_url;
  if (!cli.auth_token.empty()) config.endpoint.auth_token = cli.auth_token;
  config.seed = cli.seed;
  config.offline = cli.offline;
  return config;
}

struct Session {
  LabelSet labels;
  std::vector<ProfileDef> profiles;
  std::string profiles_fingerprint;
  Corpus corpus;
  PipelineConfig config;
  fs::path out;
  std::unique_ptr<ScoreCache> cache;
  std::unique_ptr<Pipeline> pipeline;
};

Session open_session(const CliOptions& cli, bool need_corpus = true) {
  Session s{
      .labels = cli.taxonomy_path.empty()
                    ? load_taxonomy(nlohmann::json::parse(kDefaultTaxonomyJson))
                    : load_taxonomy(load_json_file(cli.taxonomy_path)),
      .profiles = {},
      .profiles_fingerprint = "",
      .corpus = {},
      .config = make_pipeline_config(cli),
      .out = cli.out_dir,
      .cache = nullptr,
      .pipeline = nullptr,
  };
  std::string rules_text =
      cli.rules_path.empty() ? std::string(kDefaultProfilesJson) : read_file(cli.rules_path);
  s.profiles = load_profiles(nlohmann::json::parse(rules_text), s.labels);
  s.profiles_fingerprint = Fnv1a64().field(rules_text).hex();
  if (need_corpus) {
    if (cli.corpus_path.empty()) {
      throw Error(ErrorCode::InvalidConfig, "--corpus is required for this subcommand");
    }
    s.corpus = ingest_corpus(read_file(cli.corpus_path));
  }
  fs::path cache_dir = cli.cache_dir.empty() ? s.out / "cache" : fs::path(cli.cache_dir);
  s.cache = std::make_unique<ScoreCache>(cache_dir);
  return s;
}

Pipeline& pipeline_of(Session& s) {
  if (!s.pipeline) {
    s.pipeline = std::make_unique<Pipeline>(s.corpus, s.labels, s.profiles,
                                            s.profiles_fingerprint, s.config, s.out,
                                            s.cache.get());
  }
  return *s.pipeline;
}

void print_stage(const std::string& name, bool recomputed) {
  std::cout << "[stage " << name << "] " << (recomputed ? "recomputed" : "up-to-date")
            << "\n";
}

void ingest_score_files(Session& s, const std::string& scores_path,
                        const std::string& embeddings_path) {
  auto texts = s.corpus.texts_by_id();
  if (!scores_path.empty()) {
    std::size_t n = ingest_precomputed_scores(read_file(scores_path), texts, s.labels,
                                              s.config.endpoint, *s.cache);
    std::cout << "ingested scores for " << n << " documents\n";
  }
  if (!embeddings_path.empty()) {
    std::size_t n = ingest_precomputed_embeddings(read_file(embeddings_path), texts,
                                                  s.config.endpoint, *s.cache);
    std::cout << "ingested embeddings for " << n << " documents\n";
  }
}

std::map<std::string, double> rubric_by_group(Session& s, const std::string& responses_path,
                                              const std::string& key_path) {
  AnnotationKey key = AnnotationKey::from_json(load_json_file(key_path));
  std::map<std::string, std::vector<double>> per_group;
  std::string rubric_rows;
  for_each_line(read_file(responses_path), [&](std::size_t line_no, const std::string& line) {
    nlohmann::json row;
    try {
      row = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::SchemaError,
                  "responses line " + std::to_string(line_no) + ": " + e.what());
    }
    std::string doc_id = row.at("doc_id").get<std::string>();
    auto parsed = parse_structured_response(row.at("raw").get<std::string>());
    RubricScore score = score_structured_template(parsed.evaluation_object, key);
    const auto& doc = s.corpus.by_id(doc_id);
    per_group[group_key(doc)].push_back(score.composite);
    rubric_rows += nlohmann::json{{"doc_id", doc_id},
                                  {"element_recognition", score.element_recognition},
                                  {"cultural_understanding", score.cultural_understanding},
                                  {"language_usage", score.language_usage},
                                  {"composite", score.composite}}
                       .dump();
    rubric_rows += '\n';
  });
  write_file_atomic(s.out / "rubric_scores.jsonl", rubric_rows);
  std::map<std::string, double> composites;
  for (const auto& [group, values] : per_group) {
    composites[group] = group_quality_mean(values);
  }
  return composites;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantitative analysis of art-commentary corpora"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  CliOptions cli;
  app.add_option("--config", cli.config_path, "Pipeline config JSON");
  app.add_option("--corpus", cli.corpus_path, "Corpus JSONL file");
  app.add_option("--cache-dir", cli.cache_dir, "Score cache directory (default <out>/cache)");
  app.add_option("--rules", cli.rules_path, "Profile rule config (default built-in)");
  app.add_option("--taxonomy", cli.taxonomy_path, "Taxonomy config (default built-in)");
  app.add_option("--out", cli.out_dir, "Output directory (default ./out)");
  app.add_option("--seed", cli.seed, "Seed for projection and sliced-EMD randomness");
  app.add_option("--endpoint", cli.endpoint_url, "Inference endpoint URL (http://...)");
  app.add_option("--auth-token", cli.auth_token, "Bearer token for the endpoint");
  app.add_flag("--offline", cli.offline, "Never touch the network; cache misses fail");

  auto* cmd_ingest = app.add_subcommand("ingest", "Validate a corpus and write its manifest");

  std::string scores_file, embeddings_file;
  auto* cmd_classify =
      app.add_subcommand("classify", "Ensure zero-shot scores exist for every document");
  cmd_classify->add_option("--scores", scores_file, "Precomputed score JSONL to ingest first");
  cmd_classify->add_option("--embeddings", embeddings_file,
                           "Precomputed embedding JSONL to ingest first");

  auto* cmd_vectorize =
      app.add_subcommand("vectorize", "Assemble 47-dim feature vectors from scores");
  auto* cmd_profile =
      app.add_subcommand("profile", "Match profiles, build centroids, compute alignment");
  auto* cmd_stats = app.add_subcommand("stats", "Group means, effect sizes, sliced EMD");

  std::size_t cluster_k = 0;
  std::string kde_grid_file;
  auto* cmd_project = app.add_subcommand("project", "t-SNE projection to 2-D coordinates");
  cmd_project->add_option("--clusters", cluster_k,
                          "Also write average-linkage/cosine cluster labels for k clusters");
  cmd_project->add_option("--kde-grid", kde_grid_file,
                          "Also write a Gaussian-KDE density grid CSV over the projection");

  std::vector<std::string> formats;
  std::string responses_file, key_file;
  auto* cmd_report = app.add_subcommand("report", "Render report files from stage outputs");
  cmd_report->add_option("--format", formats, "csv and/or svg (JSON is always written)")
      ->check(CLI::IsMember({"csv", "svg", "json"}));
  cmd_report->add_option("--responses", responses_file,
                         "Structured model responses (JSONL with doc_id + raw)");
  cmd_report->add_option("--key", key_file, "Annotation key JSON for rubric scoring");

  std::string categorical_file, continuous_file;
  int icc_form = 2;
  auto* cmd_iaa = app.add_subcommand("iaa", "Inter-annotator agreement (Fleiss' kappa, ICC)");
  cmd_iaa->add_option("--categorical", categorical_file, "Categorical annotation matrix CSV");
  cmd_iaa->add_option("--continuous", continuous_file, "Continuous annotation matrix CSV");
  cmd_iaa->add_option("--icc-form", icc_form, "ICC form: 1, 2, or 3 (default 2 = ICC(2,1))")
      ->check(CLI::IsMember({1, 2, 3}));

  auto* cmd_run = app.add_subcommand("run", "Full pipeline: classify through report");
  cmd_run->add_option("--scores", scores_file, "Precomputed score JSONL to ingest first");
  cmd_run->add_option("--embeddings", embeddings_file,
                      "Precomputed embedding JSONL to ingest first");
  cmd_run->add_option("--format", formats, "csv and/or svg (JSON is always written)")
      ->check(CLI::IsMember({"csv", "svg", "json"}));
  cmd_run->add_option("--responses", responses_file,
                      "Structured model responses for rubric scoring");
  cmd_run->add_option("--key", key_file, "Annotation key JSON for rubric scoring");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (cmd_iaa->parsed()) {
      std::optional<std::vector<std::vector<std::string>>> cat;
      std::optional<std::vector<std::vector<double>>> cont;
      if (!categorical_file.empty()) {
        cat = load_categorical_matrix(read_file(categorical_file));
      }
      if (!continuous_file.empty()) {
        cont = load_continuous_matrix(read_file(continuous_file));
      }
      IccForm form = icc_form == 1   ? IccForm::Icc1_1
                     : icc_form == 3 ? IccForm::Icc3_1
                                     : IccForm::Icc2_1;
      auto summary = iaa_summary(cat ? &*cat : nullptr, cont ? &*cont : nullptr, form);
      std::cout << summary.dump(2) << "\n";
      return 0;
    }

    Session s = open_session(cli);
    if (cmd_ingest->parsed()) {
      auto manifest = s.corpus.manifest_json();
      write_file_atomic(s.out / "corpus_manifest.json", manifest.dump(2) + "\n");
      std::cout << manifest.dump(2) << "\n";
      return 0;
    }

    if (!scores_file.empty() || !embeddings_file.empty()) {
      ingest_score_files(s, scores_file, embeddings_file);
    }
    if (!formats.empty()) {
      s.config.formats = std::set<std::string>(formats.begin(), formats.end());
      s.config.formats.erase("json");  // implicit
    }
    if (cluster_k > 0) s.config.cluster_k = cluster_k;

    if (cmd_classify->parsed()) {
      print_stage("classify", pipeline_of(s).stage_classify());
    } else if (cmd_vectorize->parsed()) {
      print_stage("vectorize", pipeline_of(s).stage_vectorize());
    } else if (cmd_profile->parsed()) {
      print_stage("profile", pipeline_of(s).stage_profile());
    } else if (cmd_stats->parsed()) {
      print_stage("stats", pipeline_of(s).stage_stats());
    } else if (cmd_project->parsed()) {
      print_stage("project", pipeline_of(s).stage_project());
      if (!kde_grid_file.empty()) {
        auto rows = coords_from_csv(read_file(s.out / "projection.csv"));
        std::vector<std::array<double, 2>> pts;
        for (const auto& r : rows) pts.push_back({r.x, r.y});
        auto kde = Kde2d::with_scott_bandwidth(pts);
        double min_x = pts[0][0], max_x = pts[0][0], min_y = pts[0][1], max_y = pts[0][1];
        for (const auto& p : pts) {
          min_x = std::min(min_x, p[0]);
          max_x = std::max(max_x, p[0]);
          min_y = std::min(min_y, p[1]);
          max_y = std::max(max_y, p[1]);
        }
        double pad_x = 3.0 * kde.bandwidth_x(), pad_y = 3.0 * kde.bandwidth_y();
        const int cells = 60;
        std::string grid = "x,y,density\n";
        for (int ix = 0; ix <= cells; ++ix) {
          for (int iy = 0; iy <= cells; ++iy) {
            double x = min_x - pad_x + (max_x - min_x + 2 * pad_x) * ix / cells;
            double y = min_y - pad_y + (max_y - min_y + 2 * pad_y) * iy / cells;
            grid += fmt_double(x) + "," + fmt_double(y) + "," + fmt_double(kde(x, y)) + "\n";
          }
        }
        write_file_atomic(kde_grid_file, grid);
        std::cout << "kde grid: " << kde_grid_file << "\n";
      }
    } else if (cmd_report->parsed()) {
      std::map<std::string, double> rubric;
      if (!responses_file.empty()) {
        if (key_file.empty()) {
          throw Error(ErrorCode::InvalidConfig, "--responses requires --key");
        }
        rubric = rubric_by_group(s, responses_file, key_file);
      }
      print_stage("report", pipeline_of(s).stage_report(rubric));
    } else if (cmd_run->parsed()) {
      std::map<std::string, double> rubric;
      if (!responses_file.empty()) {
        if (key_file.empty()) {
          throw Error(ErrorCode::InvalidConfig, "--responses requires --key");
        }
        rubric = rubric_by_group(s, responses_file, key_file);
      }
      auto result = pipeline_of(s).run(rubric);
      for (const auto& stage : result.stages) print_stage(stage.name, stage.recomputed);
      std::cout << "report: " << (s.out / "report.json").string() << "\n";
    }
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
