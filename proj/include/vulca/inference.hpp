#pragma once

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <unordered_map>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "vulca/errors.hpp"
#include "vulca/hash.hpp"
#include "vulca/io.hpp"
#include "vulca/taxonomy.hpp"

namespace vulca {

// ---------------------------------------------------------------------------
// Endpoint configuration
// ---------------------------------------------------------------------------

struct InferenceEndpointConfig {
  std::string base_url;             // http://host[:port][/path]
  std::string auth_token;           // optional; sent as a Bearer token
  std::chrono::milliseconds timeout{30000};
  int max_in_flight = 4;
  std::string zsl_model_id = "zero-shot-default";
  std::string embed_model_id = "embed-default";
  std::size_t embedding_dim = 1024;
  std::string hypothesis_template = "This text is about {label}.";

  void validate() const {
    if (max_in_flight < 1) {
      throw Error(ErrorCode::InvalidConfig, "max_in_flight must be >= 1");
    }
    if (timeout.count() <= 0) {
      throw Error(ErrorCode::InvalidConfig, "timeout must be positive");
    }
  }
};

// ---------------------------------------------------------------------------
// Persistent score cache
// ---------------------------------------------------------------------------

// One JSON file per entry, named by content hash; writes are atomic
// (write-then-rename) and re-writes of identical content are skipped so that
// re-ingesting a file leaves the cache byte-identical.
//
// Entries are keyed by hash(text, model_id[, hypothesis template]) and hold a
// per-label score map (or the embedding vector), so corpus edits invalidate
// stale scores while staged classification of label subsets still hits.
class ScoreCache {
 public:
  explicit ScoreCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

  static std::string zsl_key(const std::string& text, const std::string& model_id,
                             const std::string& hypothesis_template) {
    return hash_fields({"zsl", text, model_id, hypothesis_template});
  }

  static std::string embed_key(const std::string& text, const std::string& model_id) {
    return hash_fields({"embed", text, model_id});
  }

  std::map<std::string, double> get_scores(const std::string& key) const {
    std::lock_guard<std::mutex> lock(mutex_);
    auto entry = load_entry("zsl", key);
    std::map<std::string, double> out;
    if (!entry) return out;
    for (auto& [label, v] : entry->at("scores").items()) {
      out[label] = v.get<double>();
    }
    return out;
  }

  // Merges with any existing entry for the same key.
  void put_scores(const std::string& key, const std::string& doc_id,
                  const std::map<std::string, double>& scores) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto entry = load_entry("zsl", key);
    nlohmann::json merged = entry ? entry->at("scores") : nlohmann::json::object();
    bool changed = !entry;
    for (const auto& [label, score] : scores) {
      if (!merged.contains(label) || merged.at(label).get<double>() != score) {
        merged[label] = score;
        changed = true;
      }
    }
    if (!changed) return;
    nlohmann::json out{{"doc_id", doc_id},
                       {"content_hash", key},
                       {"created_at", now_iso8601()},
                       {"scores", merged}};
    store_entry("zsl", key, out);
  }

  std::optional<std::vector<double>> get_embedding(const std::string& key) const {
    std::lock_guard<std::mutex> lock(mutex_);
    auto entry = load_entry("embed", key);
    if (!entry) return std::nullopt;
    return entry->at("vector").get<std::vector<double>>();
  }

  void put_embedding(const std::string& key, const std::string& doc_id,
                     const std::vector<double>& vec) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto entry = load_entry("embed", key);
    if (entry && entry->at("vector").get<std::vector<double>>() == vec) return;
    nlohmann::json out{{"doc_id", doc_id},
                       {"content_hash", key},
                       {"created_at", now_iso8601()},
                       {"vector", vec}};
    store_entry("embed", key, out);
  }

  const std::filesystem::path& dir() const { return dir_; }

 private:
  static std::string now_iso8601() {
    std::time_t t = std::time(nullptr);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
  }

  std::optional<nlohmann::json> load_entry(const char* kind,
                                           const std::string& key) const {
    auto memo = memo_.find(std::string(kind) + "/" + key);
    if (memo != memo_.end()) return memo->second;
    std::filesystem::path path = dir_ / kind / (key + ".json");
    if (!std::filesystem::exists(path)) return std::nullopt;
    nlohmann::json j = nlohmann::json::parse(read_file(path));
    memo_[std::string(kind) + "/" + key] = j;
    return j;
  }

  void store_entry(const char* kind, const std::string& key, const nlohmann::json& j) {
    std::filesystem::path path = dir_ / kind / (key + ".json");
    write_file_atomic(path, j.dump(2) + "\n");
    memo_[std::string(kind) + "/" + key] = j;
  }

  std::filesystem::path dir_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<std::string, nlohmann::json> memo_;
};

// ---------------------------------------------------------------------------
// Endpoint client
// ---------------------------------------------------------------------------

// Wire protocol, one POST shape for both tasks:
//   request  {"task": "zsl"|"embed", "text": ..., "labels": [...]?,
//             "hypothesis_template": ...?, "model_id": ...}
//   response {"scores": {label: float}} | {"vector": [float]}
//
// The transport is injectable so tests can fake the endpoint; the default
// posts to the configured URL. Throws EndpointUnavailable on connect failure.
using Transport = std::function<std::string(const std::string& request_body)>;

class InferenceClient {
 public:
  InferenceClient(InferenceEndpointConfig config, ScoreCache* cache,
                  Transport transport = {})
      : config_(std::move(config)),
        cache_(cache),
        transport_(std::move(transport)),
        slots_(config_.max_in_flight) {
    config_.validate();
    if (!transport_) transport_ = make_http_transport(config_);
  }

  /// Scores text against each requested label. Cached (text, label, model)
  /// triples never touch the network; in offline mode a miss raises CacheMiss
  /// naming the document.
  LabelScoreMap classify_zero_shot(const std::string& doc_id, const std::string& text,
                                   const std::vector<std::string>& labels,
                                   bool offline = false) {
    if (text.empty()) throw Error(ErrorCode::SchemaError, "text must be non-empty");
    if (labels.empty()) throw Error(ErrorCode::SchemaError, "label set must be non-empty");
    const std::string key =
        ScoreCache::zsl_key(text, config_.zsl_model_id, config_.hypothesis_template);
    std::map<std::string, double> cached =
        cache_ ? cache_->get_scores(key) : std::map<std::string, double>{};

    std::vector<std::string> missing;
    for (const auto& label : labels) {
      if (!cached.count(label)) missing.push_back(label);
    }
    if (!missing.empty()) {
      if (offline) {
        throw Error(ErrorCode::CacheMiss,
                    "doc " + doc_id + ": " + std::to_string(missing.size()) +
                        " label(s) not cached (offline mode)");
      }
      nlohmann::json req{{"task", "zsl"},
                         {"text", text},
                         {"labels", missing},
                         {"hypothesis_template", config_.hypothesis_template},
                         {"model_id", config_.zsl_model_id}};
      nlohmann::json resp = round_trip(req);
      if (!resp.contains("scores") || !resp.at("scores").is_object()) {
        throw Error(ErrorCode::MalformedResponse, "missing 'scores' object");
      }
      std::map<std::string, double> fresh;
      for (const auto& label : missing) {
        if (!resp.at("scores").contains(label)) {
          throw Error(ErrorCode::MalformedResponse, "no score for label '" + label + "'");
        }
        double v = resp.at("scores").at(label).get<double>();
        if (!(v >= 0.0 && v <= 1.0)) {
          throw Error(ErrorCode::MalformedResponse,
                      "score for '" + label + "' outside [0,1]");
        }
        fresh[label] = v;
        cached[label] = v;
      }
      if (cache_) cache_->put_scores(key, doc_id, fresh);
    }

    LabelScoreMap out;
    out.doc_id = doc_id;
    for (const auto& label : labels) out.scores[label] = cached.at(label);
    return out;
  }

  /// Embeds text; vectors are cached, so repeat calls are bitwise identical.
  EmbeddingVector embed(const std::string& doc_id, const std::string& text,
                        bool offline = false) {
    if (text.empty()) throw Error(ErrorCode::SchemaError, "text must be non-empty");
    const std::string key = ScoreCache::embed_key(text, config_.embed_model_id);
    if (cache_) {
      if (auto hit = cache_->get_embedding(key)) {
        return EmbeddingVector{doc_id, std::move(*hit)};
      }
    }
    if (offline) {
      throw Error(ErrorCode::CacheMiss, "doc " + doc_id + ": embedding not cached");
    }
    nlohmann::json req{{"task", "embed"}, {"text", text}, {"model_id", config_.embed_model_id}};
    nlohmann::json resp = round_trip(req);
    if (!resp.contains("vector") || !resp.at("vector").is_array()) {
      throw Error(ErrorCode::MalformedResponse, "missing 'vector' array");
    }
    auto vec = resp.at("vector").get<std::vector<double>>();
    if (vec.size() != config_.embedding_dim) {
      throw Error(ErrorCode::DimMismatch,
                  "endpoint returned " + std::to_string(vec.size()) +
                      " values, configured dim is " + std::to_string(config_.embedding_dim));
    }
    if (cache_) cache_->put_embedding(key, doc_id, vec);
    return EmbeddingVector{doc_id, std::move(vec)};
  }

  const InferenceEndpointConfig& config() const { return config_; }

 private:
  nlohmann::json round_trip(const nlohmann::json& request) {
    slots_.acquire();
    std::string body;
    try {
      body = transport_(request.dump());
    } catch (...) {
      slots_.release();
      throw;
    }
    slots_.release();
    try {
      return nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::MalformedResponse, e.what());
    }
  }

  static Transport make_http_transport(const InferenceEndpointConfig& config) {
    // Split http://host[:port][/path]; https would need a TLS build of the
    // HTTP client and is out of scope.
    std::string url = config.base_url;
    if (url.empty()) {
      return [](const std::string&) -> std::string {
        throw Error(ErrorCode::EndpointUnavailable, "no endpoint configured");
      };
    }
    const std::string scheme = "http://";
    if (url.rfind(scheme, 0) != 0) {
      throw Error(ErrorCode::InvalidConfig,
                  "endpoint URL must start with http:// (got '" + url + "')");
    }
    std::string rest = url.substr(scheme.size());
    std::string path = "/infer";
    auto slash = rest.find('/');
    if (slash != std::string::npos) {
      path = rest.substr(slash);
      rest = rest.substr(0, slash);
    }
    std::string host = rest;
    int port = 80;
    auto colon = rest.rfind(':');
    if (colon != std::string::npos) {
      host = rest.substr(0, colon);
      port = std::stoi(rest.substr(colon + 1));
    }
    auto timeout = config.timeout;
    std::string token = config.auth_token;
    return [host, port, path, timeout, token](const std::string& body) -> std::string {
      httplib::Client client(host, port);
      client.set_connection_timeout(timeout);
      client.set_read_timeout(timeout);
      httplib::Headers headers;
      if (!token.empty()) headers.emplace("Authorization", "Bearer " + token);
      auto res = client.Post(path, headers, body, "application/json");
      if (!res) {
        throw Error(ErrorCode::EndpointUnavailable,
                    host + ":" + std::to_string(port) + " (" +
                        httplib::to_string(res.error()) + ")");
      }
      if (res->status != 200) {
        throw Error(ErrorCode::EndpointUnavailable,
                    "endpoint returned HTTP " + std::to_string(res->status));
      }
      return res->body;
    };
  }

  InferenceEndpointConfig config_;
  ScoreCache* cache_;
  Transport transport_;
  std::counting_semaphore<4096> slots_;
};

// ---------------------------------------------------------------------------
// Precomputed-score ingestion (the fully-offline path)
// ---------------------------------------------------------------------------

/// Loads a JSON Lines score file ({"doc_id": ..., "scores": {label: p}}) into
/// the cache. Texts are resolved through doc_texts because entries are keyed
/// by content hash, not doc id. Returns the number of documents ingested.
inline std::size_t ingest_precomputed_scores(
    const std::string& file_content, const std::map<std::string, std::string>& doc_texts,
    const LabelSet& labels, const InferenceEndpointConfig& config, ScoreCache& cache) {
  std::size_t count = 0;
  for_each_line(file_content, [&](std::size_t line_no, const std::string& line) {
    nlohmann::json row;
    try {
      row = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::SchemaError,
                  "score file line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!row.contains("doc_id") || !row.contains("scores")) {
      throw Error(ErrorCode::SchemaError,
                  "score file line " + std::to_string(line_no) +
                      ": need 'doc_id' and 'scores'");
    }
    std::string doc_id = row.at("doc_id").get<std::string>();
    auto text_it = doc_texts.find(doc_id);
    if (text_it == doc_texts.end()) {
      throw Error(ErrorCode::SchemaError,
                  "score file line " + std::to_string(line_no) + ": unknown doc '" +
                      doc_id + "'");
    }
    std::map<std::string, double> scores;
    for (auto& [label, v] : row.at("scores").items()) {
      labels.index_of(label);  // throws UnknownLabel
      double score = v.get<double>();
      if (!(score >= 0.0 && score <= 1.0)) {
        throw Error(ErrorCode::OutOfRangeScore,
                    "doc " + doc_id + " label " + label + ": " + fmt_double(score));
      }
      scores[label] = score;
    }
    cache.put_scores(
        ScoreCache::zsl_key(text_it->second, config.zsl_model_id, config.hypothesis_template),
        doc_id, scores);
    ++count;
  });
  return count;
}

/// Same idea for embeddings: {"doc_id": ..., "vector": [float]}.
inline std::size_t ingest_precomputed_embeddings(
    const std::string& file_content, const std::map<std::string, std::string>& doc_texts,
    const InferenceEndpointConfig& config, ScoreCache& cache) {
  std::size_t count = 0;
  for_each_line(file_content, [&](std::size_t line_no, const std::string& line) {
    nlohmann::json row;
    try {
      row = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::SchemaError,
                  "embedding file line " + std::to_string(line_no) + ": " + e.what());
    }
    std::string doc_id = row.at("doc_id").get<std::string>();
    auto text_it = doc_texts.find(doc_id);
    if (text_it == doc_texts.end()) {
      throw Error(ErrorCode::SchemaError,
                  "embedding file line " + std::to_string(line_no) + ": unknown doc '" +
                      doc_id + "'");
    }
    auto vec = row.at("vector").get<std::vector<double>>();
    if (vec.size() != config.embedding_dim) {
      throw Error(ErrorCode::DimMismatch,
                  "doc " + doc_id + ": vector has " + std::to_string(vec.size()) +
                      " values, configured dim is " + std::to_string(config.embedding_dim));
    }
    cache.put_embedding(ScoreCache::embed_key(text_it->second, config.embed_model_id),
                        doc_id, vec);
    ++count;
  });
  return count;
}

/// Optional post-processing: rescale scores so each primary candidate set
/// (stance / focus / quality) sums to 1. The classifier's per-label
/// entailment probabilities are independent by default; this toggle exists
/// for softmax-normalized setups. Supplementary labels are independent
/// add-ons, not a candidate set, and are left untouched. Applied after cache
/// retrieval so the toggle never invalidates cached raw scores.
inline void normalize_scores_per_dimension(LabelScoreMap& scores, const LabelSet& labels) {
  auto is_candidate_set = [](Dimension d) {
    return d == Dimension::EvaluativeStance || d == Dimension::FeatureFocus ||
           d == Dimension::ArgumentativeQuality;
  };
  std::map<Dimension, double> sums;
  for (const auto& [name, v] : scores.scores) {
    auto idx = labels.find(name);
    if (idx && is_candidate_set(labels.at(*idx).dimension)) {
      sums[labels.at(*idx).dimension] += v;
    }
  }
  for (auto& [name, v] : scores.scores) {
    auto idx = labels.find(name);
    if (!idx || !is_candidate_set(labels.at(*idx).dimension)) continue;
    double total = sums[labels.at(*idx).dimension];
    if (total > 0.0) v /= total;
  }
}

}  // namespace vulca
