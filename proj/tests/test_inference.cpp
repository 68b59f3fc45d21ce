#include <catch2/catch_amalgamated.hpp>

#include <atomic>
#include <filesystem>
#include <thread>

#include <vulca/inference.hpp>

#include "helpers.hpp"

using namespace vulca;

namespace {

InferenceEndpointConfig test_config(std::size_t dim = 8) {
  InferenceEndpointConfig cfg;
  cfg.base_url = "";  // transport injected in tests
  cfg.embedding_dim = dim;
  return cfg;
}

// Deterministic fake endpoint with call and concurrency instrumentation.
struct FakeEndpoint {
  std::atomic<int> calls{0};
  std::atomic<int> in_flight{0};
  std::atomic<int> max_in_flight{0};
  std::chrono::milliseconds delay{0};
  std::size_t embed_dim = 8;

  Transport transport() {
    return [this](const std::string& body) {
      calls++;
      int now = ++in_flight;
      int prev = max_in_flight.load();
      while (now > prev && !max_in_flight.compare_exchange_weak(prev, now)) {
      }
      if (delay.count() > 0) std::this_thread::sleep_for(delay);
      auto req = nlohmann::json::parse(body);
      nlohmann::json resp;
      if (req.at("task") == "zsl") {
        nlohmann::json scores = nlohmann::json::object();
        for (const auto& label : req.at("labels")) {
          // Stable pseudo-score from the label + text.
          Fnv1a64 h;
          h.field(req.at("text").get<std::string>()).field(label.get<std::string>());
          scores[label.get<std::string>()] =
              static_cast<double>(h.value() % 1000) / 999.0;
        }
        resp = {{"scores", scores}};
      } else {
        std::vector<double> vec(embed_dim);
        Fnv1a64 h;
        h.field(req.at("text").get<std::string>());
        for (std::size_t i = 0; i < vec.size(); ++i) {
          vec[i] = static_cast<double>((h.value() >> (i % 48)) % 997) / 997.0;
        }
        resp = {{"vector", vec}};
      }
      --in_flight;
      return resp.dump();
    };
  }
};

}  // namespace

TEST_CASE("classification preconditions") {
  FakeEndpoint fake;
  InferenceClient client(test_config(), nullptr, fake.transport());
  CHECK_THROWS_AS(client.classify_zero_shot("d", "", {"Symbolism"}), Error);
  CHECK_THROWS_AS(client.classify_zero_shot("d", "text", {}), Error);
}

TEST_CASE("cache makes repeat classification deterministic with one call") {
  auto dir = testutil::scratch_dir("cache_repeat");
  ScoreCache cache(dir);
  FakeEndpoint fake;
  InferenceClient client(test_config(), &cache, fake.transport());

  auto first = client.classify_zero_shot("d1", "some commentary text", {"Symbolism"});
  auto second = client.classify_zero_shot("d1", "some commentary text", {"Symbolism"});
  CHECK(fake.calls.load() == 1);
  CHECK(first.scores.at("Symbolism") == second.scores.at("Symbolism"));

  // A fresh client over the same cache directory also hits.
  InferenceClient reopened(test_config(), &cache, fake.transport());
  auto third = reopened.classify_zero_shot("d1", "some commentary text", {"Symbolism"});
  CHECK(fake.calls.load() == 1);
  CHECK(third.scores.at("Symbolism") == first.scores.at("Symbolism"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("offline misses raise CacheMiss naming the document") {
  auto dir = testutil::scratch_dir("cache_offline");
  ScoreCache cache(dir);
  FakeEndpoint fake;
  InferenceClient client(test_config(), &cache, fake.transport());
  try {
    client.classify_zero_shot("doc-42", "uncached text", {"Symbolism"}, /*offline=*/true);
    FAIL("expected CacheMiss");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CacheMiss);
    CHECK(std::string(e.what()).find("doc-42") != std::string::npos);
  }
  CHECK(fake.calls.load() == 0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("label subsets hit entries written for larger sets") {
  auto dir = testutil::scratch_dir("cache_subset");
  ScoreCache cache(dir);
  FakeEndpoint fake;
  InferenceClient client(test_config(), &cache, fake.transport());
  client.classify_zero_shot("d", "text", {"Symbolism", "Use of Color", "Genre"});
  auto subset = client.classify_zero_shot("d", "text", {"Use of Color"}, /*offline=*/true);
  CHECK(subset.scores.size() == 1);
  CHECK(fake.calls.load() == 1);
  std::filesystem::remove_all(dir);
}

TEST_CASE("embedding respects the configured dimensionality") {
  auto dir = testutil::scratch_dir("cache_embed");
  ScoreCache cache(dir);

  SECTION("matching dim round-trips and caches") {
    FakeEndpoint fake;
    InferenceClient client(test_config(8), &cache, fake.transport());
    auto a = client.embed("d", "text");
    auto b = client.embed("d", "text");
    CHECK(a.dim() == 8);
    CHECK(a.values == b.values);  // bitwise identical via cache
    CHECK(fake.calls.load() == 1);
  }
  SECTION("the default 1024-dim configuration round-trips") {
    FakeEndpoint fake;
    fake.embed_dim = 1024;
    InferenceEndpointConfig cfg;  // embedding_dim defaults to 1024
    cfg.base_url = "";
    InferenceClient client(cfg, &cache, fake.transport());
    CHECK(client.embed("d", "full-size text").dim() == 1024);
  }
  SECTION("wrong endpoint dim is rejected") {
    FakeEndpoint fake;
    fake.embed_dim = 768;
    InferenceClient client(test_config(1024), &cache, fake.transport());
    try {
      client.embed("d", "other text");
      FAIL("expected DimMismatch");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::DimMismatch);
    }
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("at most max_in_flight requests are outstanding") {
  auto cfg = test_config();
  cfg.max_in_flight = 4;
  FakeEndpoint fake;
  fake.delay = std::chrono::milliseconds(25);
  InferenceClient client(cfg, nullptr, fake.transport());

  std::vector<std::thread> threads;
  for (int t = 0; t < 16; ++t) {
    threads.emplace_back([&client, t] {
      client.classify_zero_shot("d" + std::to_string(t),
                                "text " + std::to_string(t), {"Symbolism"});
    });
  }
  for (auto& th : threads) th.join();
  CHECK(fake.calls.load() == 16);
  CHECK(fake.max_in_flight.load() <= 4);
  CHECK(fake.max_in_flight.load() >= 2);
}

TEST_CASE("precomputed score ingestion") {
  auto dir = testutil::scratch_dir("cache_ingest");
  ScoreCache cache(dir);
  auto cfg = test_config();
  const auto& labels = testutil::default_labels();

  SECTION("count equals the number of document lines") {
    std::map<std::string, std::string> texts;
    std::string file;
    const std::size_t n_docs = 163;
    for (std::size_t i = 0; i < n_docs; ++i) {
      std::string id = "doc" + std::to_string(i);
      texts[id] = "commentary body " + std::to_string(i);
      nlohmann::json scores = nlohmann::json::object();
      for (const auto& name : labels.primary_names()) scores[name] = 0.5;
      file += nlohmann::json{{"doc_id", id}, {"scores", scores}}.dump();
      file += '\n';
    }
    // Oracle: the fixture was built with one line per document.
    std::size_t line_count = static_cast<std::size_t>(
        std::count(file.begin(), file.end(), '\n'));
    REQUIRE(line_count == n_docs);
    CHECK(ingest_precomputed_scores(file, texts, labels, cfg, cache) == n_docs);

    // Covered (doc,label) pairs now hit the cache offline.
    FakeEndpoint fake;
    InferenceClient client(cfg, &cache, fake.transport());
    auto scores = client.classify_zero_shot("doc0", texts["doc0"],
                                            labels.primary_names(), /*offline=*/true);
    CHECK(scores.scores.size() == 38);
    CHECK(fake.calls.load() == 0);
  }
  SECTION("out-of-range score names doc and label") {
    std::map<std::string, std::string> texts{{"d1", "text"}};
    std::string file = R"({"doc_id": "d1", "scores": {"Symbolism": 1.3}})"
                       "\n";
    try {
      ingest_precomputed_scores(file, texts, labels, cfg, cache);
      FAIL("expected OutOfRangeScore");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::OutOfRangeScore);
      CHECK(std::string(e.what()).find("d1") != std::string::npos);
      CHECK(std::string(e.what()).find("Symbolism") != std::string::npos);
    }
  }
  SECTION("unknown label is named") {
    std::map<std::string, std::string> texts{{"d1", "text"}};
    std::string file = R"({"doc_id": "d1", "scores": {"Chiaroscuro": 0.4}})"
                       "\n";
    try {
      ingest_precomputed_scores(file, texts, labels, cfg, cache);
      FAIL("expected UnknownLabel");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::UnknownLabel);
      CHECK(std::string(e.what()).find("Chiaroscuro") != std::string::npos);
    }
  }
  SECTION("empty file ingests zero entries without error") {
    CHECK(ingest_precomputed_scores("", {}, labels, cfg, cache) == 0);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("re-ingesting the same file leaves the cache byte-identical") {
  auto dir = testutil::scratch_dir("cache_idem");
  ScoreCache cache(dir);
  auto cfg = test_config();
  const auto& labels = testutil::default_labels();
  std::map<std::string, std::string> texts{{"d1", "alpha"}, {"d2", "beta"}};
  std::string file =
      R"({"doc_id": "d1", "scores": {"Symbolism": 0.4, "Genre": 0.2}})"
      "\n"
      R"({"doc_id": "d2", "scores": {"Symbolism": 0.9}})"
      "\n";
  CHECK(ingest_precomputed_scores(file, texts, labels, cfg, cache) == 2);

  auto snapshot = [&] {
    std::map<std::string, std::string> files;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
      if (entry.is_regular_file()) {
        files[entry.path().string()] = read_file(entry.path());
      }
    }
    return files;
  };
  auto before = snapshot();
  ScoreCache cache2(dir);  // fresh instance, same directory
  CHECK(ingest_precomputed_scores(file, texts, labels, cfg, cache2) == 2);
  CHECK(snapshot() == before);
  std::filesystem::remove_all(dir);
}

TEST_CASE("per-dimension normalization rescales candidate sets only") {
  const auto& labels = testutil::default_labels();
  LabelScoreMap scores;
  scores.doc_id = "d";
  for (const auto& name : labels.primary_names()) scores.scores[name] = 0.5;
  scores.scores["Stylistic Analysis"] = 0.8;
  normalize_scores_per_dimension(scores, labels);
  double stance_sum = 0.0;
  for (const auto& name : labels.names_in(Dimension::EvaluativeStance)) {
    stance_sum += scores.scores.at(name);
  }
  CHECK(stance_sum == Catch::Approx(1.0).margin(1e-12));
  CHECK(scores.scores.at("Stylistic Analysis") == 0.8);  // untouched
}

TEST_CASE("HTTP transport speaks the wire protocol") {
  httplib::Server server;
  std::atomic<int> hits{0};
  server.Post("/infer", [&](const httplib::Request& req, httplib::Response& res) {
    hits++;
    auto body = nlohmann::json::parse(req.body);
    REQUIRE(body.contains("task"));
    if (body.at("task") == "zsl") {
      REQUIRE(body.at("hypothesis_template") == "This text is about {label}.");
      nlohmann::json scores = nlohmann::json::object();
      for (const auto& label : body.at("labels")) scores[label.get<std::string>()] = 0.75;
      res.set_content(nlohmann::json{{"scores", scores}}.dump(), "application/json");
    } else {
      std::vector<double> vec(4, 0.25);
      res.set_content(nlohmann::json{{"vector", vec}}.dump(), "application/json");
    }
  });
  int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread server_thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  InferenceEndpointConfig cfg;
  cfg.base_url = "http://127.0.0.1:" + std::to_string(port);
  cfg.embedding_dim = 4;
  InferenceClient client(cfg, nullptr);
  auto scores = client.classify_zero_shot("d", "text", {"Symbolism", "Genre"});
  CHECK(scores.scores.at("Symbolism") == 0.75);
  auto emb = client.embed("d", "text");
  CHECK(emb.values == std::vector<double>(4, 0.25));
  CHECK(hits.load() == 2);

  server.stop();
  server_thread.join();

  InferenceEndpointConfig dead = cfg;
  dead.base_url = "http://127.0.0.1:1";  // nothing listens there
  dead.timeout = std::chrono::milliseconds(300);
  InferenceClient dead_client(dead, nullptr);
  try {
    dead_client.classify_zero_shot("d", "text", {"Symbolism"});
    FAIL("expected EndpointUnavailable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EndpointUnavailable);
  }
}

TEST_CASE("only the inference module reaches for the HTTP client") {
  namespace fs = std::filesystem;
  for (const auto& entry : fs::directory_iterator(VULCA_INCLUDE_DIR "/vulca")) {
    if (entry.path().extension() != ".hpp") continue;
    std::string content = read_file(entry.path());
    bool uses_http = content.find("httplib") != std::string::npos;
    if (entry.path().filename() == "inference.hpp") {
      CHECK(uses_http);
    } else {
      INFO(entry.path().filename().string());
      CHECK_FALSE(uses_http);
    }
  }
}

TEST_CASE("malformed endpoint responses are rejected") {
  auto broken = [](const std::string&) -> std::string { return "not json"; };
  InferenceClient client(test_config(), nullptr, broken);
  try {
    client.classify_zero_shot("d", "text", {"Symbolism"});
    FAIL("expected MalformedResponse");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MalformedResponse);
  }

  auto missing_label = [](const std::string&) -> std::string {
    return R"({"scores": {"Other": 0.4}})";
  };
  InferenceClient client2(test_config(), nullptr, missing_label);
  CHECK_THROWS_AS(client2.classify_zero_shot("d", "text", {"Symbolism"}), Error);

  auto out_of_range = [](const std::string&) -> std::string {
    return R"({"scores": {"Symbolism": 1.7}})";
  };
  InferenceClient client3(test_config(), nullptr, out_of_range);
  try {
    client3.classify_zero_shot("d", "text", {"Symbolism"});
    FAIL("expected MalformedResponse");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MalformedResponse);
  }
}
