#include <catch2/catch_amalgamated.hpp>

#include <vulca/default_assets.hpp>
#include <vulca/io.hpp>
#include <vulca/taxonomy.hpp>

#include "helpers.hpp"

using namespace vulca;

TEST_CASE("default taxonomy has the canonical 47-label layout") {
  const auto& labels = testutil::default_labels();
  REQUIRE(labels.size() == 47);
  CHECK(labels.names_in(Dimension::EvaluativeStance).size() == 10);
  CHECK(labels.names_in(Dimension::FeatureFocus).size() == 17);
  CHECK(labels.names_in(Dimension::ArgumentativeQuality).size() == 11);
  CHECK(labels.names_in(Dimension::ProfileAlignment).size() == 5);
  CHECK(labels.names_in(Dimension::Supplementary).size() == 4);

  // Layout anchors.
  CHECK(labels.at(0).canonical_name == "Historical Research");
  CHECK(labels.index_of("Use of Color") == kFocusOffset);
  CHECK(labels.index_of("Profound Insight") == kQualityOffset);
  CHECK(labels.index_of("Comprehensive Analyst Score") == kProfileAlignmentOffset);
  CHECK(labels.index_of("Overall Coherence Score") == kVectorDim - 1);
  CHECK(labels.primary_names().size() == 38);
}

TEST_CASE("shipped asset file matches the built-in taxonomy") {
  auto from_file = nlohmann::json::parse(read_file(testutil::asset_path("taxonomy.json")));
  auto builtin = nlohmann::json::parse(kDefaultTaxonomyJson);
  CHECK(from_file == builtin);
}

TEST_CASE("taxonomy round-trips with identical indices") {
  const auto& labels = testutil::default_labels();
  LabelSet reloaded = load_taxonomy(labels.to_json());
  REQUIRE(reloaded.size() == labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    CHECK(reloaded.at(i).canonical_name == labels.at(i).canonical_name);
    CHECK(reloaded.at(i).alt_name == labels.at(i).alt_name);
    CHECK(reloaded.at(i).dimension == labels.at(i).dimension);
    CHECK(reloaded.index_of(labels.at(i).canonical_name) == i);
  }
}

TEST_CASE("wrong stance count is rejected with the dimension named") {
  auto config = nlohmann::json::parse(kDefaultTaxonomyJson);
  auto& stances = config["dimensions"]["evaluative_stance"];
  stances.erase(stances.size() - 1);  // 9 stance labels
  try {
    load_taxonomy(config);
    FAIL("expected WrongDimensionCount");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::WrongDimensionCount);
    CHECK(std::string(e.what()).find("evaluative_stance") != std::string::npos);
    CHECK(std::string(e.what()).find("10") != std::string::npos);
  }
}

TEST_CASE("duplicate label is rejected") {
  auto config = nlohmann::json::parse(kDefaultTaxonomyJson);
  // List "Symbolism" twice by overwriting another focus label.
  config["dimensions"]["feature_focus"][0][0] = "Symbolism";
  try {
    load_taxonomy(config);
    FAIL("expected DuplicateLabel");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DuplicateLabel);
    CHECK(std::string(e.what()).find("Symbolism") != std::string::npos);
  }
}

TEST_CASE("presence rule is strictly greater than 0.5") {
  CHECK(is_present(0.51));
  CHECK_FALSE(is_present(0.5));
  CHECK_FALSE(is_present(0.0));
  CHECK(is_present(1.0));
  CHECK_THROWS_AS(is_present(1.3), Error);
  CHECK_THROWS_AS(is_present(-0.1), Error);
}

TEST_CASE("presence rule is monotone") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 2000; ++i) {
    double a = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    double b = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    if (a > b) std::swap(a, b);
    if (is_present(a)) CHECK(is_present(b));
  }
}

TEST_CASE("feature vectors validate range and carry the layout version") {
  std::array<double, kVectorDim> ok{};
  ok[3] = 1.0;
  FeatureVector47 v("d1", ok);
  CHECK(v.layout_version() == std::string(kLayoutVersion));
  CHECK(v[3] == 1.0);

  std::array<double, kVectorDim> bad{};
  bad[10] = 1.5;
  CHECK_THROWS_AS(FeatureVector47("d2", bad), Error);
  bad[10] = -0.1;
  CHECK_THROWS_AS(FeatureVector47("d3", bad), Error);
}

TEST_CASE("human docs must be ground truth") {
  CommentaryDoc doc;
  doc.id = "h1";
  doc.text = "text";
  doc.source_type = SourceType::Human;
  doc.intervention = Intervention::Baseline;
  CHECK_THROWS_AS(doc.validate(), Error);
  doc.intervention = Intervention::GroundTruth;
  CHECK_NOTHROW(doc.validate());
}

TEST_CASE("score maps reject out-of-range values") {
  LabelScoreMap m;
  m.doc_id = "d";
  CHECK_THROWS_AS(m.set("Symbolism", 1.3), Error);
  m.set("Symbolism", 0.4);
  CHECK(m.at("Symbolism") == 0.4);
  CHECK_THROWS_AS(m.at("Use of Color"), Error);
}
