#include <catch2/catch_amalgamated.hpp>

#include <vulca/rubric.hpp>

using namespace vulca;

namespace {

AnnotationKey demo_key() {
  return AnnotationKey::from_json(nlohmann::json{
      {"elements_major", {"Pine Tree", "Crane", "Pavilion", "Stream"}},
      {"elements_minor", {"Moss Dots", "Mist", "Seal", "Inscription"}},
      {"symbol_meanings",
       {{"pine", "longevity"},
        {"crane", "immortality"},
        {"lotus", "purity"},
        {"plum blossom", "resilience"},
        {"bamboo", "integrity"},
        {"peony", "prosperity"},
        {"moon", "reunion"},
        {"carp", "perseverance"}}},
      {"terminology", {"qiyun shengdong", "cunfa", "yijing", "gongbi", "xieyi"}}});
}

nlohmann::json response(std::vector<std::string> elements,
                        std::map<std::string, std::string> symbols,
                        std::vector<std::string> terms) {
  nlohmann::json sym = nlohmann::json::object();
  for (const auto& [k, v] : symbols) sym[k] = v;
  return nlohmann::json{{"primary_visual_elements", elements},
                        {"symbolic_content", sym},
                        {"key_terminology", terms}};
}

}  // namespace

TEST_CASE("element recognition bands") {
  auto key = demo_key();
  auto score = [&](std::vector<std::string> elements) {
    return score_structured_template(response(std::move(elements), {{"pine", "longevity"}},
                                              {"yijing"}),
                                     key)
        .element_recognition;
  };
  // Fails to identify any correct element.
  CHECK(score({"Dragon", "Phoenix"}) == 0);
  CHECK(score({}) == 0);
  // 1-2 basic elements.
  CHECK(score({"Pine Tree"}) == 1);
  CHECK(score({"Pine Tree", "Crane"}) == 1);
  // 3-4 elements with minor errors.
  CHECK(score({"Pine Tree", "Crane", "Pavilion", "Dragon"}) == 2);
  CHECK(score({"Pine Tree", "Crane", "Pavilion", "Stream"}) == 2);
  // 5+ elements correctly.
  CHECK(score({"Pine Tree", "Crane", "Pavilion", "Stream", "Moss Dots"}) == 3);
  // All major plus several minor.
  CHECK(score({"Pine Tree", "Crane", "Pavilion", "Stream", "Moss Dots", "Mist", "Seal",
               "Dragon"}) == 4);
  // Complete and error-free.
  CHECK(score({"Pine Tree", "Crane", "Pavilion", "Stream", "Moss Dots", "Mist", "Seal",
               "Inscription"}) == 5);
}

TEST_CASE("element matching is case- and whitespace-insensitive") {
  auto key = demo_key();
  auto s = score_structured_template(
      response({" pine tree ", "CRANE"}, {{"pine", "longevity"}}, {"yijing"}), key);
  CHECK(s.element_recognition == 1);  // 2 correct
}

TEST_CASE("cultural understanding counts correct symbol pairs") {
  auto key = demo_key();
  auto cu = [&](std::map<std::string, std::string> symbols) {
    return score_structured_template(response({"Pine Tree"}, std::move(symbols), {"yijing"}),
                                     key)
        .cultural_understanding;
  };
  CHECK(cu({}) == 0);
  CHECK(cu({{"pine", "war"}}) == 0);  // wrong meaning does not count
  CHECK(cu({{"pine", "longevity"}}) == 1);
  CHECK(cu({{"pine", "longevity"}, {"crane", "immortality"}, {"lotus", "purity"}}) == 3);
  CHECK(cu({{"pine", "longevity"},
            {"crane", "immortality"},
            {"lotus", "purity"},
            {"plum blossom", "resilience"},
            {"bamboo", "integrity"},
            {"peony", "prosperity"},
            {"moon", "reunion"}}) == 7);
}

TEST_CASE("language usage rewards coverage and penalizes wrong terms") {
  auto key = demo_key();
  auto lu = [&](std::vector<std::string> terms) {
    return score_structured_template(
               response({"Pine Tree"}, {{"pine", "longevity"}}, std::move(terms)), key)
        .language_usage;
  };
  CHECK(lu({}) == 0);
  CHECK(lu({"impasto"}) == 0);  // nothing correct
  CHECK(lu({"yijing"}) == 1);
  CHECK(lu({"yijing", "cunfa", "gongbi"}) == 3);
  CHECK(lu({"yijing", "cunfa", "gongbi", "impasto"}) == 2);  // error knocks a band
  CHECK(lu({"qiyun shengdong", "cunfa", "yijing", "gongbi", "xieyi"}) == 5);
  CHECK(lu({"qiyun shengdong", "cunfa", "yijing", "gongbi", "xieyi", "impasto"}) == 3);
}

TEST_CASE("composite is 10 exactly when all subscores are maximal") {
  CHECK(RubricScore::composite_of(5, 7, 5) == 10.0);
  for (int er = 0; er <= 5; ++er) {
    for (int cu = 0; cu <= 7; ++cu) {
      for (int lu = 0; lu <= 5; ++lu) {
        double c = RubricScore::composite_of(er, cu, lu);
        CHECK(c >= 0.0);
        CHECK(c <= 10.0);
        if (er == 5 && cu == 7 && lu == 5) {
          CHECK(c == 10.0);
        } else {
          CHECK(c < 10.0);
        }
      }
    }
  }
}

TEST_CASE("schema violations are rejected") {
  auto key = demo_key();
  CHECK_THROWS_AS(score_structured_template(nlohmann::json::array(), key), Error);
  nlohmann::json missing{{"primary_visual_elements", {"Pine Tree"}},
                         {"key_terminology", {"yijing"}}};
  try {
    score_structured_template(missing, key);
    FAIL("expected SchemaInvalid");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SchemaInvalid);
  }
  nlohmann::json bad_types{{"primary_visual_elements", "not an array"},
                           {"symbolic_content", nlohmann::json::object()},
                           {"key_terminology", {"x"}}};
  CHECK_THROWS_AS(score_structured_template(bad_types, key), Error);
}

TEST_CASE("incomplete annotation keys are rejected") {
  nlohmann::json no_terms{{"elements_major", {"Pine Tree"}},
                          {"elements_minor", nlohmann::json::array()},
                          {"symbol_meanings", {{"pine", "longevity"}}}};
  try {
    AnnotationKey::from_json(no_terms);
    FAIL("expected MissingKey");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingKey);
  }
}
