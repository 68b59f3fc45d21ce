#include <catch2/catch_amalgamated.hpp>

#include <vulca/io.hpp>
#include <vulca/structured.hpp>

#include "helpers.hpp"

using namespace vulca;

TEST_CASE("canonical split returns prose and object") {
  auto r = parse_structured_response("Fine analysis of the brushwork.\n{\"score\": 3}");
  CHECK(r.commentary_text == "Fine analysis of the brushwork.");
  CHECK(r.evaluation_object == nlohmann::json{{"score", 3}});
}

TEST_CASE("prose without a trailing object") {
  try {
    parse_structured_response("Only prose here.");
    FAIL("expected NoStructuredObject");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoStructuredObject);
  }
}

TEST_CASE("malformed trailing object reports a byte offset") {
  try {
    parse_structured_response("Commentary.\n{\"a\": }");
    FAIL("expected MalformedObject");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MalformedObject);
    CHECK(std::string(e.what()).find("byte") != std::string::npos);
  }
}

TEST_CASE("the full 20-case corpus classifies exactly") {
  std::string corpus = read_file(testutil::fixture_path("structured_cases.jsonl"));
  std::size_t cases = 0;
  for_each_line(corpus, [&](std::size_t, const std::string& line) {
    auto spec = nlohmann::json::parse(line);
    ++cases;
    INFO("case: " << spec.at("name").get<std::string>());
    std::string raw = spec.at("raw").get<std::string>();
    std::string expect = spec.at("expect").get<std::string>();
    if (expect == "ok") {
      auto r = parse_structured_response(raw);
      CHECK(r.commentary_text == spec.at("commentary").get<std::string>());
      CHECK(r.evaluation_object == spec.at("object"));
    } else {
      ErrorCode want = expect == "no_object"       ? ErrorCode::NoStructuredObject
                       : expect == "malformed"     ? ErrorCode::MalformedObject
                                                   : ErrorCode::EmptyCommentary;
      try {
        parse_structured_response(raw);
        FAIL("expected error " << expect);
      } catch (const Error& e) {
        CHECK(e.code() == want);
      }
    }
  });
  CHECK(cases == 20);
}
