#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "vulca/errors.hpp"
#include "vulca/io.hpp"
#include "vulca/stats.hpp"

namespace vulca {

// Annotation matrix CSV: header "item,<rater>,<rater>,...", one row per item,
// every cell filled. Categorical cells are label strings, continuous cells
// are reals in [0,1].

namespace detail {

inline std::vector<std::vector<std::string>> load_matrix_cells(const std::string& content) {
  std::vector<std::vector<std::string>> rows;
  bool header_seen = false;
  std::size_t raters = 0;
  for_each_line(content, [&](std::size_t line_no, const std::string& line) {
    auto cells = csv_split(line);
    if (!header_seen) {
      header_seen = true;
      if (cells.empty() || cells[0] != "item") {
        throw Error(ErrorCode::SchemaError,
                    "annotation matrix must start with an 'item,<raters...>' header");
      }
      raters = cells.size() - 1;
      if (raters < 2) throw Error(ErrorCode::TooFewSamples, "need >= 2 rater columns");
      return;
    }
    if (cells.size() != raters + 1) {
      throw Error(ErrorCode::SchemaError,
                  "line " + std::to_string(line_no) + ": expected " +
                      std::to_string(raters + 1) + " cells");
    }
    std::vector<std::string> row;
    for (std::size_t c = 1; c < cells.size(); ++c) {
      if (cells[c].empty()) {
        throw Error(ErrorCode::SchemaError,
                    "missing cell: item '" + cells[0] + "', rater column " +
                        std::to_string(c));
      }
      row.push_back(cells[c]);
    }
    rows.push_back(std::move(row));
  });
  if (rows.empty()) throw Error(ErrorCode::EmptyCollection, "no annotation rows");
  return rows;
}

}  // namespace detail

inline std::vector<std::vector<std::string>> load_categorical_matrix(
    const std::string& csv_content) {
  return detail::load_matrix_cells(csv_content);
}

inline std::vector<std::vector<double>> load_continuous_matrix(
    const std::string& csv_content) {
  auto cells = detail::load_matrix_cells(csv_content);
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    std::vector<double> row;
    for (const auto& cell : cells[i]) {
      double v = 0.0;
      try {
        v = std::stod(cell);
      } catch (const std::exception&) {
        throw Error(ErrorCode::SchemaError,
                    "row " + std::to_string(i + 1) + ": '" + cell + "' is not a number");
      }
      if (!(v >= 0.0 && v <= 1.0)) {
        throw Error(ErrorCode::OutOfRangeScore,
                    "row " + std::to_string(i + 1) + ": " + cell + " outside [0,1]");
      }
      row.push_back(v);
    }
    out.push_back(std::move(row));
  }
  return out;
}

/// Agreement summary: overall and per-category Fleiss' kappa for the
/// categorical matrix, ICC (with its form identifier) for the continuous one.
/// Either matrix may be absent.
inline nlohmann::json iaa_summary(
    const std::vector<std::vector<std::string>>* categorical,
    const std::vector<std::vector<double>>* continuous,
    IccForm form = IccForm::Icc2_1) {
  if (!categorical && !continuous) {
    throw Error(ErrorCode::EmptyCollection, "no annotation matrices given");
  }
  nlohmann::json out = nlohmann::json::object();
  if (categorical) {
    out["fleiss_kappa"] = fleiss_kappa(*categorical);
    nlohmann::json per = nlohmann::json::object();
    for (const auto& [cat, k] : fleiss_kappa_per_category(*categorical)) per[cat] = k;
    out["fleiss_kappa_per_category"] = per;
  }
  if (continuous) {
    out["icc"] = {{"form", icc_form_name(form)}, {"value", icc(*continuous, form)}};
  }
  return out;
}

}  // namespace vulca
