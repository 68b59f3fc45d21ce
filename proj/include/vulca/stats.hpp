#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "vulca/errors.hpp"
#include "vulca/rng.hpp"

namespace vulca {

// ---------------------------------------------------------------------------
// Group means and centroids
// ---------------------------------------------------------------------------

/// Arithmetic mean of one quality dimension over a document group.
inline double group_quality_mean(const std::vector<double>& scores) {
  if (scores.empty()) throw Error(ErrorCode::EmptyGroup, "no documents in group");
  double sum = 0.0;
  for (double s : scores) sum += s;
  return sum / static_cast<double>(scores.size());
}

inline std::pair<double, double> centroid2d(
    const std::vector<std::pair<double, double>>& points) {
  if (points.empty()) throw Error(ErrorCode::EmptyCollection, "no points");
  double sx = 0.0, sy = 0.0;
  for (const auto& [x, y] : points) {
    sx += x;
    sy += y;
  }
  double n = static_cast<double>(points.size());
  return {sx / n, sy / n};
}

// ---------------------------------------------------------------------------
// Effect size
// ---------------------------------------------------------------------------

/// Standardized mean difference with the pooled standard deviation built from
/// sample (n-1) variances.
inline double cohens_d(const std::vector<double>& group1,
                       const std::vector<double>& group2) {
  std::size_t n1 = group1.size(), n2 = group2.size();
  if (n1 < 2 || n2 < 2) {
    throw Error(ErrorCode::TooFewSamples,
                "need >= 2 samples per group, got " + std::to_string(n1) + " and " +
                    std::to_string(n2));
  }
  auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  auto sample_var = [&](const std::vector<double>& v, double m) {
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
  };
  double m1 = mean(group1), m2 = mean(group2);
  double v1 = sample_var(group1, m1), v2 = sample_var(group2, m2);
  double pooled = ((static_cast<double>(n1) - 1.0) * v1 +
                   (static_cast<double>(n2) - 1.0) * v2) /
                  (static_cast<double>(n1 + n2) - 2.0);
  if (pooled <= 0.0) {
    throw Error(ErrorCode::DegenerateVariance, "pooled standard deviation is zero");
  }
  return (m1 - m2) / std::sqrt(pooled);
}

// ---------------------------------------------------------------------------
// Vector similarity and transport distance
// ---------------------------------------------------------------------------

inline double cosine_similarity(const std::vector<double>& a,
                                const std::vector<double>& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::DimMismatch,
                std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) {
    throw Error(ErrorCode::ZeroVector, "cosine undefined for zero vector");
  }
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

namespace detail {

// Exact 1-D Wasserstein-1 between two empirical distributions (possibly of
// different sizes), via the quantile-function integral: sorted samples define
// piecewise-constant inverse CDFs and the integral is summed over the merged
// quantile breakpoints.
inline double wasserstein1d(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t n = a.size(), m = b.size();
  std::size_t i = 0, j = 0;
  double q = 0.0, total = 0.0;
  while (i < n && j < m) {
    double qa = static_cast<double>(i + 1) / static_cast<double>(n);
    double qb = static_cast<double>(j + 1) / static_cast<double>(m);
    double next = std::min(qa, qb);
    total += (next - q) * std::abs(a[i] - b[j]);
    if (qa <= next) ++i;
    if (qb <= next) ++j;
    q = next;
  }
  return total;
}

}  // namespace detail

/// Sliced Wasserstein-1: mean over seeded random unit projections of the
/// exact 1-D transport cost between the projected samples.
inline double sliced_emd(const std::vector<std::vector<double>>& set_a,
                         const std::vector<std::vector<double>>& set_b,
                         int n_projections, std::uint64_t seed) {
  if (set_a.empty() || set_b.empty()) {
    throw Error(ErrorCode::EmptyDistribution, "both sets must be non-empty");
  }
  if (n_projections < 1) {
    throw Error(ErrorCode::InvalidConfig, "n_projections must be >= 1");
  }
  std::size_t dim = set_a.front().size();
  for (const auto& v : set_a) {
    if (v.size() != dim) throw Error(ErrorCode::DimMismatch, "ragged set A");
  }
  for (const auto& v : set_b) {
    if (v.size() != dim) {
      throw Error(ErrorCode::DimMismatch,
                  std::to_string(v.size()) + " vs " + std::to_string(dim));
    }
  }
  Rng rng(seed);
  double total = 0.0;
  for (int p = 0; p < n_projections; ++p) {
    std::vector<double> dir = rng.unit_vector(dim);
    auto project = [&](const std::vector<std::vector<double>>& set) {
      std::vector<double> out(set.size());
      for (std::size_t k = 0; k < set.size(); ++k) {
        double dot = 0.0;
        for (std::size_t d = 0; d < dim; ++d) dot += dir[d] * set[k][d];
        out[k] = dot;
      }
      return out;
    };
    total += detail::wasserstein1d(project(set_a), project(set_b));
  }
  return total / static_cast<double>(n_projections);
}

// ---------------------------------------------------------------------------
// Inter-annotator agreement
// ---------------------------------------------------------------------------

/// N items x R raters. Exactly one of the two layers is populated, depending
/// on whether the annotations are categorical or continuous.
struct AnnotationMatrix {
  std::vector<std::vector<std::string>> categorical;
  std::vector<std::vector<double>> continuous;
};

namespace detail {

template <typename Cell>
inline void require_rectangular(const std::vector<std::vector<Cell>>& m,
                                std::size_t min_raters) {
  if (m.empty()) throw Error(ErrorCode::EmptyCollection, "no items");
  std::size_t raters = m.front().size();
  if (raters < min_raters) {
    throw Error(ErrorCode::TooFewSamples,
                "need >= " + std::to_string(min_raters) + " raters");
  }
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i].size() != raters) {
      throw Error(ErrorCode::SchemaError,
                  "item " + std::to_string(i) + " has " +
                      std::to_string(m[i].size()) + " ratings, expected " +
                      std::to_string(raters));
    }
  }
}

inline std::vector<std::string> category_roster(
    const std::vector<std::vector<std::string>>& m) {
  std::set<std::string> cats;
  for (const auto& row : m)
    for (const auto& c : row) cats.insert(c);
  return {cats.begin(), cats.end()};
}

}  // namespace detail

/// Fleiss' kappa (1971) for fixed rater count per item.
inline double fleiss_kappa(const std::vector<std::vector<std::string>>& matrix) {
  detail::require_rectangular(matrix, 2);
  auto cats = detail::category_roster(matrix);
  if (cats.size() < 2) {
    throw Error(ErrorCode::DegenerateChance, "fewer than 2 categories in use");
  }
  std::size_t n_items = matrix.size();
  std::size_t m = matrix.front().size();
  std::map<std::string, std::size_t> cat_index;
  for (std::size_t c = 0; c < cats.size(); ++c) cat_index[cats[c]] = c;

  std::vector<double> p_cat(cats.size(), 0.0);
  double p_bar = 0.0;
  for (const auto& row : matrix) {
    std::vector<std::size_t> counts(cats.size(), 0);
    for (const auto& c : row) counts[cat_index[c]]++;
    double sum_sq = 0.0;
    for (std::size_t c = 0; c < cats.size(); ++c) {
      sum_sq += static_cast<double>(counts[c]) * static_cast<double>(counts[c]);
      p_cat[c] += static_cast<double>(counts[c]);
    }
    double md = static_cast<double>(m);
    p_bar += (sum_sq - md) / (md * (md - 1.0));
  }
  p_bar /= static_cast<double>(n_items);
  double p_e = 0.0;
  double total = static_cast<double>(n_items) * static_cast<double>(m);
  for (double& p : p_cat) {
    p /= total;
    p_e += p * p;
  }
  if (p_e >= 1.0) {
    throw Error(ErrorCode::DegenerateChance, "all mass in one category");
  }
  return (p_bar - p_e) / (1.0 - p_e);
}

/// Per-category kappa_j; categories with degenerate marginals are omitted.
inline std::map<std::string, double> fleiss_kappa_per_category(
    const std::vector<std::vector<std::string>>& matrix) {
  detail::require_rectangular(matrix, 2);
  auto cats = detail::category_roster(matrix);
  std::size_t n_items = matrix.size();
  double m = static_cast<double>(matrix.front().size());
  std::map<std::string, double> out;
  for (const auto& cat : cats) {
    double p = 0.0, disagreement = 0.0;
    for (const auto& row : matrix) {
      double n_ij = 0.0;
      for (const auto& c : row) n_ij += (c == cat) ? 1.0 : 0.0;
      p += n_ij;
      disagreement += n_ij * (m - n_ij);
    }
    p /= static_cast<double>(n_items) * m;
    double pq = p * (1.0 - p);
    if (pq <= 0.0) continue;
    double kappa = 1.0 - disagreement / (static_cast<double>(n_items) * m * (m - 1.0) * pq);
    out[cat] = kappa;
  }
  return out;
}

enum class IccForm { Icc1_1, Icc2_1, Icc3_1 };

inline const char* icc_form_name(IccForm f) {
  switch (f) {
    case IccForm::Icc1_1: return "ICC(1,1)";
    case IccForm::Icc2_1: return "ICC(2,1)";
    case IccForm::Icc3_1: return "ICC(3,1)";
  }
  return "?";
}

/// Intraclass correlation from the two-way ANOVA decomposition. The default
/// form is ICC(2,1): two-way random effects, absolute agreement, single
/// measurement.
inline double icc(const std::vector<std::vector<double>>& matrix,
                  IccForm form = IccForm::Icc2_1) {
  detail::require_rectangular(matrix, 2);
  if (matrix.size() < 2) throw Error(ErrorCode::TooFewSamples, "need >= 2 items");
  double n = static_cast<double>(matrix.size());
  double k = static_cast<double>(matrix.front().size());

  double grand = 0.0;
  for (const auto& row : matrix)
    for (double x : row) grand += x;
  grand /= n * k;

  std::vector<double> row_mean(matrix.size(), 0.0);
  std::vector<double> col_mean(matrix.front().size(), 0.0);
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    for (std::size_t j = 0; j < matrix[i].size(); ++j) {
      row_mean[i] += matrix[i][j];
      col_mean[j] += matrix[i][j];
    }
  }
  for (double& r : row_mean) r /= k;
  for (double& c : col_mean) c /= n;

  double ss_total = 0.0;
  for (const auto& row : matrix)
    for (double x : row) ss_total += (x - grand) * (x - grand);
  double ss_rows = 0.0;
  for (double r : row_mean) ss_rows += (r - grand) * (r - grand);
  ss_rows *= k;
  double ss_cols = 0.0;
  for (double c : col_mean) ss_cols += (c - grand) * (c - grand);
  ss_cols *= n;
  double ss_err = ss_total - ss_rows - ss_cols;

  // Catastrophic cancellation in the subtraction can leave tiny (even
  // negative) residues where a variance component is structurally zero; snap
  // those so perfect-agreement matrices give exactly 1.
  double snap = 1e-12 * ss_total;
  if (ss_err < snap) ss_err = 0.0;
  if (ss_cols < snap) ss_cols = 0.0;
  if (ss_rows < snap) ss_rows = 0.0;

  double msr = ss_rows / (n - 1.0);
  double msc = ss_cols / (k - 1.0);
  double mse = ss_err / ((n - 1.0) * (k - 1.0));

  double denom = 0.0, num = 0.0;
  switch (form) {
    case IccForm::Icc2_1:
      num = msr - mse;
      denom = msr + (k - 1.0) * mse + (k / n) * (msc - mse);
      break;
    case IccForm::Icc1_1: {
      double msw = (ss_cols + ss_err) / (n * (k - 1.0));
      num = msr - msw;
      denom = msr + (k - 1.0) * msw;
      break;
    }
    case IccForm::Icc3_1:
      num = msr - mse;
      denom = msr + (k - 1.0) * mse;
      break;
  }
  if (denom == 0.0) {
    throw Error(ErrorCode::DegenerateBetweenTarget,
                "no variance anywhere in the annotation matrix");
  }
  return num / denom;
}

}  // namespace vulca
