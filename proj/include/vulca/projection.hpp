#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "vulca/errors.hpp"
#include "vulca/io.hpp"
#include "vulca/rng.hpp"

namespace vulca {

// ---------------------------------------------------------------------------
// t-SNE
// ---------------------------------------------------------------------------

struct TsneConfig {
  double perplexity = 30.0;        // must be > 1 and < number of points
  int n_iter = 1000;
  double learning_rate = 200.0;
  double early_exaggeration = 12.0;  // applied for the first 250 iterations
  std::uint64_t seed = 0;
  double entropy_tolerance = 1e-5;   // in bits, against log2(perplexity)
  int max_bisection_steps = 50;

  void validate(std::size_t n_points) const {
    if (perplexity <= 1.0) throw Error(ErrorCode::InvalidConfig, "perplexity must be > 1");
    if (perplexity >= static_cast<double>(n_points)) {
      throw Error(ErrorCode::InvalidConfig,
                  "perplexity must be < number of points (" +
                      std::to_string(n_points) + ")");
    }
    if (n_iter < 1) throw Error(ErrorCode::InvalidConfig, "n_iter must be >= 1");
    if (max_bisection_steps < 1) {
      throw Error(ErrorCode::InvalidConfig, "max_bisection_steps must be >= 1");
    }
  }
};

// Iteration 250 ends early exaggeration and switches momentum 0.5 -> 0.8.
inline constexpr int kTsneStageSwitchIter = 250;
inline constexpr double kTsneInitialMomentum = 0.5;
inline constexpr double kTsneFinalMomentum = 0.8;
inline constexpr double kTsneInitStddev = 1e-4;

struct PerplexityCalibration {
  std::vector<double> probabilities;  // sums to 1 over the row
  double beta = 1.0;                  // Gaussian precision
  double entropy_bits = 0.0;
  bool converged = false;             // |entropy - log2(perplexity)| <= tol
};

/// Bisects the Gaussian precision of one distance row until the conditional
/// distribution's Shannon entropy (bits) matches log2(perplexity) within
/// tolerance. Input entries are squared distances to the other points.
inline PerplexityCalibration calibrate_perplexity(const std::vector<double>& sq_distances,
                                                  double perplexity,
                                                  double tolerance = 1e-5,
                                                  int max_bisection_steps = 50) {
  if (sq_distances.size() < 2) {
    throw Error(ErrorCode::TooFewPoints, "distance row needs >= 2 entries");
  }
  if (perplexity >= static_cast<double>(sq_distances.size())) {
    throw Error(ErrorCode::InvalidConfig, "perplexity must be < row length");
  }
  for (double d : sq_distances) {
    if (!std::isfinite(d)) throw Error(ErrorCode::NonFiniteDistance, std::to_string(d));
  }
  const double log2_target = std::log2(perplexity);
  const double ln2 = 0.6931471805599453;

  PerplexityCalibration result;
  result.probabilities.resize(sq_distances.size());

  auto entropy_at = [&](double beta) {
    // H = ln(sum) + beta * E[d]  (nats), computed against the row minimum for
    // exponent stability.
    double dmin = *std::min_element(sq_distances.begin(), sq_distances.end());
    double sum = 0.0, weighted = 0.0;
    for (std::size_t j = 0; j < sq_distances.size(); ++j) {
      double w = std::exp(-beta * (sq_distances[j] - dmin));
      result.probabilities[j] = w;
      sum += w;
      weighted += (sq_distances[j] - dmin) * w;
    }
    for (double& p : result.probabilities) p /= sum;
    double h_nats = std::log(sum) + beta * weighted / sum;
    return h_nats / ln2;
  };

  double beta = 1.0;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  double h = entropy_at(beta);
  // Bracket first (entropy decreases in beta), then bisect.
  for (int i = 0; i < 64 && std::abs(h - log2_target) > tolerance; ++i) {
    if (h > log2_target) {
      lo = beta;
      beta = std::isinf(hi) ? beta * 2.0 : (beta + hi) / 2.0;
    } else {
      hi = beta;
      beta = std::isinf(lo) ? beta / 2.0 : (beta + lo) / 2.0;
    }
    h = entropy_at(beta);
    if (!std::isinf(lo) && !std::isinf(hi)) break;
  }
  for (int step = 0; step < max_bisection_steps && std::abs(h - log2_target) > tolerance;
       ++step) {
    if (h > log2_target) lo = beta;
    else hi = beta;
    if (std::isinf(lo) || std::isinf(hi)) {
      beta = std::isinf(hi) ? beta * 2.0 : beta / 2.0;
    } else {
      beta = (lo + hi) / 2.0;
    }
    h = entropy_at(beta);
  }

  result.beta = beta;
  result.entropy_bits = h;
  result.converged = std::abs(h - log2_target) <= tolerance;
  return result;
}

struct Projection2D {
  std::vector<std::string> doc_ids;
  std::vector<std::array<double, 2>> coords;  // rows align with doc_ids
  TsneConfig config_used;
  double final_kl = 0.0;
  std::vector<double> kl_history;             // one entry per iteration, nats
  std::vector<bool> row_converged;            // perplexity calibration per row
  double max_entropy_error_bits = 0.0;
};

/// Exact-gradient t-SNE to 2D. Deterministic for a fixed seed: the only
/// randomness is the seeded Gaussian init and the loop is single-threaded.
inline Projection2D tsne(const std::vector<std::vector<double>>& vectors,
                         const TsneConfig& config,
                         std::vector<std::string> doc_ids = {}) {
  const std::size_t n = vectors.size();
  if (n < 3) throw Error(ErrorCode::TooFewPoints, "t-SNE needs >= 3 points");
  config.validate(n);
  const std::size_t dim = vectors.front().size();
  for (const auto& v : vectors) {
    if (v.size() != dim) throw Error(ErrorCode::DimMismatch, "ragged input");
    for (double x : v) {
      if (!std::isfinite(x)) throw Error(ErrorCode::NonFiniteDistance, "non-finite input");
    }
  }
  if (doc_ids.empty()) {
    for (std::size_t i = 0; i < n; ++i) doc_ids.push_back(std::to_string(i));
  }

  // Squared distance matrix.
  std::vector<double> d2(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (std::size_t d = 0; d < dim; ++d) {
        double diff = vectors[i][d] - vectors[j][d];
        s += diff * diff;
      }
      d2[i * n + j] = s;
      d2[j * n + i] = s;
    }
  }

  Projection2D out;
  out.doc_ids = std::move(doc_ids);
  out.config_used = config;

  // Conditional probabilities row by row, then symmetrize:
  // p_ij = (p_{j|i} + p_{i|j}) / (2N), which sums to 1 over all pairs.
  std::vector<double> p(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row;
    row.reserve(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) row.push_back(d2[i * n + j]);
    }
    auto cal = calibrate_perplexity(row, config.perplexity, config.entropy_tolerance,
                                    config.max_bisection_steps);
    out.row_converged.push_back(cal.converged);
    out.max_entropy_error_bits =
        std::max(out.max_entropy_error_bits,
                 std::abs(cal.entropy_bits - std::log2(config.perplexity)));
    std::size_t k = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) p[i * n + j] = cal.probabilities[k++];
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double sym = (p[i * n + j] + p[j * n + i]) / (2.0 * static_cast<double>(n));
      p[i * n + j] = sym;
      p[j * n + i] = sym;
    }
  }

  // Seeded init: small Gaussian cloud.
  Rng rng(config.seed);
  std::vector<std::array<double, 2>> y(n), velocity(n, {0.0, 0.0}),
      gains(n, {1.0, 1.0}), grad(n);
  for (auto& pt : y) {
    pt[0] = rng.gaussian() * kTsneInitStddev;
    pt[1] = rng.gaussian() * kTsneInitStddev;
  }

  std::vector<double> w(n * n, 0.0);  // (1 + ||yi-yj||^2)^-1
  const double tiny = std::numeric_limits<double>::min();

  for (int iter = 0; iter < config.n_iter; ++iter) {
    const bool exaggerating = iter < kTsneStageSwitchIter;
    const double exag = exaggerating ? config.early_exaggeration : 1.0;
    const double momentum =
        iter < kTsneStageSwitchIter ? kTsneInitialMomentum : kTsneFinalMomentum;

    double sum_w = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        double dx = y[i][0] - y[j][0];
        double dy = y[i][1] - y[j][1];
        double val = 1.0 / (1.0 + dx * dx + dy * dy);
        w[i * n + j] = val;
        w[j * n + i] = val;
        sum_w += 2.0 * val;
      }
    }
    if (sum_w <= 0.0 || !std::isfinite(sum_w)) {
      throw Error(ErrorCode::NumericalOverflow, "degenerate low-dimensional kernel");
    }

    double kl = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      grad[i] = {0.0, 0.0};
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        double pij = p[i * n + j];
        double wij = w[i * n + j];
        double qij = std::max(wij / sum_w, tiny);
        double mult = (exag * pij - qij) * wij;
        grad[i][0] += 4.0 * mult * (y[i][0] - y[j][0]);
        grad[i][1] += 4.0 * mult * (y[i][1] - y[j][1]);
        if (j > i && pij > 0.0) kl += 2.0 * pij * std::log(pij / qij);
      }
    }
    out.kl_history.push_back(kl);

    auto sign3 = [](double x) { return x > 0.0 ? 1 : (x < 0.0 ? -1 : 0); };
    for (std::size_t i = 0; i < n; ++i) {
      for (int d = 0; d < 2; ++d) {
        bool opposite = sign3(grad[i][d]) != sign3(velocity[i][d]);
        gains[i][d] = std::max(0.01, opposite ? gains[i][d] + 0.2 : gains[i][d] * 0.8);
        velocity[i][d] =
            momentum * velocity[i][d] - config.learning_rate * gains[i][d] * grad[i][d];
        y[i][d] += velocity[i][d];
        if (!std::isfinite(y[i][d])) {
          throw Error(ErrorCode::NumericalOverflow,
                      "embedding diverged at iteration " + std::to_string(iter));
        }
      }
    }
    // Keep the embedding centered.
    double mx = 0.0, my = 0.0;
    for (const auto& pt : y) {
      mx += pt[0];
      my += pt[1];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    for (auto& pt : y) {
      pt[0] -= mx;
      pt[1] -= my;
    }
  }

  out.coords = std::move(y);
  out.final_kl = out.kl_history.empty() ? 0.0 : out.kl_history.back();
  return out;
}

// ---------------------------------------------------------------------------
// Kernel density estimation (2D, Gaussian kernel)
// ---------------------------------------------------------------------------

class Kde2d {
 public:
  Kde2d(std::vector<std::array<double, 2>> points, double bandwidth_x, double bandwidth_y)
      : points_(std::move(points)), hx_(bandwidth_x), hy_(bandwidth_y) {
    if (points_.empty()) throw Error(ErrorCode::EmptyCollection, "no points");
    if (hx_ <= 0.0 || hy_ <= 0.0) {
      throw Error(ErrorCode::DegenerateBandwidth,
                  "bandwidth must be positive, got (" + std::to_string(hx_) + ", " +
                      std::to_string(hy_) + ")");
    }
  }

  static Kde2d with_bandwidth(std::vector<std::array<double, 2>> points, double h) {
    return Kde2d(std::move(points), h, h);
  }

  /// Scott's rule for 2D: h_i = sigma_i * n^(-1/6), per axis.
  static Kde2d with_scott_bandwidth(std::vector<std::array<double, 2>> points) {
    if (points.size() < 2) {
      throw Error(ErrorCode::DegenerateBandwidth,
                  "Scott's rule needs >= 2 points; pass an explicit bandwidth");
    }
    double n = static_cast<double>(points.size());
    std::array<double, 2> mean{0.0, 0.0}, var{0.0, 0.0};
    for (const auto& p : points) {
      mean[0] += p[0];
      mean[1] += p[1];
    }
    mean[0] /= n;
    mean[1] /= n;
    for (const auto& p : points) {
      var[0] += (p[0] - mean[0]) * (p[0] - mean[0]);
      var[1] += (p[1] - mean[1]) * (p[1] - mean[1]);
    }
    var[0] /= n - 1.0;
    var[1] /= n - 1.0;
    double factor = std::pow(n, -1.0 / 6.0);
    double hx = std::sqrt(var[0]) * factor;
    double hy = std::sqrt(var[1]) * factor;
    if (hx <= 0.0 || hy <= 0.0) {
      throw Error(ErrorCode::DegenerateBandwidth, "zero variance along an axis");
    }
    return Kde2d(std::move(points), hx, hy);
  }

  double operator()(double x, double y) const {
    double sum = 0.0;
    for (const auto& p : points_) {
      double zx = (x - p[0]) / hx_;
      double zy = (y - p[1]) / hy_;
      sum += std::exp(-0.5 * (zx * zx + zy * zy));
    }
    double norm = 2.0 * 3.141592653589793238462643383279502884 * hx_ * hy_ *
                  static_cast<double>(points_.size());
    return sum / norm;
  }

  double bandwidth_x() const { return hx_; }
  double bandwidth_y() const { return hy_; }
  const std::vector<std::array<double, 2>>& points() const { return points_; }

 private:
  std::vector<std::array<double, 2>> points_;
  double hx_, hy_;
};

// ---------------------------------------------------------------------------
// Agglomerative clustering (average linkage, cosine distance)
// ---------------------------------------------------------------------------

enum class Linkage { Average };
enum class ClusterDistance { Cosine };

/// Merges the closest active pair until k clusters remain. Ties pick the pair
/// with the lexicographically smallest (representative_a, representative_b),
/// representatives being the smallest original point index in each cluster.
/// Output labels are 0..k-1 ordered by each cluster's smallest member.
inline std::vector<int> hierarchical_cluster(const std::vector<std::vector<double>>& vectors,
                                             Linkage /*linkage*/, ClusterDistance /*distance*/,
                                             std::size_t k) {
  const std::size_t n = vectors.size();
  if (n == 0) throw Error(ErrorCode::EmptyCollection, "no vectors");
  if (k < 1 || k > n) {
    throw Error(ErrorCode::InvalidK,
                "k=" + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
  }
  const std::size_t dim = vectors.front().size();
  for (const auto& v : vectors) {
    if (v.size() != dim) throw Error(ErrorCode::DimMismatch, "ragged input");
  }

  std::vector<double> norms(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (double x : vectors[i]) s += x * x;
    if (s == 0.0) {
      throw Error(ErrorCode::ZeroVector,
                  "cosine distance undefined for all-zero vector at index " +
                      std::to_string(i));
    }
    norms[i] = std::sqrt(s);
  }

  // Pairwise cosine distances; average linkage maintained via Lance-Williams.
  std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double dot = 0.0;
      for (std::size_t d = 0; d < dim; ++d) dot += vectors[i][d] * vectors[j][d];
      double cd = 1.0 - dot / (norms[i] * norms[j]);
      dist[i][j] = cd;
      dist[j][i] = cd;
    }
  }

  std::vector<bool> active(n, true);
  std::vector<std::size_t> size(n, 1), rep(n);
  std::vector<std::vector<std::size_t>> members(n);
  for (std::size_t i = 0; i < n; ++i) {
    rep[i] = i;
    members[i] = {i};
  }

  std::size_t clusters = n;
  while (clusters > k) {
    std::size_t best_i = 0, best_j = 0;
    double best_d = std::numeric_limits<double>::infinity();
    bool found = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!active[j]) continue;
        std::size_t ra = std::min(rep[i], rep[j]);
        std::size_t rb = std::max(rep[i], rep[j]);
        bool better = dist[i][j] < best_d;
        if (!better && found && dist[i][j] == best_d) {
          std::size_t cra = std::min(rep[best_i], rep[best_j]);
          std::size_t crb = std::max(rep[best_i], rep[best_j]);
          better = ra < cra || (ra == cra && rb < crb);
        }
        if (better) {
          best_d = dist[i][j];
          best_i = i;
          best_j = j;
          found = true;
        }
      }
    }
    // Merge j into i.
    for (std::size_t c = 0; c < n; ++c) {
      if (!active[c] || c == best_i || c == best_j) continue;
      double merged = (dist[best_i][c] * static_cast<double>(size[best_i]) +
                       dist[best_j][c] * static_cast<double>(size[best_j])) /
                      static_cast<double>(size[best_i] + size[best_j]);
      dist[best_i][c] = merged;
      dist[c][best_i] = merged;
    }
    size[best_i] += size[best_j];
    rep[best_i] = std::min(rep[best_i], rep[best_j]);
    members[best_i].insert(members[best_i].end(), members[best_j].begin(),
                           members[best_j].end());
    active[best_j] = false;
    --clusters;
  }

  // Stable labels: order clusters by smallest member.
  std::vector<std::pair<std::size_t, std::size_t>> order;  // (rep, cluster idx)
  for (std::size_t i = 0; i < n; ++i) {
    if (active[i]) order.emplace_back(rep[i], i);
  }
  std::sort(order.begin(), order.end());
  std::vector<int> labels(n, -1);
  for (std::size_t lbl = 0; lbl < order.size(); ++lbl) {
    for (std::size_t m : members[order[lbl].second]) {
      labels[m] = static_cast<int>(lbl);
    }
  }
  return labels;
}

// ---------------------------------------------------------------------------
// Coordinate files (the 6-column CSV layout shared with external tools)
// ---------------------------------------------------------------------------

struct CoordRow {
  std::string model_name;
  std::string source_type;
  std::string intervention;
  double x = 0.0;
  double y = 0.0;
  std::string file_id;
};

inline std::string coords_to_csv(const std::vector<CoordRow>& rows,
                                 const std::string& x_col = "tsne_x",
                                 const std::string& y_col = "tsne_y") {
  std::string out = "model_name,source_type,intervention," + x_col + "," + y_col + ",file_id\n";
  for (const auto& r : rows) {
    out += csv_escape(r.model_name) + "," + csv_escape(r.source_type) + "," +
           csv_escape(r.intervention) + "," + fmt_double(r.x) + "," + fmt_double(r.y) +
           "," + csv_escape(r.file_id) + "\n";
  }
  return out;
}

/// Reads a coordinate CSV; accepts tsne_x/tsne_y or umap_x/umap_y column
/// names, so externally produced projections can be ingested for side-by-side
/// reports.
inline std::vector<CoordRow> coords_from_csv(const std::string& content) {
  std::vector<CoordRow> rows;
  bool have_header = false;
  std::array<int, 6> col{0, 1, 2, 3, 4, 5};
  for_each_line(content, [&](std::size_t line_no, const std::string& line) {
    auto cells = csv_split(line);
    if (!have_header) {
      have_header = true;
      auto find_col = [&](std::initializer_list<const char*> names) {
        for (std::size_t c = 0; c < cells.size(); ++c) {
          for (const char* want : names) {
            if (cells[c] == want) return static_cast<int>(c);
          }
        }
        return -1;
      };
      col[0] = find_col({"model_name"});
      col[1] = find_col({"source_type"});
      col[2] = find_col({"intervention"});
      col[3] = find_col({"tsne_x", "umap_x", "x"});
      col[4] = find_col({"tsne_y", "umap_y", "y"});
      col[5] = find_col({"file_id"});
      for (int c : col) {
        if (c < 0) {
          throw Error(ErrorCode::SchemaError,
                      "coordinate CSV header missing a required column");
        }
      }
      return;
    }
    if (cells.size() < 6) {
      throw Error(ErrorCode::SchemaError,
                  "coordinate CSV line " + std::to_string(line_no) + ": expected 6 columns");
    }
    CoordRow r;
    r.model_name = cells[static_cast<std::size_t>(col[0])];
    r.source_type = cells[static_cast<std::size_t>(col[1])];
    r.intervention = cells[static_cast<std::size_t>(col[2])];
    try {
      r.x = std::stod(cells[static_cast<std::size_t>(col[3])]);
      r.y = std::stod(cells[static_cast<std::size_t>(col[4])]);
    } catch (const std::exception&) {
      throw Error(ErrorCode::SchemaError,
                  "coordinate CSV line " + std::to_string(line_no) + ": bad number");
    }
    r.file_id = cells[static_cast<std::size_t>(col[5])];
    rows.push_back(std::move(r));
  });
  return rows;
}

}  // namespace vulca
