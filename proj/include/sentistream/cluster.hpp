#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "sentistream/error.hpp"
#include "sentistream/featurize.hpp"
#include "sentistream/io.hpp"
#include "sentistream/rng.hpp"

namespace sentistream {

enum class ClusterAlgorithm { KMeans, MiniBatch };

inline const char* to_string(ClusterAlgorithm algorithm) {
  return algorithm == ClusterAlgorithm::KMeans ? "kmeans" : "minibatch";
}

inline ClusterAlgorithm cluster_algorithm_from_string(const std::string& text) {
  if (text == "kmeans") return ClusterAlgorithm::KMeans;
  if (text == "minibatch") return ClusterAlgorithm::MiniBatch;
  fail(ErrorCode::InvalidArgument, "unknown algorithm '" + text + "'");
}

struct ClusterModel {
  int k = 0;
  std::vector<std::vector<double>> centroids;
  std::map<std::string, int> assignments;  // post_id -> cluster index
  ClusterAlgorithm algorithm = ClusterAlgorithm::KMeans;
  std::uint64_t seed = 0;
  double inertia = 0.0;
  // Inertia after every assignment pass, in order. Lloyd never lets this
  // grow; kept out of the model file.
  std::vector<double> inertia_history;
  std::int64_t bin_width_s = 1500;
  Channel channel = Channel::Positive;
};

namespace detail {

inline double dist2(const std::vector<double>& a, const std::vector<double>& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

inline std::size_t nearest_centroid(const std::vector<double>& point,
                                    const std::vector<std::vector<double>>& centroids) {
  std::size_t best = 0;
  double best_d2 = dist2(point, centroids[0]);
  for (std::size_t c = 1; c < centroids.size(); ++c) {
    const double d2 = dist2(point, centroids[c]);
    if (d2 < best_d2) {
      best_d2 = d2;
      best = c;
    }
  }
  return best;
}

// Shared input validation for both fitters: uniform dimension, unique ids,
// and enough distinct points to host k centroids.
inline std::vector<std::vector<double>> validate_points(const std::vector<FeatureVector>& vectors,
                                                        int k) {
  if (k < 1) fail(ErrorCode::InvalidArgument, "k must be >= 1");
  if (vectors.empty()) fail(ErrorCode::TooFewPoints, "no vectors to cluster");
  const std::size_t dim = vectors.front().values.size();
  std::set<std::string> ids;
  std::vector<std::vector<double>> points;
  points.reserve(vectors.size());
  for (const FeatureVector& fv : vectors) {
    if (fv.values.size() != dim) {
      fail(ErrorCode::DimensionMismatch, "vector for '" + fv.post_id + "' has " +
                                             std::to_string(fv.values.size()) +
                                             " components, expected " + std::to_string(dim));
    }
    if (!ids.insert(fv.post_id).second) {
      fail(ErrorCode::InvalidArgument, "duplicate post id '" + fv.post_id + "'");
    }
    points.push_back(fv.values);
  }
  std::set<std::vector<double>> distinct(points.begin(), points.end());
  if (distinct.size() < static_cast<std::size_t>(k)) {
    if (distinct.size() == 1 && k > 1) {
      fail(ErrorCode::DegenerateInput, "all points identical, cannot form " + std::to_string(k) +
                                           " clusters");
    }
    fail(ErrorCode::TooFewPoints, std::to_string(distinct.size()) +
                                      " distinct points for k=" + std::to_string(k));
  }
  return points;
}

// k-means++ seeding: first centroid uniform, then proportional to squared
// distance from the nearest chosen centroid.
inline std::vector<std::vector<double>> kmeanspp_init(
    const std::vector<std::vector<double>>& points, int k, Rng& rng) {
  const std::size_t n = points.size();
  std::vector<std::vector<double>> centroids;
  centroids.reserve(static_cast<std::size_t>(k));
  centroids.push_back(points[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(n) - 1))]);

  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = dist2(points[i], centroids.front());

  while (centroids.size() < static_cast<std::size_t>(k)) {
    double total = 0.0;
    for (double w : d2) total += w;
    std::size_t pick = n - 1;
    if (total > 0.0) {
      const double r = rng.uniform01() * total;
      double cum = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        cum += d2[i];
        if (cum > r) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(n) - 1));
    }
    centroids.push_back(points[pick]);
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], dist2(points[i], centroids.back()));
    }
  }
  return centroids;
}

struct AssignPass {
  std::vector<std::size_t> labels;
  double inertia = 0.0;
};

inline AssignPass assign_all(const std::vector<std::vector<double>>& points,
                             const std::vector<std::vector<double>>& centroids) {
  AssignPass pass;
  pass.labels.resize(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const std::size_t c = nearest_centroid(points[i], centroids);
    pass.labels[i] = c;
    pass.inertia += dist2(points[i], centroids[c]);
  }
  return pass;
}

inline void finalize_model(ClusterModel& model, const std::vector<FeatureVector>& vectors,
                           const std::vector<std::vector<double>>& points) {
  const AssignPass final_pass = assign_all(points, model.centroids);
  model.inertia = final_pass.inertia;
  model.inertia_history.push_back(final_pass.inertia);
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    model.assignments[vectors[i].post_id] = static_cast<int>(final_pass.labels[i]);
  }
  if (!vectors.empty()) {
    model.bin_width_s = vectors.front().bin_width_s;
    model.channel = vectors.front().channel;
  }
}

}  // namespace detail

// Full k-means: k-means++ seeding from `seed`, Lloyd iterations until the
// largest centroid shift drops below `tol` or `max_iter` is hit. An empty
// cluster is re-seeded with the point farthest from its assigned centroid
// (among clusters that keep at least one member). Deterministic given
// (inputs, seed).
inline ClusterModel kmeans(const std::vector<FeatureVector>& vectors, int k, std::uint64_t seed,
                           int max_iter = 300, double tol = 1e-6) {
  const auto points = detail::validate_points(vectors, k);
  const std::size_t n = points.size();
  const std::size_t dim = points.front().size();
  Rng rng(seed);

  ClusterModel model;
  model.k = k;
  model.algorithm = ClusterAlgorithm::KMeans;
  model.seed = seed;
  model.centroids = detail::kmeanspp_init(points, k, rng);

  for (int iter = 0; iter < max_iter; ++iter) {
    const detail::AssignPass pass = detail::assign_all(points, model.centroids);
    model.inertia_history.push_back(pass.inertia);

    std::vector<std::vector<double>> next(static_cast<std::size_t>(k),
                                          std::vector<double>(dim, 0.0));
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t c = pass.labels[i];
      ++counts[c];
      for (std::size_t d = 0; d < dim; ++d) next[c][d] += points[i][d];
    }
    std::vector<std::size_t> owner = pass.labels;  // mutable view for repair bookkeeping
    for (std::size_t c = 0; c < static_cast<std::size_t>(k); ++c) {
      if (counts[c] == 0) continue;
      for (std::size_t d = 0; d < dim; ++d) next[c][d] /= static_cast<double>(counts[c]);
    }
    for (std::size_t c = 0; c < static_cast<std::size_t>(k); ++c) {
      if (counts[c] != 0) continue;
      // farthest point whose donor cluster keeps >= 2 members
      std::size_t far_idx = n;
      double far_d2 = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (counts[owner[i]] < 2) continue;
        const double d2 = detail::dist2(points[i], model.centroids[owner[i]]);
        if (d2 > far_d2) {
          far_d2 = d2;
          far_idx = i;
        }
      }
      if (far_idx == n) break;  // nothing stealable; leave centroid where it was
      --counts[owner[far_idx]];
      counts[c] = 1;
      next[c] = points[far_idx];
      owner[far_idx] = c;
    }

    double max_shift = 0.0;
    for (std::size_t c = 0; c < static_cast<std::size_t>(k); ++c) {
      max_shift = std::max(max_shift, std::sqrt(detail::dist2(model.centroids[c], next[c])));
    }
    model.centroids = std::move(next);
    if (max_shift < tol) break;
  }

  detail::finalize_model(model, vectors, points);
  return model;
}

// Mini-batch k-means (per-centre 1/count learning rate). Each iteration
// samples `batch_size` points without replacement (the whole set when
// batch_size >= n, which makes the iteration a full Lloyd-style update),
// then moves each sampled point's nearest centre toward it. Assignments
// and inertia come from a final full pass.
inline ClusterModel minibatch_kmeans(const std::vector<FeatureVector>& vectors, int k,
                                     std::uint64_t seed, int batch_size = 32,
                                     int iterations = 200) {
  if (batch_size < 1) fail(ErrorCode::InvalidArgument, "batch_size must be >= 1");
  if (iterations < 1) fail(ErrorCode::InvalidArgument, "iterations must be >= 1");
  const auto points = detail::validate_points(vectors, k);
  const std::size_t n = points.size();
  const std::size_t dim = points.front().size();
  Rng rng(seed);

  ClusterModel model;
  model.k = k;
  model.algorithm = ClusterAlgorithm::MiniBatch;
  model.seed = seed;
  model.centroids = detail::kmeanspp_init(points, k, rng);

  std::vector<std::uint64_t> counts(static_cast<std::size_t>(k), 0);
  std::vector<std::size_t> batch;
  std::vector<std::size_t> nearest;
  for (int iter = 0; iter < iterations; ++iter) {
    if (static_cast<std::size_t>(batch_size) >= n) {
      batch.resize(n);
      for (std::size_t i = 0; i < n; ++i) batch[i] = i;
    } else {
      const auto order = rng.permutation(n);
      batch.assign(order.begin(), order.begin() + batch_size);
    }
    nearest.resize(batch.size());
    for (std::size_t b = 0; b < batch.size(); ++b) {
      nearest[b] = detail::nearest_centroid(points[batch[b]], model.centroids);
    }
    for (std::size_t b = 0; b < batch.size(); ++b) {
      const std::size_t c = nearest[b];
      ++counts[c];
      const double eta = 1.0 / static_cast<double>(counts[c]);
      for (std::size_t d = 0; d < dim; ++d) {
        model.centroids[c][d] =
            (1.0 - eta) * model.centroids[c][d] + eta * points[batch[b]][d];
      }
    }
  }

  detail::finalize_model(model, vectors, points);
  return model;
}

// Index of the Euclidean-nearest centroid; ties go to the lowest index.
inline int assign(const FeatureVector& vector, const ClusterModel& model) {
  if (model.centroids.empty()) fail(ErrorCode::InvalidArgument, "model has no centroids");
  if (vector.values.size() != model.centroids.front().size()) {
    fail(ErrorCode::DimensionMismatch,
         "vector has " + std::to_string(vector.values.size()) + " components, model expects " +
             std::to_string(model.centroids.front().size()));
  }
  return static_cast<int>(detail::nearest_centroid(vector.values, model.centroids));
}

enum class ClusterLabel { Decay, Stable, Surge };

inline const char* to_string(ClusterLabel label) {
  switch (label) {
    case ClusterLabel::Decay: return "decay";
    case ClusterLabel::Surge: return "surge";
    case ClusterLabel::Stable: return "stable";
  }
  return "stable";
}

struct ClusterProfile {
  int index = 0;
  std::size_t size = 0;
  std::vector<double> centroid;
  ClusterLabel label = ClusterLabel::Stable;
};

// Heuristic shape labels for centroid trajectories. Thresholds are
// conveniences, not invariants: decay when the first bin sits > 0.1 above
// the last; surge when bin 2 jumps > 0.1 above bin 1 and everything after
// stays within 0.1 of the peak; stable otherwise.
inline std::vector<ClusterProfile> describe_clusters(const ClusterModel& model,
                                                     const std::vector<FeatureVector>& vectors) {
  std::vector<ClusterProfile> profiles;
  for (int c = 0; c < model.k; ++c) {
    ClusterProfile profile;
    profile.index = c;
    profile.centroid = model.centroids[static_cast<std::size_t>(c)];
    const auto& centroid = profile.centroid;
    if (centroid.size() >= 3) {
      const double peak = *std::max_element(centroid.begin(), centroid.end());
      double later_min = std::numeric_limits<double>::infinity();
      for (std::size_t j = 2; j < centroid.size(); ++j) later_min = std::min(later_min, centroid[j]);
      if (centroid.front() - centroid.back() > 0.1) {
        profile.label = ClusterLabel::Decay;
      } else if (centroid[1] - centroid[0] > 0.1 && later_min >= peak - 0.1) {
        profile.label = ClusterLabel::Surge;
      }
    }
    profiles.push_back(std::move(profile));
  }
  for (const FeatureVector& fv : vectors) {
    const auto it = model.assignments.find(fv.post_id);
    const int c = it != model.assignments.end() ? it->second : assign(fv, model);
    ++profiles[static_cast<std::size_t>(c)].size;
  }
  return profiles;
}

inline void save_model(std::ostream& out, const ClusterModel& model) {
  nlohmann::json doc;
  doc["k"] = model.k;
  doc["algorithm"] = to_string(model.algorithm);
  doc["seed"] = model.seed;
  doc["bin_width_s"] = model.bin_width_s;
  doc["channel"] = to_string(model.channel);
  doc["centroids"] = model.centroids;
  doc["assignments"] = model.assignments;
  doc["inertia"] = model.inertia;
  out << doc.dump(2) << '\n';
}

inline ClusterModel load_model(std::istream& in) {
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::MalformedRow, std::string("bad model json: ") + e.what());
  }
  ClusterModel model;
  try {
    model.k = doc.at("k").get<int>();
    model.algorithm = cluster_algorithm_from_string(doc.at("algorithm").get<std::string>());
    model.seed = doc.at("seed").get<std::uint64_t>();
    model.bin_width_s = doc.at("bin_width_s").get<std::int64_t>();
    model.channel = channel_from_string(doc.at("channel").get<std::string>());
    model.centroids = doc.at("centroids").get<std::vector<std::vector<double>>>();
    model.assignments = doc.at("assignments").get<std::map<std::string, int>>();
    model.inertia = doc.at("inertia").get<double>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::MalformedRow, std::string("bad model json: ") + e.what());
  }
  if (model.k < 1 || model.centroids.size() != static_cast<std::size_t>(model.k)) {
    fail(ErrorCode::MalformedRow, "model centroid count does not match k");
  }
  for (const auto& [post_id, index] : model.assignments) {
    if (index < 0 || index >= model.k) {
      fail(ErrorCode::MalformedRow, "assignment for '" + post_id + "' out of range");
    }
  }
  return model;
}

inline void save_model_file(const std::filesystem::path& path, const ClusterModel& model) {
  atomic_write(path, [&](std::ostream& out) { save_model(out, model); });
}

inline ClusterModel load_model_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open model " + path.string());
  return load_model(in);
}

}  // namespace sentistream
