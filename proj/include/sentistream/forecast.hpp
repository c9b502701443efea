#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sentistream/cluster.hpp"
#include "sentistream/csv.hpp"
#include "sentistream/error.hpp"
#include "sentistream/featurize.hpp"
#include "sentistream/rng.hpp"

namespace sentistream {

// Two-step trend forecast: the matched cluster, the donor series found in
// it, and its continuation used as the prediction.
struct Forecast {
  std::string target_post_id;
  int prefix_len = 5;
  int matched_cluster = 0;
  std::string donor_post_id;
  std::vector<double> predicted;               // donor bins prefix_len+1 .. dim
  std::optional<std::vector<double>> actual;   // same bins, when known
  std::optional<double> mae;
};

struct EvalReport {
  int folds = 0;
  std::uint64_t seed = 0;
  std::vector<double> per_fold_mae;
  double avg_mae = 0.0;
};

// Mean absolute gap between two equal-length series.
inline double mae(const std::vector<double>& actual, const std::vector<double>& predicted) {
  if (actual.size() != predicted.size() || actual.empty()) {
    fail(ErrorCode::LengthMismatch, "got " + std::to_string(actual.size()) + " vs " +
                                        std::to_string(predicted.size()) + " values");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) sum += std::abs(actual[i] - predicted[i]);
  return sum / static_cast<double>(actual.size());
}

// Cluster whose centroid's leading components sit Euclidean-nearest to the
// prefix; ties go to the lowest index.
inline int match_cluster(const std::vector<double>& prefix, const ClusterModel& model) {
  if (model.centroids.empty()) fail(ErrorCode::InvalidArgument, "model has no centroids");
  if (prefix.empty() || prefix.size() > model.centroids.front().size()) {
    fail(ErrorCode::DimensionMismatch,
         "prefix of " + std::to_string(prefix.size()) + " values does not fit centroids of " +
             std::to_string(model.centroids.front().size()));
  }
  int best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < model.centroids.size(); ++c) {
    double d2 = 0.0;
    for (std::size_t j = 0; j < prefix.size(); ++j) {
      const double d = prefix[j] - model.centroids[c][j];
      d2 += d * d;
    }
    if (d2 < best_d2) {
      best_d2 = d2;
      best = static_cast<int>(c);
    }
  }
  return best;
}

// Step 1: match the cluster on the prefix. Step 2: the training member of
// that cluster with the nearest prefix donates its remaining bins as the
// prediction. Donor ties break on the lexicographically smallest post id.
inline Forecast predict(const std::vector<double>& prefix, const ClusterModel& model,
                        const std::vector<FeatureVector>& training_vectors) {
  const int cluster = match_cluster(prefix, model);
  const std::size_t prefix_len = prefix.size();

  const FeatureVector* donor = nullptr;
  double donor_d2 = std::numeric_limits<double>::infinity();
  for (const FeatureVector& fv : training_vectors) {
    if (fv.values.size() < prefix_len) {
      fail(ErrorCode::DimensionMismatch,
           "training vector '" + fv.post_id + "' shorter than prefix");
    }
    const auto it = model.assignments.find(fv.post_id);
    const int member = it != model.assignments.end() ? it->second : assign(fv, model);
    if (member != cluster) continue;
    double d2 = 0.0;
    for (std::size_t j = 0; j < prefix_len; ++j) {
      const double d = prefix[j] - fv.values[j];
      d2 += d * d;
    }
    if (d2 < donor_d2 || (d2 == donor_d2 && donor && fv.post_id < donor->post_id)) {
      donor_d2 = d2;
      donor = &fv;
    }
  }
  if (!donor) {
    fail(ErrorCode::EmptyCluster,
         "cluster " + std::to_string(cluster) + " has no training members");
  }

  Forecast forecast;
  forecast.prefix_len = static_cast<int>(prefix_len);
  forecast.matched_cluster = cluster;
  forecast.donor_post_id = donor->post_id;
  forecast.predicted.assign(donor->values.begin() + static_cast<std::ptrdiff_t>(prefix_len),
                            donor->values.end());
  return forecast;
}

// Near-equal contiguous folds over a seeded shuffle; the first n % folds
// folds take the extra element.
inline std::vector<std::vector<std::size_t>> make_folds(std::size_t n, int folds,
                                                        std::uint64_t seed) {
  if (folds < 2) fail(ErrorCode::InvalidArgument, "folds must be >= 2");
  if (n < static_cast<std::size_t>(folds)) {
    fail(ErrorCode::TooFewVectors,
         std::to_string(n) + " vectors cannot fill " + std::to_string(folds) + " folds");
  }
  Rng rng(seed);
  const std::vector<std::size_t> order = rng.permutation(n);
  std::vector<std::vector<std::size_t>> result;
  const std::size_t base = n / static_cast<std::size_t>(folds);
  const std::size_t rem = n % static_cast<std::size_t>(folds);
  std::size_t at = 0;
  for (int f = 0; f < folds; ++f) {
    const std::size_t size = base + (static_cast<std::size_t>(f) < rem ? 1 : 0);
    result.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(at),
                        order.begin() + static_cast<std::ptrdiff_t>(at + size));
    at += size;
  }
  return result;
}

// k-fold evaluation of the two-step predictor. The cluster model is refit
// on each fold's training split, so held-out vectors never leak into the
// fit. Per-vector error covers the bins after the prefix; the fold score
// averages over its held-out vectors.
inline EvalReport cross_validate(const std::vector<FeatureVector>& vectors, int folds,
                                 int k, std::uint64_t seed, int prefix_len = 5,
                                 ClusterAlgorithm algorithm = ClusterAlgorithm::KMeans) {
  if (prefix_len < 1 || (!vectors.empty() &&
                         static_cast<std::size_t>(prefix_len) >= vectors.front().values.size())) {
    fail(ErrorCode::InvalidArgument, "prefix_len must be in [1, dim)");
  }
  const auto fold_indices = make_folds(vectors.size(), folds, seed);

  EvalReport report;
  report.folds = folds;
  report.seed = seed;
  for (const auto& held_out : fold_indices) {
    std::vector<bool> is_test(vectors.size(), false);
    for (std::size_t idx : held_out) is_test[idx] = true;
    std::vector<FeatureVector> train;
    train.reserve(vectors.size() - held_out.size());
    for (std::size_t i = 0; i < vectors.size(); ++i) {
      if (!is_test[i]) train.push_back(vectors[i]);
    }
    const ClusterModel model = algorithm == ClusterAlgorithm::KMeans
                                   ? kmeans(train, k, seed)
                                   : minibatch_kmeans(train, k, seed);
    double fold_sum = 0.0;
    for (std::size_t idx : held_out) {
      const FeatureVector& target = vectors[idx];
      const std::vector<double> prefix(target.values.begin(),
                                       target.values.begin() + prefix_len);
      const Forecast forecast = predict(prefix, model, train);
      const std::vector<double> actual(target.values.begin() + prefix_len,
                                       target.values.end());
      fold_sum += mae(actual, forecast.predicted);
    }
    report.per_fold_mae.push_back(fold_sum / static_cast<double>(held_out.size()));
  }
  double total = 0.0;
  for (double m : report.per_fold_mae) total += m;
  report.avg_mae = total / static_cast<double>(report.per_fold_mae.size());
  return report;
}

// One row per predicted bin, j counted 1-based over the full vector.
inline void write_forecast_csv(std::ostream& out, const Forecast& forecast) {
  write_csv_row(out, {"target_post_id", "matched_cluster", "donor_post_id", "j", "predicted",
                      "actual", "abs_err"});
  for (std::size_t i = 0; i < forecast.predicted.size(); ++i) {
    const std::size_t j = static_cast<std::size_t>(forecast.prefix_len) + i + 1;
    std::vector<std::string> row = {forecast.target_post_id,
                                    std::to_string(forecast.matched_cluster),
                                    forecast.donor_post_id,
                                    std::to_string(j),
                                    format_double(forecast.predicted[i]),
                                    "",
                                    ""};
    if (forecast.actual) {
      row[5] = format_double((*forecast.actual)[i]);
      row[6] = format_double(std::abs((*forecast.actual)[i] - forecast.predicted[i]));
    }
    write_csv_row(out, row);
  }
}

}  // namespace sentistream
