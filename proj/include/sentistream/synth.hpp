#pragma once

#include <algorithm>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "sentistream/csv.hpp"
#include "sentistream/error.hpp"
#include "sentistream/rng.hpp"

namespace sentistream {

enum class Archetype { Decay, Stable, Surge };

inline const char* to_string(Archetype kind) {
  switch (kind) {
    case Archetype::Decay: return "decay";
    case Archetype::Stable: return "stable";
    case Archetype::Surge: return "surge";
  }
  return "stable";
}

// One family of synthetic posts: trajectory shape, its level, per-bin noise
// and comment density.
struct ArchetypeSpec {
  Archetype kind = Archetype::Stable;
  double base = 0.5;           // in [0, 1]
  double noise_sigma = 0.0;
  int comments_per_bin = 1;
};

struct GenSpec {
  ArchetypeSpec spec;
  int posts = 0;
};

// Target bin values for one archetype. Decay slides linearly from base to
// 0.3*base across bins 1-5 and stays there; stable is constant; surge
// starts at 0.3*base, peaks at base in bin 2, gives back 10% in bin 3 and
// holds. All values stay in [0, 1] for base in [0, 1].
inline std::vector<double> archetype_curve(Archetype kind, double base, int bins = 20) {
  if (base < 0.0 || base > 1.0) fail(ErrorCode::InvalidArgument, "base must be in [0, 1]");
  if (bins < 1) fail(ErrorCode::InvalidArgument, "bins must be >= 1");
  std::vector<double> curve(static_cast<std::size_t>(bins), base);
  switch (kind) {
    case Archetype::Stable:
      break;
    case Archetype::Decay: {
      const double floor_value = 0.3 * base;
      for (int j = 0; j < bins; ++j) {
        curve[static_cast<std::size_t>(j)] =
            j < 4 ? base + (floor_value - base) * (static_cast<double>(j) / 4.0) : floor_value;
      }
      break;
    }
    case Archetype::Surge: {
      curve[0] = 0.3 * base;
      if (bins > 1) curve[1] = base;
      for (int j = 2; j < bins; ++j) curve[static_cast<std::size_t>(j)] = 0.9 * base;
      break;
    }
  }
  return curve;
}

struct GeneratedPost {
  std::string post_id;
  Archetype kind = Archetype::Stable;
};

// Emits the corpus CSV and the ground-truth label file. Every post gets
// comments_per_bin comments per bin at seeded-uniform offsets inside the
// bin; the Positive column is the curve value plus clipped Gaussian noise,
// Negative keeps half the remaining mass so the triple always has neutral
// slack. Output is byte-deterministic for a given seed.
inline std::vector<GeneratedPost> generate_corpus(const std::vector<GenSpec>& specs,
                                                  std::uint64_t seed, std::ostream& corpus_out,
                                                  std::ostream& labels_out, int bins = 20,
                                                  std::int64_t bin_width_s = 1500) {
  std::int64_t total_posts = 0;
  for (const GenSpec& g : specs) {
    if (g.spec.comments_per_bin < 1) fail(ErrorCode::InvalidArgument, "comments_per_bin must be >= 1");
    if (g.spec.noise_sigma < 0.0) fail(ErrorCode::InvalidArgument, "noise sigma must be >= 0");
    total_posts += g.posts;
  }
  if (total_posts < 1) fail(ErrorCode::InvalidArgument, "need at least one post");
  if (bin_width_s < 1) fail(ErrorCode::InvalidArgument, "bin width must be >= 1");

  Rng rng(seed);
  std::vector<GeneratedPost> posts;
  write_csv_row(corpus_out, {"Datetime", "Topic", "Post", "Comment", "Positive", "Negative"});
  labels_out << "# seed=" << seed << '\n';
  write_csv_row(labels_out, {"post_id", "archetype"});

  int kind_counter[3] = {0, 0, 0};
  for (const GenSpec& g : specs) {
    const std::vector<double> curve = archetype_curve(g.spec.kind, g.spec.base, bins);
    for (int p = 0; p < g.posts; ++p) {
      const int ordinal = ++kind_counter[static_cast<int>(g.spec.kind)];
      std::string post_id = to_string(g.spec.kind);
      post_id += '-';
      if (ordinal < 100) post_id += ordinal < 10 ? "00" : "0";
      post_id += std::to_string(ordinal);

      struct Row {
        std::int64_t offset;
        double positive;
        int seq;
      };
      std::vector<Row> rows;
      int seq = 0;
      for (int j = 0; j < bins; ++j) {
        const std::int64_t bin_start = static_cast<std::int64_t>(j) * bin_width_s;
        for (int c = 0; c < g.spec.comments_per_bin; ++c) {
          Row row;
          row.offset = bin_start + rng.uniform_int(0, bin_width_s - 1);
          double value = curve[static_cast<std::size_t>(j)];
          if (g.spec.noise_sigma > 0.0) {
            value = std::clamp(value + rng.normal(0.0, g.spec.noise_sigma), 0.0, 1.0);
          }
          row.positive = value;
          row.seq = ++seq;
          rows.push_back(row);
        }
      }
      std::stable_sort(rows.begin(), rows.end(),
                       [](const Row& a, const Row& b) { return a.offset < b.offset; });
      for (const Row& row : rows) {
        const double negative = (1.0 - row.positive) * 0.5;
        write_csv_row(corpus_out,
                      {std::to_string(row.offset), "synthetic", post_id,
                       "comment " + std::to_string(row.seq) + " on " + post_id,
                       format_double(row.positive), format_double(negative)});
      }
      write_csv_row(labels_out, {post_id, to_string(g.spec.kind)});
      posts.push_back(GeneratedPost{post_id, g.spec.kind});
    }
  }
  return posts;
}

}  // namespace sentistream
