#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "sentistream/corpus.hpp"
#include "sentistream/csv.hpp"
#include "sentistream/error.hpp"

namespace sentistream {

enum class Channel { Positive, Negative };

inline const char* to_string(Channel channel) {
  return channel == Channel::Positive ? "positive" : "negative";
}

inline Channel channel_from_string(const std::string& text) {
  if (text == "positive" || text == "pos") return Channel::Positive;
  if (text == "negative" || text == "neg") return Channel::Negative;
  fail(ErrorCode::InvalidArgument, "unknown channel '" + text + "'");
}

// Bin-averaged polarity values for one post and one channel over the first
// horizon_s seconds of its life.
struct FeatureVector {
  std::string post_id;
  Channel channel = Channel::Positive;
  std::vector<double> values;
  std::int64_t bin_width_s = 1500;
  std::int64_t horizon_s = 30000;
};

// Bin j (1-based) covers offsets [(j-1)*bin_width, j*bin_width) and takes
// the mean of the channel score of its comments. Empty bins are filled from
// the nearest earlier nonempty bin; leading empty bins are back-filled from
// the first nonempty one. Comments at or past the horizon are ignored.
// Per-bin contributions are summed in sorted order so the result does not
// depend on input row order.
inline FeatureVector featurize(const PostTimeline& timeline, Channel channel, int bins = 20,
                               std::int64_t bin_width_s = 1500) {
  if (bins < 1 || bin_width_s < 1) fail(ErrorCode::InvalidArgument, "bins and bin width must be positive");
  const std::int64_t horizon = static_cast<std::int64_t>(bins) * bin_width_s;

  std::vector<std::vector<double>> contributions(static_cast<std::size_t>(bins));
  for (const TimelinePoint& point : timeline.scored) {
    if (point.offset_s < 0 || point.offset_s >= horizon) continue;
    const auto bin = static_cast<std::size_t>(point.offset_s / bin_width_s);
    const double value =
        channel == Channel::Positive ? point.score.positive : point.score.negative;
    contributions[bin].push_back(value);
  }

  FeatureVector fv;
  fv.post_id = timeline.post_id;
  fv.channel = channel;
  fv.bin_width_s = bin_width_s;
  fv.horizon_s = horizon;
  fv.values.assign(static_cast<std::size_t>(bins), 0.0);

  int first_nonempty = -1;
  for (int j = 0; j < bins; ++j) {
    auto& vals = contributions[static_cast<std::size_t>(j)];
    if (vals.empty()) continue;
    std::sort(vals.begin(), vals.end());
    double sum = 0.0;
    for (double v : vals) sum += v;
    fv.values[static_cast<std::size_t>(j)] = sum / static_cast<double>(vals.size());
    if (first_nonempty < 0) first_nonempty = j;
  }
  if (first_nonempty < 0) {
    fail(ErrorCode::EmptyHorizon,
         "post '" + timeline.post_id + "' has no comment before " + std::to_string(horizon) + " s");
  }
  for (int j = 0; j < first_nonempty; ++j) {
    fv.values[static_cast<std::size_t>(j)] = fv.values[static_cast<std::size_t>(first_nonempty)];
  }
  for (int j = first_nonempty + 1; j < bins; ++j) {
    if (contributions[static_cast<std::size_t>(j)].empty()) {
      fv.values[static_cast<std::size_t>(j)] = fv.values[static_cast<std::size_t>(j - 1)];
    }
  }
  return fv;
}

struct FeaturizeReport {
  std::vector<FeatureVector> vectors;
  std::vector<std::string> skipped_posts;  // no comment inside the horizon
};

inline FeaturizeReport featurize_corpus(const std::vector<PostTimeline>& timelines,
                                        Channel channel, int bins = 20,
                                        std::int64_t bin_width_s = 1500) {
  FeaturizeReport report;
  for (const PostTimeline& timeline : timelines) {
    try {
      report.vectors.push_back(featurize(timeline, channel, bins, bin_width_s));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EmptyHorizon) throw;
      report.skipped_posts.push_back(timeline.post_id);
    }
  }
  return report;
}

inline void write_features_csv(std::ostream& out, const std::vector<FeatureVector>& vectors) {
  const std::size_t dim = vectors.empty() ? 20 : vectors.front().values.size();
  std::vector<std::string> header = {"post_id", "channel"};
  for (std::size_t j = 1; j <= dim; ++j) header.push_back("v" + std::to_string(j));
  write_csv_row(out, header);
  for (const FeatureVector& fv : vectors) {
    std::vector<std::string> row = {fv.post_id, to_string(fv.channel)};
    for (double v : fv.values) row.push_back(format_double(v));
    write_csv_row(out, row);
  }
}

inline std::vector<FeatureVector> read_features_csv(std::istream& in) {
  CsvReader reader(in);
  const auto header = reader.next();
  if (!header || header->size() < 3 || (*header)[0] != "post_id" || (*header)[1] != "channel") {
    fail(ErrorCode::BadHeader, "expected post_id,channel,v1..vN");
  }
  const std::size_t dim = header->size() - 2;
  for (std::size_t j = 0; j < dim; ++j) {
    if ((*header)[j + 2] != "v" + std::to_string(j + 1)) {
      fail(ErrorCode::BadHeader, "bad value column '" + (*header)[j + 2] + "'");
    }
  }
  std::vector<FeatureVector> vectors;
  while (auto record = reader.next()) {
    if (record->size() == 1 && (*record)[0].empty()) continue;
    const long line_no = reader.line();
    if (record->size() != dim + 2) {
      fail(ErrorCode::MalformedRow,
           "expected " + std::to_string(dim + 2) + " fields, got " + std::to_string(record->size()),
           line_no);
    }
    FeatureVector fv;
    fv.post_id = (*record)[0];
    fv.channel = channel_from_string((*record)[1]);
    for (std::size_t j = 0; j < dim; ++j) {
      const auto value = try_parse_double((*record)[j + 2]);
      if (!value) fail(ErrorCode::MalformedRow, "bad value '" + (*record)[j + 2] + "'", line_no);
      fv.values.push_back(*value);
    }
    vectors.push_back(std::move(fv));
  }
  return vectors;
}

}  // namespace sentistream
