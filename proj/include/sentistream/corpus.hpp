#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "sentistream/csv.hpp"
#include "sentistream/error.hpp"
#include "sentistream/sentiment.hpp"

namespace sentistream {

inline constexpr const char* kCorpusHeader[] = {"Datetime", "Topic", "Post",
                                                "Comment", "Positive", "Negative"};

// One data row of the corpus CSV. Datetime is integer seconds since the
// post appeared; Positive/Negative may be blank (rescored downstream).
struct CorpusRow {
  long line_no = 0;
  std::int64_t datetime_s = 0;
  std::string topic;
  std::string post;
  std::string comment;
  std::optional<double> positive;
  std::optional<double> negative;
};

// A comment ready for either processing layer: identity, timing and its
// resolved polarity triple.
struct StreamComment {
  std::string comment_id;  // data-row ordinal, unique across the corpus
  std::string post_id;
  std::int64_t offset_s = 0;
  std::string text;
  SentimentScore score;
};

struct TimelinePoint {
  std::int64_t offset_s = 0;
  SentimentScore score;
};

// Ordered per-post score series; offsets nondecreasing, never empty.
struct PostTimeline {
  std::string post_id;
  std::vector<TimelinePoint> scored;
};

// How stored Positive/Negative columns relate to the scorer: stored values
// are trusted unless `rescore` is set or the columns are blank, in which
// case the comment text is scored with `lexicon`.
struct ScorePolicy {
  bool rescore = false;
  const SentimentLexicon* lexicon = nullptr;
};

inline std::vector<CorpusRow> parse_corpus(std::istream& in) {
  CsvReader reader(in);
  const auto header = reader.next();
  if (!header || header->size() != 6) {
    fail(ErrorCode::BadHeader, "expected Datetime,Topic,Post,Comment,Positive,Negative");
  }
  for (std::size_t i = 0; i < 6; ++i) {
    if ((*header)[i] != kCorpusHeader[i]) {
      fail(ErrorCode::BadHeader, "column " + std::to_string(i + 1) + " is '" + (*header)[i] +
                                     "', expected '" + kCorpusHeader[i] + "'");
    }
  }

  std::vector<CorpusRow> rows;
  while (auto record = reader.next()) {
    const long line_no = reader.line();
    if (record->size() == 1 && (*record)[0].empty()) continue;  // trailing blank line
    if (record->size() != 6) {
      fail(ErrorCode::MalformedRow,
           "expected 6 fields, got " + std::to_string(record->size()), line_no);
    }
    CorpusRow row;
    row.line_no = line_no;
    const auto datetime = try_parse_int((*record)[0]);
    if (!datetime) fail(ErrorCode::MalformedRow, "bad Datetime '" + (*record)[0] + "'", line_no);
    if (*datetime < 0) fail(ErrorCode::NegativeOffset, "Datetime " + (*record)[0], line_no);
    row.datetime_s = *datetime;
    row.topic = (*record)[1];
    row.post = (*record)[2];
    row.comment = (*record)[3];

    const std::string& pos_text = (*record)[4];
    const std::string& neg_text = (*record)[5];
    if (pos_text.empty() != neg_text.empty()) {
      fail(ErrorCode::MalformedRow, "Positive/Negative must both be present or both blank",
           line_no);
    }
    if (!pos_text.empty()) {
      const auto pos = try_parse_double(pos_text);
      const auto neg = try_parse_double(neg_text);
      if (!pos || !neg) fail(ErrorCode::MalformedRow, "bad score value", line_no);
      if (*pos < 0.0 || *pos > 1.0 || *neg < 0.0 || *neg > 1.0 || *pos + *neg > 1.0) {
        fail(ErrorCode::ScoreOutOfRange,
             "positive=" + pos_text + " negative=" + neg_text, line_no);
      }
      row.positive = *pos;
      row.negative = *neg;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

// Attaches a score to every row per `policy`. Comment ids are the 1-based
// data-row ordinals, so identity is stable across layers.
inline std::vector<StreamComment> resolve_comments(const std::vector<CorpusRow>& rows,
                                                   const ScorePolicy& policy = {}) {
  std::vector<StreamComment> comments;
  comments.reserve(rows.size());
  std::size_t ordinal = 0;
  for (const CorpusRow& row : rows) {
    ++ordinal;
    StreamComment c;
    c.comment_id = std::to_string(ordinal);
    c.post_id = row.post;
    c.offset_s = row.datetime_s;
    c.text = row.comment;
    const bool use_stored = row.positive.has_value() && !policy.rescore;
    if (use_stored) {
      c.score = SentimentScore{*row.positive, *row.negative,
                               1.0 - *row.positive - *row.negative};
    } else {
      if (!policy.lexicon) {
        fail(ErrorCode::InvalidArgument,
             policy.rescore ? "rescore requested but no lexicon given"
                            : "row has blank scores and no lexicon given",
             row.line_no);
      }
      c.score = score_text(row.comment, *policy.lexicon);
    }
    comments.push_back(std::move(c));
  }
  return comments;
}

// Groups comments into per-post timelines (post title is the identity),
// posts in first-appearance order, each timeline sorted by offset. The
// sort is stable so equal offsets keep file order.
inline std::vector<PostTimeline> build_timelines(const std::vector<StreamComment>& comments) {
  std::vector<PostTimeline> timelines;
  std::unordered_map<std::string, std::size_t> index;
  for (const StreamComment& c : comments) {
    auto [it, inserted] = index.emplace(c.post_id, timelines.size());
    if (inserted) timelines.push_back(PostTimeline{c.post_id, {}});
    timelines[it->second].scored.push_back(TimelinePoint{c.offset_s, c.score});
  }
  for (PostTimeline& t : timelines) {
    std::stable_sort(t.scored.begin(), t.scored.end(),
                     [](const TimelinePoint& a, const TimelinePoint& b) {
                       return a.offset_s < b.offset_s;
                     });
  }
  return timelines;
}

inline std::vector<PostTimeline> load_corpus(const std::filesystem::path& path,
                                             const ScorePolicy& policy = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open corpus " + path.string());
  return build_timelines(resolve_comments(parse_corpus(in), policy));
}

}  // namespace sentistream
