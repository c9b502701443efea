#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <ostream>
#include <string>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

#include <json.hpp>

#include "sentistream/corpus.hpp"
#include "sentistream/csv.hpp"
#include "sentistream/error.hpp"

namespace sentistream {

// Poll cadence and replay clock. Each poll advances the replay clock by
// poll_interval_s * speedup corpus-seconds; `instant` skips the wall-clock
// wait between polls without changing the window size, so an instant run
// is fully deterministic.
struct StreamConfig {
  double poll_interval_s = 0.1;
  double speedup = 1.0;
  bool instant = false;
  std::int64_t horizon_s = 30000;
};

enum class EventKind { NewComments, SeriesUpdated, CrossingTrigger };

inline const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::NewComments: return "NewComments";
    case EventKind::SeriesUpdated: return "SeriesUpdated";
    case EventKind::CrossingTrigger: return "CrossingTrigger";
  }
  return "NewComments";
}

enum class CrossingDirection { PosOverNeg, NegOverPos };

inline const char* to_string(CrossingDirection direction) {
  return direction == CrossingDirection::PosOverNeg ? "pos-over-neg" : "neg-over-pos";
}

struct NewCommentsPayload {
  std::vector<std::string> comment_ids;
};
struct SeriesUpdatedPayload {
  std::size_t point_index = 0;
};
struct CrossingPayload {
  CrossingDirection direction = CrossingDirection::PosOverNeg;
};

struct StreamEvent {
  EventKind kind = EventKind::NewComments;
  std::string post_id;
  std::int64_t at_offset_s = 0;
  std::variant<NewCommentsPayload, SeriesUpdatedPayload, CrossingPayload> payload;
};

struct DashboardPoint {
  std::int64_t offset_s = 0;
  double positive = 0.0;
  double negative = 0.0;
};

// Live polarity trajectory of one post: each point is the running mean of
// every comment scored so far, offsets strictly increasing.
struct DashboardSeries {
  std::string post_id;
  std::vector<DashboardPoint> points;
};

inline nlohmann::json to_json(const StreamEvent& event) {
  nlohmann::json doc;
  doc["kind"] = to_string(event.kind);
  doc["post_id"] = event.post_id;
  doc["at_offset_s"] = event.at_offset_s;
  if (const auto* p = std::get_if<NewCommentsPayload>(&event.payload)) {
    doc["payload"] = {{"comment_ids", p->comment_ids}};
  } else if (const auto* s = std::get_if<SeriesUpdatedPayload>(&event.payload)) {
    doc["payload"] = {{"point_index", s->point_index}};
  } else if (const auto* x = std::get_if<CrossingPayload>(&event.payload)) {
    doc["payload"] = {{"direction", to_string(x->direction)}};
  }
  return doc;
}

struct EventSink {
  virtual ~EventSink() = default;
  virtual void on_event(const StreamEvent& event) = 0;
};

struct DashboardSink {
  virtual ~DashboardSink() = default;
  virtual void on_series(const DashboardSeries& series) = 0;
};

// JSON Lines, one event per line.
class JsonlEventSink : public EventSink {
 public:
  explicit JsonlEventSink(std::ostream& out) : out_(out) {}
  void on_event(const StreamEvent& event) override { out_ << to_json(event).dump() << '\n'; }

 private:
  std::ostream& out_;
};

class CsvDashboardSink : public DashboardSink {
 public:
  explicit CsvDashboardSink(std::ostream& out) : out_(out) {}
  void on_series(const DashboardSeries& series) override {
    if (!header_written_) {
      write_csv_row(out_, {"post_id", "offset_s", "positive", "negative"});
      header_written_ = true;
    }
    for (const DashboardPoint& point : series.points) {
      write_csv_row(out_, {series.post_id, std::to_string(point.offset_s),
                           format_double(point.positive), format_double(point.negative)});
    }
  }

 private:
  std::ostream& out_;
  bool header_written_ = false;
};

struct CollectingEventSink : public EventSink {
  std::vector<StreamEvent> events;
  void on_event(const StreamEvent& event) override { events.push_back(event); }
};

struct CollectingDashboardSink : public DashboardSink {
  std::vector<DashboardSeries> series;
  void on_series(const DashboardSeries& s) override { series.push_back(s); }
};

// Offset-ordered replay view over a resolved corpus, standing in for the
// live comment feed. Polling returns everything that has "arrived" by the
// replay clock and past the cursor.
class ReplaySource {
 public:
  struct Cursor {
    std::size_t next = 0;
  };

  explicit ReplaySource(std::vector<StreamComment> comments) : ordered_(std::move(comments)) {
    std::stable_sort(ordered_.begin(), ordered_.end(),
                     [](const StreamComment& a, const StreamComment& b) {
                       return a.offset_s < b.offset_s;
                     });
  }

  // All comments with offset <= now_s strictly after the cursor, in offset
  // order; empty when nothing new arrived.
  std::vector<StreamComment> poll(Cursor& cursor, double now_s) const {
    if (!open_) fail(ErrorCode::SourceClosed, "poll on closed source");
    std::vector<StreamComment> batch;
    while (cursor.next < ordered_.size() &&
           static_cast<double>(ordered_[cursor.next].offset_s) <= now_s) {
      batch.push_back(ordered_[cursor.next]);
      ++cursor.next;
    }
    return batch;
  }

  // True once every comment below `horizon_s` has been polled.
  bool drained(const Cursor& cursor, std::int64_t horizon_s) const {
    return cursor.next >= ordered_.size() || ordered_[cursor.next].offset_s >= horizon_s;
  }

  std::size_t size() const noexcept { return ordered_.size(); }
  void close() noexcept { open_ = false; }

 private:
  std::vector<StreamComment> ordered_;
  bool open_ = true;
};

// Per-post stream state: the id cache for diffing plus running score sums
// backing the dashboard series.
struct PostStreamState {
  std::string post_id;
  std::unordered_set<std::string> cache;
  double positive_sum = 0.0;
  double negative_sum = 0.0;
  std::int64_t scored_count = 0;
  DashboardSeries series;
};

// Batch members whose ids are not yet cached, original order kept; the
// cache learns the returned ids. No delta means no event downstream.
inline std::vector<StreamComment> diff_against_cache(const std::vector<StreamComment>& batch,
                                                     std::unordered_set<std::string>& cache) {
  std::vector<StreamComment> delta;
  for (const StreamComment& comment : batch) {
    if (cache.insert(comment.comment_id).second) delta.push_back(comment);
  }
  return delta;
}

// Applies one delta: a NewComments event, one new dashboard point at the
// delta's max offset (running mean over everything scored so far), a
// SeriesUpdated event, and a CrossingTrigger whenever positive-negative
// strictly changes sign between the previous point and the new one.
inline std::vector<StreamEvent> step(PostStreamState& state,
                                     const std::vector<StreamComment>& delta) {
  std::vector<StreamEvent> events;
  if (delta.empty()) return events;

  NewCommentsPayload new_comments;
  std::int64_t max_offset = delta.front().offset_s;
  for (const StreamComment& comment : delta) {
    new_comments.comment_ids.push_back(comment.comment_id);
    max_offset = std::max(max_offset, comment.offset_s);
    state.positive_sum += comment.score.positive;
    state.negative_sum += comment.score.negative;
    ++state.scored_count;
  }
  events.push_back(StreamEvent{EventKind::NewComments, state.post_id, max_offset,
                               std::move(new_comments)});

  DashboardPoint point;
  point.offset_s = max_offset;
  point.positive = state.positive_sum / static_cast<double>(state.scored_count);
  point.negative = state.negative_sum / static_cast<double>(state.scored_count);

  const bool had_prev = !state.series.points.empty();
  const DashboardPoint prev = had_prev ? state.series.points.back() : DashboardPoint{};
  state.series.points.push_back(point);
  events.push_back(StreamEvent{EventKind::SeriesUpdated, state.post_id, max_offset,
                               SeriesUpdatedPayload{state.series.points.size() - 1}});

  if (had_prev) {
    const double before = prev.positive - prev.negative;
    const double after = point.positive - point.negative;
    if (before > 0.0 && after < 0.0) {
      events.push_back(StreamEvent{EventKind::CrossingTrigger, state.post_id, max_offset,
                                   CrossingPayload{CrossingDirection::NegOverPos}});
    } else if (before < 0.0 && after > 0.0) {
      events.push_back(StreamEvent{EventKind::CrossingTrigger, state.post_id, max_offset,
                                   CrossingPayload{CrossingDirection::PosOverNeg}});
    }
  }
  return events;
}

struct ReplaySummary {
  std::int64_t comments_processed = 0;
  std::int64_t events_emitted = 0;
};

// Drives poll -> diff -> step until the corpus is drained or the horizon is
// reached. Events go to the event sinks in registration order as they are
// emitted; each post's final dashboard series goes to the dashboard sinks
// at the end, posts in first-appearance order.
inline ReplaySummary run_replay(const StreamConfig& config, ReplaySource& source,
                                const std::vector<EventSink*>& event_sinks,
                                const std::vector<DashboardSink*>& dashboard_sinks) {
  if (config.poll_interval_s <= 0.0 || config.speedup <= 0.0 || config.horizon_s <= 0) {
    fail(ErrorCode::InvalidArgument, "poll interval, speedup and horizon must be positive");
  }

  ReplaySummary summary;
  std::vector<PostStreamState> states;
  std::unordered_map<std::string, std::size_t> state_index;
  ReplaySource::Cursor cursor;
  const double dt = config.poll_interval_s * config.speedup;
  const double horizon = static_cast<double>(config.horizon_s);
  double now = 0.0;

  while (!source.drained(cursor, config.horizon_s) && now < horizon) {
    if (!config.instant) {
      std::this_thread::sleep_for(std::chrono::duration<double>(config.poll_interval_s));
    }
    now = std::min(now + dt, horizon);
    // offsets are integral, so clamping to horizon - 1 excludes the horizon
    const std::vector<StreamComment> batch =
        source.poll(cursor, std::min(now, horizon - 1.0));
    if (batch.empty()) continue;

    // split the batch per post, first appearance first
    std::unordered_map<std::string, std::vector<StreamComment>> groups;
    std::vector<std::string> group_order;
    for (const StreamComment& comment : batch) {
      auto [it, inserted] = groups.emplace(comment.post_id, std::vector<StreamComment>{});
      if (inserted) group_order.push_back(comment.post_id);
      it->second.push_back(comment);
    }
    for (const std::string& post_id : group_order) {
      auto [it, inserted] = state_index.emplace(post_id, states.size());
      if (inserted) {
        states.push_back(PostStreamState{});
        states.back().post_id = post_id;
        states.back().series.post_id = post_id;
      }
      PostStreamState& state = states[it->second];
      const std::vector<StreamComment> delta = diff_against_cache(groups[post_id], state.cache);
      summary.comments_processed += static_cast<std::int64_t>(delta.size());
      for (const StreamEvent& event : step(state, delta)) {
        ++summary.events_emitted;
        for (EventSink* sink : event_sinks) sink->on_event(event);
      }
    }
  }

  for (const PostStreamState& state : states) {
    for (DashboardSink* sink : dashboard_sinks) sink->on_series(state.series);
  }
  return summary;
}

}  // namespace sentistream
