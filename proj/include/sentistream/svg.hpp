#pragma once

#include <algorithm>
#include <cstdio>
#include <istream>
#include <string>
#include <utility>
#include <vector>

#include "sentistream/csv.hpp"
#include "sentistream/error.hpp"

namespace sentistream {

// One polyline on the chart; y values live on the fixed [0, 1] axis.
struct ChartSeries {
  std::string label;
  std::string color;
  std::vector<std::pair<double, double>> points;  // (x, y)
};

namespace detail {

inline std::string svg_num(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", value);
  return buf;
}

}  // namespace detail

// Standalone SVG 1.1 line chart. The y axis is pinned to [0, 1]; the x axis
// spans the data. Output bytes depend only on the input series.
inline std::string render_chart_svg(const std::vector<ChartSeries>& series,
                                    const std::string& x_label = "seconds") {
  bool any_points = false;
  for (const ChartSeries& s : series) {
    if (!s.points.empty()) any_points = true;
  }
  if (!any_points) fail(ErrorCode::EmptySeries, "nothing to plot");

  constexpr double width = 800.0;
  constexpr double height = 400.0;
  constexpr double left = 56.0;
  constexpr double right = 784.0;
  constexpr double top = 16.0;
  constexpr double bottom = 364.0;

  double x_min = 0.0;
  double x_max = 0.0;
  bool first = true;
  for (const ChartSeries& s : series) {
    for (const auto& [x, y] : s.points) {
      if (first) {
        x_min = x_max = x;
        first = false;
      } else {
        x_min = std::min(x_min, x);
        x_max = std::max(x_max, x);
      }
    }
  }
  const double x_span = x_max > x_min ? x_max - x_min : 1.0;

  const auto map_x = [&](double x) { return left + (x - x_min) / x_span * (right - left); };
  const auto map_y = [&](double y) { return bottom - y * (bottom - top); };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"800\" "
         "height=\"400\" viewBox=\"0 0 800 400\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"800\" height=\"400\" fill=\"white\"/>\n";

  for (int tick = 0; tick <= 4; ++tick) {
    const double y_value = static_cast<double>(tick) / 4.0;
    const double y = map_y(y_value);
    svg += "<line x1=\"" + detail::svg_num(left) + "\" y1=\"" + detail::svg_num(y) +
           "\" x2=\"" + detail::svg_num(right) + "\" y2=\"" + detail::svg_num(y) +
           "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + detail::svg_num(left - 8.0) + "\" y=\"" + detail::svg_num(y + 4.0) +
           "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\">" +
           detail::svg_num(y_value) + "</text>\n";
  }
  svg += "<line x1=\"" + detail::svg_num(left) + "\" y1=\"" + detail::svg_num(top) + "\" x2=\"" +
         detail::svg_num(left) + "\" y2=\"" + detail::svg_num(bottom) +
         "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  svg += "<line x1=\"" + detail::svg_num(left) + "\" y1=\"" + detail::svg_num(bottom) +
         "\" x2=\"" + detail::svg_num(right) + "\" y2=\"" + detail::svg_num(bottom) +
         "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  svg += "<text x=\"" + detail::svg_num((left + right) / 2.0) + "\" y=\"" +
         detail::svg_num(height - 8.0) +
         "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">" + x_label +
         " [" + format_double(x_min) + ", " + format_double(x_max) + "]</text>\n";

  for (const ChartSeries& s : series) {
    if (s.points.empty()) continue;
    svg += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.5\" points=\"";
    bool first_point = true;
    for (const auto& [x, y] : s.points) {
      if (!first_point) svg += ' ';
      first_point = false;
      svg += detail::svg_num(map_x(x)) + "," + detail::svg_num(map_y(y));
    }
    svg += "\"/>\n";
  }
  svg += "</svg>\n";
  return svg;
}

// Accepts either a dashboard CSV (post_id,offset_s,positive,negative; two
// polylines per post, x in seconds) or a feature CSV (post_id,channel,v1..;
// one polyline per row, x is the bin index). Positive series are green,
// negative red.
inline std::string render_csv_chart(std::istream& input) {
  CsvReader reader(input);
  const auto header = reader.next();
  if (!header) fail(ErrorCode::EmptySeries, "empty input");

  std::vector<ChartSeries> series;
  if (header->size() == 4 && (*header)[0] == "post_id" && (*header)[1] == "offset_s" &&
      (*header)[2] == "positive" && (*header)[3] == "negative") {
    std::vector<std::string> post_order;
    std::vector<std::pair<ChartSeries, ChartSeries>> per_post;
    while (auto record = reader.next()) {
      if (record->size() == 1 && (*record)[0].empty()) continue;
      const long line_no = reader.line();
      if (record->size() != 4) fail(ErrorCode::MalformedRow, "expected 4 fields", line_no);
      const auto offset = try_parse_int((*record)[1]);
      const auto pos = try_parse_double((*record)[2]);
      const auto neg = try_parse_double((*record)[3]);
      if (!offset || !pos || !neg) fail(ErrorCode::MalformedRow, "bad numeric field", line_no);
      std::size_t idx = post_order.size();
      for (std::size_t i = 0; i < post_order.size(); ++i) {
        if (post_order[i] == (*record)[0]) {
          idx = i;
          break;
        }
      }
      if (idx == post_order.size()) {
        post_order.push_back((*record)[0]);
        per_post.emplace_back(ChartSeries{(*record)[0] + " positive", "green", {}},
                              ChartSeries{(*record)[0] + " negative", "red", {}});
      }
      per_post[idx].first.points.emplace_back(static_cast<double>(*offset), *pos);
      per_post[idx].second.points.emplace_back(static_cast<double>(*offset), *neg);
    }
    for (auto& [pos_series, neg_series] : per_post) {
      series.push_back(std::move(pos_series));
      series.push_back(std::move(neg_series));
    }
    if (series.empty()) fail(ErrorCode::EmptySeries, "no data rows");
    return render_chart_svg(series, "seconds");
  }

  if (header->size() >= 3 && (*header)[0] == "post_id" && (*header)[1] == "channel") {
    const std::size_t dim = header->size() - 2;
    while (auto record = reader.next()) {
      if (record->size() == 1 && (*record)[0].empty()) continue;
      const long line_no = reader.line();
      if (record->size() != dim + 2) {
        fail(ErrorCode::MalformedRow, "expected " + std::to_string(dim + 2) + " fields", line_no);
      }
      ChartSeries s;
      s.label = (*record)[0] + " " + (*record)[1];
      s.color = ((*record)[1] == "negative" || (*record)[1] == "neg") ? "red" : "green";
      for (std::size_t j = 0; j < dim; ++j) {
        const auto value = try_parse_double((*record)[j + 2]);
        if (!value) fail(ErrorCode::MalformedRow, "bad value", line_no);
        s.points.emplace_back(static_cast<double>(j + 1), *value);
      }
      series.push_back(std::move(s));
    }
    if (series.empty()) fail(ErrorCode::EmptySeries, "no data rows");
    return render_chart_svg(series, "bin");
  }

  fail(ErrorCode::BadHeader, "input is neither a dashboard CSV nor a feature CSV");
}

}  // namespace sentistream
