#pragma once

#include <charconv>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "sentistream/error.hpp"

namespace sentistream {

// RFC-4180 record reader. Handles quoted fields with embedded commas,
// doubled quotes and newlines; accepts both \n and \r\n line endings.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  // Returns the next record, or nullopt at end of input. line() reports the
  // 1-based line the record started on.
  std::optional<std::vector<std::string>> next() {
    int c = in_.get();
    if (c == std::istream::traits_type::eof()) return std::nullopt;
    record_line_ = line_;

    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    while (true) {
      if (c == std::istream::traits_type::eof()) {
        if (quoted) fail(ErrorCode::MalformedRow, "unterminated quoted field", record_line_);
        fields.push_back(std::move(field));
        return fields;
      }
      const char ch = static_cast<char>(c);
      if (quoted) {
        if (ch == '"') {
          if (in_.peek() == '"') {
            in_.get();
            field.push_back('"');
          } else {
            quoted = false;
          }
        } else {
          if (ch == '\n') ++line_;
          field.push_back(ch);
        }
      } else if (ch == '"' && field.empty()) {
        quoted = true;
      } else if (ch == ',') {
        fields.push_back(std::move(field));
        field.clear();
      } else if (ch == '\n' || ch == '\r') {
        if (ch == '\r' && in_.peek() == '\n') in_.get();
        ++line_;
        fields.push_back(std::move(field));
        return fields;
      } else {
        field.push_back(ch);
      }
      c = in_.get();
    }
  }

  long line() const noexcept { return record_line_; }

 private:
  std::istream& in_;
  long line_ = 1;
  long record_line_ = 1;
};

inline std::string csv_escape(std::string_view field) {
  const bool needs_quotes =
      field.find_first_of(",\"\n\r") != std::string_view::npos;
  if (!needs_quotes) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

inline void write_csv_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << csv_escape(fields[i]);
  }
  out << '\n';
}

// Shortest decimal representation that round-trips to the same double.
inline std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

inline std::optional<std::int64_t> try_parse_int(std::string_view text) {
  std::int64_t value = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last || text.empty()) return std::nullopt;
  return value;
}

inline std::optional<double> try_parse_double(std::string_view text) {
  double value = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last || text.empty()) return std::nullopt;
  return value;
}

}  // namespace sentistream
