#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "sentistream/csv.hpp"
#include "sentistream/error.hpp"

namespace sentistream {

// Per-comment polarity triple. Components are nonnegative and sum to 1.
struct SentimentScore {
  double positive = 0.0;
  double negative = 0.0;
  double neutral = 1.0;
};

// Token valences in [-1, +1] plus the set of negation markers. Read-only
// after load; safe to share across threads.
struct SentimentLexicon {
  std::unordered_map<std::string, double> entries;
  std::unordered_set<std::string> negators;
  std::string source_path;
};

namespace detail {
inline bool is_ascii_alnum(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}
inline char ascii_lower(unsigned char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c + 32) : static_cast<char>(c);
}
}  // namespace detail

// Lowercased tokens split on runs of ASCII non-alphanumerics. Bytes >= 0x80
// (non-Latin scripts, multibyte sequences) pass through unchanged, so a
// non-ASCII word survives as a single token per run.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char c : text) {
    if (detail::is_ascii_alnum(c) || c >= 0x80) {
      current.push_back(detail::ascii_lower(c));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

// Mass-and-normalize scoring. Each token contributes one unit of mass:
// a negator contributes neutral 1 and arms a sign flip for the next
// nonzero-valence token within the following 3 tokens (one flip per
// negator, consumed on use); any other token with valence v contributes
// (max(v,0), max(-v,0), 1-|v|). Masses are normalized to sum 1; an empty
// token list scores fully neutral.
inline SentimentScore score_text(std::string_view text, const SentimentLexicon& lexicon) {
  const std::vector<std::string> tokens = tokenize(text);
  if (tokens.empty()) return SentimentScore{0.0, 0.0, 1.0};

  double pos = 0.0;
  double neg = 0.0;
  double neu = 0.0;
  std::vector<std::size_t> flip_expiry;  // last token index each pending flip may touch

  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::string& token = tokens[i];
    if (lexicon.negators.count(token)) {
      neu += 1.0;
      flip_expiry.push_back(i + 3);
      continue;
    }
    double valence = 0.0;
    if (auto it = lexicon.entries.find(token); it != lexicon.entries.end()) {
      valence = it->second;
    }
    if (valence != 0.0 && !flip_expiry.empty()) {
      std::size_t live = 0;
      for (std::size_t expiry : flip_expiry) {
        if (expiry >= i) ++live;
      }
      flip_expiry.clear();  // consumed or already expired either way
      if (live % 2 == 1) valence = -valence;
    }
    pos += std::max(valence, 0.0);
    neg += std::max(-valence, 0.0);
    neu += 1.0 - std::abs(valence);
  }

  const double total = pos + neg + neu;
  return SentimentScore{pos / total, neg / total, neu / total};
}

// TSV lexicon: `token<TAB>valence` per line, optional third column `NEG`
// marking a negator (valence must be 0). `#` lines and blank lines are
// skipped. Tokens are case-folded; a token may appear only once.
inline SentimentLexicon parse_lexicon(std::istream& in, const std::string& source_path = "") {
  SentimentLexicon lexicon;
  lexicon.source_path = source_path;
  std::unordered_set<std::string> seen;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;

    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t tab = line.find('\t', start);
      if (tab == std::string::npos) {
        fields.push_back(line.substr(start));
        break;
      }
      fields.push_back(line.substr(start, tab - start));
      start = tab + 1;
    }
    if (fields.size() != 2 && fields.size() != 3) {
      fail(ErrorCode::MalformedRow, "expected token<TAB>valence[<TAB>NEG]", line_no);
    }

    std::string token = fields[0];
    for (char& c : token) c = detail::ascii_lower(static_cast<unsigned char>(c));
    if (token.empty()) fail(ErrorCode::MalformedRow, "empty token", line_no);
    for (unsigned char c : token) {
      if (c == ' ' || c == '\t' || c == '\v' || c == '\f') {
        fail(ErrorCode::MalformedRow, "token contains whitespace: '" + token + "'", line_no);
      }
    }

    const auto valence = try_parse_double(fields[1]);
    if (!valence || !std::isfinite(*valence)) {
      fail(ErrorCode::MalformedRow, "bad valence '" + fields[1] + "'", line_no);
    }
    if (*valence < -1.0 || *valence > 1.0) {
      fail(ErrorCode::ValenceOutOfRange,
           "valence " + fields[1] + " outside [-1, 1] for '" + token + "'", line_no);
    }

    const bool is_negator = fields.size() == 3;
    if (is_negator) {
      if (fields[2] != "NEG") {
        fail(ErrorCode::MalformedRow, "unknown marker '" + fields[2] + "'", line_no);
      }
      if (*valence != 0.0) {
        fail(ErrorCode::MalformedRow, "negator '" + token + "' must carry valence 0", line_no);
      }
    }

    if (!seen.insert(token).second) {
      fail(ErrorCode::DuplicateToken, "token '" + token + "' listed twice");
    }
    if (is_negator) {
      lexicon.negators.insert(token);
    } else {
      lexicon.entries.emplace(token, *valence);
    }
  }
  return lexicon;
}

inline SentimentLexicon load_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open lexicon " + path.string());
  return parse_lexicon(in, path.string());
}

}  // namespace sentistream
