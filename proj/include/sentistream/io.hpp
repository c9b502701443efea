#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "sentistream/error.hpp"

namespace sentistream {

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Writes through a temporary file in the same directory and renames into
// place, so a failed writer never leaves a partial file at `path`.
inline void atomic_write(const std::filesystem::path& path,
                         const std::function<void(std::ostream&)>& writer) {
  namespace fs = std::filesystem;
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::IoError, "cannot open " + tmp.string() + " for writing");
    try {
      writer(out);
      out.flush();
      if (!out) fail(ErrorCode::IoError, "write failed for " + tmp.string());
    } catch (...) {
      out.close();
      std::error_code ec;
      fs::remove(tmp, ec);
      throw;
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    fail(ErrorCode::IoError, "cannot rename " + tmp.string() + " to " + path.string());
  }
}

}  // namespace sentistream
