// Formatting and file helpers shared by the CLI: shortest round-trip float
// text for CSV, fixed 17-significant-digit output for transformed points, and
// atomic file writes (temp + rename).
#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <system_error>

#include "ncrec/errors.hpp"

namespace ncrec {

// Shortest decimal representation that parses back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// 17 significant digits, scientific.
inline std::string format_sig17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.16e", v);
  return std::string(buf);
}

inline void atomic_write_file(const std::string& path, const std::string& content) {
  const std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::InvalidValue, "cannot open output file " + tmp.string());
    out << content;
    if (!out.good())
      throw Error(ErrorKind::InvalidValue, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) throw Error(ErrorKind::InvalidValue, "rename failed for " + target.string());
}

}  // namespace ncrec
