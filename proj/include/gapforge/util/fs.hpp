#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "gapforge/error.hpp"

namespace gapforge::detail {

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) fail(ErrorCode::kIoError, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Write-then-rename so readers never observe a partial file.
inline void write_file_atomic(const std::filesystem::path& p, std::string_view contents) {
  std::error_code ec;
  std::filesystem::create_directories(p.parent_path(), ec);
  if (ec) fail(ErrorCode::kIoError, "cannot create " + p.parent_path().string() + ": " + ec.message());
  auto tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::kIoError, "cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) fail(ErrorCode::kIoError, "short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, p, ec);
  if (ec) fail(ErrorCode::kIoError, "cannot rename into " + p.string() + ": " + ec.message());
}

}  // namespace gapforge::detail
