#pragma once

#include <filesystem>
#include <string>

#include "debate/errors.hpp"

namespace debate {

// Whole-file read; throws IoError when the file is missing or unreadable.
std::string read_file(const std::filesystem::path& path);

// Crash-safe write: parent directories created, content written to a
// sibling temp file, then renamed over the target.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace debate
