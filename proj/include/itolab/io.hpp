#pragma once

#include <filesystem>
#include <string>

namespace itolab {

/// Writes `content` to a temporary sibling and renames it over `path`, so
/// readers never see a partial file.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

}  // namespace itolab
