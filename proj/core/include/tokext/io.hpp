#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace tokext::io {

// Throws Error(kIo) naming the path.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

// Splits on '\n', dropping one trailing '\r' per line. A final newline does
// not produce an extra empty line; interior empty lines are kept.
std::vector<std::string> split_lines(std::string_view text);
std::vector<std::string> read_lines(const std::filesystem::path& path);

}  // namespace tokext::io
