#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace seisvm::io {

/// Shortest text that parses back to exactly `v` (at most 17 significant digits).
std::string format_real(double v);

/// Strict full-token parse; throws ValidationError naming `what` on failure.
double parse_real(std::string_view token, std::string_view what);
long long parse_integer(std::string_view token, std::string_view what);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

std::vector<double> read_f64le(const std::filesystem::path& path);
void write_f64le(const std::filesystem::path& path, std::span<const double> values);

}  // namespace seisvm::io
