#include "seisvm/io_util.hpp"

#include <bit>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "seisvm/error.hpp"

namespace seisvm::io {

std::string format_real(double v) {
  char buf[32];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

double parse_real(std::string_view token, std::string_view what) {
  const std::string s(token);
  if (s.empty()) {
    throw ValidationError("empty " + std::string(what));
  }
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || (errno == ERANGE && std::abs(v) > 1.0)) {
    throw ValidationError("invalid " + std::string(what) + ": '" + s + "'");
  }
  return v;
}

long long parse_integer(std::string_view token, std::string_view what) {
  long long v = 0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (!token.empty() && token.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || first == last) {
    throw ValidationError("invalid " + std::string(what) + ": '" + std::string(token) + "'");
  }
  return v;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open '" + path.string() + "' for reading");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open '" + path.string() + "' for writing");
  }
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) {
    throw IoError("write failed for '" + path.string() + "'");
  }
}

namespace {

static_assert(sizeof(double) == 8);

std::uint64_t to_le(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xffu) << (8 * (7 - i));
    return r;
  }
}

}  // namespace

std::vector<double> read_f64le(const std::filesystem::path& path) {
  const std::string bytes = read_text(path);
  if (bytes.size() % 8 != 0) {
    throw IoError("'" + path.string() + "' size " + std::to_string(bytes.size()) +
                  " is not a multiple of 8 bytes");
  }
  std::vector<double> out(bytes.size() / 8);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint64_t raw = 0;
    std::memcpy(&raw, bytes.data() + 8 * i, 8);
    out[i] = std::bit_cast<double>(to_le(raw));
  }
  return out;
}

void write_f64le(const std::filesystem::path& path, std::span<const double> values) {
  std::string bytes(values.size() * 8, '\0');
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::uint64_t raw = to_le(std::bit_cast<std::uint64_t>(values[i]));
    std::memcpy(bytes.data() + 8 * i, &raw, 8);
  }
  write_text(path, bytes);
}

}  // namespace seisvm::io
