#include "seisvm/utc.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>

#include "seisvm/error.hpp"

namespace seisvm {

namespace {

int parse_digits(std::string_view text, std::size_t pos, std::size_t count) {
  if (pos + count > text.size()) {
    throw ValidationError("timestamp too short: '" + std::string(text) + "'");
  }
  int value = 0;
  for (std::size_t i = pos; i < pos + count; ++i) {
    const char c = text[i];
    if (c < '0' || c > '9') {
      throw ValidationError("bad digit in timestamp: '" + std::string(text) +
                            "'");
    }
    value = value * 10 + (c - '0');
  }
  return value;
}

void expect_char(std::string_view text, std::size_t pos, char c) {
  if (pos >= text.size() || text[pos] != c) {
    throw ValidationError("malformed timestamp: '" + std::string(text) + "'");
  }
}

}  // namespace

UtcTime parse_rfc3339(std::string_view text) {
  using namespace std::chrono;
  // YYYY-MM-DDTHH:MM:SS[.fff...](Z|+HH:MM|-HH:MM)
  const int y = parse_digits(text, 0, 4);
  expect_char(text, 4, '-');
  const int mo = parse_digits(text, 5, 2);
  expect_char(text, 7, '-');
  const int d = parse_digits(text, 8, 2);
  if (text.size() <= 10 || (text[10] != 'T' && text[10] != 't' && text[10] != ' ')) {
    throw ValidationError("malformed timestamp: '" + std::string(text) + "'");
  }
  const int hh = parse_digits(text, 11, 2);
  expect_char(text, 13, ':');
  const int mm = parse_digits(text, 14, 2);
  expect_char(text, 16, ':');
  const int ss = parse_digits(text, 17, 2);

  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || hh > 23 || mm > 59 || ss > 60) {
    throw ValidationError("timestamp out of range: '" + std::string(text) + "'");
  }

  std::size_t pos = 19;
  std::int64_t frac_ns = 0;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    std::int64_t scale = 100'000'000;
    const std::size_t first = pos;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
      frac_ns += (text[pos] - '0') * scale;
      scale /= 10;
      ++pos;
    }
    if (pos == first) {
      throw ValidationError("empty fraction in timestamp: '" + std::string(text) + "'");
    }
  }

  std::int64_t offset_s = 0;
  if (pos < text.size() && (text[pos] == 'Z' || text[pos] == 'z')) {
    ++pos;
  } else if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
    const int sign = text[pos] == '+' ? 1 : -1;
    const int oh = parse_digits(text, pos + 1, 2);
    expect_char(text, pos + 3, ':');
    const int om = parse_digits(text, pos + 4, 2);
    offset_s = sign * (oh * 3600 + om * 60);
    pos += 6;
  } else {
    throw ValidationError("timestamp lacks UTC designator: '" + std::string(text) + "'");
  }
  if (pos != text.size()) {
    throw ValidationError("trailing text in timestamp: '" + std::string(text) + "'");
  }

  const std::int64_t days = sys_days{ymd}.time_since_epoch().count();
  const std::int64_t secs = days * 86400 + hh * 3600 + mm * 60 + ss - offset_s;
  return UtcTime{secs * kNanosPerSecond + frac_ns};
}

std::string format_rfc3339(UtcTime t) {
  using namespace std::chrono;
  std::int64_t secs = t.ns / kNanosPerSecond;
  std::int64_t frac = t.ns % kNanosPerSecond;
  if (frac < 0) {
    frac += kNanosPerSecond;
    --secs;
  }
  std::int64_t days = secs / 86400;
  std::int64_t rem = secs % 86400;
  if (rem < 0) {
    rem += 86400;
    --days;
  }
  const year_month_day ymd{sys_days{std::chrono::days{days}}};
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d",
                static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()), static_cast<int>(rem / 3600),
                static_cast<int>(rem % 3600 / 60), static_cast<int>(rem % 60));
  std::string out = buf;
  if (frac != 0) {
    char fbuf[16];
    std::snprintf(fbuf, sizeof fbuf, ".%09lld", static_cast<long long>(frac));
    std::string f = fbuf;
    while (f.back() == '0') f.pop_back();
    out += f;
  }
  out += 'Z';
  return out;
}

UtcTime add_seconds(UtcTime t, double seconds) {
  return UtcTime{t.ns + std::llround(seconds * static_cast<double>(kNanosPerSecond))};
}

double seconds_between(UtcTime a, UtcTime b) {
  return static_cast<double>(a.ns - b.ns) / static_cast<double>(kNanosPerSecond);
}

}  // namespace seisvm
