#include "core/time.hpp"

#include <cctype>
#include <charconv>
#include <chrono>
#include <cstdio>

#include "core/error.hpp"

namespace sfwi {

namespace {

int read_int(std::string_view text, std::size_t pos, std::size_t len, std::string_view what) {
  if (pos + len > text.size()) throw Error(ErrorCode::Parse, "truncated timestamp: " + std::string(text));
  int value = 0;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(text[i])))
      throw Error(ErrorCode::Parse, "bad " + std::string(what) + " in timestamp: " + std::string(text));
    value = value * 10 + (text[i] - '0');
  }
  return value;
}

void expect_char(std::string_view text, std::size_t pos, char c) {
  if (pos >= text.size() || text[pos] != c)
    throw Error(ErrorCode::Parse, "malformed timestamp: " + std::string(text));
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

struct Civil {
  int year, month, day, hour, minute, second;
};

Civil to_civil(Timestamp t) {
  using namespace std::chrono;
  sys_seconds tp{seconds{t.seconds}};
  auto days = floor<std::chrono::days>(tp);
  year_month_day ymd{days};
  hh_mm_ss hms{tp - days};
  return {static_cast<int>(ymd.year()), static_cast<int>(static_cast<unsigned>(ymd.month())),
          static_cast<int>(static_cast<unsigned>(ymd.day())), static_cast<int>(hms.hours().count()),
          static_cast<int>(hms.minutes().count()), static_cast<int>(hms.seconds().count())};
}

}  // namespace

TimeRange make_time_range(Timestamp start, Timestamp end) {
  TimeRange r{start, end};
  if (!r.valid()) throw Error(ErrorCode::InvalidArgument, "time range start must precede end");
  return r;
}

Timestamp from_civil(int year, unsigned month, unsigned day, int hour, int minute, int second) {
  using namespace std::chrono;
  year_month_day ymd{std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}};
  if (!ymd.ok() || hour < 0 || hour > 23 || minute < 0 || minute > 59 || second < 0 || second > 59)
    throw Error(ErrorCode::Parse, "invalid calendar date/time");
  auto tp = sys_days{ymd} + hours{hour} + minutes{minute} + seconds{second};
  return {tp.time_since_epoch().count()};
}

UtcOffset parse_utc_offset(std::string_view text) {
  text = trim(text);
  if (text == "Z" || text == "UTC") return {0};
  if (text.empty() || (text[0] != '+' && text[0] != '-'))
    throw Error(ErrorCode::Parse, "UTC offset must look like +HH:MM", "utc-offset");
  int sign = text[0] == '-' ? -1 : 1;
  int hh = read_int(text, 1, 2, "offset hour");
  int mm = 0;
  if (text.size() > 3) {
    std::size_t p = 3;
    if (text[p] == ':') ++p;
    mm = read_int(text, p, 2, "offset minute");
    if (p + 2 != text.size()) throw Error(ErrorCode::Parse, "trailing characters in UTC offset", "utc-offset");
  }
  if (hh > 14 || mm > 59) throw Error(ErrorCode::Parse, "UTC offset out of range", "utc-offset");
  return {sign * (hh * 60 + mm)};
}

std::string format_utc_offset(UtcOffset offset) {
  int m = offset.minutes < 0 ? -offset.minutes : offset.minutes;
  char buf[16];
  std::snprintf(buf, sizeof buf, "%c%02d:%02d", offset.minutes < 0 ? '-' : '+', m / 60, m % 60);
  return buf;
}

Timestamp parse_local_datetime(std::string_view text, UtcOffset offset) {
  text = trim(text);
  int y = read_int(text, 0, 4, "year");
  expect_char(text, 4, '-');
  int mo = read_int(text, 5, 2, "month");
  expect_char(text, 7, '-');
  int d = read_int(text, 8, 2, "day");
  expect_char(text, 10, ' ');
  int h = read_int(text, 11, 2, "hour");
  expect_char(text, 13, ':');
  int mi = read_int(text, 14, 2, "minute");
  expect_char(text, 16, ':');
  int s = read_int(text, 17, 2, "second");
  if (text.size() != 19) throw Error(ErrorCode::Parse, "trailing characters in timestamp");
  Timestamp local = from_civil(y, static_cast<unsigned>(mo), static_cast<unsigned>(d), h, mi, s);
  return {local.seconds - static_cast<std::int64_t>(offset.minutes) * 60};
}

Timestamp parse_iso8601(std::string_view text) {
  text = trim(text);
  int y = read_int(text, 0, 4, "year");
  expect_char(text, 4, '-');
  int mo = read_int(text, 5, 2, "month");
  expect_char(text, 7, '-');
  int d = read_int(text, 8, 2, "day");
  int h = 0, mi = 0, s = 0;
  std::size_t pos = 10;
  if (pos < text.size() && (text[pos] == 'T' || text[pos] == ' ')) {
    h = read_int(text, pos + 1, 2, "hour");
    expect_char(text, pos + 3, ':');
    mi = read_int(text, pos + 4, 2, "minute");
    pos += 6;
    if (pos < text.size() && text[pos] == ':') {
      s = read_int(text, pos + 1, 2, "second");
      pos += 3;
    }
  }
  std::int64_t shift = 0;
  if (pos < text.size()) {
    std::string_view zone = text.substr(pos);
    if (zone != "Z") shift = static_cast<std::int64_t>(parse_utc_offset(zone).minutes) * 60;
  }
  Timestamp t = from_civil(y, static_cast<unsigned>(mo), static_cast<unsigned>(d), h, mi, s);
  return {t.seconds - shift};
}

std::string format_iso8601(Timestamp t) {
  Civil c = to_civil(t);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ", c.year, c.month, c.day, c.hour,
                c.minute, c.second);
  return buf;
}

std::string format_local_datetime(Timestamp t, UtcOffset offset) {
  Civil c = to_civil({t.seconds + static_cast<std::int64_t>(offset.minutes) * 60});
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d %02d:%02d:%02d", c.year, c.month, c.day, c.hour,
                c.minute, c.second);
  return buf;
}

int local_second_of_day(Timestamp t, UtcOffset offset) {
  std::int64_t local = t.seconds + static_cast<std::int64_t>(offset.minutes) * 60;
  std::int64_t r = local % 86400;
  if (r < 0) r += 86400;
  return static_cast<int>(r);
}

int parse_clock(std::string_view text) {
  text = trim(text);
  int h = read_int(text, 0, 2, "hour");
  expect_char(text, 2, ':');
  int m = read_int(text, 3, 2, "minute");
  if (text.size() != 5 || h > 24 || m > 59 || (h == 24 && m != 0))
    throw Error(ErrorCode::Parse, "clock time must be HH:MM");
  return h * 3600 + m * 60;
}

std::vector<Timestamp> slots_in(const TimeRange& range) {
  std::vector<Timestamp> out;
  for (Timestamp t = slot_ceil(range.start); t < range.end; t.seconds += kSlotSeconds) out.push_back(t);
  return out;
}

}  // namespace sfwi
