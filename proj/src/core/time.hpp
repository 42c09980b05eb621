#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace sfwi {

// Seconds since the Unix epoch, UTC.
struct Timestamp {
  std::int64_t seconds = 0;

  friend auto operator<=>(const Timestamp&, const Timestamp&) = default;
};

inline constexpr std::int64_t kSlotSeconds = 600;  // 10-minute sampling grid

inline Timestamp slot_floor(Timestamp t) {
  std::int64_t s = t.seconds / kSlotSeconds * kSlotSeconds;
  if (s > t.seconds) s -= kSlotSeconds;
  return {s};
}

inline Timestamp slot_ceil(Timestamp t) {
  Timestamp f = slot_floor(t);
  return f.seconds == t.seconds ? f : Timestamp{f.seconds + kSlotSeconds};
}

// Half-open [start, end).
struct TimeRange {
  Timestamp start;
  Timestamp end;

  bool valid() const noexcept { return start < end; }
  bool contains(Timestamp t) const noexcept { return start <= t && t < end; }
  std::int64_t duration_seconds() const noexcept { return end.seconds - start.seconds; }

  friend bool operator==(const TimeRange&, const TimeRange&) = default;
};

TimeRange make_time_range(Timestamp start, Timestamp end);

// Fixed offset from UTC, in minutes (no DST).
struct UtcOffset {
  int minutes = 600;

  friend bool operator==(const UtcOffset&, const UtcOffset&) = default;
};

UtcOffset parse_utc_offset(std::string_view text);
std::string format_utc_offset(UtcOffset offset);

Timestamp from_civil(int year, unsigned month, unsigned day, int hour = 0, int minute = 0,
                     int second = 0);

// "YYYY-MM-DD HH:MM:SS" in local time, converted to UTC.
Timestamp parse_local_datetime(std::string_view text, UtcOffset offset);

// Accepts "YYYY-MM-DD", "YYYY-MM-DDTHH:MM", "YYYY-MM-DDTHH:MM:SS" with optional 'Z' or
// a "+HH:MM"/"-HH:MM" suffix. Without a suffix the value is taken as UTC.
Timestamp parse_iso8601(std::string_view text);

// "YYYY-MM-DDTHH:MM:SSZ".
std::string format_iso8601(Timestamp t);

// "YYYY-MM-DD HH:MM:SS" in the given local offset.
std::string format_local_datetime(Timestamp t, UtcOffset offset);

// Seconds since local midnight, in [0, 86400).
int local_second_of_day(Timestamp t, UtcOffset offset);

// Parses "HH:MM" into seconds since midnight.
int parse_clock(std::string_view text);

// All slot-grid timestamps in [range.start, range.end).
std::vector<Timestamp> slots_in(const TimeRange& range);

}  // namespace sfwi
