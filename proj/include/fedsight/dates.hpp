#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace fedsight {

// Calendar date in the proleptic Gregorian calendar. Meeting ids and
// availability dates are ISO-8601 "YYYY-MM-DD" strings throughout.
struct IsoDate {
  int year = 1970;
  int month = 1;
  int day = 1;

  static IsoDate parse(std::string_view text);  // throws ParseError
  static bool try_parse(std::string_view text, IsoDate& out);

  std::string to_string() const;

  // Days since 1970-01-01; negative before the epoch.
  std::int64_t to_epoch_days() const;
  static IsoDate from_epoch_days(std::int64_t days);

  IsoDate minus_days(int days) const {
    return from_epoch_days(to_epoch_days() - days);
  }
  IsoDate plus_days(int days) const {
    return from_epoch_days(to_epoch_days() + days);
  }

  friend auto operator<=>(const IsoDate&, const IsoDate&) = default;
};

}  // namespace fedsight
