#include "fedsight/dates.hpp"

#include <cstdio>

#include "fedsight/errors.hpp"

namespace fedsight {

namespace {

bool is_leap(int y) { return y % 4 == 0 && (y % 100 != 0 || y % 400 == 0); }

int days_in_month(int y, int m) {
  static const int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m == 2 && is_leap(y)) {
    return 29;
  }
  return kDays[m - 1];
}

}  // namespace

bool IsoDate::try_parse(std::string_view text, IsoDate& out) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
    return false;
  }
  auto digits = [](std::string_view s) {
    long v = 0;
    for (char c : s) {
      if (c < '0' || c > '9') {
        return -1L;
      }
      v = v * 10 + (c - '0');
    }
    return v;
  };
  long y = digits(text.substr(0, 4));
  long m = digits(text.substr(5, 2));
  long d = digits(text.substr(8, 2));
  if (y < 0 || m < 1 || m > 12 || d < 1) {
    return false;
  }
  if (d > days_in_month(static_cast<int>(y), static_cast<int>(m))) {
    return false;
  }
  out = IsoDate{static_cast<int>(y), static_cast<int>(m), static_cast<int>(d)};
  return true;
}

IsoDate IsoDate::parse(std::string_view text) {
  IsoDate out;
  if (!try_parse(text, out)) {
    throw ParseError("invalid ISO date '" + std::string(text) +
                     "', expected YYYY-MM-DD");
  }
  return out;
}

std::string IsoDate::to_string() const {
  char buffer[16];
  std::snprintf(buffer, sizeof(buffer), "%04d-%02d-%02d", year, month, day);
  return buffer;
}

// Civil day arithmetic after Howard Hinnant's chrono algorithms.
std::int64_t IsoDate::to_epoch_days() const {
  std::int64_t y = year - (month <= 2);
  std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  std::int64_t yoe = y - era * 400;
  std::int64_t doy = (153 * (month + (month > 2 ? -3 : 9)) + 2) / 5 + day - 1;
  std::int64_t doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + doe - 719468;
}

IsoDate IsoDate::from_epoch_days(std::int64_t days) {
  std::int64_t z = days + 719468;
  std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  std::int64_t doe = z - era * 146097;
  std::int64_t yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  std::int64_t y = yoe + era * 400;
  std::int64_t doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  std::int64_t mp = (5 * doy + 2) / 153;
  std::int64_t d = doy - (153 * mp + 2) / 5 + 1;
  std::int64_t m = mp + (mp < 10 ? 3 : -9);
  return IsoDate{static_cast<int>(y + (m <= 2)), static_cast<int>(m),
                 static_cast<int>(d)};
}

}  // namespace fedsight
