#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mdseval::dates {

struct Date {
  int year = 0;
  int month = 0;
  int day = 0;

  auto operator<=>(const Date&) const = default;

  bool valid() const;
  std::string iso() const;  // YYYY-MM-DD

  // Days since 1970-01-01 (may be negative).
  long serial() const;
  Date plus_days(long n) const;

  static std::optional<Date> parse_iso(std::string_view s);
};

long days_between(const Date& a, const Date& b);  // b - a

// Extracts calendar dates from free text, in order of appearance.
// Recognized forms: YYYY年M月D日, YYYY-M-D / YYYY/M/D / YYYY.M.D, and M月D日
// (year taken from the most recent full date, falling back to the anchor).
// Relative expressions (当天/当日/同日, 次日/翌日/第二天, 前一天/前一日) resolve
// against the most recent date or the anchor.
std::vector<Date> extract_dates(std::string_view utf8_text,
                                std::optional<Date> anchor = std::nullopt);

}  // namespace mdseval::dates
