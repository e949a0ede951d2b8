#include "mdseval/dates.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <regex>

namespace mdseval::dates {

namespace {

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
  static constexpr std::array<int, 12> kDays = {31, 28, 31, 30, 31, 30,
                                                31, 31, 30, 31, 30, 31};
  if (m == 2 && is_leap(y)) return 29;
  return kDays[m - 1];
}

// Howard Hinnant's civil-days algorithms.
long days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const long era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<long>(doe) - 719468;
}

Date civil_from_days(long z) {
  z += 719468;
  const long era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const long y = static_cast<long>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp + (mp < 10 ? 3 : -9);
  return Date{static_cast<int>(y + (m <= 2)), static_cast<int>(m),
              static_cast<int>(d)};
}

}  // namespace

bool Date::valid() const {
  return year >= 1 && month >= 1 && month <= 12 && day >= 1 &&
         day <= days_in_month(year, month);
}

std::string Date::iso() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
  return buf;
}

long Date::serial() const { return days_from_civil(year, month, day); }

Date Date::plus_days(long n) const { return civil_from_days(serial() + n); }

std::optional<Date> Date::parse_iso(std::string_view s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  auto num = [&](size_t off, size_t len, int& out) {
    auto res = std::from_chars(s.data() + off, s.data() + off + len, out);
    return res.ec == std::errc{} && res.ptr == s.data() + off + len;
  };
  Date d;
  if (!num(0, 4, d.year) || !num(5, 2, d.month) || !num(8, 2, d.day))
    return std::nullopt;
  if (!d.valid()) return std::nullopt;
  return d;
}

long days_between(const Date& a, const Date& b) { return b.serial() - a.serial(); }

namespace {

struct Hit {
  size_t pos;
  size_t end;
  int kind;  // 0 = full date, 1 = month-day, 2 = relative
  Date date; // kind 0
  int month = 0, day = 0;  // kind 1
  long offset = 0;         // kind 2
};

void collect(const std::string& s, const std::regex& re, int kind,
             std::vector<Hit>& hits, long offset = 0) {
  for (auto it = std::sregex_iterator(s.begin(), s.end(), re);
       it != std::sregex_iterator(); ++it) {
    Hit h;
    h.pos = static_cast<size_t>(it->position());
    h.end = h.pos + static_cast<size_t>(it->length());
    h.kind = kind;
    h.offset = offset;
    if (kind == 0) {
      h.date = Date{std::stoi((*it)[1]), std::stoi((*it)[2]), std::stoi((*it)[3])};
      if (!h.date.valid()) continue;
    } else if (kind == 1) {
      h.month = std::stoi((*it)[1]);
      h.day = std::stoi((*it)[2]);
      if (h.month < 1 || h.month > 12 || h.day < 1 || h.day > 31) continue;
    }
    hits.push_back(h);
  }
}

bool overlaps(const Hit& h, const std::vector<Hit>& taken) {
  return std::any_of(taken.begin(), taken.end(), [&](const Hit& t) {
    return h.pos < t.end && t.pos < h.end;
  });
}

}  // namespace

std::vector<Date> extract_dates(std::string_view utf8_text,
                                std::optional<Date> anchor) {
  static const std::regex kFullCjk("([0-9]{4})年([0-9]{1,2})月([0-9]{1,2})日");
  static const std::regex kFullSep(
      "([0-9]{4})[-/.]([0-9]{1,2})[-/.]([0-9]{1,2})");
  static const std::regex kMonthDay("([0-9]{1,2})月([0-9]{1,2})日");
  static const std::regex kSameDay("当天|当日|同日");
  static const std::regex kNextDay("次日|翌日|第二天");
  static const std::regex kPrevDay("前一天|前一日");

  const std::string s(utf8_text);
  std::vector<Hit> full;
  collect(s, kFullCjk, 0, full);
  collect(s, kFullSep, 0, full);

  std::vector<Hit> rest;
  collect(s, kMonthDay, 1, rest);
  collect(s, kSameDay, 2, rest, 0);
  collect(s, kNextDay, 2, rest, 1);
  collect(s, kPrevDay, 2, rest, -1);

  std::vector<Hit> hits = full;
  for (const Hit& h : rest)
    if (!overlaps(h, full)) hits.push_back(h);
  std::sort(hits.begin(), hits.end(),
            [](const Hit& a, const Hit& b) { return a.pos < b.pos; });

  std::vector<Date> out;
  std::optional<Date> current = anchor;
  for (const Hit& h : hits) {
    if (h.kind == 0) {
      out.push_back(h.date);
      current = h.date;
    } else if (h.kind == 1) {
      // year context from the running date, else the anchor
      std::optional<Date> ctx = current ? current : anchor;
      if (!ctx) continue;
      Date d{ctx->year, h.month, h.day};
      if (!d.valid()) continue;
      out.push_back(d);
      current = d;
    } else {
      std::optional<Date> base = current ? current : anchor;
      if (!base) continue;
      Date d = base->plus_days(h.offset);
      out.push_back(d);
      current = d;
    }
  }
  return out;
}

}  // namespace mdseval::dates
