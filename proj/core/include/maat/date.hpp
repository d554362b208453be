#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace maat {

/// Proleptic Gregorian calendar date, stored as days since 1970-01-01.
/// All external formats use ISO "YYYY-MM-DD".
class Date {
 public:
  Date() = default;

  /// Throws ParseError on out-of-range components (e.g. February 30th).
  static Date from_ymd(int year, int month, int day);

  /// Parses "YYYY-MM-DD"; throws ParseError otherwise.
  static Date parse(std::string_view iso);
  static std::optional<Date> try_parse(std::string_view iso) noexcept;

  static Date from_days(std::int32_t days) { return Date(days); }

  std::string to_string() const;
  std::int32_t days_since_epoch() const { return days_; }

  int year() const;
  int month() const;
  int day() const;

  Date add_days(std::int32_t n) const { return Date(days_ + n); }

  /// Difference in whole days.
  friend std::int32_t operator-(Date a, Date b) { return a.days_ - b.days_; }
  friend auto operator<=>(Date, Date) = default;

 private:
  explicit Date(std::int32_t days) : days_(days) {}
  std::int32_t days_ = 0;
};

/// Fixed year length used for report-age computations.
inline constexpr double kDaysPerYear = 365.25;

}  // namespace maat
