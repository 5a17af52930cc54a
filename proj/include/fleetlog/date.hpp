#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace fleetlog {

/// Calendar date handled as days since the civil epoch. Serialized form is
/// always ISO-8601 (YYYY-MM-DD), which also makes lexicographic comparison of
/// the serialized form agree with chronological order.
class Date {
 public:
  Date() = default;
  explicit Date(std::chrono::sys_days d) : days_(d) {}
  Date(int year, unsigned month, unsigned day)
      : days_(std::chrono::sys_days(std::chrono::year{year} / month / day)) {}

  static Date parse(const std::string& iso);
  static bool looks_like(const std::string& text);

  std::string to_string() const;

  Date plus_days(int n) const { return Date(days_ + std::chrono::days(n)); }
  int days_until(Date other) const {
    return static_cast<int>((other.days_ - days_).count());
  }

  auto operator<=>(const Date&) const = default;

 private:
  std::chrono::sys_days days_{};
};

struct DateInterval {
  Date start;
  Date end;  // inclusive

  bool contains(Date d) const { return start <= d && d <= end; }
  /// Number of calendar days in [start, end].
  int length_days() const { return start.days_until(end) + 1; }
};

}  // namespace fleetlog
