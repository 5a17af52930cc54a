#include "fleetlog/date.hpp"

#include <cctype>
#include <cstdio>

namespace fleetlog {

Date Date::parse(const std::string& iso) {
  if (!looks_like(iso)) {
    throw std::invalid_argument("not an ISO date (YYYY-MM-DD): '" + iso + "'");
  }
  int y = std::stoi(iso.substr(0, 4));
  unsigned m = static_cast<unsigned>(std::stoi(iso.substr(5, 2)));
  unsigned d = static_cast<unsigned>(std::stoi(iso.substr(8, 2)));
  auto ymd = std::chrono::year{y} / m / d;
  if (!ymd.ok()) {
    throw std::invalid_argument("invalid calendar date: '" + iso + "'");
  }
  return Date(std::chrono::sys_days(ymd));
}

bool Date::looks_like(const std::string& text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return false;
  for (size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u}) {
    if (!std::isdigit(static_cast<unsigned char>(text[i]))) return false;
  }
  return true;
}

std::string Date::to_string() const {
  std::chrono::year_month_day ymd(days_);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", int(ymd.year()),
                unsigned(ymd.month()), unsigned(ymd.day()));
  return buf;
}

}  // namespace fleetlog
