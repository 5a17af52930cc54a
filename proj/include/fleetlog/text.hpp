#pragma once

#include <string>
#include <string_view>

namespace fleetlog::text {

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);

/// trim + case-fold + collapse internal whitespace runs to single spaces.
std::string normalize(std::string_view s);

bool contains_ci(std::string_view haystack, std::string_view needle);
bool iequals(std::string_view a, std::string_view b);

/// Levenshtein distance (unit costs).
std::size_t edit_distance(std::string_view a, std::string_view b);

}  // namespace fleetlog::text
