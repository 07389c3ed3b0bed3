#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace castl::util {

std::size_t edit_distance(std::string_view a, std::string_view b);

/// Up to `limit` candidates closest to `name` by edit distance, ties broken by name.
std::vector<std::string> nearest_names(std::string_view name, const std::vector<std::string>& candidates,
                                       std::size_t limit = 3);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

std::string to_lower(std::string s);

std::string trim(std::string_view s);

std::vector<std::string> split(std::string_view s, char sep);

/// 64-bit FNV-1a, rendered as 16 hex digits.
std::string fnv1a_hex(std::string_view data);

}  // namespace castl::util
