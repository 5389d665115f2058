#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace serpmine::csv {

// RFC 4180 style quoting: fields containing comma, quote, or newline are
// wrapped in double quotes with inner quotes doubled.
std::string escape(std::string_view field);

std::string join_row(const std::vector<std::string>& fields);

// Splits one logical CSV line (no embedded newlines) into fields.
std::vector<std::string> split_row(std::string_view line);

// Splits text into logical rows, honoring quoted fields that span commas.
// Embedded newlines inside quotes are not supported by this reader.
std::vector<std::vector<std::string>> parse(std::string_view text);

}  // namespace serpmine::csv
