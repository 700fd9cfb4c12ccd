// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace kamreduce
{

// 17 significant digits, '.' decimal, independent of the global locale. Non-finite values
// print as nan, inf, -inf.
std::string format_real(double v);

// Comma-joined row terminated by '\n'. Cells are written verbatim.
std::string csv_row(const std::vector<std::string> &cells);

// Writes to a sibling temporary and renames over `path`. Throws IoError.
void write_file_atomic(const std::filesystem::path &path, std::string_view content);

}  // namespace kamreduce
