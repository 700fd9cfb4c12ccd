// SPDX-License-Identifier: Apache-2.0
#include "kamreduce/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <system_error>

#include "kamreduce/errors.hpp"

namespace kamreduce
{

std::string format_real(double v)
{
  if (std::isnan(v))
  {
    return "nan";
  }
  if (std::isinf(v))
  {
    return v > 0 ? "inf" : "-inf";
  }
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
  return {buf.data(), res.ptr};
}

std::string csv_row(const std::vector<std::string> &cells)
{
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i)
  {
    if (i > 0)
    {
      out += ',';
    }
    out += cells[i];
  }
  out += '\n';
  return out;
}

void write_file_atomic(const std::filesystem::path &path, std::string_view content)
{
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os)
    {
      throw IoError("cannot open " + tmp.string() + " for writing");
    }
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
    os.flush();
    if (!os)
    {
      throw IoError("write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec)
  {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot rename onto " + path.string());
  }
}

}  // namespace kamreduce
