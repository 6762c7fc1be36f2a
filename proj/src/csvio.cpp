#include "nsum/csvio.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace nsum {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      out.emplace_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IngestError(path + ": cannot open file");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

std::uint32_t parse_u32(const std::string& field, const std::string& path, std::size_t line_no) {
  if (field.empty()) throw IngestError(path + ":" + std::to_string(line_no) + ": empty integer field");
  std::uint64_t v = 0;
  for (char c : field) {
    if (c < '0' || c > '9')
      throw IngestError(path + ":" + std::to_string(line_no) + ": bad integer '" + field + "'");
    v = v * 10 + static_cast<std::uint64_t>(c - '0');
    if (v > UINT32_MAX)
      throw IngestError(path + ":" + std::to_string(line_no) + ": integer out of range '" + field + "'");
  }
  return static_cast<std::uint32_t>(v);
}

double parse_double(const std::string& field, const std::string& path, std::size_t line_no) {
  try {
    std::size_t pos = 0;
    double v = std::stod(field, &pos);
    if (pos != field.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw IngestError(path + ":" + std::to_string(line_no) + ": bad number '" + field + "'");
  }
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IngestError(path + ": cannot open for writing");
  out << contents;
  if (!out) throw IngestError(path + ": write failed");
}

}  // namespace nsum
