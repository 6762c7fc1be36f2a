#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nsum {

// Thrown on malformed input files; message carries file and line number.
class IngestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Fixed formatting so that identical values always serialize to identical
// bytes (reproducibility contract for all CSV outputs).
std::string format_double(double x);

std::vector<std::string> split_csv_line(std::string_view line);

// Reads a whole text file into lines (LF or CRLF). Throws IngestError if the
// file cannot be opened.
std::vector<std::string> read_lines(const std::string& path);

std::uint32_t parse_u32(const std::string& field, const std::string& path, std::size_t line_no);
double parse_double(const std::string& field, const std::string& path, std::size_t line_no);

void write_text_file(const std::string& path, const std::string& contents);

}  // namespace nsum
