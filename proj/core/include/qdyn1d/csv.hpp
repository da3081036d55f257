#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "qdyn1d/errors.hpp"

namespace qdyn1d {

/// Shortest round-trip decimal form; '.' decimal separator, no locale.
inline std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

/// Cell value for CSV rows.
struct CsvCell {
  std::string text;
  CsvCell(double v) : text(format_double(v)) {}            // NOLINT
  CsvCell(std::int64_t v) : text(std::to_string(v)) {}     // NOLINT
  CsvCell(int v) : text(std::to_string(v)) {}              // NOLINT
  CsvCell(std::size_t v) : text(std::to_string(v)) {}      // NOLINT
  CsvCell(const char* s) : text(s) {}                      // NOLINT
  CsvCell(std::string s) : text(std::move(s)) {}           // NOLINT
};

/// Plain CSV emitter: mandatory header row, '\n' line endings, deterministic
/// number formatting (identical inputs give identical bytes).
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw Error("cannot open CSV output: " + path);
    for (size_t i = 0; i < header.size(); ++i) {
      if (i) out_ << ',';
      out_ << header[i];
    }
    out_ << '\n';
  }

  void row(const std::vector<CsvCell>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i].text;
    }
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

}  // namespace qdyn1d
