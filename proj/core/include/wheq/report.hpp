#pragma once

#include <string>
#include <vector>

namespace wheq {

// Locale-independent shortest round-trip formatting, '.' decimal separator.
std::string format_double(double v);

// Flat table with a header row; downstream plotting consumes headers only.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
  void add_row(std::vector<std::string> cells);
  std::string to_string() const;
  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

// UTF-8, '\n' newlines, parent directories created.
void write_text_file(const std::string& path, const std::string& content);

} // namespace wheq
