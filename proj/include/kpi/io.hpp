#pragma once

#include <string>
#include <vector>

namespace kpi {

// Deterministic CSV writer: %.17g floats, fixed column order, no timestamps.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void add_row(const std::vector<std::string>& cells);
  void add_row_values(const std::vector<double>& values);
  std::string str() const;
  void write(const std::string& path) const;

  static std::string format(double v);

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

void write_text_file(const std::string& path, const std::string& content);
bool make_directories(const std::string& path);

}  // namespace kpi
