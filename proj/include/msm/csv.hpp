#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace msm {

/// 17 significant digits in %g style, independent of the global locale.
std::string format_number(double value);

/// Header row first, fixed column order, '\n' line endings.
class CsvWriter {
 public:
  using Cell = std::variant<double, long long, std::size_t, std::string>;

  CsvWriter(const std::filesystem::path& path, std::vector<std::string> header);

  void row(std::initializer_list<Cell> cells);
  void row(const std::vector<Cell>& cells);
  [[nodiscard]] std::size_t columns() const noexcept { return columns_; }
  void flush() { out_.flush(); }

 private:
  void write(const Cell& cell);

  std::ofstream out_;
  std::size_t columns_;
};

}  // namespace msm
