#include "msm/csv.hpp"

#include <charconv>
#include <stdexcept>

namespace msm {

std::string format_number(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, value, std::chars_format::general, 17);
  if (result.ec != std::errc{}) throw std::runtime_error("format_number: conversion failed");
  return {buffer, result.ptr};
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::vector<std::string> header)
    : out_(path, std::ios::binary | std::ios::trunc), columns_(header.size()) {
  if (!out_) throw std::runtime_error("cannot open " + path.string() + " for writing");
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (k > 0) out_ << ',';
    out_ << header[k];
  }
  out_ << '\n';
}

void CsvWriter::write(const Cell& cell) {
  std::visit(
      [this](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          out_ << format_number(v);
        } else if constexpr (std::is_same_v<T, std::string>) {
          out_ << v;
        } else {
          out_ << std::to_string(v);
        }
      },
      cell);
}

void CsvWriter::row(std::initializer_list<Cell> cells) { row(std::vector<Cell>(cells)); }

void CsvWriter::row(const std::vector<Cell>& cells) {
  if (cells.size() != columns_) throw std::logic_error("CsvWriter: row width differs from header");
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (k > 0) out_ << ',';
    write(cells[k]);
  }
  out_ << '\n';
}

}  // namespace msm
