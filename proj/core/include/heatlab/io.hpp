#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "heatlab/grid.hpp"

namespace heatlab {

// Flat binary field container. Layout (all little-endian):
//   bytes 0..4   magic "HALF1"
//   int64        d
//   int64        N
//   double       L
//   int64        ell
//   double[ell * N^d]  samples, component-major
void write_field(const Field& f, const std::filesystem::path& path);
Field read_field(const std::filesystem::path& path);

// CSV export: header row, node coordinates then components,
// 17 significant digits, '.' decimal, comma separated.
void write_field_csv(const Field& f, const std::filesystem::path& path);

// Generic CSV writer used by reports: one header row + value rows.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> r) { rows.push_back(std::move(r)); }
  void write(const std::filesystem::path& path) const;
  // gnuplot-friendly variant: '#' comment header, whitespace separated.
  void write_dat(const std::filesystem::path& path) const;
};

std::string csv_num(double x);

std::uint64_t field_content_hash(const Field& f);

}  // namespace heatlab
