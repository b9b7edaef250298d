#include "heatlab/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace heatlab {

static_assert(std::endian::native == std::endian::little,
              "field container I/O assumes a little-endian host");

namespace {

constexpr char kMagic[5] = {'H', 'A', 'L', 'F', '1'};

template <class T>
void put(std::ofstream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <class T>
T get(std::ifstream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

}  // namespace

void write_field(const Field& f, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  require(os.good(), "cannot open for writing: " + path.string());
  os.write(kMagic, sizeof(kMagic));
  put<std::int64_t>(os, f.grid.d);
  put<std::int64_t>(os, f.grid.N);
  put<double>(os, f.grid.L);
  put<std::int64_t>(os, f.ell);
  os.write(reinterpret_cast<const char*>(f.data.data()),
           static_cast<std::streamsize>(f.data.size() * sizeof(double)));
  require(os.good(), "write failed: " + path.string());
}

Field read_field(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  require(is.good(), "cannot open field file: " + path.string());
  char magic[5];
  is.read(magic, sizeof(magic));
  require(is.good() && std::memcmp(magic, kMagic, 5) == 0,
          "bad magic in field file: " + path.string());
  auto d = get<std::int64_t>(is);
  auto N = get<std::int64_t>(is);
  auto L = get<double>(is);
  auto ell = get<std::int64_t>(is);
  require(is.good(), "truncated field header: " + path.string());
  GridSpec g = make_grid(static_cast<int>(d), static_cast<int>(N), L);
  require(ell >= 1 && ell <= 64, "implausible component count in field file");
  Field f(g, static_cast<int>(ell));
  is.read(reinterpret_cast<char*>(f.data.data()),
          static_cast<std::streamsize>(f.data.size() * sizeof(double)));
  require(is.good(), "truncated field data: " + path.string());
  return f;
}

std::string csv_num(double x) { return format_g17(x); }

void write_field_csv(const Field& f, const std::filesystem::path& path) {
  CsvTable t;
  const char* ax[3] = {"x0", "x1", "x2"};
  for (int a = 0; a < f.grid.d; ++a) t.header.push_back(ax[a]);
  for (int c = 0; c < f.ell; ++c) t.header.push_back("c" + std::to_string(c));
  for (std::size_t i = 0; i < f.grid.size(); ++i) {
    std::vector<std::string> row;
    Vec3 x = f.grid.node(i);
    for (int a = 0; a < f.grid.d; ++a) row.push_back(csv_num(x[a]));
    for (int c = 0; c < f.ell; ++c) row.push_back(csv_num(f.at(c, i)));
    t.add_row(std::move(row));
  }
  t.write(path);
}

void CsvTable::write(const std::filesystem::path& path) const {
  std::ofstream os(path);
  require(os.good(), "cannot open for writing: " + path.string());
  for (std::size_t i = 0; i < header.size(); ++i)
    os << header[i] << (i + 1 < header.size() ? "," : "\n");
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      os << row[i] << (i + 1 < row.size() ? "," : "\n");
  }
  require(os.good(), "write failed: " + path.string());
}

void CsvTable::write_dat(const std::filesystem::path& path) const {
  std::ofstream os(path);
  require(os.good(), "cannot open for writing: " + path.string());
  os << "#";
  for (const auto& hcell : header) os << " " << hcell;
  os << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      os << row[i] << (i + 1 < row.size() ? " " : "\n");
  }
  require(os.good(), "write failed: " + path.string());
}

std::uint64_t field_content_hash(const Field& f) {
  std::uint64_t h = fnv1a(&f.grid.d, sizeof(f.grid.d));
  h = fnv1a(&f.grid.N, sizeof(f.grid.N), h);
  h = fnv1a(&f.grid.L, sizeof(f.grid.L), h);
  h = fnv1a(&f.ell, sizeof(f.ell), h);
  return fnv1a(f.data.data(), f.data.size() * sizeof(double), h);
}

}  // namespace heatlab
