#include "otgeo/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace otgeo::io {

namespace {

std::uint32_t load_u32_le(const unsigned char* b) {
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void store_u32_le(unsigned char* b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

PointCloud read_csv(std::istream& in) {
  std::vector<double> coords;
  std::size_t d = 0, n = 0, line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (view.empty()) continue;
    std::size_t fields = 0;
    while (true) {
      const auto comma = view.find(',');
      std::string_view field = trim(view.substr(0, comma));
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (ec != std::errc() || ptr != field.data() + field.size())
        throw std::runtime_error("csv line " + std::to_string(line_no) + ": bad number '" +
                                 std::string(field) + "'");
      coords.push_back(v);
      ++fields;
      if (comma == std::string_view::npos) break;
      view.remove_prefix(comma + 1);
    }
    if (d == 0) d = fields;
    if (fields != d)
      throw std::runtime_error("csv line " + std::to_string(line_no) + ": expected " +
                               std::to_string(d) + " columns, got " + std::to_string(fields));
    ++n;
  }
  if (n == 0) throw std::runtime_error("csv: no data rows");
  return PointCloud(n, d, std::move(coords));
}

PointCloud read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_csv(in);
}

std::string format_double(double value) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf.data(), ptr);
}

void write_csv(std::ostream& out, const PointCloud& cloud) {
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    auto p = cloud.point(i);
    for (std::size_t k = 0; k < p.size(); ++k) {
      if (k) out << ',';
      out << format_double(p[k]);
    }
    out << '\n';
  }
}

PointCloud read_binary(std::istream& in) {
  unsigned char header[8];
  if (!in.read(reinterpret_cast<char*>(header), 8)) throw std::runtime_error("binary: short header");
  const std::uint32_t n = load_u32_le(header), d = load_u32_le(header + 4);
  std::vector<double> coords(static_cast<std::size_t>(n) * d);
  for (double& v : coords) {
    unsigned char b[8];
    if (!in.read(reinterpret_cast<char*>(b), 8)) throw std::runtime_error("binary: truncated payload");
    std::uint64_t bits = 0;
    for (int i = 7; i >= 0; --i) bits = (bits << 8) | b[i];
    v = std::bit_cast<double>(bits);
  }
  return PointCloud(n, d, std::move(coords));
}

PointCloud read_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_binary(in);
}

void write_binary(std::ostream& out, const PointCloud& cloud) {
  unsigned char header[8];
  store_u32_le(header, static_cast<std::uint32_t>(cloud.size()));
  store_u32_le(header + 4, static_cast<std::uint32_t>(cloud.dim()));
  out.write(reinterpret_cast<const char*>(header), 8);
  for (double v : cloud.data()) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 8);
  }
}

PointCloud read_points(const std::filesystem::path& path) {
  return path.extension() == ".bin" ? read_binary(path) : read_csv(path);
}

}  // namespace otgeo::io
