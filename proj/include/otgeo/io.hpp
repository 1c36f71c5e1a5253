#pragma once

#include <filesystem>
#include <iosfwd>

#include "otgeo/measure.hpp"

namespace otgeo::io {

// CSV: one point per row, comma separated decimal values, no header.
PointCloud read_csv(std::istream& in);
PointCloud read_csv(const std::filesystem::path& path);
void write_csv(std::ostream& out, const PointCloud& cloud);

// Binary: little-endian u32 n, u32 d, then n*d float64 values row-major.
PointCloud read_binary(std::istream& in);
PointCloud read_binary(const std::filesystem::path& path);
void write_binary(std::ostream& out, const PointCloud& cloud);

/// Dispatches on extension: ".bin" is binary, anything else CSV.
PointCloud read_points(const std::filesystem::path& path);

/// Shortest decimal text that round-trips the double.
std::string format_double(double value);

}  // namespace otgeo::io
