#pragma once

#include <filesystem>
#include <vector>

#include "quadkit/chart_fields.hpp"
#include "quadkit/mesh_io.hpp"

namespace quadkit {

/// JSON array of {pos, normal, cdf, dcdf, gcdf, gdcdf, off_c, off_dc} records.
void write_fields_json(const std::filesystem::path& path, const std::vector<FieldSample>& samples);
std::vector<FieldSample> read_fields_json(const std::filesystem::path& path);

/// Raw little-endian binary: "QKF1", uint64 count, then 22 doubles per record in the JSON
/// field order.
void write_fields_binary(const std::filesystem::path& path, const std::vector<FieldSample>& samples);
std::vector<FieldSample> read_fields_binary(const std::filesystem::path& path);

/// Picks the reader by extension (.json or anything else for binary).
std::vector<FieldSample> read_fields(const std::filesystem::path& path);
void write_fields(const std::filesystem::path& path, const std::vector<FieldSample>& samples);

/// Diverging colormap: 0 maps to dark blue, 1 to dark red.
Rgb field_color(double value);

}  // namespace quadkit
