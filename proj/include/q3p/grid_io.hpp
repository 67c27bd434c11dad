#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "q3p/field.hpp"

namespace q3p {

enum class GridFormat { kDx, kJson };

// Picks the format from the file extension (".dx" or ".json").
GridFormat grid_format_from_path(const std::filesystem::path& path);

ScalarField load_grid(const std::filesystem::path& path, GridFormat format);
ScalarField load_grid(const std::filesystem::path& path);
void save_grid(const ScalarField& field, const std::filesystem::path& path, GridFormat format);
void save_grid(const ScalarField& field, const std::filesystem::path& path);

// OpenDX subset: regular axis-aligned 3D grids, one scalar per point.
ScalarField read_dx(std::istream& in, const std::string& source = "<dx>");
void write_dx(const ScalarField& field, std::ostream& out);

// {dims, shape, spacing, origin, values[, frame]} with values flattened
// row-major.
ScalarField field_from_json(const nlohmann::json& j, const std::string& source = "<json>");
nlohmann::json field_to_json(const ScalarField& field);

nlohmann::json frame_to_json(const SliceFrame& frame);
SliceFrame frame_from_json(const nlohmann::json& j);

}  // namespace q3p
