#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "minangle/vec3.hpp"

namespace minangle {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MeshBuffers {
    std::vector<Vec3> positions;
    std::vector<std::array<int, 3>> triangles;
};

// Format is chosen by extension: .off or .obj (case-insensitive).
MeshBuffers load_mesh(const std::string& path);
void save_mesh(const std::string& path, const MeshBuffers& buffers);

MeshBuffers parse_off(std::istream& in, const std::string& origin);
MeshBuffers parse_obj(std::istream& in, const std::string& origin);
void write_off(std::ostream& out, const MeshBuffers& buffers);
void write_obj(std::ostream& out, const MeshBuffers& buffers);

// Doubles print with enough digits to round-trip exactly.
std::string format_double(double value);

}  // namespace minangle
