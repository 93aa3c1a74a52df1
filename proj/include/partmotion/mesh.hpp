#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "partmotion/geometry.hpp"

namespace pm {

struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;

  bool empty() const { return triangles.empty(); }
};

double mesh_area(const TriMesh& mesh);

// Uniform area-weighted surface sampling; deterministic given seed.
// Throws InputError("degenerate surface") when total area is zero.
PointCloud sample_mesh_surface(const TriMesh& mesh, size_t n, uint64_t seed);

void translate(TriMesh& mesh, const Vec3& t);
void rotate(TriMesh& mesh, const Vec3& unit_axis, double angle, const Vec3& center);

// Appends `other` into `mesh` (vertex indices re-based).
void append(TriMesh& mesh, const TriMesh& other);

// Axis-aligned cuboid (12 triangles).
TriMesh make_box(const Vec3& center, const Vec3& half_extents);

// Prism with a regular n-gon cross-section, axis +x through `center`,
// half-length hx, radius r.
TriMesh make_prism_x(const Vec3& center, double hx, double r, int sides);

}  // namespace pm
