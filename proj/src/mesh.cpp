#include "partmotion/mesh.hpp"

#include <algorithm>
#include <cmath>

#include "partmotion/error.hpp"
#include "partmotion/rng.hpp"

namespace pm {

namespace {
double tri_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * norm(cross(b - a, c - a));
}
}  // namespace

double mesh_area(const TriMesh& mesh) {
  double area = 0;
  for (const auto& t : mesh.triangles)
    area += tri_area(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]);
  return area;
}

PointCloud sample_mesh_surface(const TriMesh& mesh, size_t n, uint64_t seed) {
  if (mesh.empty()) throw InputError("degenerate surface");
  if (n < 1) throw InputError("sample_mesh_surface: n must be >= 1");

  std::vector<double> cumulative(mesh.triangles.size());
  double total = 0;
  for (size_t i = 0; i < mesh.triangles.size(); ++i) {
    const auto& t = mesh.triangles[i];
    total += tri_area(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]);
    cumulative[i] = total;
  }
  if (total <= 0) throw InputError("degenerate surface");

  Rng rng(seed);
  PointCloud out;
  out.points.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    double u = rng.uniform() * total;
    size_t ti = std::lower_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin();
    if (ti >= mesh.triangles.size()) ti = mesh.triangles.size() - 1;
    const auto& t = mesh.triangles[ti];
    double u1 = rng.uniform();
    double u2 = rng.uniform();
    if (u1 + u2 > 1.0) {
      u1 = 1.0 - u1;
      u2 = 1.0 - u2;
    }
    const Vec3& a = mesh.vertices[t[0]];
    out.points.push_back(a + (mesh.vertices[t[1]] - a) * u1 + (mesh.vertices[t[2]] - a) * u2);
  }
  return out;
}

void translate(TriMesh& mesh, const Vec3& t) {
  for (Vec3& v : mesh.vertices) v += t;
}

void rotate(TriMesh& mesh, const Vec3& unit_axis, double angle, const Vec3& center) {
  double c = std::cos(angle), s = std::sin(angle);
  for (Vec3& v : mesh.vertices) v = rotate_axis_cs(v, unit_axis, c, s, center);
}

void append(TriMesh& mesh, const TriMesh& other) {
  int base = static_cast<int>(mesh.vertices.size());
  mesh.vertices.insert(mesh.vertices.end(), other.vertices.begin(), other.vertices.end());
  for (const auto& t : other.triangles)
    mesh.triangles.push_back({t[0] + base, t[1] + base, t[2] + base});
}

TriMesh make_box(const Vec3& c, const Vec3& h) {
  TriMesh m;
  m.vertices = {
      {c.x - h.x, c.y - h.y, c.z - h.z}, {c.x + h.x, c.y - h.y, c.z - h.z},
      {c.x + h.x, c.y + h.y, c.z - h.z}, {c.x - h.x, c.y + h.y, c.z - h.z},
      {c.x - h.x, c.y - h.y, c.z + h.z}, {c.x + h.x, c.y - h.y, c.z + h.z},
      {c.x + h.x, c.y + h.y, c.z + h.z}, {c.x - h.x, c.y + h.y, c.z + h.z},
  };
  m.triangles = {
      {0, 2, 1}, {0, 3, 2},  // -z
      {4, 5, 6}, {4, 6, 7},  // +z
      {0, 1, 5}, {0, 5, 4},  // -y
      {3, 6, 2}, {3, 7, 6},  // +y
      {0, 4, 7}, {0, 7, 3},  // -x
      {1, 2, 6}, {1, 6, 5},  // +x
  };
  return m;
}

TriMesh make_prism_x(const Vec3& center, double hx, double r, int sides) {
  TriMesh m;
  const double two_pi = 6.283185307179586476925286766559;
  for (int i = 0; i < sides; ++i) {
    double a = two_pi * i / sides;
    double y = r * std::cos(a), z = r * std::sin(a);
    m.vertices.push_back({center.x - hx, center.y + y, center.z + z});
    m.vertices.push_back({center.x + hx, center.y + y, center.z + z});
  }
  int lo_center = static_cast<int>(m.vertices.size());
  m.vertices.push_back({center.x - hx, center.y, center.z});
  int hi_center = lo_center + 1;
  m.vertices.push_back({center.x + hx, center.y, center.z});
  for (int i = 0; i < sides; ++i) {
    int j = (i + 1) % sides;
    int a0 = 2 * i, a1 = 2 * i + 1, b0 = 2 * j, b1 = 2 * j + 1;
    m.triangles.push_back({a0, b0, b1});
    m.triangles.push_back({a0, b1, a1});
    m.triangles.push_back({lo_center, b0, a0});
    m.triangles.push_back({hi_center, a1, b1});
  }
  return m;
}

}  // namespace pm
