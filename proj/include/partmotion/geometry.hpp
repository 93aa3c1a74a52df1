#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "partmotion/vec3.hpp"

namespace pm {

enum class PointFlag : uint8_t { kBase = 0, kMoving = 1 };

struct PointCloud {
  std::vector<Vec3> points;
  // Optional per-point channel (same length as points when present):
  // 1 = moving part, 0 = base part.
  std::vector<uint8_t> flags;

  bool empty() const { return points.empty(); }
  size_t size() const { return points.size(); }
};

struct Aabb {
  Vec3 lo{0, 0, 0};
  Vec3 hi{0, 0, 0};

  Vec3 extent() const { return hi - lo; }
  Vec3 center() const { return (lo + hi) * 0.5; }
  double diagonal() const { return norm(hi - lo); }
  double volume() const {
    Vec3 e = extent();
    return e.x * e.y * e.z;
  }
};

struct OrientedBox {
  Vec3 center{0, 0, 0};
  std::array<Vec3, 3> axes{Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}};
  Vec3 half_extents{0, 0, 0};

  double volume() const { return 8.0 * half_extents.x * half_extents.y * half_extents.z; }
  double max_extent() const {
    double h = half_extents.x;
    if (half_extents.y > h) h = half_extents.y;
    if (half_extents.z > h) h = half_extents.z;
    return 2.0 * h;
  }
};

Aabb bounding_box(std::span<const Vec3> pts);

// AABB diagonal length of a cloud. Single point -> 0 (callers guard).
double diag(const PointCloud& cloud);

// For each query point, the index of its nearest neighbor in `data`
// (ties broken by smallest index). Brute force below 4096 data points,
// uniform-grid accelerated above; both agree exactly.
std::vector<int> nearest_indices(std::span<const Vec3> queries, std::span<const Vec3> data);
std::vector<double> nearest_distances(std::span<const Vec3> queries, std::span<const Vec3> data);

// Bidirectional chamfer distance: mean-of-min in each direction, summed.
double chamfer(const PointCloud& a, const PointCloud& b);

// Exact Euclidean signed distance to the box surface, negative inside.
double box_sdf(const Vec3& p, const OrientedBox& box);

// Covariance eigenvectors, orthonormal, ordered by descending eigenvalue.
// Near-equal eigenvalues (<1e-9 apart) ordered lexicographically after
// sign-normalization.
std::array<Vec3, 3> principal_axes(const PointCloud& cloud);

// PCA-aligned box refined by a +-15 degree / 3 degree-step grid search over
// rotations about the PCA axes; the world-aligned frame is also a candidate,
// so the result never exceeds the AABB volume. Degenerate extents are
// clamped to 1e-6. Axes ordered by descending extent, right-handed.
OrientedBox min_volume_obb(const PointCloud& cloud);

// The m points of `a` closest to `b` and vice versa, as indices sorted by
// ascending nearest-neighbor distance (ties by index).
struct ContactPair {
  std::vector<int> a_indices;
  std::vector<int> b_indices;
};
ContactPair contact_points(const PointCloud& a, const PointCloud& b, int m);

// epsilon-connectivity (single linkage) component count.
int connected_component_count(const PointCloud& cloud, double eps);

// Minimum pairwise point distance between two clouds.
double min_cloud_distance(const PointCloud& a, const PointCloud& b);

// Deterministic subsample of up to n points (stable order). If the cloud has
// fewer points than n it is returned unchanged.
PointCloud subsample(const PointCloud& cloud, size_t n, uint64_t seed);

}  // namespace pm
