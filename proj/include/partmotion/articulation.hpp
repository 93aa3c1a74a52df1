#pragma once

#include <array>
#include <cmath>

#include "partmotion/geometry.hpp"

namespace pm {

enum class MotionType : uint8_t { kHinge = 0, kPrismatic = 1 };

inline const char* to_string(MotionType t) {
  return t == MotionType::kHinge ? "hinge" : "prismatic";
}

struct HingeParams {
  Vec3 axis{0, 0, 1};   // unit
  Vec3 center{0, 0, 0};
  double angle = 0;     // radians
};

struct PrismaticParams {
  Vec3 axis{1, 0, 0};   // unit
  double displacement = 0;
};

// Per-pair nuisance variables that align source to target alongside the
// joint motion. The global up-rotation spins the whole joint about the world
// up axis through the origin.
struct AlignmentParams {
  Vec3 global_translation{0, 0, 0};
  double global_up_rotation = 0;  // radians
  Vec3 local_translation{0, 0, 0};
};

// Six face displacements of a part's OBB, in the OBB frame:
// [+x, -x, +y, -y, +z, -z].
struct BoxDeform {
  std::array<double, 6> faces{0, 0, 0, 0, 0, 0};
};

// T^L minus its component along the motion axis.
template <class T>
V3<T> project_local_translation(const V3<T>& t_local, const V3<T>& unit_axis) {
  return t_local - unit_axis * dot(t_local, unit_axis);
}

// OBB-frame coordinates of a world point.
inline Vec3 obb_local(const Vec3& p, const OrientedBox& box) {
  Vec3 d = p - box.center;
  return {dot(d, box.axes[0]), dot(d, box.axes[1]), dot(d, box.axes[2])};
}

// Piecewise-linear per-axis remap of a rest-frame OBB coordinate: the center
// is fixed and each face plane moves to its displaced position. `local` is
// the precomputed rest-frame coordinate (a constant during differentiation).
// When `clamp_extent` is set, a collapsing face pair is floored at 1e-3 of
// the original extent instead of erroring (used inside optimizations).
template <class T>
V3<T> box_deform_point(const Vec3& local, const OrientedBox& box, const std::array<T, 6>& faces,
                       bool clamp_extent = false) {
  using std::max;
  V3<T> world{T(box.center.x), T(box.center.y), T(box.center.z)};
  for (int k = 0; k < 3; ++k) {
    double h = box.half_extents[k];
    const T& disp = local[k] >= 0 ? faces[2 * k] : faces[2 * k + 1];
    T new_h = disp + h;
    if (clamp_extent) new_h = max(new_h, 1e-3 * h);
    T coord = new_h * (local[k] / h);
    world += box.axes[k] * coord;
  }
  return world;
}

PointCloud apply_hinge(const PointCloud& cloud, const HingeParams& h, double fraction);
PointCloud apply_prismatic(const PointCloud& cloud, const PrismaticParams& p, double fraction);

// Throws InputError when a deformed extent would be <= 0.
PointCloud apply_box_deform(const PointCloud& cloud, const OrientedBox& box,
                            const BoxDeform& deform);

// Full moving-part chain: box deformation in the rest-frame OBB (equivalent
// to deforming in the co-moving frame), then joint motion, local translation,
// global up-rotation, global translation.
PointCloud transform_moving(const PointCloud& jm, const HingeParams& motion,
                            const AlignmentParams& align, const BoxDeform& deform,
                            const OrientedBox& moving_obb, const Vec3& up);
PointCloud transform_moving(const PointCloud& jm, const PrismaticParams& motion,
                            const AlignmentParams& align, const BoxDeform& deform,
                            const OrientedBox& moving_obb, const Vec3& up);

// Base-part chain: deformation, global up-rotation, global translation.
PointCloud transform_base(const PointCloud& jb, const AlignmentParams& align,
                          const BoxDeform& deform, const OrientedBox& base_obb, const Vec3& up);

// Rigid transport of a rest-pose OBB along the joint motion (axes rotated /
// center moved, extents unchanged).
OrientedBox transport_obb_hinge(const OrientedBox& box, const Vec3& unit_axis,
                                const Vec3& center, double angle);
OrientedBox transport_obb_prismatic(const OrientedBox& box, const Vec3& unit_axis, double d);

}  // namespace pm
