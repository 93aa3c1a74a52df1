#include "partmotion/articulation.hpp"

#include <cmath>

#include "partmotion/error.hpp"

namespace pm {

PointCloud apply_hinge(const PointCloud& cloud, const HingeParams& h, double fraction) {
  PointCloud out = cloud;
  double ang = h.angle * fraction;
  double c = std::cos(ang), s = std::sin(ang);
  for (Vec3& p : out.points) p = rotate_axis_cs(p, h.axis, c, s, h.center);
  return out;
}

PointCloud apply_prismatic(const PointCloud& cloud, const PrismaticParams& pr, double fraction) {
  PointCloud out = cloud;
  Vec3 t = pr.axis * (pr.displacement * fraction);
  for (Vec3& p : out.points) p += t;
  return out;
}

PointCloud apply_box_deform(const PointCloud& cloud, const OrientedBox& box,
                            const BoxDeform& deform) {
  for (int k = 0; k < 3; ++k) {
    double h = box.half_extents[k];
    if (h + deform.faces[2 * k] <= 0 || h + deform.faces[2 * k + 1] <= 0)
      throw InputError("apply_box_deform: face pair collapses");
  }
  PointCloud out = cloud;
  for (Vec3& p : out.points) p = box_deform_point(obb_local(p, box), box, deform.faces);
  return out;
}

namespace {

void apply_alignment(PointCloud& cloud, const AlignmentParams& align, const Vec3& up) {
  double c = std::cos(align.global_up_rotation), s = std::sin(align.global_up_rotation);
  for (Vec3& p : cloud.points) {
    p = rotate_axis_cs(p, up, c, s, Vec3{0, 0, 0});
    p += align.global_translation;
  }
}

}  // namespace

PointCloud transform_moving(const PointCloud& jm, const HingeParams& motion,
                            const AlignmentParams& align, const BoxDeform& deform,
                            const OrientedBox& moving_obb, const Vec3& up) {
  PointCloud out = apply_box_deform(jm, moving_obb, deform);
  out = apply_hinge(out, motion, 1.0);
  for (Vec3& p : out.points) p += align.local_translation;
  apply_alignment(out, align, up);
  return out;
}

PointCloud transform_moving(const PointCloud& jm, const PrismaticParams& motion,
                            const AlignmentParams& align, const BoxDeform& deform,
                            const OrientedBox& moving_obb, const Vec3& up) {
  PointCloud out = apply_box_deform(jm, moving_obb, deform);
  out = apply_prismatic(out, motion, 1.0);
  Vec3 tl = project_local_translation(align.local_translation, motion.axis);
  for (Vec3& p : out.points) p += tl;
  apply_alignment(out, align, up);
  return out;
}

PointCloud transform_base(const PointCloud& jb, const AlignmentParams& align,
                          const BoxDeform& deform, const OrientedBox& base_obb, const Vec3& up) {
  PointCloud out = apply_box_deform(jb, base_obb, deform);
  apply_alignment(out, align, up);
  return out;
}

OrientedBox transport_obb_hinge(const OrientedBox& box, const Vec3& unit_axis, const Vec3& center,
                                double angle) {
  OrientedBox out = box;
  double c = std::cos(angle), s = std::sin(angle);
  out.center = rotate_axis_cs(box.center, unit_axis, c, s, center);
  for (int k = 0; k < 3; ++k)
    out.axes[k] = rotate_axis_cs(box.axes[k], unit_axis, c, s, Vec3{0, 0, 0});
  return out;
}

OrientedBox transport_obb_prismatic(const OrientedBox& box, const Vec3& unit_axis, double d) {
  OrientedBox out = box;
  out.center += unit_axis * d;
  return out;
}

}  // namespace pm
