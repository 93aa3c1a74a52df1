#include "partmotion/losses.hpp"

#include <cmath>

#include "partmotion/error.hpp"

namespace pm {

using ad::Tape;
using ad::Var;
using ad::VarV3;

LossWeights LossWeights::hinge_preset() {
  LossWeights w;
  w.w_joint = 0.001;
  w.w_align_global = 0.0;
  w.w_align_local = 0.0025;
  w.w_collide = 0.01;
  w.w_detach = 0.01;
  w.w_center_detach = 5.0;
  w.w_deform = 0.001;
  return w;
}

LossWeights LossWeights::prismatic_preset() {
  LossWeights w;
  w.w_joint = 0.001;
  w.w_align_global = 0.0;
  w.w_align_local = 0.005;
  w.w_collide = 0.5;
  w.w_detach = 0.5;
  w.w_center_detach = 0.0;
  w.w_deform = 0.001;
  return w;
}

double resolve_tau(const LossWeights& w, MotionType type, const OrientedBox& moving_obb) {
  return type == MotionType::kHinge ? w.tau_theta : w.tau_d_scale * moving_obb.max_extent();
}

Var chamfer_var(Tape& tape, std::span<const VarV3> a, std::span<const Vec3> b) {
  if (a.empty() || b.empty()) throw InputError("chamfer_var: empty cloud");
  std::vector<Vec3> av(a.size());
  for (size_t i = 0; i < a.size(); ++i) av[i] = ad::value(a[i]);

  std::vector<int> ab = nearest_indices(av, b);
  Var sum_ab = tape.constant(0.0);
  for (size_t i = 0; i < a.size(); ++i) sum_ab = sum_ab + ad::dist_to(a[i], b[ab[i]]);

  std::vector<int> ba = nearest_indices(b, av);
  Var sum_ba = tape.constant(0.0);
  for (size_t j = 0; j < b.size(); ++j) sum_ba = sum_ba + ad::dist_to(a[ba[j]], b[j]);

  return sum_ab * (1.0 / static_cast<double>(a.size())) +
         sum_ba * (1.0 / static_cast<double>(b.size()));
}

Var diag_var(Tape& tape, std::span<const VarV3> pts) {
  if (pts.empty()) throw InputError("diag_var: empty cloud");
  Var mnx = pts[0].x, mny = pts[0].y, mnz = pts[0].z;
  Var mxx = pts[0].x, mxy = pts[0].y, mxz = pts[0].z;
  for (size_t i = 1; i < pts.size(); ++i) {
    mnx = min(mnx, pts[i].x);
    mny = min(mny, pts[i].y);
    mnz = min(mnz, pts[i].z);
    mxx = max(mxx, pts[i].x);
    mxy = max(mxy, pts[i].y);
    mxz = max(mxz, pts[i].z);
  }
  Var ex = mxx - mnx, ey = mxy - mny, ez = mxz - mnz;
  return sqrt(ex * ex + ey * ey + ez * ez);
}

Var box_sdf_var(Tape& tape, const VarV3& p, const OrientedBox& box) {
  VarV3 d = p - box.center;
  Var q0 = abs(dot(d, box.axes[0])) - box.half_extents.x;
  Var q1 = abs(dot(d, box.axes[1])) - box.half_extents.y;
  Var q2 = abs(dot(d, box.axes[2])) - box.half_extents.z;
  Var r0 = ad::relu(q0), r1 = ad::relu(q1), r2 = ad::relu(q2);
  Var outside = sqrt(r0 * r0 + r1 * r1 + r2 * r2);
  Var inside = min(max(max(q0, q1), q2), 0.0);
  return outside + inside;
}

Var recon_loss(Tape& tape, std::span<const VarV3> moved_m, std::span<const VarV3> moved_b,
               std::span<const Vec3> tgt_m, std::span<const Vec3> tgt_b) {
  Var cm = chamfer_var(tape, moved_m, tgt_m);
  Var dm = max(diag_var(tape, moved_m), 1e-6);
  Var cb = chamfer_var(tape, moved_b, tgt_b);
  Var db = max(diag_var(tape, moved_b), 1e-6);
  return cm / dm + cb / db;
}

Var small_motion_penalty(Tape& tape, Var amount, double tau, double w_joint) {
  (void)tape;
  return ad::relu(tau - abs(amount)) * w_joint;
}

Var alignment_penalty(Tape& tape, Var global_up_rotation, const VarV3& t_local, double w_global,
                      double w_local) {
  (void)tape;
  return abs(global_up_rotation) * w_global + norm(t_local) * w_local;
}

Var deformation_penalty(Tape& tape, std::span<const Var> faces_m, std::span<const Var> faces_b,
                        double w_deform) {
  Var sum = tape.constant(0.0);
  for (Var f : faces_m) sum = sum + abs(f);
  for (Var f : faces_b) sum = sum + abs(f);
  return sum * w_deform;
}

namespace {

// A rest-pose OBB rigidly transported by the candidate motion, on the tape.
struct BoxVars {
  VarV3 center;
  std::array<VarV3, 3> axes;     // hinge path
  std::array<Vec3, 3> axes_d;    // prismatic path (axes unchanged)
  Vec3 half;
  bool const_axes = false;
};

BoxVars transport_box_var(Tape& tape, const OrientedBox& box, const MotionVars& motion,
                          double frac) {
  BoxVars out;
  out.half = box.half_extents;
  Var pose = motion.amount * frac;
  if (motion.type == MotionType::kHinge) {
    Var c = cos(pose), s = sin(pose);
    out.center = ad::rotate_point_cs(box.center, motion.axis_unit, c, s, motion.center);
    VarV3 origin{tape.constant(0), tape.constant(0), tape.constant(0)};
    for (int k = 0; k < 3; ++k) {
      VarV3 lifted = ad::make_v3(tape, box.axes[k]);
      out.axes[k] = rotate_axis_cs(lifted, motion.axis_unit, c, s, origin);
    }
  } else {
    out.const_axes = true;
    out.axes_d = box.axes;
    VarV3 shift = motion.axis_unit * pose;
    out.center = shift + box.center;
  }
  return out;
}

OrientedBox transport_box_value(const OrientedBox& box, const MotionVars& motion, double frac) {
  Vec3 axis = ad::value(motion.axis_unit);
  double pose = motion.amount.value() * frac;
  if (motion.type == MotionType::kHinge)
    return transport_obb_hinge(box, axis, ad::value(motion.center), pose);
  return transport_obb_prismatic(box, axis, pose);
}

Var box_sdf_fixed_point(Tape& tape, const Vec3& p, const BoxVars& b) {
  VarV3 d = p - b.center;
  Var l0 = b.const_axes ? dot(d, b.axes_d[0]) : dot(d, b.axes[0]);
  Var l1 = b.const_axes ? dot(d, b.axes_d[1]) : dot(d, b.axes[1]);
  Var l2 = b.const_axes ? dot(d, b.axes_d[2]) : dot(d, b.axes[2]);
  Var q0 = abs(l0) - b.half.x;
  Var q1 = abs(l1) - b.half.y;
  Var q2 = abs(l2) - b.half.z;
  Var r0 = ad::relu(q0), r1 = ad::relu(q1), r2 = ad::relu(q2);
  Var outside = sqrt(r0 * r0 + r1 * r1 + r2 * r2);
  Var inside = min(max(max(q0, q1), q2), 0.0);
  (void)tape;
  return outside + inside;
}

}  // namespace

Var collision_penalty(Tape& tape, std::span<const Vec3> base_pts, const OrientedBox& moving_obb,
                      const MotionVars& motion, int n, double d0, double w_collide) {
  if (w_collide == 0.0 || base_pts.empty() || n < 1) return tape.constant(0.0);
  Var sum = tape.constant(0.0);
  for (int i = 1; i <= n; ++i) {
    double frac = static_cast<double>(i) / n;
    OrientedBox box_now = transport_box_value(moving_obb, motion, frac);
    // Only points with positive penalty get tape nodes; the others contribute
    // exactly zero value and zero subgradient.
    bool built = false;
    BoxVars tb;
    for (const Vec3& p : base_pts) {
      if (box_sdf(p, box_now) >= d0) continue;
      if (!built) {
        tb = transport_box_var(tape, moving_obb, motion, frac);
        built = true;
      }
      sum = sum + ad::relu(d0 - box_sdf_fixed_point(tape, p, tb));
    }
  }
  return sum * (w_collide / (static_cast<double>(n) * static_cast<double>(base_pts.size())));
}

Var detachment_penalty_hinge(Tape& tape, std::span<const Vec3> moving_contacts,
                             std::span<const Vec3> base_contacts, const OrientedBox& moving_obb,
                             const MotionVars& motion, int n, double slack, double w_detach,
                             double w_center) {
  Var sum = tape.constant(0.0);
  if (w_detach != 0.0 && !moving_contacts.empty() && !base_contacts.empty()) {
    for (int i = 1; i <= n; ++i) {
      Var pose = motion.amount * (static_cast<double>(i) / n);
      Var c = cos(pose), s = sin(pose);
      Var pose_sum = tape.constant(0.0);
      for (size_t j = 0; j < moving_contacts.size(); ++j) {
        VarV3 moved = ad::rotate_point_cs(moving_contacts[j], motion.axis_unit, c, s,
                                          motion.center);
        // Nearest base contact selected by value; gradient flows through the
        // selected pair only, as in the chamfer treatment.
        Vec3 mv = ad::value(moved);
        size_t best = 0;
        double best_d = dist2(mv, base_contacts[0]);
        for (size_t k = 1; k < base_contacts.size(); ++k) {
          double dk = dist2(mv, base_contacts[k]);
          if (dk < best_d) {
            best_d = dk;
            best = k;
          }
        }
        pose_sum = pose_sum + ad::dist_to(moved, base_contacts[best]);
      }
      sum = sum + ad::relu(pose_sum - slack);
    }
    sum = sum * (w_detach / static_cast<double>(n));
  }
  if (w_center != 0.0)
    sum = sum + ad::relu(box_sdf_var(tape, motion.center, moving_obb)) * w_center;
  return sum;
}

Var detachment_penalty_prismatic(Tape& tape, std::span<const Vec3> base_neighbors,
                                 const OrientedBox& moving_obb, const MotionVars& motion, int n,
                                 double w_detach) {
  if (w_detach == 0.0 || base_neighbors.empty() || n < 1) return tape.constant(0.0);
  Var sum = tape.constant(0.0);
  for (int i = 1; i <= n; ++i) {
    double frac = static_cast<double>(i) / n;
    OrientedBox box_now = transport_box_value(moving_obb, motion, frac);
    bool built = false;
    BoxVars tb;
    for (const Vec3& p : base_neighbors) {
      if (box_sdf(p, box_now) <= 0.0) continue;
      if (!built) {
        tb = transport_box_var(tape, moving_obb, motion, frac);
        built = true;
      }
      sum = sum + ad::relu(box_sdf_fixed_point(tape, p, tb));
    }
  }
  return sum * (w_detach / (static_cast<double>(n) * static_cast<double>(base_neighbors.size())));
}

MotionVars make_motion_vars(Tape& tape, const PairContext& ctx, const PairParamVars& params) {
  MotionVars m;
  m.type = ctx.type;
  Var n = sqrt(dot(params.axis_raw, params.axis_raw) + 1e-24);
  Var inv = 1.0 / n;
  m.axis_unit = params.axis_raw * inv;
  m.center = params.center;
  m.amount = params.amount;
  (void)tape;
  return m;
}

namespace {

VarV3 rotate_about_up(Tape& tape, const VarV3& p, const Vec3& up, Var c, Var s) {
  if (std::abs(up.x) < 1e-12 && std::abs(up.y) < 1e-12 && std::abs(up.z - 1.0) < 1e-12) {
    return {p.x * c - p.y * s, p.x * s + p.y * c, p.z};
  }
  VarV3 kxv = cross(up, p);
  Var kdv = dot(p, up);
  VarV3 r = p * c + kxv * s + up * (kdv * (1.0 - c));
  (void)tape;
  return r;
}

}  // namespace

void transform_pair_clouds(Tape& tape, const PairContext& ctx, const PairParamVars& params,
                           const MotionVars& motion, std::vector<VarV3>& out_m,
                           std::vector<VarV3>& out_b) {
  // Deformed extents, shared across points; collapsing faces floored.
  std::array<Var, 6> scale_m, scale_b;
  for (int f = 0; f < 6; ++f) {
    double hm = ctx.moving_obb->half_extents[f / 2];
    double hb = ctx.base_obb->half_extents[f / 2];
    scale_m[f] = max(params.deform_m[f] + hm, 1e-3 * hm) * (1.0 / hm);
    scale_b[f] = max(params.deform_b[f] + hb, 1e-3 * hb) * (1.0 / hb);
  }

  auto deform_point = [&](const Vec3& local, const OrientedBox& box,
                          const std::array<Var, 6>& scale) {
    VarV3 world{tape.constant(box.center.x), tape.constant(box.center.y),
                tape.constant(box.center.z)};
    for (int k = 0; k < 3; ++k) {
      const Var& s = local[k] >= 0 ? scale[2 * k] : scale[2 * k + 1];
      Var coord = s * local[k];
      world = world + box.axes[k] * coord;
    }
    return world;
  };

  Var cg = cos(params.r_global), sg = sin(params.r_global);

  VarV3 t_local_eff = params.t_local;
  if (ctx.type == MotionType::kPrismatic)
    t_local_eff = project_local_translation(params.t_local, motion.axis_unit);

  Var cj = tape.constant(1.0), sj = tape.constant(0.0);
  VarV3 shift{tape.constant(0), tape.constant(0), tape.constant(0)};
  if (ctx.type == MotionType::kHinge) {
    cj = cos(motion.amount);
    sj = sin(motion.amount);
  } else {
    shift = motion.axis_unit * motion.amount;
  }

  out_m.clear();
  out_m.reserve(ctx.src_m.size());
  for (size_t i = 0; i < ctx.src_m.size(); ++i) {
    VarV3 p = deform_point(ctx.src_m_local[i], *ctx.moving_obb, scale_m);
    if (ctx.type == MotionType::kHinge)
      p = rotate_axis_cs(p, motion.axis_unit, cj, sj, motion.center);
    else
      p = p + shift;
    p = p + t_local_eff;
    p = rotate_about_up(tape, p, ctx.up, cg, sg);
    p = p + params.t_global;
    out_m.push_back(p);
  }

  out_b.clear();
  out_b.reserve(ctx.src_b.size());
  for (size_t i = 0; i < ctx.src_b.size(); ++i) {
    VarV3 p = deform_point(ctx.src_b_local[i], *ctx.base_obb, scale_b);
    p = rotate_about_up(tape, p, ctx.up, cg, sg);
    p = p + params.t_global;
    out_b.push_back(p);
  }
}

PairLossVars total_loss(Tape& tape, const PairContext& ctx, const PairParamVars& params) {
  MotionVars motion = make_motion_vars(tape, ctx, params);

  std::vector<VarV3> moved_m, moved_b;
  transform_pair_clouds(tape, ctx, params, motion, moved_m, moved_b);

  PairLossVars out;
  out.recon = recon_loss(tape, moved_m, moved_b, ctx.tgt_m, ctx.tgt_b);
  out.joint = small_motion_penalty(tape, params.amount, ctx.tau, ctx.weights.w_joint);

  VarV3 t_local_eff = params.t_local;
  if (ctx.type == MotionType::kPrismatic)
    t_local_eff = project_local_translation(params.t_local, motion.axis_unit);
  out.align = alignment_penalty(tape, params.r_global, t_local_eff, ctx.weights.w_align_global,
                                ctx.weights.w_align_local);

  out.deform = deformation_penalty(tape, params.deform_m, params.deform_b, ctx.weights.w_deform);
  out.collide = collision_penalty(tape, ctx.src_b, *ctx.moving_obb, motion,
                                  ctx.weights.path_samples, ctx.d0, ctx.weights.w_collide);
  if (ctx.type == MotionType::kHinge) {
    out.detach = detachment_penalty_hinge(tape, ctx.contacts_m, ctx.contacts_b, *ctx.moving_obb,
                                          motion, ctx.weights.path_samples,
                                          ctx.weights.contact_slack, ctx.weights.w_detach,
                                          ctx.weights.w_center_detach);
  } else {
    out.detach = detachment_penalty_prismatic(tape, ctx.neighbors_b, *ctx.moving_obb, motion,
                                              ctx.weights.path_samples, ctx.weights.w_detach);
  }
  out.total = out.recon + out.joint + out.align + out.deform + out.collide + out.detach;

  const std::pair<const char*, Var> named[] = {
      {"recon", out.recon},   {"joint", out.joint},   {"align", out.align},
      {"deform", out.deform}, {"collide", out.collide}, {"detach", out.detach},
  };
  for (const auto& [name, v] : named)
    if (!std::isfinite(v.value()))
      throw NumericalError(std::string("total_loss: non-finite term ") + name);
  return out;
}

PairParamVars make_pair_params(std::span<const ad::Var> vars) {
  if (vars.size() != kPairParamCount) throw InputError("make_pair_params: expected 26 vars");
  PairParamVars p;
  p.axis_raw = {vars[0], vars[1], vars[2]};
  p.center = {vars[3], vars[4], vars[5]};
  p.amount = vars[6];
  p.t_global = {vars[7], vars[8], vars[9]};
  p.r_global = vars[10];
  p.t_local = {vars[11], vars[12], vars[13]};
  for (int i = 0; i < 6; ++i) p.deform_m[i] = vars[14 + i];
  for (int i = 0; i < 6; ++i) p.deform_b[i] = vars[20 + i];
  return p;
}

LossBreakdown breakdown_of(const PairLossVars& v) {
  LossBreakdown b;
  b.recon = v.recon.value();
  b.joint = v.joint.value();
  b.align = v.align.value();
  b.deform = v.deform.value();
  b.collide = v.collide.value();
  b.detach = v.detach.value();
  b.total = v.total.value();
  return b;
}

PairContext PairData::context() const {
  PairContext ctx;
  ctx.src_m = src_m;
  ctx.src_b = src_b;
  ctx.src_m_local = src_m_local;
  ctx.src_b_local = src_b_local;
  ctx.tgt_m = tgt_m;
  ctx.tgt_b = tgt_b;
  ctx.moving_obb = &moving_obb;
  ctx.base_obb = &base_obb;
  ctx.up = up;
  ctx.contacts_m = contacts_m;
  ctx.contacts_b = contacts_b;
  ctx.neighbors_b = neighbors_b;
  ctx.d0 = d0;
  ctx.type = type;
  ctx.tau = tau;
  ctx.weights = weights;
  return ctx;
}

PairData make_pair_data(const PointCloud& src_m, const PointCloud& src_b, const PointCloud& tgt_m,
                        const PointCloud& tgt_b, MotionType type, const LossWeights& weights,
                        int contact_count, int neighbor_count, const Vec3& up) {
  if (src_m.empty() || src_b.empty() || tgt_m.empty() || tgt_b.empty())
    throw InputError("make_pair_data: empty cloud");
  PairData d;
  d.src_m = src_m.points;
  d.src_b = src_b.points;
  d.tgt_m = tgt_m.points;
  d.tgt_b = tgt_b.points;
  d.moving_obb = min_volume_obb(src_m);
  d.base_obb = min_volume_obb(src_b);
  d.type = type;
  d.weights = weights;
  d.tau = resolve_tau(weights, type, d.moving_obb);
  d.up = up;

  d.src_m_local.reserve(d.src_m.size());
  for (const Vec3& p : d.src_m) d.src_m_local.push_back(obb_local(p, d.moving_obb));
  d.src_b_local.reserve(d.src_b.size());
  for (const Vec3& p : d.src_b) d.src_b_local.push_back(obb_local(p, d.base_obb));

  if (type == MotionType::kHinge) {
    int m = std::min<int>(contact_count, std::min(src_m.size(), src_b.size()));
    ContactPair cp = contact_points(src_m, src_b, m);
    for (int i : cp.a_indices) d.contacts_m.push_back(src_m.points[i]);
    for (int i : cp.b_indices) d.contacts_b.push_back(src_b.points[i]);
  } else {
    int m = std::min<int>(neighbor_count, src_b.size());
    ContactPair cp = contact_points(src_b, src_m, m);
    for (int i : cp.a_indices) d.neighbors_b.push_back(src_b.points[i]);
  }

  double worst = 0.0;
  for (const Vec3& p : d.src_b) worst = std::min(worst, box_sdf(p, d.moving_obb));
  d.d0 = worst;  // min(0, deepest rest-pose penetration)
  return d;
}

}  // namespace pm
