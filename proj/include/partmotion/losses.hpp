#pragma once

#include <array>
#include <span>
#include <vector>

#include "partmotion/articulation.hpp"
#include "partmotion/autodiff.hpp"
#include "partmotion/geometry.hpp"

namespace pm {

// One preset per motion type; defaults from the published hyperparameter
// tables, thresholds exposed in the config.
struct LossWeights {
  double w_joint = 0.001;
  double w_align_global = 0.0;
  double w_align_local = 0.0025;
  double w_collide = 0.01;
  double w_detach = 0.01;
  double w_center_detach = 5.0;
  double w_deform = 0.001;
  double tau_theta = 0.3;     // radians
  double tau_d_scale = 0.15;  // tau_d = tau_d_scale * moving OBB max extent
  double contact_slack = 0.01;
  int path_samples = 8;

  static LossWeights hinge_preset();
  static LossWeights prismatic_preset();
};

double resolve_tau(const LossWeights& w, MotionType type, const OrientedBox& moving_obb);

struct LossBreakdown {
  double recon = 0, joint = 0, align = 0, deform = 0, collide = 0, detach = 0;
  double total = 0;
};

// Motion parameters as tape variables. `axis_unit` must already be
// normalized on the tape; `center` is meaningful for hinges only.
struct MotionVars {
  MotionType type = MotionType::kHinge;
  ad::VarV3 axis_unit;
  ad::VarV3 center;
  ad::Var amount;
};

// --- tape-level building blocks ---

// Bidirectional chamfer between a transformed cloud and a fixed target.
// Nearest-neighbor correspondences are selected by value each call and
// treated as piecewise-constant; gradients flow through the matched pairs.
ad::Var chamfer_var(ad::Tape& tape, std::span<const ad::VarV3> a, std::span<const Vec3> b);

// AABB diagonal of a Var cloud (max/min reductions, subgradient through the
// extremal points).
ad::Var diag_var(ad::Tape& tape, std::span<const ad::VarV3> pts);

ad::Var box_sdf_var(ad::Tape& tape, const ad::VarV3& p, const OrientedBox& box);

// --- loss terms ---

ad::Var recon_loss(ad::Tape& tape, std::span<const ad::VarV3> moved_m,
                   std::span<const ad::VarV3> moved_b, std::span<const Vec3> tgt_m,
                   std::span<const Vec3> tgt_b);

ad::Var small_motion_penalty(ad::Tape& tape, ad::Var amount, double tau, double w_joint);

ad::Var alignment_penalty(ad::Tape& tape, ad::Var global_up_rotation, const ad::VarV3& t_local,
                          double w_global, double w_local);

ad::Var deformation_penalty(ad::Tape& tape, std::span<const ad::Var> faces_m,
                            std::span<const ad::Var> faces_b, double w_deform);

// Mean over path poses and base points of max(0, d0 - sdf(x, moving box at
// pose i)), poses i/n * amount for i=1..n. d0 = min(0, min rest-pose sdf); the
// rest pose never contributes. Points whose term is zero are skipped on the
// tape (their subgradient is zero), which leaves the value exact.
ad::Var collision_penalty(ad::Tape& tape, std::span<const Vec3> base_pts,
                          const OrientedBox& moving_obb, const MotionVars& motion, int n,
                          double d0, double w_collide);

// Contact sets come from contact_points() at the rest pose. Each rotated
// moving contact is paired with its nearest base contact (selected by value
// per pose); the distance sum above the slack is penalized.
ad::Var detachment_penalty_hinge(ad::Tape& tape, std::span<const Vec3> moving_contacts,
                                 std::span<const Vec3> base_contacts,
                                 const OrientedBox& moving_obb, const MotionVars& motion, int n,
                                 double slack, double w_detach, double w_center);

ad::Var detachment_penalty_prismatic(ad::Tape& tape, std::span<const Vec3> base_neighbors,
                                     const OrientedBox& moving_obb, const MotionVars& motion,
                                     int n, double w_detach);

// --- per-pair assembly ---

// Everything constant about a (source, target) pair during optimization.
struct PairContext {
  std::span<const Vec3> src_m;        // source clouds at rest
  std::span<const Vec3> src_b;
  std::span<const Vec3> src_m_local;  // OBB-frame coords for the deformers
  std::span<const Vec3> src_b_local;
  std::span<const Vec3> tgt_m;        // prealigned target clouds
  std::span<const Vec3> tgt_b;
  const OrientedBox* moving_obb = nullptr;
  const OrientedBox* base_obb = nullptr;
  Vec3 up{0, 0, 1};
  std::vector<Vec3> contacts_m;       // rank-sorted hinge contacts
  std::vector<Vec3> contacts_b;
  std::vector<Vec3> neighbors_b;      // prismatic base neighbors
  double d0 = 0;
  MotionType type = MotionType::kHinge;
  double tau = 0.3;
  LossWeights weights;
};

struct PairParamVars {
  ad::VarV3 axis_raw;                 // free 3-vector, normalized in-graph
  ad::VarV3 center;
  ad::Var amount;
  ad::VarV3 t_global;
  ad::Var r_global;
  ad::VarV3 t_local;
  std::array<ad::Var, 6> deform_m;
  std::array<ad::Var, 6> deform_b;
};

struct PairLossVars {
  ad::Var recon, joint, align, deform, collide, detach, total;
};

// Builds all six terms and their sum for one pair; throws NumericalError
// naming the term if any component is non-finite.
PairLossVars total_loss(ad::Tape& tape, const PairContext& ctx, const PairParamVars& params);

LossBreakdown breakdown_of(const PairLossVars& v);

// Transformed source clouds for a pair (deform in rest OBB frame, joint
// motion, local translation, global up-rotation, global translation).
void transform_pair_clouds(ad::Tape& tape, const PairContext& ctx, const PairParamVars& params,
                           const MotionVars& motion, std::vector<ad::VarV3>& out_m,
                           std::vector<ad::VarV3>& out_b);

MotionVars make_motion_vars(ad::Tape& tape, const PairContext& ctx, const PairParamVars& params);

// Canonical flat packing of one pair's parameters:
// axis_raw(3), center(3), amount(1), t_global(3), r_global(1), t_local(3),
// deform_m(6), deform_b(6).
inline constexpr size_t kPairParamCount = 26;
PairParamVars make_pair_params(std::span<const ad::Var> vars);

// Owns everything a PairContext points into; context() rebuilds the spans.
struct PairData {
  std::vector<Vec3> src_m, src_b, src_m_local, src_b_local, tgt_m, tgt_b;
  OrientedBox moving_obb, base_obb;
  std::vector<Vec3> contacts_m, contacts_b, neighbors_b;
  double d0 = 0;
  MotionType type = MotionType::kHinge;
  double tau = 0.3;
  LossWeights weights;
  Vec3 up{0, 0, 1};

  PairContext context() const;
};

// Precomputes OBBs, deformer-frame locals, rest contacts/neighbors and d0.
PairData make_pair_data(const PointCloud& src_m, const PointCloud& src_b,
                        const PointCloud& tgt_m, const PointCloud& tgt_b, MotionType type,
                        const LossWeights& weights, int contact_count, int neighbor_count,
                        const Vec3& up);

}  // namespace pm
