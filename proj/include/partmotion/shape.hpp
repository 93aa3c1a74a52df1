#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "partmotion/geometry.hpp"
#include "partmotion/mesh.hpp"

namespace pm {

// Units: hinge ranges/poses in degrees, prismatic in model units.
struct GroundTruthMotion {
  std::string type;  // "hinge" | "prismatic" | "static"
  Vec3 axis{0, 0, 1};
  Vec3 center{0, 0, 0};
  bool has_center = false;
  double range_min = 0;
  double range_max = 0;

  bool movable() const { return type != "static"; }
};

struct Part {
  std::string id;
  TriMesh mesh;      // empty when points were supplied directly
  PointCloud cloud;  // sampled surface points (or the supplied points)
  std::optional<std::string> label;
  std::optional<GroundTruthMotion> gt;
};

struct Shape {
  std::string id;
  std::string category;
  Vec3 up{0, 0, 1};
  std::vector<Part> parts;
};

struct PartGraph {
  std::vector<std::string> nodes;  // part ids, same order as Shape::parts
  std::vector<std::pair<int, int>> edges;
  std::vector<std::vector<int>> adjacency;

  bool has_edge(int a, int b) const;
};

// Fills Part::cloud by sampling each part mesh (parts that already carry
// points keep them). Per-part seeds derive from (seed, shape id, part id).
void sample_shape_clouds(Shape& shape, size_t points_per_part, uint64_t seed);

double shape_diagonal(const Shape& shape);

// Edge (p, q) iff the minimum pairwise sampled-point distance is below
// eps_connect (absolute length).
PartGraph build_part_graph(const Shape& shape, double eps_connect);

struct Joint {
  std::string id;  // "<shape>/<moving part>"
  std::string shape_id;
  PointCloud moving;  // flags all kMoving
  PointCloud base;    // flags all kBase
  std::vector<std::string> moving_part_ids;
  std::string base_part_id;
  OrientedBox moving_obb;
  OrientedBox base_obb;
  int moving_components = 1;
  int base_components = 1;
};

struct JointExtractionOptions {
  double eps_connect = 0.01;       // absolute length, same value used for the graph
  double tiny_part_fraction = 0.02;  // drop joints with tiny moving parts
  std::function<void(const std::string&)> warn;  // optional
};

// One joint per non-isolated part. Cut parts absorb the parts their removal
// leaves floating (disconnected from every boundary part); the base cloud
// absorbs all non-moving geometry inside the initial base part's AABB.
std::vector<Joint> extract_joints(const Shape& shape, const PartGraph& graph,
                                  const JointExtractionOptions& opts);

// Poses every movable part inside its level-scaled ground-truth range and
// rewrites the stored ranges relative to the new rest pose. Every part must
// carry a ground-truth block.
Shape apply_pose_variation(const Shape& shape, int level, uint64_t seed);

// Shared uniform rotation of the whole shape (and its GT axes/centers) about
// the up axis through the origin.
Shape random_up_rotation(const Shape& shape, uint64_t seed);

}  // namespace pm
