#include "partmotion/geometry.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "partmotion/error.hpp"
#include "partmotion/rng.hpp"

namespace pm {

namespace {

constexpr size_t kBruteForceLimit = 4096;
constexpr double kPi = 3.14159265358979323846;

struct Best {
  double d2 = std::numeric_limits<double>::infinity();
  int idx = -1;
  void offer(double d2c, int i) {
    if (d2c < d2 || (d2c == d2 && i < idx)) {
      d2 = d2c;
      idx = i;
    }
  }
};

int brute_nearest(const Vec3& q, std::span<const Vec3> data) {
  Best best;
  for (size_t i = 0; i < data.size(); ++i) best.offer(dist2(q, data[i]), static_cast<int>(i));
  return best.idx;
}

// Uniform hash grid for exact nearest-neighbor queries on large clouds.
class PointGrid {
 public:
  explicit PointGrid(std::span<const Vec3> data) : data_(data) {
    Aabb box = bounding_box(data);
    lo_ = box.lo;
    double d = box.diagonal();
    double target = std::cbrt(static_cast<double>(data.size()));
    cell_ = d > 0 ? d / std::max(1.0, target) : 1.0;
    if (cell_ <= 0) cell_ = 1.0;
    cells_.reserve(data.size());
    for (size_t i = 0; i < data.size(); ++i) {
      cells_[key(cell_of(data[i]))].push_back(static_cast<int>(i));
    }
  }

  int nearest(const Vec3& q) const {
    std::array<long long, 3> c = cell_of(q);
    Best best;
    for (long long ring = 0;; ++ring) {
      scan_ring(q, c, ring, best);
      if (best.idx >= 0) {
        // All cells within Chebyshev ring r cover every point closer than
        // r*cell_ from the query's cell boundary.
        double safe = static_cast<double>(ring) * cell_;
        if (best.d2 <= safe * safe) break;
      }
      if (ring > max_ring_) break;
    }
    return best.idx;
  }

 private:
  static long long floor_div(double v) { return static_cast<long long>(std::floor(v)); }

  std::array<long long, 3> cell_of(const Vec3& p) const {
    return {floor_div((p.x - lo_.x) / cell_), floor_div((p.y - lo_.y) / cell_),
            floor_div((p.z - lo_.z) / cell_)};
  }

  static uint64_t key(const std::array<long long, 3>& c) {
    uint64_t h = 1469598103934665603ull;
    for (long long v : c) {
      h ^= static_cast<uint64_t>(v) + 0x9e3779b97f4a7c15ull;
      h *= 1099511628211ull;
    }
    return h;
  }

  void scan_ring(const Vec3& q, const std::array<long long, 3>& c, long long r, Best& best) const {
    for (long long dx = -r; dx <= r; ++dx) {
      for (long long dy = -r; dy <= r; ++dy) {
        for (long long dz = -r; dz <= r; ++dz) {
          if (std::max({std::llabs(dx), std::llabs(dy), std::llabs(dz)}) != r) continue;
          auto it = cells_.find(key({c[0] + dx, c[1] + dy, c[2] + dz}));
          if (it == cells_.end()) continue;
          for (int i : it->second) best.offer(dist2(q, data_[i]), i);
        }
      }
    }
  }

  std::span<const Vec3> data_;
  Vec3 lo_;
  double cell_ = 1.0;
  long long max_ring_ = 1 << 12;
  std::unordered_map<uint64_t, std::vector<int>> cells_;
};

Vec3 sign_normalized(Vec3 v) {
  double lead = std::abs(v.x) > 1e-12 ? v.x : (std::abs(v.y) > 1e-12 ? v.y : v.z);
  return lead < 0 ? -v : v;
}

}  // namespace

Aabb bounding_box(std::span<const Vec3> pts) {
  if (pts.empty()) throw InputError("bounding_box: empty point set");
  Aabb box{pts[0], pts[0]};
  for (const Vec3& p : pts) {
    box.lo.x = std::min(box.lo.x, p.x);
    box.lo.y = std::min(box.lo.y, p.y);
    box.lo.z = std::min(box.lo.z, p.z);
    box.hi.x = std::max(box.hi.x, p.x);
    box.hi.y = std::max(box.hi.y, p.y);
    box.hi.z = std::max(box.hi.z, p.z);
  }
  return box;
}

double diag(const PointCloud& cloud) {
  if (cloud.empty()) throw InputError("diag: empty cloud");
  return bounding_box(cloud.points).diagonal();
}

std::vector<int> nearest_indices(std::span<const Vec3> queries, std::span<const Vec3> data) {
  if (data.empty()) throw InputError("nearest_indices: empty data cloud");
  std::vector<int> out(queries.size());
  if (data.size() < kBruteForceLimit) {
    for (size_t i = 0; i < queries.size(); ++i) out[i] = brute_nearest(queries[i], data);
  } else {
    PointGrid grid(data);
    for (size_t i = 0; i < queries.size(); ++i) out[i] = grid.nearest(queries[i]);
  }
  return out;
}

std::vector<double> nearest_distances(std::span<const Vec3> queries, std::span<const Vec3> data) {
  std::vector<int> idx = nearest_indices(queries, data);
  std::vector<double> out(queries.size());
  for (size_t i = 0; i < queries.size(); ++i)
    out[i] = std::sqrt(dist2(queries[i], data[idx[i]]));
  return out;
}

double chamfer(const PointCloud& a, const PointCloud& b) {
  if (a.empty() || b.empty()) throw InputError("chamfer: empty cloud");
  double sum_ab = 0;
  for (double d : nearest_distances(a.points, b.points)) sum_ab += d;
  double sum_ba = 0;
  for (double d : nearest_distances(b.points, a.points)) sum_ba += d;
  return sum_ab / static_cast<double>(a.size()) + sum_ba / static_cast<double>(b.size());
}

double box_sdf(const Vec3& p, const OrientedBox& box) {
  Vec3 d = p - box.center;
  Vec3 q{std::abs(dot(d, box.axes[0])) - box.half_extents.x,
         std::abs(dot(d, box.axes[1])) - box.half_extents.y,
         std::abs(dot(d, box.axes[2])) - box.half_extents.z};
  Vec3 qp{std::max(q.x, 0.0), std::max(q.y, 0.0), std::max(q.z, 0.0)};
  double outside = norm(qp);
  double inside = std::min(std::max({q.x, q.y, q.z}), 0.0);
  return outside + inside;
}

std::array<Vec3, 3> principal_axes(const PointCloud& cloud) {
  if (cloud.empty()) throw InputError("principal_axes: empty cloud");
  Vec3 mean{0, 0, 0};
  for (const Vec3& p : cloud.points) mean += p;
  mean = mean / static_cast<double>(cloud.size());

  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const Vec3& p : cloud.points) {
    Eigen::Vector3d d(p.x - mean.x, p.y - mean.y, p.z - mean.z);
    cov += d * d.transpose();
  }
  cov /= static_cast<double>(cloud.size());

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
  // Eigen returns ascending eigenvalues.
  std::array<std::pair<double, Vec3>, 3> pairs;
  for (int i = 0; i < 3; ++i) {
    Eigen::Vector3d v = es.eigenvectors().col(2 - i);
    pairs[i] = {es.eigenvalues()(2 - i), sign_normalized({v.x(), v.y(), v.z()})};
  }
  auto lex_less = [](const Vec3& a, const Vec3& b) {
    if (a.x != b.x) return a.x < b.x;
    if (a.y != b.y) return a.y < b.y;
    return a.z < b.z;
  };
  std::stable_sort(pairs.begin(), pairs.end(), [&](const auto& a, const auto& b) {
    if (std::abs(a.first - b.first) >= 1e-9) return a.first > b.first;
    return lex_less(a.second, b.second);
  });
  return {pairs[0].second, pairs[1].second, pairs[2].second};
}

namespace {

OrientedBox box_from_frame(std::span<const Vec3> pts, const std::array<Vec3, 3>& axes) {
  Vec3 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity()};
  Vec3 hi = -lo;
  for (const Vec3& p : pts) {
    for (int k = 0; k < 3; ++k) {
      double c = dot(p, axes[k]);
      lo[k] = std::min(lo[k], c);
      hi[k] = std::max(hi[k], c);
    }
  }
  OrientedBox box;
  box.axes = axes;
  Vec3 mid = (lo + hi) * 0.5;
  box.center = axes[0] * mid.x + axes[1] * mid.y + axes[2] * mid.z;
  box.half_extents = {std::max((hi.x - lo.x) * 0.5, 1e-6), std::max((hi.y - lo.y) * 0.5, 1e-6),
                      std::max((hi.z - lo.z) * 0.5, 1e-6)};
  return box;
}

std::array<Vec3, 3> rotated_frame(const std::array<Vec3, 3>& f, double ax, double ay, double az) {
  // Small rotations about the frame's own axes, applied x then y then z.
  std::array<Vec3, 3> out = f;
  auto rot_all = [&out](const Vec3& axis, double ang) {
    for (Vec3& v : out) v = rotate_axis_angle(v, axis, ang, Vec3{0, 0, 0});
  };
  Vec3 a0 = out[0], a1 = out[1], a2 = out[2];
  rot_all(a0, ax);
  a1 = out[1];
  rot_all(a1, ay);
  a2 = out[2];
  rot_all(a2, az);
  return out;
}

void canonicalize(OrientedBox& box) {
  std::array<std::pair<double, Vec3>, 3> pairs = {
      std::pair{box.half_extents.x, box.axes[0]},
      std::pair{box.half_extents.y, box.axes[1]},
      std::pair{box.half_extents.z, box.axes[2]},
  };
  std::stable_sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
    return a.first > b.first;
  });
  Vec3 a0 = sign_normalized(pairs[0].second);
  Vec3 a1 = sign_normalized(pairs[1].second);
  Vec3 a2 = cross(a0, a1);
  box.axes = {a0, a1, a2};
  box.half_extents = {pairs[0].first, pairs[1].first, pairs[2].first};
}

}  // namespace

OrientedBox min_volume_obb(const PointCloud& cloud) {
  if (cloud.empty()) throw InputError("min_volume_obb: empty cloud");
  std::span<const Vec3> pts(cloud.points);

  // Search on a subsample, fit the final box on the full cloud.
  std::vector<Vec3> sub;
  std::span<const Vec3> search_pts = pts;
  if (pts.size() > 256) {
    sub.reserve(256);
    for (size_t i = 0; i < 256; ++i) sub.push_back(pts[i * pts.size() / 256]);
    search_pts = sub;
  }

  std::array<Vec3, 3> world{Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}};
  std::array<Vec3, 3> pca = principal_axes(cloud);

  // Candidate base frames: world (first, so exact ties resolve to world
  // alignment), PCA, and coarse single-axis sweeps that cover symmetric
  // shapes where the covariance spectrum is degenerate and PCA is noise.
  std::vector<std::array<Vec3, 3>> bases{world, pca};
  for (int axis = 0; axis < 3; ++axis) {
    for (int deg = 15; deg < 90; deg += 15) {
      double a = deg * kPi / 180.0;
      std::array<double, 3> angs{0, 0, 0};
      angs[axis] = a;
      bases.push_back(rotated_frame(world, angs[0], angs[1], angs[2]));
    }
  }

  auto volume_of = [&](const std::array<Vec3, 3>& frame) {
    return box_from_frame(search_pts, frame).volume();
  };

  // Keep the two most promising base frames, then refine each with the
  // +-15 degree / 3 degree-step grid.
  std::stable_sort(bases.begin(), bases.end(), [&](const auto& a, const auto& b) {
    return volume_of(a) < volume_of(b);
  });
  if (bases.size() > 2) bases.resize(2);

  double best_vol = std::numeric_limits<double>::infinity();
  std::array<Vec3, 3> best_frame = world;
  const double step = 3.0 * kPi / 180.0;
  const int half_steps = 5;  // +-15 degrees
  for (const auto& base : bases) {
    for (int ix = -half_steps; ix <= half_steps; ++ix) {
      for (int iy = -half_steps; iy <= half_steps; ++iy) {
        for (int iz = -half_steps; iz <= half_steps; ++iz) {
          std::array<Vec3, 3> frame =
              (ix == 0 && iy == 0 && iz == 0)
                  ? base
                  : rotated_frame(base, ix * step, iy * step, iz * step);
          OrientedBox cand = box_from_frame(search_pts, frame);
          double vol = cand.volume();
          if (vol < best_vol) {
            best_vol = vol;
            best_frame = frame;
          }
        }
      }
    }
  }

  OrientedBox box = box_from_frame(pts, best_frame);
  // Never worse than the plain AABB.
  OrientedBox aabb_box = box_from_frame(pts, world);
  if (aabb_box.volume() < box.volume()) box = aabb_box;
  canonicalize(box);
  return box;
}

ContactPair contact_points(const PointCloud& a, const PointCloud& b, int m) {
  if (a.empty() || b.empty()) throw InputError("contact_points: empty cloud");
  if (m > static_cast<int>(std::min(a.size(), b.size())))
    throw InputError("contact_points: m exceeds cloud size");

  auto ranked = [m](const PointCloud& from, const PointCloud& to) {
    std::vector<double> d = nearest_distances(from.points, to.points);
    std::vector<int> order(from.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return d[i] < d[j]; });
    order.resize(m);
    return order;
  };
  return {ranked(a, b), ranked(b, a)};
}

int connected_component_count(const PointCloud& cloud, double eps) {
  if (cloud.empty()) throw InputError("connected_component_count: empty cloud");
  const size_t n = cloud.size();
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::vector<int> rank(n, 0);
  auto find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  auto unite = [&](int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank[a] < rank[b]) std::swap(a, b);
    parent[b] = a;
    if (rank[a] == rank[b]) ++rank[a];
  };

  const double eps2 = eps * eps;
  // Grid-bucket by eps cells; only neighboring cells can hold linked points.
  Aabb box = bounding_box(cloud.points);
  double cell = std::max(eps, 1e-12);
  std::unordered_map<uint64_t, std::vector<int>> cells;
  auto cell_key = [&](const Vec3& p) {
    auto f = [&](double v, double lo) { return static_cast<long long>(std::floor((v - lo) / cell)); };
    uint64_t h = 1469598103934665603ull;
    for (long long v : {f(p.x, box.lo.x), f(p.y, box.lo.y), f(p.z, box.lo.z)}) {
      h ^= static_cast<uint64_t>(v) + 0x9e3779b97f4a7c15ull;
      h *= 1099511628211ull;
    }
    return h;
  };
  for (size_t i = 0; i < n; ++i) cells[cell_key(cloud.points[i])].push_back(static_cast<int>(i));

  for (size_t i = 0; i < n; ++i) {
    const Vec3& p = cloud.points[i];
    auto fx = [&](double v, double lo) { return static_cast<long long>(std::floor((v - lo) / cell)); };
    long long cx = fx(p.x, box.lo.x), cy = fx(p.y, box.lo.y), cz = fx(p.z, box.lo.z);
    for (long long dx = -1; dx <= 1; ++dx)
      for (long long dy = -1; dy <= 1; ++dy)
        for (long long dz = -1; dz <= 1; ++dz) {
          uint64_t h = 1469598103934665603ull;
          for (long long v : {cx + dx, cy + dy, cz + dz}) {
            h ^= static_cast<uint64_t>(v) + 0x9e3779b97f4a7c15ull;
            h *= 1099511628211ull;
          }
          auto it = cells.find(h);
          if (it == cells.end()) continue;
          for (int j : it->second)
            if (static_cast<size_t>(j) > i && dist2(p, cloud.points[j]) <= eps2)
              unite(static_cast<int>(i), j);
        }
  }

  int count = 0;
  for (size_t i = 0; i < n; ++i)
    if (find(static_cast<int>(i)) == static_cast<int>(i)) ++count;
  return count;
}

double min_cloud_distance(const PointCloud& a, const PointCloud& b) {
  if (a.empty() || b.empty()) throw InputError("min_cloud_distance: empty cloud");
  std::vector<double> d = nearest_distances(a.points, b.points);
  return *std::min_element(d.begin(), d.end());
}

PointCloud subsample(const PointCloud& cloud, size_t n, uint64_t seed) {
  if (cloud.size() <= n) return cloud;
  std::vector<int> order(cloud.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  // Fisher-Yates prefix.
  for (size_t i = 0; i < n; ++i) {
    size_t j = i + rng.index(order.size() - i);
    std::swap(order[i], order[j]);
  }
  order.resize(n);
  std::sort(order.begin(), order.end());
  PointCloud out;
  out.points.reserve(n);
  bool has_flags = !cloud.flags.empty();
  if (has_flags) out.flags.reserve(n);
  for (int i : order) {
    out.points.push_back(cloud.points[i]);
    if (has_flags) out.flags.push_back(cloud.flags[i]);
  }
  return out;
}

}  // namespace pm
