#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "partmotion/error.hpp"
#include "partmotion/geometry.hpp"
#include "partmotion/mesh.hpp"
#include "partmotion/rng.hpp"

using namespace pm;

namespace {

PointCloud random_cloud(size_t n, Rng& rng, double scale = 1.0) {
  PointCloud c;
  c.points.reserve(n);
  for (size_t i = 0; i < n; ++i)
    c.points.push_back({rng.uniform(-scale, scale), rng.uniform(-scale, scale),
                        rng.uniform(-scale, scale)});
  return c;
}

// Exhaustive double-loop chamfer oracle.
double chamfer_oracle(const PointCloud& a, const PointCloud& b) {
  auto one_way = [](const PointCloud& from, const PointCloud& to) {
    double sum = 0;
    for (const Vec3& p : from.points) {
      double best = std::numeric_limits<double>::infinity();
      for (const Vec3& q : to.points) best = std::min(best, norm(p - q));
      sum += best;
    }
    return sum / static_cast<double>(from.size());
  };
  return one_way(a, b) + one_way(b, a);
}

PointCloud cube_corners() {
  PointCloud c;
  for (int i = 0; i < 8; ++i)
    c.points.push_back({(i & 1) ? 0.5 : -0.5, (i & 2) ? 0.5 : -0.5, (i & 4) ? 0.5 : -0.5});
  return c;
}

PointCloud rotated(const PointCloud& c, const Vec3& axis, double angle, const Vec3& center) {
  PointCloud out = c;
  for (Vec3& p : out.points) p = rotate_axis_angle(p, axis, angle, center);
  return out;
}

}  // namespace

TEST_CASE("sample_mesh_surface: unit square centroid and bounds") {
  TriMesh square;
  square.vertices = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
  square.triangles = {{0, 1, 2}, {0, 2, 3}};
  PointCloud c = sample_mesh_surface(square, 1000, 7);
  REQUIRE(c.size() == 1000);
  Vec3 centroid{0, 0, 0};
  for (const Vec3& p : c.points) {
    CHECK(p.x >= 0.0);
    CHECK(p.x <= 1.0);
    CHECK(p.y >= 0.0);
    CHECK(p.y <= 1.0);
    CHECK(p.z == 0.0);
    centroid += p;
  }
  centroid = centroid / 1000.0;
  CHECK(std::abs(centroid.x - 0.5) < 0.05);
  CHECK(std::abs(centroid.y - 0.5) < 0.05);
}

TEST_CASE("sample_mesh_surface: deterministic given seed") {
  TriMesh tri;
  tri.vertices = {{0, 0, 0}, {2, 0, 0}, {0, 3, 0}};
  tri.triangles = {{0, 1, 2}};
  PointCloud a = sample_mesh_surface(tri, 3, 42);
  PointCloud b = sample_mesh_surface(tri, 3, 42);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a.points[i].x == b.points[i].x);
    CHECK(a.points[i].y == b.points[i].y);
    CHECK(a.points[i].z == b.points[i].z);
  }
}

TEST_CASE("sample_mesh_surface: area-proportional allocation") {
  // Triangle areas 1 and 3; expect ~75% of 10000 samples on the larger.
  TriMesh two;
  two.vertices = {{0, 0, 0}, {2, 0, 0}, {0, 1, 0},           // area 1
                  {10, 0, 0}, {12, 0, 0}, {10, 3, 0}};       // area 3
  two.triangles = {{0, 1, 2}, {3, 4, 5}};
  PointCloud c = sample_mesh_surface(two, 10000, 11);
  int on_large = 0;
  for (const Vec3& p : c.points)
    if (p.x >= 9.0) ++on_large;
  double frac = on_large / 10000.0;
  CHECK(frac == doctest::Approx(0.75).epsilon(0.0267));  // within 2 percentage points
  CHECK(std::abs(frac - 0.75) < 0.02);
}

TEST_CASE("sample_mesh_surface: degenerate mesh errors") {
  TriMesh degenerate;
  degenerate.vertices = {{0, 0, 0}, {1, 1, 1}, {2, 2, 2}};
  degenerate.triangles = {{0, 1, 2}};
  CHECK_THROWS_AS(sample_mesh_surface(degenerate, 10, 1), InputError);
}

TEST_CASE("chamfer: identity, forced value, symmetry") {
  Rng rng(3);
  PointCloud a = random_cloud(40, rng);
  CHECK(chamfer(a, a) == 0.0);

  PointCloud single;
  single.points = {{0, 0, 0}};
  PointCloud pair;
  pair.points = {{1, 0, 0}, {-1, 0, 0}};
  CHECK(chamfer(single, pair) == doctest::Approx(2.0));
  CHECK(chamfer(single, pair) == chamfer(pair, single));

  PointCloud empty;
  CHECK_THROWS_AS(chamfer(a, empty), InputError);
}

TEST_CASE("chamfer: matches brute-force oracle exactly") {
  Rng rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    PointCloud a = random_cloud(50, rng);
    PointCloud b = random_cloud(50, rng);
    CHECK(chamfer(a, b) == chamfer_oracle(a, b));
  }
}

TEST_CASE("chamfer: rigid invariance") {
  Rng rng(23);
  PointCloud a = random_cloud(30, rng);
  PointCloud b = random_cloud(30, rng);
  double base = chamfer(a, b);
  Vec3 axis = normalized(Vec3{1, 2, 3});
  PointCloud ar = rotated(a, axis, 0.7, {0.1, -0.2, 0.3});
  PointCloud br = rotated(b, axis, 0.7, {0.1, -0.2, 0.3});
  for (Vec3& p : ar.points) p += Vec3{1, -2, 0.5};
  for (Vec3& p : br.points) p += Vec3{1, -2, 0.5};
  CHECK(chamfer(ar, br) == doctest::Approx(base).epsilon(1e-9));
}

TEST_CASE("nearest neighbors: grid path agrees exactly with brute force") {
  Rng rng(31);
  PointCloud big = random_cloud(5000, rng);  // above the brute-force limit
  PointCloud queries = random_cloud(200, rng);
  std::vector<int> fast = nearest_indices(queries.points, big.points);
  for (size_t i = 0; i < queries.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    int best_idx = -1;
    for (size_t j = 0; j < big.size(); ++j) {
      double d = dist2(queries.points[i], big.points[j]);
      if (d < best) {
        best = d;
        best_idx = static_cast<int>(j);
      }
    }
    CHECK(fast[i] == best_idx);
  }
}

TEST_CASE("min_volume_obb: axis-aligned cube") {
  OrientedBox box = min_volume_obb(cube_corners());
  CHECK(box.half_extents.x == doctest::Approx(0.5));
  CHECK(box.half_extents.y == doctest::Approx(0.5));
  CHECK(box.half_extents.z == doctest::Approx(0.5));
  // Axes are world axes up to permutation/sign.
  for (const Vec3& a : box.axes) {
    double m = std::max({std::abs(a.x), std::abs(a.y), std::abs(a.z)});
    CHECK(m == doctest::Approx(1.0).epsilon(1e-9));
  }
  CHECK(box.volume() == doctest::Approx(1.0));
}

TEST_CASE("min_volume_obb: rotated cube beats the AABB") {
  // Dense cube surface so PCA has signal, rotated 45 degrees about z.
  TriMesh cube = make_box({0, 0, 0}, {0.5, 0.5, 0.5});
  rotate(cube, {0, 0, 1}, 0.25 * 3.141592653589793, {0, 0, 0});
  PointCloud c = sample_mesh_surface(cube, 2000, 5);
  OrientedBox box = min_volume_obb(c);
  CHECK(box.volume() < 1.05);
  CHECK(box.volume() > 0.80);
  Aabb ab = bounding_box(c.points);
  CHECK(box.volume() <= ab.volume() + 1e-12);
}

TEST_CASE("min_volume_obb: repeated point clamps") {
  PointCloud c;
  for (int i = 0; i < 5; ++i) c.points.push_back({1, 2, 3});
  OrientedBox box = min_volume_obb(c);
  CHECK(box.center.x == doctest::Approx(1.0));
  CHECK(box.center.y == doctest::Approx(2.0));
  CHECK(box.center.z == doctest::Approx(3.0));
  CHECK(box.half_extents.x == doctest::Approx(1e-6));
  CHECK(box.half_extents.y == doctest::Approx(1e-6));
  CHECK(box.half_extents.z == doctest::Approx(1e-6));
}

TEST_CASE("min_volume_obb: volume invariant under rigid motion") {
  Rng rng(41);
  TriMesh slab = make_box({0, 0, 0}, {0.8, 0.3, 0.1});
  PointCloud c = sample_mesh_surface(slab, 1500, 9);
  double v0 = min_volume_obb(c).volume();
  PointCloud cr = rotated(c, normalized(Vec3{1, 1, 0.2}), 1.1, {0, 0, 0});
  for (Vec3& p : cr.points) p += Vec3{3, -1, 2};
  double v1 = min_volume_obb(cr).volume();
  CHECK(v1 == doctest::Approx(v0).epsilon(0.01));
}

TEST_CASE("box_sdf: unit cube values") {
  OrientedBox box;
  box.center = {0, 0, 0};
  box.half_extents = {0.5, 0.5, 0.5};
  CHECK(box_sdf({0, 0, 0}, box) == doctest::Approx(-0.5));
  CHECK(box_sdf({1.5, 0, 0}, box) == doctest::Approx(1.0));
  CHECK(box_sdf({1, 1, 0}, box) == doctest::Approx(std::sqrt(0.5)));
}

TEST_CASE("box_sdf: 1-Lipschitz") {
  OrientedBox box;
  box.center = {0.2, -0.1, 0.4};
  box.axes = {normalized(Vec3{1, 1, 0}), normalized(Vec3{-1, 1, 0}), Vec3{0, 0, 1}};
  box.half_extents = {0.7, 0.2, 0.4};
  Rng rng(55);
  for (int i = 0; i < 500; ++i) {
    Vec3 p{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
    Vec3 q{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
    CHECK(std::abs(box_sdf(p, box) - box_sdf(q, box)) <= norm(p - q) + 1e-12);
  }
}

TEST_CASE("diag: cube, single point, 3-4-5") {
  CHECK(diag(cube_corners()) == doctest::Approx(std::sqrt(3.0)));
  PointCloud single;
  single.points = {{1, 1, 1}};
  CHECK(diag(single) == 0.0);
  PointCloud two;
  two.points = {{0, 0, 0}, {3, 4, 0}};
  CHECK(diag(two) == doctest::Approx(5.0));
}

TEST_CASE("contact_points: touching cubes select the shared face") {
  TriMesh left = make_box({0.5, 0.5, 0.5}, {0.5, 0.5, 0.5});
  TriMesh right = make_box({1.5, 0.5, 0.5}, {0.5, 0.5, 0.5});
  PointCloud a = sample_mesh_surface(left, 400, 1);
  PointCloud b = sample_mesh_surface(right, 400, 2);
  ContactPair cp = contact_points(a, b, 10);
  REQUIRE(cp.a_indices.size() == 10);
  REQUIRE(cp.b_indices.size() == 10);
  // Selected points hug the x=1 plane more tightly than the cloud median.
  auto max_gap = [](const PointCloud& c, const std::vector<int>& idx) {
    double worst = 0;
    for (int i : idx) worst = std::max(worst, std::abs(c.points[i].x - 1.0));
    return worst;
  };
  CHECK(max_gap(a, cp.a_indices) < 0.2);
  CHECK(max_gap(b, cp.b_indices) < 0.2);
}

TEST_CASE("contact_points: m equals cloud size returns everything") {
  Rng rng(8);
  PointCloud a = random_cloud(12, rng);
  PointCloud b = random_cloud(20, rng);
  ContactPair cp = contact_points(a, b, 12);
  std::vector<int> sorted = cp.a_indices;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 12; ++i) CHECK(sorted[i] == i);
}

TEST_CASE("contact_points: matches exhaustive sort oracle") {
  Rng rng(77);
  PointCloud a = random_cloud(60, rng);
  PointCloud b = random_cloud(45, rng);
  ContactPair cp = contact_points(a, b, 7);

  std::vector<double> da(a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (const Vec3& q : b.points) best = std::min(best, norm(a.points[i] - q));
    da[i] = best;
  }
  std::vector<int> order(a.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return da[i] < da[j]; });
  for (int i = 0; i < 7; ++i) CHECK(cp.a_indices[i] == order[i]);
}

TEST_CASE("principal_axes: line, isotropic, plane") {
  Rng rng(91);
  PointCloud line;
  for (int i = 0; i < 200; ++i)
    line.points.push_back({rng.uniform(-1, 1), 0.001 * rng.normal(), 0.001 * rng.normal()});
  auto axes = principal_axes(line);
  CHECK(std::abs(axes[0].x) > std::cos(1.0 * 3.141592653589793 / 180.0));

  PointCloud blob;
  for (int i = 0; i < 500; ++i)
    blob.points.push_back({rng.normal(), rng.normal(), rng.normal()});
  auto iso = principal_axes(blob);
  for (int i = 0; i < 3; ++i) {
    CHECK(norm(iso[i]) == doctest::Approx(1.0).epsilon(1e-9));
    for (int j = i + 1; j < 3; ++j) CHECK(std::abs(dot(iso[i], iso[j])) < 1e-9);
  }

  PointCloud plane;
  for (int i = 0; i < 300; ++i)
    plane.points.push_back({rng.uniform(-1, 1), rng.uniform(-2, 2), 0.0});
  auto pax = principal_axes(plane);
  CHECK(std::abs(pax[2].z) > 0.9999);
}

TEST_CASE("connected_component_count: basic and oracle") {
  TriMesh cube = make_box({0, 0, 0}, {0.5, 0.5, 0.5});
  PointCloud one = sample_mesh_surface(cube, 300, 3);
  CHECK(connected_component_count(one, 0.3) == 1);

  TriMesh far_cube = make_box({2.0, 0, 0}, {0.5, 0.5, 0.5});  // gap 1.0
  PointCloud two = one;
  PointCloud c2 = sample_mesh_surface(far_cube, 300, 4);
  two.points.insert(two.points.end(), c2.points.begin(), c2.points.end());
  CHECK(connected_component_count(two, 0.3) == 2);

  // Oracle: BFS over the epsilon graph on random clustered clouds.
  Rng rng(101);
  for (int trial = 0; trial < 3; ++trial) {
    PointCloud c;
    int clusters = 2 + static_cast<int>(rng.index(3));
    for (int k = 0; k < clusters; ++k) {
      Vec3 center{rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)};
      for (int i = 0; i < 40; ++i)
        c.points.push_back(center + Vec3{0.05 * rng.normal(), 0.05 * rng.normal(),
                                         0.05 * rng.normal()});
    }
    double eps = 0.2;
    // BFS oracle
    size_t n = c.size();
    std::vector<int> label(n, -1);
    int comp = 0;
    for (size_t i = 0; i < n; ++i) {
      if (label[i] >= 0) continue;
      std::vector<size_t> stack{i};
      label[i] = comp;
      while (!stack.empty()) {
        size_t u = stack.back();
        stack.pop_back();
        for (size_t v = 0; v < n; ++v)
          if (label[v] < 0 && dist2(c.points[u], c.points[v]) <= eps * eps) {
            label[v] = comp;
            stack.push_back(v);
          }
      }
      ++comp;
    }
    CHECK(connected_component_count(c, eps) == comp);
  }
}

TEST_CASE("subsample: deterministic and flag-preserving") {
  Rng rng(13);
  PointCloud c = random_cloud(100, rng);
  c.flags.assign(100, 0);
  for (int i = 0; i < 50; ++i) c.flags[i] = 1;
  PointCloud s1 = subsample(c, 32, 99);
  PointCloud s2 = subsample(c, 32, 99);
  REQUIRE(s1.size() == 32);
  REQUIRE(s1.flags.size() == 32);
  for (size_t i = 0; i < 32; ++i) CHECK(s1.points[i].x == s2.points[i].x);
}
