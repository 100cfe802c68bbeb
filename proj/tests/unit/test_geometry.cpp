#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "dendrite/geometry.hpp"

using namespace dendrite;

namespace {

constexpr double kPi = std::numbers::pi;

Polyhedron unitSquare() {
  return Polyhedron::polygon({{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}});
}

Polyhedron unitCube() {
  std::vector<Point> v = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                          {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
  std::vector<std::vector<int>> faces = {{0, 3, 2, 1}, {4, 5, 6, 7}, {0, 1, 5, 4},
                                         {1, 2, 6, 5}, {2, 3, 7, 6}, {3, 0, 4, 7}};
  return Polyhedron::polytope(v, faces);
}

Similarity scaleMap(double r, const Vec& t) {
  return Similarity(r, Mat::identity(t.dim()), t);
}

Mat rotation2(double phi) {
  return Mat::fromRows({{std::cos(phi), -std::sin(phi)}, {std::sin(phi), std::cos(phi)}});
}

}  // namespace

TEST_CASE("apply_similarity basics") {
  // half scale about the origin
  Similarity s = scaleMap(0.5, Vec{0.0, 0.0});
  Point y = apply_similarity(s, {1.0, 0.0});
  CHECK(y.dist({0.5, 0.0}) < 1e-15);

  // center map of the Vicsek system fixes the square center
  Similarity s5 = scaleMap(1.0 / 3.0, Vec{1.0 / 3.0, 1.0 / 3.0});
  CHECK(s5.apply({0.5, 0.5}).dist({0.5, 0.5}) < 1e-15);

  // plain arithmetic: x/3 + t
  Similarity s2 = scaleMap(1.0 / 3.0, Vec{2.0 / 3.0, 0.0});
  CHECK(s2.apply({0.0, 1.0}).dist({2.0 / 3.0, 1.0 / 3.0}) < 1e-15);

  CHECK_THROWS_AS(s2.apply(Vec{1.0}), DimensionMismatch);
  CHECK_THROWS_AS(Similarity(1.0, Mat::identity(2), Vec{0.0, 0.0}), Error);
}

TEST_CASE("similarity scales all distances by its ratio") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> coord(-2.0, 2.0);
  std::uniform_real_distribution<double> ratio(0.05, 0.95);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  for (int trial = 0; trial < 200; ++trial) {
    double r = ratio(rng);
    Mat o = rotation2(angle(rng));
    if (trial % 2 == 1) {
      // compose with a reflection across the x axis
      o = o.times(Mat::fromRows({{1.0, 0.0}, {0.0, -1.0}}));
    }
    Similarity s(r, o, Vec{coord(rng), coord(rng)});
    Point x{coord(rng), coord(rng)};
    Point y{coord(rng), coord(rng)};
    double lhs = s.apply(x).dist(s.apply(y));
    double rhs = r * x.dist(y);
    CHECK(std::abs(lhs - rhs) <= 1e-9 * std::max(1.0, rhs));
  }
}

TEST_CASE("composition matches apply-then-apply and multiplies ratios") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  std::uniform_real_distribution<double> ratio(0.1, 0.9);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  for (int trial = 0; trial < 100; ++trial) {
    Similarity a(ratio(rng), rotation2(angle(rng)), Vec{coord(rng), coord(rng)});
    Similarity b(ratio(rng), rotation2(angle(rng)), Vec{coord(rng), coord(rng)});
    Similarity ab = a.compose(b);
    CHECK(std::abs(ab.ratio() - a.ratio() * b.ratio()) < 1e-14);
    Point x{coord(rng), coord(rng)};
    CHECK(ab.apply(x).dist(a.apply(b.apply(x))) < 1e-12);
  }
}

TEST_CASE("similarity_from_vertex_map recovers axis-aligned and reflected maps") {
  Polyhedron sq = unitSquare();

  SUBCASE("axis-aligned third scale") {
    std::vector<Point> targets = {{0.0, 0.0}, {1.0 / 3, 0.0}, {1.0 / 3, 1.0 / 3}, {0.0, 1.0 / 3}};
    Similarity s = similarity_from_vertex_map(sq, targets);
    CHECK(std::abs(s.ratio() - 1.0 / 3) < 1e-12);
    CHECK_FALSE(s.orientationReversing());
    CHECK(s.translation().dist({0.0, 0.0}) < 1e-12);
  }

  SUBCASE("interval half scale") {
    Polyhedron seg = Polyhedron::interval(Vec{0.0}, Vec{1.0});
    Similarity s = similarity_from_vertex_map(seg, {Vec{0.5}, Vec{1.0}});
    CHECK(std::abs(s.ratio() - 0.5) < 1e-12);
    CHECK(std::abs(s.translation()[0] - 0.5) < 1e-12);
  }

  SUBCASE("reflected vertex order") {
    std::vector<Point> targets = {{0.0, 0.0}, {0.0, 1.0 / 3}, {1.0 / 3, 1.0 / 3}, {1.0 / 3, 0.0}};
    Similarity s = similarity_from_vertex_map(sq, targets);
    CHECK(std::abs(s.ratio() - 1.0 / 3) < 1e-12);
    CHECK(s.orientationReversing());
    for (int k = 0; k < 4; ++k)
      for (int l = k + 1; l < 4; ++l) {
        double ds = sq.vertex(k).dist(sq.vertex(l));
        double dt = targets[static_cast<std::size_t>(k)].dist(targets[static_cast<std::size_t>(l)]);
        CHECK(std::abs(dt - ds / 3.0) < 1e-12);
      }
  }

  SUBCASE("not similar") {
    std::vector<Point> targets = {{0.0, 0.0}, {0.5, 0.0}, {0.5, 0.1}, {0.0, 0.1}};
    CHECK_THROWS_AS(similarity_from_vertex_map(sq, targets), NoSimilarityExists);
  }
}

TEST_CASE("vertex map round-trips through apply for random rigid placements") {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  std::uniform_real_distribution<double> ratio(0.1, 0.9);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  Polyhedron sq = unitSquare();
  for (int trial = 0; trial < 50; ++trial) {
    Similarity truth(ratio(rng), rotation2(angle(rng)), Vec{coord(rng), coord(rng)});
    std::vector<Point> targets;
    for (const Point& v : sq.vertices()) targets.push_back(truth.apply(v));
    Similarity rec = similarity_from_vertex_map(sq, targets);
    for (int k = 0; k < sq.vertexCount(); ++k)
      CHECK(rec.apply(sq.vertex(k)).dist(targets[static_cast<std::size_t>(k)]) < 1e-10);
  }
}

TEST_CASE("classify_intersection on the Vicsek pieces") {
  Polyhedron sq = unitSquare();
  Polyhedron p1 = sq.image(scaleMap(1.0 / 3.0, Vec{0.0, 0.0}));
  Polyhedron p2 = sq.image(scaleMap(1.0 / 3.0, Vec{2.0 / 3.0, 0.0}));
  Polyhedron p5 = sq.image(scaleMap(1.0 / 3.0, Vec{1.0 / 3.0, 1.0 / 3.0}));

  IntersectionClass far = classify_intersection(p1, p2);
  CHECK(far.kind == IntersectionKind::Disjoint);

  IntersectionClass corner = classify_intersection(p1, p5);
  REQUIRE(corner.kind == IntersectionKind::SharedVertex);
  CHECK(corner.point.dist({1.0 / 3.0, 1.0 / 3.0}) < 1e-12);
  CHECK(corner.indexInFirst == 2);   // image of (1,1)
  CHECK(corner.indexInSecond == 0);  // image of (0,0)

  // symmetry with swapped roles
  IntersectionClass swapped = classify_intersection(p5, p1);
  REQUIRE(swapped.kind == IntersectionKind::SharedVertex);
  CHECK(swapped.indexInFirst == 0);
  CHECK(swapped.indexInSecond == 2);
}

TEST_CASE("classify_intersection catches overlap and non-vertex touch") {
  Polyhedron a = unitSquare();
  Polyhedron b = Polyhedron::polygon({{0.5, 0.0}, {1.5, 0.0}, {1.5, 1.0}, {0.5, 1.0}});
  CHECK(classify_intersection(a, b).kind == IntersectionKind::Overlap);

  // half-scale triangles of the gasket meet at edge midpoints, which are
  // vertices of both: SharedVertex
  double h = 0.8660254037844386;
  Polyhedron tri = Polyhedron::polygon({{0.0, 0.0}, {1.0, 0.0}, {0.5, h}});
  Polyhedron t1 = tri.image(scaleMap(0.5, Vec{0.0, 0.0}));
  Polyhedron t2 = tri.image(scaleMap(0.5, Vec{0.5, 0.0}));
  IntersectionClass mid = classify_intersection(t1, t2);
  REQUIRE(mid.kind == IntersectionKind::SharedVertex);
  CHECK(mid.point.dist({0.5, 0.0}) < 1e-12);

  // point contact away from a mutual vertex is still a D2 violation
  Polyhedron c = Polyhedron::polygon({{0.5, 1.0}, {1.5, 1.0}, {1.5, 2.0}, {0.5, 2.0}});
  CHECK(classify_intersection(a, c).kind == IntersectionKind::Overlap);

  // edge contact
  Polyhedron d = Polyhedron::polygon({{0.0, 1.0}, {1.0, 1.0}, {1.0, 2.0}, {0.0, 2.0}});
  CHECK(classify_intersection(a, d).kind == IntersectionKind::Overlap);
}

TEST_CASE("classify_intersection in 1D") {
  Polyhedron i1 = Polyhedron::interval(Vec{0.0}, Vec{0.5});
  Polyhedron i2 = Polyhedron::interval(Vec{0.5}, Vec{1.0});
  Polyhedron i3 = Polyhedron::interval(Vec{0.6}, Vec{1.0});
  Polyhedron i4 = Polyhedron::interval(Vec{0.3}, Vec{0.8});
  IntersectionClass touch = classify_intersection(i1, i2);
  REQUIRE(touch.kind == IntersectionKind::SharedVertex);
  CHECK(touch.point.dist(Vec{0.5}) < 1e-12);
  CHECK(classify_intersection(i1, i3).kind == IntersectionKind::Disjoint);
  CHECK(classify_intersection(i1, i4).kind == IntersectionKind::Overlap);
}

TEST_CASE("polyhedron_contains") {
  Polyhedron sq = unitSquare();
  CHECK(polyhedron_contains(sq, sq.image(scaleMap(1.0 / 3.0, Vec{0.0, 0.0}))));
  CHECK_FALSE(polyhedron_contains(
      sq, Polyhedron::polygon({{0.9, 0.0}, {1.3, 0.0}, {1.3, 0.4}, {0.9, 0.4}})));

  double h = 0.8660254037844386;
  Polyhedron tri = Polyhedron::polygon({{0.0, 0.0}, {1.0, 0.0}, {0.5, h}});
  CHECK(polyhedron_contains(tri, tri.image(scaleMap(0.5, Vec{0.0, 0.0}))));
}

TEST_CASE("solid angles") {
  Polyhedron sq = unitSquare();
  for (int k = 0; k < 4; ++k) {
    SolidAngleValue a = solid_angle_measure(sq, k);
    CHECK(std::abs(a.measure - kPi / 2.0) < 1e-12);
    CHECK(std::abs(a.full - 2.0 * kPi) < 1e-15);
  }

  double h = 0.8660254037844386;
  Polyhedron tri = Polyhedron::polygon({{0.0, 0.0}, {1.0, 0.0}, {0.5, h}});
  CHECK(std::abs(solid_angle_measure(tri, 0).measure - kPi / 3.0) < 1e-9);

  Polyhedron cube = unitCube();
  for (int k = 0; k < 8; ++k) {
    SolidAngleValue a = solid_angle_measure(cube, k);
    CHECK(std::abs(a.measure - kPi / 2.0) < 1e-12);  // one octant
    CHECK(std::abs(a.full - 4.0 * kPi) < 1e-15);
  }

  Polyhedron seg = Polyhedron::interval(Vec{0.0}, Vec{1.0});
  SolidAngleValue s = solid_angle_measure(seg, 0);
  CHECK(s.measure == 1.0);
  CHECK(s.full == 2.0);
}

TEST_CASE("interior angles of random convex polygons sum to (n-2)*pi") {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> jitter(0.2, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    int n = 3 + static_cast<int>(rng() % 6);
    std::vector<double> angles;
    for (int i = 0; i < n; ++i) angles.push_back(2.0 * kPi * i / n + 0.3 * jitter(rng) / n);
    std::vector<Point> verts;
    for (double a : angles) {
      double r = jitter(rng) * 0.2 + 1.0;  // near-circular keeps it convex
      verts.push_back({r * std::cos(a), r * std::sin(a)});
    }
    Polyhedron poly = Polyhedron::polygon(verts);
    double sum = 0.0;
    for (int k = 0; k < n; ++k) sum += solid_angle_measure(poly, k).measure;
    CHECK(std::abs(sum - (n - 2) * kPi) < 1e-9);
  }
}

TEST_CASE("diameter") {
  CHECK(std::abs(diameter(unitSquare()) - std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(diameter(Polyhedron::interval(Vec{0.0}, Vec{1.0})) - 1.0) < 1e-15);
  Polyhedron p5 = unitSquare().image(scaleMap(1.0 / 3.0, Vec{1.0 / 3.0, 1.0 / 3.0}));
  CHECK(std::abs(diameter(p5) - std::sqrt(2.0) / 3.0) < 1e-12);
}

TEST_CASE("sectors describe vertex cones") {
  Polyhedron sq = unitSquare();
  AngularSector s0 = vertex_sector(sq, 0);
  CHECK(std::abs(s0.start - 0.0) < 1e-12);
  CHECK(std::abs(s0.width - kPi / 2.0) < 1e-12);

  AngularSector s2 = vertex_sector(sq, 2);  // corner (1,1) opens toward the third quadrant
  CHECK(std::abs(s2.start - kPi) < 1e-12);

  CHECK(sectors_disjoint(s0, s2));
  CHECK_FALSE(sectors_equal(s0, s2));
  CHECK(sectors_equal(s0, s0));

  Polyhedron seg = Polyhedron::interval(Vec{0.0}, Vec{1.0});
  AngularSector left = vertex_sector(seg, 0);
  AngularSector right = vertex_sector(seg, 1);
  CHECK(left.direction == 1);
  CHECK(right.direction == -1);
  CHECK(sectors_disjoint(left, right));
}

TEST_CASE("polygon validation rejects bad input") {
  CHECK_THROWS_AS(Polyhedron::polygon({{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0},
                                       {0.0, 0.5}}),  // collinear with the closing edge
                  InvalidPolyhedron);
  CHECK_THROWS_AS(Polyhedron::polygon({{0.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}, {1.0, 0.0}}),  // clockwise
                  InvalidPolyhedron);
  CHECK_THROWS_AS(Polyhedron::interval(Vec{0.3}, Vec{0.3}), InvalidPolyhedron);
}

TEST_CASE("image under reflection keeps vertex order and flips orientation") {
  Polyhedron sq = unitSquare();
  Mat reflect = Mat::fromRows({{0.0, 1.0}, {1.0, 0.0}});  // swap axes
  Similarity s(0.5, reflect, Vec{0.0, 0.0});
  Polyhedron img = sq.image(s);
  CHECK(img.orientation() == -1);
  CHECK(img.vertex(1).dist({0.0, 0.5}) < 1e-15);
  CHECK(img.containsPoint({0.25, 0.25}, 1e-12));
  CHECK_FALSE(img.containsPoint({0.6, 0.6}, 1e-12));
  SolidAngleValue a = solid_angle_measure(img, 0);
  CHECK(std::abs(a.measure - kPi / 2.0) < 1e-12);
}

TEST_CASE("cube/cube intersection classification") {
  Polyhedron cube = unitCube();
  Similarity s1(0.5, Mat::identity(3), Vec{0.0, 0.0, 0.0});
  Similarity s2(0.5, Mat::identity(3), Vec{0.5, 0.5, 0.5});
  Similarity s3(0.5, Mat::identity(3), Vec{0.5, 0.0, 0.0});
  Polyhedron c1 = cube.image(s1);
  Polyhedron c2 = cube.image(s2);
  Polyhedron c3 = cube.image(s3);

  IntersectionClass corner = classify_intersection(c1, c2);
  REQUIRE(corner.kind == IntersectionKind::SharedVertex);
  CHECK(corner.point.dist({0.5, 0.5, 0.5}) < 1e-12);

  CHECK(classify_intersection(c1, c3).kind == IntersectionKind::Overlap);  // face contact

  Similarity s4(0.25, Mat::identity(3), Vec{0.7, 0.7, 0.7});
  CHECK(classify_intersection(c1, cube.image(s4)).kind == IntersectionKind::Disjoint);
}
