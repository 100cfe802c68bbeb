#include <doctest.h>

#include <algorithm>
#include <set>

#include "dendrite/address.hpp"
#include "dendrite/validator.hpp"
#include "support/systems.hpp"

using namespace dendrite;
using namespace dendrite::testing;

namespace {

Address addr(std::initializer_list<int> pre, std::initializer_list<int> per) {
  Address a;
  a.preperiod = MultiIndex(pre);
  a.period = MultiIndex(per);
  return a;
}

std::set<std::string> addressStrings(const PointAddresses& pa) {
  std::set<std::string> out;
  for (const Address& a : pa.addresses()) out.insert(a.str());
  return out;
}

}  // namespace

TEST_CASE("address canonical form") {
  Address a = addr({1}, {1});
  a.canonicalize();
  CHECK(a.preperiod.empty());
  CHECK(a.period == MultiIndex{1});

  Address b = addr({2, 1}, {3, 1});
  b.canonicalize();
  CHECK(b == addr({2}, {1, 3}));

  Address c = addr({}, {2, 1, 2, 1});
  c.canonicalize();
  CHECK(c.period == MultiIndex({2, 1}));

  Address d = addr({1}, {2});
  d.canonicalize();
  CHECK(d == addr({1}, {2}));

  CHECK(addr({1}, {2}).prefix(5) == MultiIndex({1, 2, 2, 2, 2}));
  CHECK(addr({}, {1, 3}).prefix(4) == MultiIndex({1, 3, 1, 3}));
}

TEST_CASE("cylinders") {
  PolyhedralSystem vicsek = makeVicsek();
  Polyhedron p5 = cylinder(vicsek, MultiIndex{5});
  CHECK(p5.vertex(0).dist({1.0 / 3, 1.0 / 3}) < 1e-15);
  CHECK(p5.vertex(2).dist({2.0 / 3, 2.0 / 3}) < 1e-15);

  Polyhedron p13 = cylinder(vicsek, MultiIndex{1, 3});
  CHECK(p13.vertex(0).dist({2.0 / 9, 2.0 / 9}) < 1e-15);
  CHECK(p13.vertex(2).dist({1.0 / 3, 1.0 / 3}) < 1e-15);
  CHECK(std::abs(composed_map(vicsek, MultiIndex{1, 3}).ratio() - 1.0 / 9.0) < 1e-15);

  PolyhedralSystem zipper = makeInterval();
  Polyhedron p21 = cylinder(zipper, MultiIndex{2, 1});
  CHECK(p21.vertex(0).dist(Vec{0.5}) < 1e-15);
  CHECK(p21.vertex(1).dist(Vec{0.75}) < 1e-15);
}

TEST_CASE("hutchinson_expand") {
  PolyhedralSystem vicsek = makeVicsek();
  ExpansionLevel lvl = hutchinson_expand(vicsek, 2);
  CHECK(lvl.entries.size() == 25);
  for (const auto& e : lvl.entries) {
    CHECK(e.index.length() == 2);
    CHECK(std::abs(e.piece.diameter() - std::sqrt(2.0) / 9.0) < 1e-12);
  }
  // lexicographic order
  CHECK(lvl.entries.front().index == MultiIndex({1, 1}));
  CHECK(lvl.entries.back().index == MultiIndex({5, 5}));

  PolyhedralSystem zipper = makeInterval();
  ExpansionLevel l3 = hutchinson_expand(zipper, 3);
  CHECK(l3.entries.size() == 8);
  for (std::size_t k = 0; k < 8; ++k) {
    double lo = std::min(l3.entries[k].piece.vertex(0)[0], l3.entries[k].piece.vertex(1)[0]);
    CHECK(std::abs(lo - static_cast<double>(k) / 8.0) < 1e-12);
  }
}

TEST_CASE("depth-2 Vicsek expansion has 24 distinct shared-vertex points") {
  PolyhedralSystem vicsek = makeVicsek();
  ExpansionLevel lvl = hutchinson_expand(vicsek, 2);
  std::vector<Point> shared;
  const double eps = vicsek.absTol();
  for (std::size_t i = 0; i < lvl.entries.size(); ++i)
    for (std::size_t j = i + 1; j < lvl.entries.size(); ++j) {
      IntersectionClass c =
          classify_intersection(lvl.entries[i].piece, lvl.entries[j].piece, vicsek.tolerance);
      CHECK(c.kind != IntersectionKind::Overlap);
      if (c.kind == IntersectionKind::SharedVertex) {
        bool known = false;
        for (const Point& p : shared)
          if (p.dist(c.point) <= eps) known = true;
        if (!known) shared.push_back(c.point);
      }
    }
  CHECK(shared.size() == 24);  // 4 level-1 junctions + 5 pieces x 4 images
}

TEST_CASE("vertex automaton transitions") {
  SUBCASE("interval: each endpoint loops under its own map") {
    VertexAutomaton a = build_vertex_automaton(makeInterval());
    REQUIRE(a.stateCount == 2);
    REQUIRE(a.outDegree(0) == 1);
    CHECK(a.transitions[0][0].letter == 1);
    CHECK(a.transitions[0][0].toState == 0);
    REQUIRE(a.outDegree(1) == 1);
    CHECK(a.transitions[1][0].letter == 2);
    CHECK(a.transitions[1][0].toState == 1);
  }

  SUBCASE("vicsek: corner k loops under map k; the center map fixes nothing") {
    VertexAutomaton a = build_vertex_automaton(makeVicsek());
    REQUIRE(a.stateCount == 4);
    for (int v = 0; v < 4; ++v) {
      REQUIRE(a.outDegree(v) == 1);
      CHECK(a.transitions[static_cast<std::size_t>(v)][0].letter == v + 1);
      CHECK(a.transitions[static_cast<std::size_t>(v)][0].toState == v);
    }
  }

  SUBCASE("gasket: automaton is well-defined before the D4 check") {
    VertexAutomaton a = build_vertex_automaton(makeGasket());
    for (int v = 0; v < 3; ++v) {
      REQUIRE(a.outDegree(v) == 1);
      CHECK(a.transitions[static_cast<std::size_t>(v)][0].letter == v + 1);
      CHECK(a.transitions[static_cast<std::size_t>(v)][0].toState == v);
    }
  }
}

TEST_CASE("addresses_of_point") {
  PolyhedralSystem zipper = makeInterval();
  PolyhedralSystem vicsek = makeVicsek();

  SUBCASE("interval midpoint has the two addresses 1(2) and 2(1)") {
    PointAddresses pa = addresses_of_point(zipper, Vec{0.5});
    CHECK(pa.vertexPoint);
    CHECK(pa.count() == 2);
    CHECK(addressStrings(pa) == std::set<std::string>{"1(2)", "2(1)"});
    CHECK(pa.availableAngle == 2.0);  // full angle on the line
    CHECK(pa.minAngle == 1.0);
    CHECK(pa.count() * pa.minAngle <= pa.availableAngle + 1e-12);
    CHECK(pa.floorBound() == 2);
    CHECK(pa.paperBound() == 1);  // the ceiling-minus-one value undershoots here
  }

  SUBCASE("vicsek junction (1/3,1/3) has addresses 1(3) and 5(1)") {
    PointAddresses pa = addresses_of_point(vicsek, {1.0 / 3, 1.0 / 3});
    CHECK(pa.vertexPoint);
    CHECK(pa.count() == 2);
    CHECK(addressStrings(pa) == std::set<std::string>{"1(3)", "5(1)"});
    // interior point: full angle budget
    CHECK(std::abs(pa.availableAngle - 2 * 3.14159265358979) < 1e-9);
  }

  SUBCASE("vicsek corners have a single purely periodic address") {
    for (int k = 0; k < 4; ++k) {
      PointAddresses pa = addresses_of_point(vicsek, vicsek.base.vertex(k));
      CHECK(pa.vertexPoint);
      REQUIRE(pa.count() == 1);
      CHECK(pa.branches[0].address == addr({}, {k + 1}));
      CHECK(std::abs(pa.availableAngle - 3.14159265358979 / 2) < 1e-9);
    }
  }

  SUBCASE("the square center is not a vertex image; its chain is 5 5 5 ...") {
    PointAddresses pa = addresses_of_point(vicsek, {0.5, 0.5}, 12);
    CHECK_FALSE(pa.vertexPoint);
    CHECK(pa.coveredToMaxDepth);
    REQUIRE(pa.chainPrefix.length() >= 10);
    for (int l : pa.chainPrefix.letters) CHECK(l == 5);
  }

  SUBCASE("points outside the attractor fall out of every cylinder") {
    PointAddresses pa = addresses_of_point(vicsek, {0.9, 0.4}, 12);
    CHECK_FALSE(pa.vertexPoint);
    CHECK_FALSE(pa.coveredToMaxDepth);
  }
}

TEST_CASE("address validity: cylinder chains contain the point and shrink") {
  PolyhedralSystem vicsek = makeVicsek();
  for (const Point& x : {Point{1.0 / 3, 1.0 / 3}, Point{0.0, 0.0}, Point{2.0 / 3, 2.0 / 3}}) {
    PointAddresses pa = addresses_of_point(vicsek, x);
    REQUIRE(pa.vertexPoint);
    for (const AddressBranch& b : pa.branches) {
      double prevDiam = 2.0 * vicsek.base.diameter();
      for (int n = 1; n <= 8; ++n) {
        Polyhedron piece = cylinder(vicsek, b.address.prefix(n));
        CHECK(piece.containsPoint(x, std::max(vicsek.tolerance * piece.diameter(), 1e-13)));
        CHECK(piece.diameter() < prevDiam);
        prevDiam = piece.diameter();
      }
    }
  }
}

TEST_CASE("stabilized sectors of distinct addresses are pairwise disjoint") {
  PolyhedralSystem vicsek = makeVicsek();
  PolyhedralSystem zipper = makeInterval();

  for (const Point& x :
       {Point{1.0 / 3, 1.0 / 3}, Point{2.0 / 3, 1.0 / 3}, Point{2.0 / 3, 2.0 / 3}}) {
    PointAddresses pa = addresses_of_point(vicsek, x);
    REQUIRE(pa.count() == 2);
    CHECK(sectors_disjoint(pa.branches[0].sector, pa.branches[1].sector));
    // realizing cylinders meet exactly at x
    Polyhedron c0 = cylinder(vicsek, pa.branches[0].stabilizedCylinder);
    Polyhedron c1 = cylinder(vicsek, pa.branches[1].stabilizedCylinder);
    IntersectionClass ic = classify_intersection(c0, c1, vicsek.tolerance);
    REQUIRE(ic.kind == IntersectionKind::SharedVertex);
    CHECK(ic.point.dist(x) < 1e-9);
  }

  PointAddresses mid = addresses_of_point(zipper, Vec{0.5});
  REQUIRE(mid.count() == 2);
  CHECK(sectors_disjoint(mid.branches[0].sector, mid.branches[1].sector));
}

TEST_CASE("angle budget holds for every level-2 vertex image") {
  PolyhedralSystem vicsek = makeVicsek();
  ExpansionLevel lvl = hutchinson_expand(vicsek, 2);
  std::vector<Point> probes;
  const double eps = vicsek.absTol();
  for (const auto& e : lvl.entries)
    for (const Point& p : e.vertexImages) {
      bool known = false;
      for (const Point& q : probes)
        if (q.dist(p) <= eps) known = true;
      if (!known) probes.push_back(p);
    }
  for (const Point& x : probes) {
    PointAddresses pa = addresses_of_point(vicsek, x);
    REQUIRE(pa.vertexPoint);
    CHECK(pa.count() * pa.minAngle <= pa.availableAngle + 1e-9);
    CHECK(pa.count() <= pa.floorBound());
  }
}

TEST_CASE("nesting: cylinders nest exactly when words extend (depths <= 3)") {
  PolyhedralSystem vicsek = makeVicsek();
  std::vector<MultiIndex> words;
  for (int d = 0; d <= 3; ++d)
    for (const auto& e : hutchinson_expand(vicsek, d).entries) words.push_back(e.index);

  for (const MultiIndex& i : words)
    for (const MultiIndex& j : words) {
      if (i == j) continue;
      bool contained = polyhedron_contains(cylinder(vicsek, i), cylinder(vicsek, j),
                                           vicsek.tolerance);
      bool prefix = i.isPrefixOf(j);
      CHECK(contained == prefix);
    }
}

TEST_CASE("vertex images persist into deeper cylinders (depths <= 3)") {
  PolyhedralSystem vicsek = makeVicsek();
  const double eps = vicsek.absTol();
  std::vector<MultiIndex> words;
  for (int d = 1; d <= 3; ++d)
    for (const auto& e : hutchinson_expand(vicsek, d).entries) words.push_back(e.index);

  for (const MultiIndex& i : words)
    for (const MultiIndex& j : words) {
      if (!(i.isPrefixOf(j)) || i == j) continue;
      Polyhedron pj = cylinder(vicsek, j);
      Similarity si = composed_map(vicsek, i);
      Similarity sj = composed_map(vicsek, j);
      for (int v = 0; v < vicsek.base.vertexCount(); ++v) {
        Point img = si.apply(vicsek.base.vertex(v));
        if (!pj.containsPoint(img, eps)) continue;
        bool isVertexImage = false;
        for (int w = 0; w < vicsek.base.vertexCount(); ++w)
          if (sj.apply(vicsek.base.vertex(w)).dist(img) <= eps) isVertexImage = true;
        CHECK(isVertexImage);
      }
    }
}

TEST_CASE("incomparable cylinders meet in at most a mutual vertex image (depth 2)") {
  PolyhedralSystem vicsek = makeVicsek();
  const double eps = vicsek.absTol();
  std::vector<MultiIndex> words;
  for (int d = 1; d <= 2; ++d)
    for (const auto& e : hutchinson_expand(vicsek, d).entries) words.push_back(e.index);

  for (std::size_t a = 0; a < words.size(); ++a)
    for (std::size_t b = a + 1; b < words.size(); ++b) {
      if (!words[a].incomparableWith(words[b])) continue;
      IntersectionClass c =
          classify_intersection(cylinder(vicsek, words[a]), cylinder(vicsek, words[b]),
                                vicsek.tolerance);
      CHECK(c.kind != IntersectionKind::Overlap);
      if (c.kind == IntersectionKind::SharedVertex) {
        Similarity sa = composed_map(vicsek, words[a]);
        Similarity sb = composed_map(vicsek, words[b]);
        bool inA = false, inB = false;
        for (int v = 0; v < vicsek.base.vertexCount(); ++v) {
          if (sa.apply(vicsek.base.vertex(v)).dist(c.point) <= eps) inA = true;
          if (sb.apply(vicsek.base.vertex(v)).dist(c.point) <= eps) inB = true;
        }
        CHECK(inA);
        CHECK(inB);
      }
    }
}
