#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dendrite/address.hpp"
#include "dendrite/validator.hpp"

// The main tree of the attractor: the union of the arcs joining all pairs of
// base vertices. Arcs are components of a graph-directed zipper whose data
// (chains, node points, signatures) comes from the incidence tree; finite
// skeletons unfold that structure to a chosen depth, and point orders are
// read off stabilized skeleton degrees combined with the address branches.

namespace dendrite {

/// Sequence of level-1 pieces joining two points, consecutive pieces meeting
/// in exactly one junction, non-consecutive ones disjoint.
struct Chain {
  std::vector<int> pieces;      // letters
  std::vector<Point> junctions; // size = pieces.size() - 1
};

struct ZipperMap {
  int letter = 0;           // level-1 map used by this chain slot
  int targetComponent = -1; // component whose arc fills the slot
  int signature = 0;        // 1 when the target arc is traversed reversed
};

struct ZipperComponent {
  int endpointA = -1;  // base vertex indices, endpointA < endpointB
  int endpointB = -1;
  std::vector<ZipperMap> maps;
  std::vector<Point> nodePoints;  // z_0 .. z_m, endpoints included
  std::vector<int> chainPieces;   // letters, same order as maps
};

struct Multizipper {
  std::vector<ZipperComponent> components;
  /// Structural classes under partition refinement on (ratio, target class)
  /// sequences, read up to reversal. The Vicsek square yields two: the
  /// diagonal components and the side components.
  std::vector<int> classOf;
  int classCount = 0;

  int indexOfPair(int a, int b) const;
};

struct JordanCheck {
  bool ok = true;
  int component = -1;  // first violating component
  int pieceK = -1, pieceL = -1;  // 1-based chain positions
  std::string detail;
};

/// Jordan conditions on every component: chain pieces at distance > 1 are
/// disjoint, consecutive ones share exactly the junction point.
JordanCheck verify_jordan_conditions(const Multizipper& z, const PolyhedralSystem& sys);

struct SkeletonNode {
  Point position;
  bool steiner = false;  // marker for a region whose branching is unresolved
};

struct SkeletonEdge {
  int a = -1, b = -1;
  MultiIndex word;          // cylinder carrying this sub-arc
  int componentA = -1;      // endpoint pair of the component, when resolved
  int componentB = -1;
  bool unresolved = false;  // star edge of a cutoff region
};

struct TreeSkeleton {
  int depth = 0;
  std::vector<SkeletonNode> nodes;
  std::vector<SkeletonEdge> edges;

  int findNode(const Point& p, double absTol) const;
  int degree(int nodeId) const;
  bool isTree() const;  // connected with edges = nodes - 1

 private:
  friend class MainTreeBuilder;
  mutable std::vector<std::vector<int>> adjacency_;
  void buildAdjacency() const;
};

enum class PointClass { EndPoint, CutPoint, RamificationPoint };

std::string to_string(PointClass c);

struct OrderReport {
  Point point;
  int orderInTree = 0;
  int orderInK = 0;
  int paperBound = 0;  // (n_P - 1) * (ceil(theta/theta_min) - 1)
  int safeBound = 0;   // (n_P - 1) * floor(theta/theta_min)
  PointClass classification = PointClass::EndPoint;
  bool stabilized = false;
  int stabilizedAtDepth = -1;
  int addressCount = 0;  // 0 when the point is not a vertex image
  double theta = 0.0;
  double thetaMin = 0.0;
  std::string note;
};

/// Builds and caches chains, the multizipper, skeletons per depth and the
/// degree-stabilization machinery for a validated system.
class MainTreeBuilder {
 public:
  explicit MainTreeBuilder(const PolyhedralSystem& sys);
  ~MainTreeBuilder();
  MainTreeBuilder(MainTreeBuilder&&) noexcept;
  MainTreeBuilder& operator=(MainTreeBuilder&&) noexcept;

  const PolyhedralSystem& system() const;
  const IncidenceGraph& incidence() const;

  Chain chainBetween(const Point& x, const Point& y);
  const Multizipper& multizipper();
  const TreeSkeleton& skeleton(int depth);
  OrderReport pointOrder(const Point& x, int nStab = 12);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// One-shot wrappers over MainTreeBuilder.
Chain chain_between(const PolyhedralSystem& sys, const Point& x, const Point& y);
Multizipper build_multizipper(const PolyhedralSystem& sys);
TreeSkeleton tree_skeleton(const PolyhedralSystem& sys, int n);
OrderReport point_order(const PolyhedralSystem& sys, const Point& x, int nStab = 12);

}  // namespace dendrite
