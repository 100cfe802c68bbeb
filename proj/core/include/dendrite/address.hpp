#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dendrite/system.hpp"

// Symbolic dynamics of a validated system: finite words over I = {1..m},
// cylinder polyhedra P_j, the level-n expansion, the vertex automaton and
// the enumeration of all addresses of a vertex-image point together with the
// solid-angle budget that bounds their number.

namespace dendrite {

/// Finite word over the index set I = {1..m}. Letters are 1-based.
struct MultiIndex {
  std::vector<int> letters;

  MultiIndex() = default;
  MultiIndex(std::initializer_list<int> ls) : letters(ls) {}
  explicit MultiIndex(std::vector<int> ls) : letters(std::move(ls)) {}

  int length() const { return static_cast<int>(letters.size()); }
  bool empty() const { return letters.empty(); }
  MultiIndex concat(const MultiIndex& tail) const;
  MultiIndex prefix(int n) const;

  bool isPrefixOf(const MultiIndex& other) const;
  bool incomparableWith(const MultiIndex& other) const;

  bool operator==(const MultiIndex& o) const { return letters == o.letters; }
  bool operator<(const MultiIndex& o) const { return letters < o.letters; }
  std::string str() const;  // e.g. "135" (dot-separated once letters exceed 9)
};

/// Eventually periodic infinite word in canonical form: minimal preperiod,
/// primitive period. Canonical form makes set comparison syntactic.
struct Address {
  MultiIndex preperiod;
  MultiIndex period;

  void canonicalize();
  /// Finite prefix u·w^k... of the infinite word, of length n.
  MultiIndex prefix(int n) const;

  bool operator==(const Address& o) const {
    return preperiod == o.preperiod && period == o.period;
  }
  bool operator<(const Address& o) const {
    if (preperiod != o.preperiod) return preperiod < o.preperiod;
    return period < o.period;
  }
  std::string str() const;  // "1(2)" for 1222...
};

/// Composition S_{j1} ∘ ... ∘ S_{jn}.
Similarity composed_map(const PolyhedralSystem& sys, const MultiIndex& j);

/// Cylinder P_j, the image of P under the composed map.
Polyhedron cylinder(const PolyhedralSystem& sys, const MultiIndex& j);

struct ExpansionEntry {
  MultiIndex index;
  Polyhedron piece;
  std::vector<Point> vertexImages;
};

struct ExpansionLevel {
  int depth = 0;
  std::vector<ExpansionEntry> entries;  // lexicographic word order
};

/// All depth-n cylinders with their vertex images (the n-th Hutchinson
/// iterate of P, piece by piece). Guarded by the piece budget.
ExpansionLevel hutchinson_expand(const PolyhedralSystem& sys, int n);

/// Transitions v --i--> v' whenever S_i(v') = v. Walking the automaton
/// backward along maps extends an address of a vertex image.
struct VertexAutomaton {
  struct Transition {
    int letter;
    int toState;  // vertex index in V_P
  };
  int stateCount = 0;
  std::vector<std::vector<Transition>> transitions;  // per state

  int outDegree(int state) const {
    return static_cast<int>(transitions[static_cast<std::size_t>(state)].size());
  }
};

VertexAutomaton build_vertex_automaton(const PolyhedralSystem& sys);

/// One address of a vertex-image point together with its stabilized cone.
struct AddressBranch {
  Address address;
  MultiIndex minimalCylinder;    // shortest prefix whose vertex image hits x
  int vertexInCylinder = -1;     // vertex index of x within that cylinder
  int cycleState = -1;           // automaton state on the periodic tail
  MultiIndex stabilizedCylinder; // prefix realizing the limit cone
  AngularSector sector;          // cone of the stabilized cylinder at x
  int stabilizationDepth = 0;
};

struct PointAddresses {
  bool vertexPoint = false;  // x detected in G_S(V_P)
  Point point;
  std::vector<AddressBranch> branches;  // one per address, sorted
  /// For ordinary points: the unique covering word down to maxDepth.
  MultiIndex chainPrefix;
  bool coveredToMaxDepth = true;

  double availableAngle = 0.0;  // theta_A at a base vertex, theta_F otherwise
  double minAngle = 0.0;        // theta_min over the base vertices
  int count() const { return static_cast<int>(branches.size()); }
  /// floor(theta/theta_min): disjoint cones of measure >= theta_min must fit.
  int floorBound() const;
  /// ceil(theta/theta_min) - 1 as stated alongside the order bounds; can
  /// undershoot the floor bound and is reported without being asserted.
  int paperBound() const;

  std::vector<Address> addresses() const;
};

/// Enumerates pi^{-1}(x) for x in G_S(V_P): finds every minimal cylinder
/// whose vertex image hits x, follows the vertex automaton from each, and
/// stabilizes the cone of each branch. For other points returns the unique
/// covering chain prefix with vertexPoint = false.
PointAddresses addresses_of_point(const PolyhedralSystem& sys, const Point& x,
                                  int maxDepth = 40);

}  // namespace dendrite
