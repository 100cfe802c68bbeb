#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dendrite/system.hpp"

// Decides whether (P, S) is a contractible P-polyhedral system: containment
// of the pieces (D1), pairwise intersections that are single common vertices
// (D2), coverage of the base vertices by vertex images (D3, with the derived
// per-piece form D3a), contractibility of the union of pieces as a tree test
// on the incidence graph (D4), and connectivity of the level-1 piece graph.
// A system passing everything has a dendrite attractor.

namespace dendrite {

struct D2Violated : Error {
  using Error::Error;
};

/// Bipartite graph of level-1 pieces and their shared-vertex points. Under
/// D2 the union of pieces is contractible exactly when this graph is a tree.
struct IncidenceGraph {
  int pieceCount = 0;
  std::vector<Point> points;  // merged shared-vertex points
  std::vector<std::vector<int>> pieceToPoints;
  std::vector<std::vector<int>> pointToPieces;
  /// Pairs whose intersection classified Overlap. Empty when D2 holds; the
  /// tolerant builder used by validate_system records them instead of
  /// throwing so the remaining conditions can still be evaluated.
  std::vector<std::pair<int, int>> overlapPairs;  // 1-based letters

  int edgeCount() const {
    int e = 0;
    for (const auto& adj : pieceToPoints) e += static_cast<int>(adj.size());
    return e;
  }
};

/// Strict incidence graph construction; requires D2 (throws D2Violated).
IncidenceGraph build_incidence_graph(const PolyhedralSystem& sys);

struct ConditionCheck {
  std::string name;
  bool passed = true;
  std::string detail;                  // human-readable witness
  std::vector<int> offendingPair;      // {i, j} 1-based letters, when applicable
  int offendingVertex = -1;            // 1-based vertex index, when applicable
  std::vector<std::string> cycle;      // D4 cycle witness node labels
};

struct ValidationReport {
  std::string systemName;
  std::vector<ConditionCheck> conditions;  // D1, D2, D3, D3a, D4, connectivity
  bool dendrite = false;
  std::vector<std::string> reasons;  // names of failed conditions

  const ConditionCheck* find(const std::string& name) const {
    for (const auto& c : conditions)
      if (c.name == name) return &c;
    return nullptr;
  }
};

/// Runs every condition and aggregates the verdict; failures are report
/// entries with witnesses, never exceptions.
ValidationReport validate_system(const PolyhedralSystem& sys);

/// The system of all n-fold compositions {S_j : j in I^n}, in lexicographic
/// word order. Validity is preserved under composition, so a validated
/// system's refinement must validate again.
PolyhedralSystem refine_system(const PolyhedralSystem& sys, int n);

/// Number of depth-n words m^n, guarded against the piece budget.
std::size_t word_count(const PolyhedralSystem& sys, int depth);

}  // namespace dendrite
