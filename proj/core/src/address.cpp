#include "dendrite/address.hpp"

#include <algorithm>
#include <deque>

#include "dendrite/validator.hpp"

namespace dendrite {

// ---------------------------------------------------------------------------
// MultiIndex / Address

MultiIndex MultiIndex::concat(const MultiIndex& tail) const {
  MultiIndex out = *this;
  out.letters.insert(out.letters.end(), tail.letters.begin(), tail.letters.end());
  return out;
}

MultiIndex MultiIndex::prefix(int n) const {
  MultiIndex out;
  out.letters.assign(letters.begin(),
                     letters.begin() + std::min<std::ptrdiff_t>(n, static_cast<std::ptrdiff_t>(letters.size())));
  return out;
}

bool MultiIndex::isPrefixOf(const MultiIndex& other) const {
  if (letters.size() > other.letters.size()) return false;
  return std::equal(letters.begin(), letters.end(), other.letters.begin());
}

bool MultiIndex::incomparableWith(const MultiIndex& other) const {
  return !isPrefixOf(other) && !other.isPrefixOf(*this);
}

std::string MultiIndex::str() const {
  bool wide = false;
  for (int l : letters)
    if (l > 9) wide = true;
  std::string out;
  for (std::size_t i = 0; i < letters.size(); ++i) {
    if (wide && i > 0) out += '.';
    out += std::to_string(letters[i]);
  }
  return out;
}

void Address::canonicalize() {
  if (period.empty()) throw Error("address period must be nonempty");
  // primitive period: shortest word whose repetition gives the period
  const int n = period.length();
  for (int len = 1; len <= n / 2; ++len) {
    if (n % len != 0) continue;
    bool repeats = true;
    for (int i = len; i < n && repeats; ++i)
      if (period.letters[static_cast<std::size_t>(i)] !=
          period.letters[static_cast<std::size_t>(i - len)])
        repeats = false;
    if (repeats) {
      period.letters.resize(static_cast<std::size_t>(len));
      break;
    }
  }
  // minimal preperiod: absorb trailing preperiod letters equal to the last
  // period letter by rotating the period
  while (!preperiod.empty() && preperiod.letters.back() == period.letters.back()) {
    preperiod.letters.pop_back();
    period.letters.insert(period.letters.begin(), period.letters.back());
    period.letters.pop_back();
  }
}

MultiIndex Address::prefix(int n) const {
  MultiIndex out = preperiod.prefix(n);
  while (out.length() < n) {
    for (int l : period.letters) {
      if (out.length() == n) break;
      out.letters.push_back(l);
    }
  }
  return out;
}

std::string Address::str() const { return preperiod.str() + "(" + period.str() + ")"; }

// ---------------------------------------------------------------------------
// Cylinders and expansions

Similarity composed_map(const PolyhedralSystem& sys, const MultiIndex& j) {
  if (j.empty()) throw Error("composed_map needs a nonempty word");
  Similarity s = sys.map(j.letters[0]);
  for (std::size_t k = 1; k < j.letters.size(); ++k) s = s.compose(sys.map(j.letters[k]));
  return s;
}

Polyhedron cylinder(const PolyhedralSystem& sys, const MultiIndex& j) {
  if (j.empty()) return sys.base;
  return sys.base.image(composed_map(sys, j));
}

ExpansionLevel hutchinson_expand(const PolyhedralSystem& sys, int n) {
  word_count(sys, n);  // budget check
  ExpansionLevel level;
  level.depth = n;

  struct Frame {
    MultiIndex word;
    std::optional<Similarity> map;
  };
  // depth-first with letters pushed in reverse gives lexicographic output
  std::vector<Frame> stack{{MultiIndex{}, std::nullopt}};
  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    if (f.word.length() == n) {
      ExpansionEntry e;
      e.index = f.word;
      e.piece = f.map ? sys.base.image(*f.map) : sys.base;
      for (const Point& v : sys.base.vertices())
        e.vertexImages.push_back(f.map ? f.map->apply(v) : v);
      level.entries.push_back(std::move(e));
      continue;
    }
    for (int i = sys.mapCount(); i >= 1; --i) {
      Frame child;
      child.word = f.word;
      child.word.letters.push_back(i);
      child.map = f.map ? f.map->compose(sys.map(i)) : sys.map(i);
      stack.push_back(std::move(child));
    }
  }
  return level;
}

// ---------------------------------------------------------------------------
// Vertex automaton

VertexAutomaton build_vertex_automaton(const PolyhedralSystem& sys) {
  VertexAutomaton a;
  a.stateCount = sys.base.vertexCount();
  a.transitions.assign(static_cast<std::size_t>(a.stateCount), {});
  const double eps = sys.absTol();
  for (int v = 0; v < a.stateCount; ++v)
    for (int i = 1; i <= sys.mapCount(); ++i)
      for (int w = 0; w < a.stateCount; ++w)
        if (sys.map(i).apply(sys.base.vertex(w)).dist(sys.base.vertex(v)) <= eps)
          a.transitions[static_cast<std::size_t>(v)].push_back({i, w});
  return a;
}

// ---------------------------------------------------------------------------
// Address enumeration

int PointAddresses::floorBound() const {
  if (minAngle <= 0.0) return 0;
  return static_cast<int>(std::floor(availableAngle / minAngle + 1e-12));
}

int PointAddresses::paperBound() const {
  if (minAngle <= 0.0) return 0;
  return static_cast<int>(std::ceil(availableAngle / minAngle - 1e-12)) - 1;
}

std::vector<Address> PointAddresses::addresses() const {
  std::vector<Address> out;
  out.reserve(branches.size());
  for (const AddressBranch& b : branches) out.push_back(b.address);
  return out;
}

namespace {

// States that can reach themselves.
std::vector<bool> cyclicStates(const VertexAutomaton& a) {
  std::vector<bool> cyc(static_cast<std::size_t>(a.stateCount), false);
  for (int s = 0; s < a.stateCount; ++s) {
    std::vector<bool> seen(static_cast<std::size_t>(a.stateCount), false);
    std::deque<int> queue;
    for (const auto& t : a.transitions[static_cast<std::size_t>(s)]) queue.push_back(t.toState);
    while (!queue.empty()) {
      int u = queue.front();
      queue.pop_front();
      if (u == s) {
        cyc[static_cast<std::size_t>(s)] = true;
        break;
      }
      if (seen[static_cast<std::size_t>(u)]) continue;
      seen[static_cast<std::size_t>(u)] = true;
      for (const auto& t : a.transitions[static_cast<std::size_t>(u)]) queue.push_back(t.toState);
    }
  }
  return cyc;
}

// Forced loop letters from a cyclic state. A finite address set requires
// every cyclic state to have exactly one outgoing transition; a branching
// cycle would give the point uncountably many addresses, which the angle
// budget rules out on valid systems.
std::pair<MultiIndex, int> forcedCycle(const VertexAutomaton& a, int start) {
  MultiIndex letters;
  int state = start;
  do {
    const auto& outs = a.transitions[static_cast<std::size_t>(state)];
    if (outs.size() != 1)
      throw Error("vertex automaton branches on a cycle; the address set is not finite");
    letters.letters.push_back(outs[0].letter);
    state = outs[0].toState;
  } while (state != start);
  return {letters, start};
}

void enumeratePaths(const VertexAutomaton& a, const std::vector<bool>& cyclic, int state,
                    MultiIndex sofar, const MultiIndex& base,
                    std::vector<std::pair<Address, int>>& out) {
  if (cyclic[static_cast<std::size_t>(state)]) {
    auto [loop, cycleState] = forcedCycle(a, state);
    Address addr;
    addr.preperiod = base.concat(sofar);
    addr.period = loop;
    addr.canonicalize();
    out.emplace_back(addr, cycleState);
    return;
  }
  const auto& outs = a.transitions[static_cast<std::size_t>(state)];
  if (outs.empty())
    throw Error("vertex automaton state has no outgoing transition (D3 must have failed)");
  for (const auto& t : outs) {
    MultiIndex next = sofar;
    next.letters.push_back(t.letter);
    enumeratePaths(a, cyclic, t.toState, std::move(next), base, out);
  }
}

}  // namespace

PointAddresses addresses_of_point(const PolyhedralSystem& sys, const Point& x, int maxDepth) {
  PointAddresses result;
  result.point = x;
  const double eps = sys.absTol();
  // Coincidence tests against a cylinder scale with the cylinder: a global
  // tolerance would eventually swallow whole deep cylinders. The floor keeps
  // exact constructions matchable once the relative term underflows.
  const double floorAbs = 1e-13 * sys.base.diameter();
  auto localEps = [&](const Polyhedron& piece) {
    return std::max(sys.tolerance * piece.diameter(), floorAbs);
  };

  // theta: angle of P at x when x is a base vertex, the full angle otherwise
  int baseVertex = sys.base.findVertex(x, eps);
  result.availableAngle = (baseVertex >= 0)
                              ? solid_angle_measure(sys.base, baseVertex).measure
                              : full_angle(sys.dim());
  result.minAngle = full_angle(sys.dim());
  for (int v = 0; v < sys.base.vertexCount(); ++v)
    result.minAngle = std::min(result.minAngle, solid_angle_measure(sys.base, v).measure);

  if (!sys.base.containsPoint(x, eps)) {
    result.coveredToMaxDepth = false;
    return result;
  }

  // breadth-first search for the minimal cylinders with x in S_j(V_P)
  struct Node {
    MultiIndex word;
    Similarity map;
  };
  std::vector<std::pair<MultiIndex, int>> minimal;  // word, vertex index
  std::deque<Node> frontier;
  for (int i = 1; i <= sys.mapCount(); ++i) frontier.push_back({MultiIndex{i}, sys.map(i)});

  MultiIndex chain;
  bool fellOut = false;
  for (int depth = 1; depth <= maxDepth && !frontier.empty(); ++depth) {
    std::deque<Node> next;
    std::vector<MultiIndex> covering;
    int hitsAtDepth = 0;
    for (const Node& node : frontier) {
      Polyhedron piece = sys.base.image(node.map);
      const double epsLoc = localEps(piece);
      if (!piece.containsPoint(x, epsLoc)) continue;
      int v = piece.findVertex(x, epsLoc);
      if (v >= 0) {
        minimal.emplace_back(node.word, v);
        ++hitsAtDepth;
        continue;  // minimal: do not expand below a hit
      }
      covering.push_back(node.word);
      if (piece.diameter() < 100.0 * floorAbs) continue;  // resolution exhausted
      for (int i = 1; i <= sys.mapCount(); ++i) {
        MultiIndex w = node.word;
        w.letters.push_back(i);
        next.push_back({std::move(w), node.map.compose(sys.map(i))});
      }
    }
    if (covering.empty() && hitsAtDepth == 0) {
      fellOut = true;  // x escaped every cylinder: not a point of the attractor
      break;
    }
    if (minimal.empty() && covering.size() == 1) chain = covering.front();
    frontier = std::move(next);
  }

  if (minimal.empty()) {
    result.vertexPoint = false;
    result.chainPrefix = chain;
    result.coveredToMaxDepth = !fellOut;
    return result;
  }
  result.vertexPoint = true;

  VertexAutomaton automaton = build_vertex_automaton(sys);
  std::vector<bool> cyclic = cyclicStates(automaton);

  for (const auto& [word, vertexIdx] : minimal) {
    std::vector<std::pair<Address, int>> paths;
    enumeratePaths(automaton, cyclic, vertexIdx, MultiIndex{}, word, paths);
    for (auto& [addr, cycleState] : paths) {
      AddressBranch branch;
      branch.address = addr;
      branch.minimalCylinder = word;
      branch.vertexInCylinder = vertexIdx;
      branch.cycleState = cycleState;

      // stabilize the cone: deepen along the address until the sector of the
      // cylinder at x repeats between two consecutive levels
      int depth = word.length();
      AngularSector prev;
      bool havePrev = false;
      for (; depth < maxDepth; ++depth) {
        MultiIndex pref = addr.prefix(depth + 1);
        Polyhedron piece = cylinder(sys, pref);
        int v = piece.findVertex(x, localEps(piece));
        if (v < 0) break;  // numerical resolution exhausted
        AngularSector sec = vertex_sector(piece, v);
        if (havePrev && sectors_equal(prev, sec)) {
          branch.sector = sec;
          branch.stabilizedCylinder = pref;
          branch.stabilizationDepth = depth + 1;
          break;
        }
        prev = sec;
        havePrev = true;
      }
      if (branch.stabilizedCylinder.empty() && havePrev) {
        branch.sector = prev;
        branch.stabilizedCylinder = addr.prefix(depth);
        branch.stabilizationDepth = depth;
      }
      result.branches.push_back(std::move(branch));
    }
  }
  std::sort(result.branches.begin(), result.branches.end(),
            [](const AddressBranch& a, const AddressBranch& b) { return a.address < b.address; });
  return result;
}

}  // namespace dendrite
