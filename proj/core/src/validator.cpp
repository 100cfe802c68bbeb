#include "dendrite/validator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <map>

namespace dendrite {

namespace {

struct PairClassification {
  std::vector<IntersectionClass> byPair;  // indexed by pairIndex(i,j)
  int m = 0;

  int pairIndex(int i, int j) const {  // 1-based letters, i < j
    int a = i - 1, b = j - 1;
    return a * m - a * (a + 1) / 2 + (b - a - 1);
  }
  const IntersectionClass& at(int i, int j) const {
    return byPair[static_cast<std::size_t>(pairIndex(std::min(i, j), std::max(i, j)))];
  }
};

PairClassification classifyAllPairs(const PolyhedralSystem& sys,
                                    const std::vector<Polyhedron>& pieces) {
  PairClassification pc;
  pc.m = sys.mapCount();
  pc.byPair.reserve(static_cast<std::size_t>(pc.m * (pc.m - 1) / 2));
  for (int i = 1; i <= pc.m; ++i)
    for (int j = i + 1; j <= pc.m; ++j)
      pc.byPair.push_back(classify_intersection(pieces[static_cast<std::size_t>(i - 1)],
                                                pieces[static_cast<std::size_t>(j - 1)],
                                                sys.tolerance));
  return pc;
}

IncidenceGraph buildIncidence(const PolyhedralSystem& sys,
                              const std::vector<Polyhedron>& pieces,
                              const PairClassification& pc) {
  IncidenceGraph g;
  g.pieceCount = sys.mapCount();
  const double eps = sys.absTol();

  for (int i = 1; i <= g.pieceCount; ++i)
    for (int j = i + 1; j <= g.pieceCount; ++j) {
      const IntersectionClass& c = pc.at(i, j);
      if (c.kind == IntersectionKind::Overlap) {
        g.overlapPairs.emplace_back(i, j);
      } else if (c.kind == IntersectionKind::SharedVertex) {
        bool merged = false;
        for (const Point& p : g.points)
          if (p.dist(c.point) <= eps) {
            merged = true;
            break;
          }
        if (!merged) g.points.push_back(c.point);
      }
    }

  g.pieceToPoints.assign(static_cast<std::size_t>(g.pieceCount), {});
  g.pointToPieces.assign(g.points.size(), {});
  for (int i = 1; i <= g.pieceCount; ++i)
    for (int pid = 0; pid < static_cast<int>(g.points.size()); ++pid)
      if (pieces[static_cast<std::size_t>(i - 1)].containsPoint(g.points[static_cast<std::size_t>(pid)], eps)) {
        g.pieceToPoints[static_cast<std::size_t>(i - 1)].push_back(pid);
        g.pointToPieces[static_cast<std::size_t>(pid)].push_back(i);
      }
  return g;
}

std::string pieceLabel(int letter) { return "piece " + std::to_string(letter); }

std::string pointLabel(const IncidenceGraph& g, int pid) {
  return "point " + g.points[static_cast<std::size_t>(pid)].str();
}

// Tree test over the incidence structure. Pieces joined by Overlap pairs are
// merged into one super-node first: a full-dimensional gluing cannot create
// the kind of hole the point-contact cycle test is after, and collapsing it
// keeps the test meaningful when D2 has already failed.
struct TreeTestResult {
  bool connected = true;
  bool acyclic = true;
  std::vector<std::string> cycle;
};

TreeTestResult incidenceTreeTest(const IncidenceGraph& g) {
  const int m = g.pieceCount;
  std::vector<int> blob(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) blob[static_cast<std::size_t>(i)] = i;
  std::function<int(int)> find = [&](int x) {
    while (blob[static_cast<std::size_t>(x)] != x) {
      blob[static_cast<std::size_t>(x)] = blob[static_cast<std::size_t>(blob[static_cast<std::size_t>(x)])];
      x = blob[static_cast<std::size_t>(x)];
    }
    return x;
  };
  for (auto [i, j] : g.overlapPairs) {
    int a = find(i - 1), b = find(j - 1);
    if (a != b) blob[static_cast<std::size_t>(a)] = b;
  }

  // node ids: blob representatives first, then point nodes
  std::map<int, int> repToNode;
  std::vector<std::string> nodeLabel;
  for (int i = 0; i < m; ++i) {
    int r = find(i);
    if (!repToNode.count(r)) {
      repToNode[r] = static_cast<int>(nodeLabel.size());
      nodeLabel.push_back(pieceLabel(r + 1));
    }
  }
  const int pieceNodes = static_cast<int>(nodeLabel.size());
  for (int pid = 0; pid < static_cast<int>(g.points.size()); ++pid)
    nodeLabel.push_back(pointLabel(g, pid));
  const int total = static_cast<int>(nodeLabel.size());

  std::vector<std::vector<int>> adj(static_cast<std::size_t>(total));
  for (int i = 0; i < m; ++i) {
    int u = repToNode[find(i)];
    for (int pid : g.pieceToPoints[static_cast<std::size_t>(i)]) {
      int v = pieceNodes + pid;
      // collapse duplicate edges blob->point (several pieces of one blob
      // touching the same point must not fabricate a cycle)
      if (std::find(adj[static_cast<std::size_t>(u)].begin(), adj[static_cast<std::size_t>(u)].end(), v) ==
          adj[static_cast<std::size_t>(u)].end()) {
        adj[static_cast<std::size_t>(u)].push_back(v);
        adj[static_cast<std::size_t>(v)].push_back(u);
      }
    }
  }

  TreeTestResult res;
  std::vector<int> parent(static_cast<std::size_t>(total), -2);
  std::deque<int> queue{0};
  parent[0] = -1;
  int visited = 0;
  while (!queue.empty() && res.acyclic) {
    int u = queue.front();
    queue.pop_front();
    ++visited;
    for (int v : adj[static_cast<std::size_t>(u)]) {
      if (parent[static_cast<std::size_t>(v)] == -2) {
        parent[static_cast<std::size_t>(v)] = u;
        queue.push_back(v);
      } else if (v != parent[static_cast<std::size_t>(u)]) {
        // cycle witness: walk both endpoints up to their common ancestor
        std::vector<int> pathU, pathV;
        for (int x = u; x != -1; x = parent[static_cast<std::size_t>(x)]) pathU.push_back(x);
        for (int x = v; x != -1; x = parent[static_cast<std::size_t>(x)]) pathV.push_back(x);
        std::reverse(pathU.begin(), pathU.end());
        std::reverse(pathV.begin(), pathV.end());
        std::size_t k = 0;
        while (k + 1 < pathU.size() && k + 1 < pathV.size() && pathU[k + 1] == pathV[k + 1]) ++k;
        res.cycle.clear();
        for (std::size_t x = k; x < pathU.size(); ++x)
          res.cycle.push_back(nodeLabel[static_cast<std::size_t>(pathU[x])]);
        for (std::size_t x = pathV.size(); x-- > k + 1;)
          res.cycle.push_back(nodeLabel[static_cast<std::size_t>(pathV[x])]);
        res.acyclic = false;
        break;
      }
    }
  }
  if (res.acyclic) {
    while (!queue.empty()) {
      queue.pop_front();
      ++visited;
    }
    res.connected = (visited == total);
  } else {
    res.connected = true;  // undetermined, but the cycle already fails D4
  }
  return res;
}

}  // namespace

IncidenceGraph build_incidence_graph(const PolyhedralSystem& sys) {
  std::vector<Polyhedron> pieces;
  pieces.reserve(static_cast<std::size_t>(sys.mapCount()));
  for (int i = 1; i <= sys.mapCount(); ++i) pieces.push_back(sys.piece(i));
  PairClassification pc = classifyAllPairs(sys, pieces);
  for (int i = 1; i <= sys.mapCount(); ++i)
    for (int j = i + 1; j <= sys.mapCount(); ++j)
      if (pc.at(i, j).kind == IntersectionKind::Overlap)
        throw D2Violated("pieces " + std::to_string(i) + " and " + std::to_string(j) +
                         " overlap; the incidence graph requires D2");
  return buildIncidence(sys, pieces, pc);
}

ValidationReport validate_system(const PolyhedralSystem& sys) {
  ValidationReport report;
  report.systemName = sys.name;
  const int m = sys.mapCount();
  const double eps = sys.absTol();

  std::vector<Polyhedron> pieces;
  pieces.reserve(static_cast<std::size_t>(m));
  for (int i = 1; i <= m; ++i) pieces.push_back(sys.piece(i));

  // D1: every piece inside P
  ConditionCheck d1;
  d1.name = "D1";
  for (int i = 1; i <= m; ++i)
    if (!polyhedron_contains(sys.base, pieces[static_cast<std::size_t>(i - 1)], sys.tolerance)) {
      d1.passed = false;
      d1.offendingPair = {i};
      d1.detail = "piece " + std::to_string(i) + " is not contained in P";
      break;
    }
  report.conditions.push_back(d1);

  // D2: pairwise intersections empty or a common vertex
  PairClassification pc = classifyAllPairs(sys, pieces);
  ConditionCheck d2;
  d2.name = "D2";
  for (int i = 1; i <= m && d2.passed; ++i)
    for (int j = i + 1; j <= m; ++j)
      if (pc.at(i, j).kind == IntersectionKind::Overlap) {
        d2.passed = false;
        d2.offendingPair = {i, j};
        d2.detail = "pieces " + std::to_string(i) + " and " + std::to_string(j) +
                    " intersect in more than a common vertex";
        break;
      }
  report.conditions.push_back(d2);

  // D3: V_P covered by vertex images
  ConditionCheck d3;
  d3.name = "D3";
  for (int k = 0; k < sys.base.vertexCount(); ++k) {
    const Point& a = sys.base.vertex(k);
    bool covered = false;
    for (int i = 1; i <= m && !covered; ++i)
      for (int v = 0; v < sys.base.vertexCount(); ++v)
        if (sys.map(i).apply(sys.base.vertex(v)).dist(a) <= eps) {
          covered = true;
          break;
        }
    if (!covered) {
      d3.passed = false;
      d3.offendingVertex = k + 1;
      d3.detail = "vertex " + std::to_string(k + 1) + " " + a.str() +
                  " is not a vertex image of any piece";
      break;
    }
  }
  report.conditions.push_back(d3);

  // D3a (derived): base vertices inside a piece are vertex images of it
  ConditionCheck d3a;
  d3a.name = "D3a";
  for (int i = 1; i <= m && d3a.passed; ++i)
    for (int k = 0; k < sys.base.vertexCount(); ++k) {
      const Point& a = sys.base.vertex(k);
      if (!pieces[static_cast<std::size_t>(i - 1)].containsPoint(a, eps)) continue;
      if (pieces[static_cast<std::size_t>(i - 1)].findVertex(a, eps) < 0) {
        d3a.passed = false;
        d3a.offendingPair = {i};
        d3a.offendingVertex = k + 1;
        d3a.detail = "vertex " + std::to_string(k + 1) + " lies in piece " +
                     std::to_string(i) + " but is not one of its vertex images";
        break;
      }
    }
  report.conditions.push_back(d3a);

  // D4: the union of pieces is contractible (incidence graph tree test)
  IncidenceGraph g = buildIncidence(sys, pieces, pc);
  TreeTestResult tree = incidenceTreeTest(g);
  ConditionCheck d4;
  d4.name = "D4";
  if (!tree.acyclic) {
    d4.passed = false;
    d4.cycle = tree.cycle;
    d4.detail = "incidence graph contains a cycle";
  } else if (!tree.connected) {
    d4.passed = false;
    d4.detail = "incidence graph is disconnected";
  }
  report.conditions.push_back(d4);

  // connectivity of the level-1 piece graph (attractor connectedness)
  ConditionCheck conn;
  conn.name = "connectivity";
  {
    std::vector<bool> seen(static_cast<std::size_t>(m), false);
    std::deque<int> queue{1};
    seen[0] = true;
    int count = 0;
    while (!queue.empty()) {
      int i = queue.front();
      queue.pop_front();
      ++count;
      for (int j = 1; j <= m; ++j)
        if (j != i && !seen[static_cast<std::size_t>(j - 1)] &&
            pc.at(i, j).kind != IntersectionKind::Disjoint) {
          seen[static_cast<std::size_t>(j - 1)] = true;
          queue.push_back(j);
        }
    }
    if (count != m) {
      conn.passed = false;
      std::string stranded;
      for (int j = 1; j <= m; ++j)
        if (!seen[static_cast<std::size_t>(j - 1)]) stranded += (stranded.empty() ? "" : ", ") + std::to_string(j);
      conn.detail = "pieces {" + stranded + "} are unreachable from piece 1";
    }
  }
  report.conditions.push_back(conn);

  report.dendrite = true;
  for (const auto& c : report.conditions)
    if (!c.passed) {
      report.dendrite = false;
      report.reasons.push_back(c.name);
    }
  return report;
}

std::size_t word_count(const PolyhedralSystem& sys, int depth) {
  if (depth < 0) throw Error("depth must be non-negative");
  const double m = static_cast<double>(sys.mapCount());
  if (depth * std::log(m) > std::log(static_cast<double>(sys.pieceBudget)) + 1e-12)
    throw DepthTooLarge("m^" + std::to_string(depth) + " exceeds the piece budget of " +
                        std::to_string(sys.pieceBudget));
  std::size_t count = 1;
  for (int i = 0; i < depth; ++i) count *= static_cast<std::size_t>(sys.mapCount());
  return count;
}

PolyhedralSystem refine_system(const PolyhedralSystem& sys, int n) {
  if (n < 1) throw Error("refinement depth must be at least 1");
  word_count(sys, n);  // budget check

  PolyhedralSystem out = sys;
  out.name = sys.name.empty() ? "" : sys.name + "^(" + std::to_string(n) + ")";
  out.maps.clear();

  std::vector<int> word(static_cast<std::size_t>(n), 1);
  const int m = sys.mapCount();
  while (true) {
    Similarity composed = sys.map(word[0]);
    for (int k = 1; k < n; ++k) composed = composed.compose(sys.map(word[static_cast<std::size_t>(k)]));
    out.maps.push_back(composed);
    int pos = n - 1;
    while (pos >= 0 && word[static_cast<std::size_t>(pos)] == m) {
      word[static_cast<std::size_t>(pos)] = 1;
      --pos;
    }
    if (pos < 0) break;
    ++word[static_cast<std::size_t>(pos)];
  }
  return out;
}

}  // namespace dendrite
