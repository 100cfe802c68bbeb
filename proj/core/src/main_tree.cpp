#include "dendrite/main_tree.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <set>
#include <unordered_map>

namespace dendrite {

// ---------------------------------------------------------------------------
// Multizipper / TreeSkeleton basics

int Multizipper::indexOfPair(int a, int b) const {
  int lo = std::min(a, b), hi = std::max(a, b);
  for (int c = 0; c < static_cast<int>(components.size()); ++c)
    if (components[static_cast<std::size_t>(c)].endpointA == lo &&
        components[static_cast<std::size_t>(c)].endpointB == hi)
      return c;
  return -1;
}

void TreeSkeleton::buildAdjacency() const {
  if (!adjacency_.empty()) return;
  adjacency_.assign(nodes.size(), {});
  for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
    adjacency_[static_cast<std::size_t>(edges[static_cast<std::size_t>(e)].a)].push_back(e);
    adjacency_[static_cast<std::size_t>(edges[static_cast<std::size_t>(e)].b)].push_back(e);
  }
}

int TreeSkeleton::findNode(const Point& p, double absTol) const {
  for (int i = 0; i < static_cast<int>(nodes.size()); ++i)
    if (nodes[static_cast<std::size_t>(i)].position.dist(p) <= absTol) return i;
  return -1;
}

int TreeSkeleton::degree(int nodeId) const {
  buildAdjacency();
  return static_cast<int>(adjacency_[static_cast<std::size_t>(nodeId)].size());
}

bool TreeSkeleton::isTree() const {
  if (nodes.empty()) return false;
  if (edges.size() + 1 != nodes.size()) return false;
  buildAdjacency();
  std::vector<bool> seen(nodes.size(), false);
  std::deque<int> queue{0};
  seen[0] = true;
  std::size_t visited = 0;
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    ++visited;
    for (int e : adjacency_[static_cast<std::size_t>(u)]) {
      const SkeletonEdge& edge = edges[static_cast<std::size_t>(e)];
      int v = (edge.a == u) ? edge.b : edge.a;
      if (!seen[static_cast<std::size_t>(v)]) {
        seen[static_cast<std::size_t>(v)] = true;
        queue.push_back(v);
      }
    }
  }
  return visited == nodes.size();
}

std::string to_string(PointClass c) {
  switch (c) {
    case PointClass::EndPoint:
      return "EndPoint";
    case PointClass::CutPoint:
      return "CutPoint";
    default:
      return "RamificationPoint";
  }
}

// ---------------------------------------------------------------------------
// Builder implementation

struct MainTreeBuilder::Impl {
  PolyhedralSystem sys;
  IncidenceGraph inc;
  double eps = 0.0;

  // incidence graph as one node space: pieces 0..m-1, then points
  int m = 0;
  int totalNodes = 0;
  std::vector<std::vector<int>> adj;

  struct Terminal {
    int pointNode = -1;   // incidence point id when the point is shared
    int piece = 0;        // letter of the unique piece otherwise
  };
  std::vector<Terminal> vertexTerminal;  // per base vertex

  struct LevelStructure {
    struct PieceUse {
      int letter = 0;
      std::vector<int> childW;  // sorted base-vertex indices
    };
    std::vector<PieceUse> pieces;
    std::vector<int> junctionPoints;  // incidence point ids
  };
  std::map<std::vector<int>, LevelStructure> structureMemo;

  std::optional<Multizipper> zipper;
  std::map<int, TreeSkeleton> skeletons;
  std::map<int, int> stableVertexDegree;  // base vertex -> degree in the tree

  explicit Impl(const PolyhedralSystem& s) : sys(s) {
    ValidationReport report = validate_system(sys);
    if (!report.dendrite) {
      std::string why;
      for (const std::string& r : report.reasons) why += (why.empty() ? "" : ", ") + r;
      throw Error("system '" + sys.name + "' is not a contractible polyhedral system (failed: " +
                  why + ")");
    }
    inc = build_incidence_graph(sys);
    eps = sys.absTol();
    m = sys.mapCount();
    totalNodes = m + static_cast<int>(inc.points.size());
    adj.assign(static_cast<std::size_t>(totalNodes), {});
    for (int i = 0; i < m; ++i)
      for (int pid : inc.pieceToPoints[static_cast<std::size_t>(i)]) {
        adj[static_cast<std::size_t>(i)].push_back(m + pid);
        adj[static_cast<std::size_t>(m + pid)].push_back(i);
      }
    for (int v = 0; v < sys.base.vertexCount(); ++v)
      vertexTerminal.push_back(locate(sys.base.vertex(v)));
  }

  Terminal locate(const Point& p) const {
    Terminal t;
    for (int pid = 0; pid < static_cast<int>(inc.points.size()); ++pid)
      if (inc.points[static_cast<std::size_t>(pid)].dist(p) <= eps) {
        t.pointNode = pid;
        return t;
      }
    std::vector<int> hosts;
    for (int i = 1; i <= m; ++i)
      if (sys.piece(i).containsPoint(p, eps)) hosts.push_back(i);
    if (hosts.empty()) throw Error("point " + p.str() + " lies in no level-1 piece");
    if (hosts.size() > 1)
      throw Error("point " + p.str() + " lies in several pieces but matches no shared point");
    t.piece = hosts[0];
    return t;
  }

  int terminalNode(const Terminal& t) const {
    return (t.pointNode >= 0) ? m + t.pointNode : t.piece - 1;
  }

  std::vector<int> pathBetween(int from, int to) const {
    std::vector<int> parent(static_cast<std::size_t>(totalNodes), -2);
    std::deque<int> queue{from};
    parent[static_cast<std::size_t>(from)] = -1;
    while (!queue.empty()) {
      int u = queue.front();
      queue.pop_front();
      if (u == to) break;
      for (int v : adj[static_cast<std::size_t>(u)])
        if (parent[static_cast<std::size_t>(v)] == -2) {
          parent[static_cast<std::size_t>(v)] = u;
          queue.push_back(v);
        }
    }
    if (parent[static_cast<std::size_t>(to)] == -2)
      throw Error("incidence graph is unexpectedly disconnected");
    std::vector<int> path;
    for (int x = to; x != -1; x = parent[static_cast<std::size_t>(x)]) path.push_back(x);
    std::reverse(path.begin(), path.end());
    return path;
  }

  int preimageVertex(int letter, const Point& p) const {
    for (int v = 0; v < sys.base.vertexCount(); ++v)
      if (sys.map(letter).apply(sys.base.vertex(v)).dist(p) <= eps) return v;
    return -1;
  }

  Chain chainFromPath(const std::vector<int>& path) const {
    Chain ch;
    for (int node : path) {
      if (node < m) {
        ch.pieces.push_back(node + 1);
      } else if (!ch.pieces.empty() && ch.junctions.size() + 1 == ch.pieces.size()) {
        // a point node strictly between two piece nodes becomes a junction;
        // endpoint point nodes are skipped (they carry x or y themselves)
        ch.junctions.push_back(inc.points[static_cast<std::size_t>(node - m)]);
      }
    }
    // a trailing point node may have added one junction too many
    while (ch.junctions.size() + 1 > ch.pieces.size()) ch.junctions.pop_back();
    return ch;
  }

  Chain chainBetween(const Point& x, const Point& y) {
    Terminal tx = locate(x), ty = locate(y);
    std::vector<int> path = pathBetween(terminalNode(tx), terminalNode(ty));
    Chain ch = chainFromPath(path);
    if (ch.pieces.empty()) throw Error("degenerate chain: the points share every piece");
    return ch;
  }

  // --- level structure per vertex subset -------------------------------

  const LevelStructure& structureFor(const std::vector<int>& W) {
    auto it = structureMemo.find(W);
    if (it != structureMemo.end()) return it->second;

    LevelStructure ls;
    std::vector<bool> marked(static_cast<std::size_t>(totalNodes), false);
    std::vector<std::pair<int, int>> pieceExtras;  // (letter, base vertex)
    std::vector<int> termNodes;
    for (int w : W) {
      const Terminal& t = vertexTerminal[static_cast<std::size_t>(w)];
      termNodes.push_back(terminalNode(t));
      if (t.pointNode < 0) pieceExtras.emplace_back(t.piece, w);
    }
    marked[static_cast<std::size_t>(termNodes[0])] = true;
    for (std::size_t k = 1; k < termNodes.size(); ++k)
      for (int node : pathBetween(termNodes[0], termNodes[k]))
        marked[static_cast<std::size_t>(node)] = true;

    for (int i = 1; i <= m; ++i) {
      if (!marked[static_cast<std::size_t>(i - 1)]) continue;
      std::set<int> childW;
      for (int pid : inc.pieceToPoints[static_cast<std::size_t>(i - 1)]) {
        if (!marked[static_cast<std::size_t>(m + pid)]) continue;
        int v = preimageVertex(i, inc.points[static_cast<std::size_t>(pid)]);
        if (v < 0)
          throw Error("junction point is not a vertex image of piece " + std::to_string(i));
        childW.insert(v);
      }
      for (auto [letter, w] : pieceExtras) {
        if (letter != i) continue;
        int v = preimageVertex(i, sys.base.vertex(w));
        if (v < 0)
          throw Error("base vertex lies in piece " + std::to_string(i) +
                      " without being one of its vertex images");
        childW.insert(v);
      }
      LevelStructure::PieceUse use;
      use.letter = i;
      use.childW.assign(childW.begin(), childW.end());
      if (use.childW.size() < 2)
        throw Error("piece " + std::to_string(i) + " carries fewer than two tree terminals");
      ls.pieces.push_back(std::move(use));
    }
    for (int pid = 0; pid < static_cast<int>(inc.points.size()); ++pid)
      if (marked[static_cast<std::size_t>(m + pid)]) ls.junctionPoints.push_back(pid);

    return structureMemo.emplace(W, std::move(ls)).first->second;
  }

  // --- multizipper -------------------------------------------------------

  const Multizipper& multizipper() {
    if (zipper) return *zipper;
    Multizipper z;
    std::map<std::pair<int, int>, int> indexOf;
    std::deque<std::pair<int, int>> work;
    const int nP = sys.base.vertexCount();
    auto ensure = [&](int a, int b) {
      std::pair<int, int> key{std::min(a, b), std::max(a, b)};
      auto it = indexOf.find(key);
      if (it != indexOf.end()) return it->second;
      int id = static_cast<int>(z.components.size());
      indexOf[key] = id;
      z.components.emplace_back();
      z.components.back().endpointA = key.first;
      z.components.back().endpointB = key.second;
      work.push_back(key);
      return id;
    };
    for (int a = 0; a < nP; ++a)
      for (int b = a + 1; b < nP; ++b) ensure(a, b);

    while (!work.empty()) {
      auto [a, b] = work.front();
      work.pop_front();
      int self = indexOf[{a, b}];
      Chain ch = chainBetween(sys.base.vertex(a), sys.base.vertex(b));
      ZipperComponent& comp = z.components[static_cast<std::size_t>(self)];
      comp.chainPieces = ch.pieces;
      comp.nodePoints.clear();
      comp.nodePoints.push_back(sys.base.vertex(a));
      for (const Point& j : ch.junctions) comp.nodePoints.push_back(j);
      comp.nodePoints.push_back(sys.base.vertex(b));

      comp.maps.clear();
      for (std::size_t k = 0; k < ch.pieces.size(); ++k) {
        int letter = ch.pieces[k];
        const Point& entry = comp.nodePoints[k];
        const Point& exit = comp.nodePoints[k + 1];
        int u = preimageVertex(letter, entry);
        int v = preimageVertex(letter, exit);
        if (u < 0 || v < 0 || u == v)
          throw Error("chain entry/exit of piece " + std::to_string(letter) +
                      " is not a pair of vertex images");
        ZipperMap zm;
        zm.letter = letter;
        zm.targetComponent = ensure(u, v);
        zm.signature = (u < v) ? 0 : 1;
        comp.maps.push_back(zm);
      }
    }

    // structural classes: refine on the (ratio, target class) sequence read
    // forward or reversed, whichever is lexicographically smaller
    const int n = static_cast<int>(z.components.size());
    z.classOf.assign(static_cast<std::size_t>(n), 0);
    auto key = [&](int c) {
      std::vector<std::pair<double, int>> fwd, rev;
      for (const ZipperMap& zm : z.components[static_cast<std::size_t>(c)].maps)
        fwd.emplace_back(sys.map(zm.letter).ratio(), z.classOf[static_cast<std::size_t>(zm.targetComponent)]);
      rev.assign(fwd.rbegin(), fwd.rend());
      return std::min(fwd, rev);
    };
    for (int round = 0; round < n + 1; ++round) {
      std::map<std::vector<std::pair<double, int>>, int> ids;
      std::vector<int> next(static_cast<std::size_t>(n));
      for (int c = 0; c < n; ++c) {
        auto k = key(c);
        auto it = ids.find(k);
        if (it == ids.end()) it = ids.emplace(k, static_cast<int>(ids.size())).first;
        next[static_cast<std::size_t>(c)] = it->second;
      }
      bool changed = next != z.classOf;
      z.classOf = std::move(next);
      z.classCount = static_cast<int>(ids.size());
      if (!changed) break;
    }
    zipper = std::move(z);
    return *zipper;
  }

  // --- skeletons ----------------------------------------------------------

  struct NodeMerger {
    double cell;
    double tol;
    std::unordered_map<long long, std::vector<int>> grid;
    TreeSkeleton* skel;

    NodeMerger(TreeSkeleton* s, double tolerance)
        : cell(std::max(tolerance, 1e-300) * 8.0), tol(tolerance), skel(s) {}

    long long keyFor(const Point& p, int dx, int dy, int dz) const {
      long long h = 1469598103934665603LL;
      auto mix = [&](long long v) { h = (h ^ v) * 1099511628211LL; };
      mix(static_cast<long long>(std::floor(p[0] / cell)) + dx);
      if (p.dim() > 1) mix(static_cast<long long>(std::floor(p[1] / cell)) + dy);
      if (p.dim() > 2) mix(static_cast<long long>(std::floor(p[2] / cell)) + dz);
      return h;
    }

    int idFor(const Point& p, bool steiner) {
      const int span = 1;
      for (int dx = -span; dx <= span; ++dx)
        for (int dy = -span; dy <= span; ++dy)
          for (int dz = -span; dz <= span; ++dz) {
            auto it = grid.find(keyFor(p, dx, dy, dz));
            if (it == grid.end()) continue;
            for (int id : it->second)
              if (skel->nodes[static_cast<std::size_t>(id)].position.dist(p) <= tol) return id;
          }
      int id = static_cast<int>(skel->nodes.size());
      skel->nodes.push_back({p, steiner});
      grid[keyFor(p, 0, 0, 0)].push_back(id);
      return id;
    }
  };

  const TreeSkeleton& skeleton(int depth) {
    auto it = skeletons.find(depth);
    if (it != skeletons.end()) return it->second;

    TreeSkeleton skel;
    skel.depth = depth;
    NodeMerger merger(&skel, eps);

    std::vector<int> allW(static_cast<std::size_t>(sys.base.vertexCount()));
    for (int v = 0; v < sys.base.vertexCount(); ++v) allW[static_cast<std::size_t>(v)] = v;

    MultiIndex word;
    std::function<void(const std::optional<Similarity>&, const std::vector<int>&, int)> unfold =
        [&](const std::optional<Similarity>& map, const std::vector<int>& W, int left) {
          if (skel.edges.size() > sys.pieceBudget)
            throw DepthTooLarge("skeleton exceeds the piece budget");
          auto place = [&](const Point& p) { return map ? map->apply(p) : p; };
          if (left == 0) {
            if (W.size() == 2) {
              SkeletonEdge e;
              e.a = merger.idFor(place(sys.base.vertex(W[0])), false);
              e.b = merger.idFor(place(sys.base.vertex(W[1])), false);
              e.word = word;
              e.componentA = W[0];
              e.componentB = W[1];
              skel.edges.push_back(std::move(e));
            } else {
              // unresolved region: star from the cylinder centroid
              int center = merger.idFor(place(sys.base.centroid()), true);
              for (int w : W) {
                SkeletonEdge e;
                e.a = center;
                e.b = merger.idFor(place(sys.base.vertex(w)), false);
                e.word = word;
                e.unresolved = true;
                skel.edges.push_back(std::move(e));
              }
            }
            return;
          }
          const LevelStructure& ls = structureFor(W);
          for (const LevelStructure::PieceUse& use : ls.pieces) {
            word.letters.push_back(use.letter);
            std::optional<Similarity> child =
                map ? std::optional<Similarity>(map->compose(sys.map(use.letter)))
                    : std::optional<Similarity>(sys.map(use.letter));
            unfold(child, use.childW, left - 1);
            word.letters.pop_back();
          }
        };
    unfold(std::nullopt, allW, depth);

    if (!skel.isTree())
      throw Error("depth-" + std::to_string(depth) + " skeleton is not a tree (numerics?)");
    return skeletons.emplace(depth, std::move(skel)).first->second;
  }

  // --- orders --------------------------------------------------------------

  // Stable skeleton degree of a geometric point: the degree once it agrees
  // between two consecutive depths. Returns {degree, depth} or {-1, -1}.
  std::pair<int, int> stableDegree(const Point& x, int nStab) {
    int prev = -1;
    for (int n = 1; n <= nStab; ++n) {
      const TreeSkeleton& sk = skeleton(n);
      int id = sk.findNode(x, eps);
      int deg = (id >= 0) ? sk.degree(id) : 0;
      if (prev >= 1 && deg == prev) return {deg, n};
      prev = deg;
    }
    return {-1, -1};
  }

  int stableDegreeOfVertex(int v, int nStab) {
    auto it = stableVertexDegree.find(v);
    if (it != stableVertexDegree.end()) return it->second;
    auto [deg, at] = stableDegree(sys.base.vertex(v), nStab);
    if (deg < 0) throw Error("vertex degree did not stabilize");
    stableVertexDegree[v] = deg;
    return deg;
  }

  std::vector<int> cycleStates(const VertexAutomaton& automaton, int start) const {
    std::vector<int> states;
    int s = start;
    do {
      states.push_back(s);
      s = automaton.transitions[static_cast<std::size_t>(s)][0].toState;
    } while (s != start && states.size() <= automaton.transitions.size());
    return states;
  }

  OrderReport pointOrder(const Point& x, int nStab) {
    OrderReport rep;
    rep.point = x;
    auto [deg, at] = stableDegree(x, nStab);
    rep.stabilized = deg >= 0;
    rep.stabilizedAtDepth = at;
    rep.orderInTree = (deg >= 0) ? deg : 0;

    PointAddresses pa = addresses_of_point(sys, x);
    rep.theta = pa.availableAngle;
    rep.thetaMin = pa.minAngle;
    const int nP = sys.base.vertexCount();
    rep.safeBound = (nP - 1) * pa.floorBound();
    rep.paperBound = (nP - 1) * pa.paperBound();
    rep.note =
        "paperBound uses the ceiling-minus-one form, which can undershoot the "
        "attained order; safeBound is the asserted bound";

    if (!pa.vertexPoint) {
      rep.addressCount = 0;
      rep.orderInK = rep.orderInTree;
    } else {
      rep.addressCount = pa.count();
      VertexAutomaton automaton = build_vertex_automaton(sys);
      int total = 0;
      for (const AddressBranch& b : pa.branches) {
        int branchDeg = -1;
        for (int s : cycleStates(automaton, b.cycleState)) {
          int d = stableDegreeOfVertex(s, nStab);
          if (branchDeg < 0) branchDeg = d;
          if (d != branchDeg) {
            rep.stabilized = false;
            rep.note += "; cycle states disagree on the local tree order";
          }
        }
        total += branchDeg;
      }
      rep.orderInK = total;
    }
    rep.classification = (rep.orderInK <= 1)   ? PointClass::EndPoint
                         : (rep.orderInK == 2) ? PointClass::CutPoint
                                               : PointClass::RamificationPoint;
    return rep;
  }
};

MainTreeBuilder::MainTreeBuilder(const PolyhedralSystem& sys) : impl_(new Impl(sys)) {}
MainTreeBuilder::~MainTreeBuilder() = default;
MainTreeBuilder::MainTreeBuilder(MainTreeBuilder&&) noexcept = default;
MainTreeBuilder& MainTreeBuilder::operator=(MainTreeBuilder&&) noexcept = default;

const PolyhedralSystem& MainTreeBuilder::system() const { return impl_->sys; }
const IncidenceGraph& MainTreeBuilder::incidence() const { return impl_->inc; }
Chain MainTreeBuilder::chainBetween(const Point& x, const Point& y) {
  return impl_->chainBetween(x, y);
}
const Multizipper& MainTreeBuilder::multizipper() { return impl_->multizipper(); }
const TreeSkeleton& MainTreeBuilder::skeleton(int depth) { return impl_->skeleton(depth); }
OrderReport MainTreeBuilder::pointOrder(const Point& x, int nStab) {
  return impl_->pointOrder(x, nStab);
}

// ---------------------------------------------------------------------------
// Jordan conditions

JordanCheck verify_jordan_conditions(const Multizipper& z, const PolyhedralSystem& sys) {
  JordanCheck out;
  for (int c = 0; c < static_cast<int>(z.components.size()); ++c) {
    const ZipperComponent& comp = z.components[static_cast<std::size_t>(c)];
    std::vector<Polyhedron> pieces;
    for (int letter : comp.chainPieces) pieces.push_back(sys.piece(letter));
    const int s = static_cast<int>(pieces.size());
    for (int k = 0; k < s; ++k)
      for (int l = k + 1; l < s; ++l) {
        IntersectionClass ic = classify_intersection(pieces[static_cast<std::size_t>(k)],
                                                     pieces[static_cast<std::size_t>(l)],
                                                     sys.tolerance);
        bool bad = false;
        std::string why;
        if (l == k + 1) {
          if (ic.kind != IntersectionKind::SharedVertex) {
            bad = true;
            why = "consecutive chain pieces do not meet in a single vertex";
          } else if (ic.point.dist(comp.nodePoints[static_cast<std::size_t>(l)]) > sys.absTol()) {
            bad = true;
            why = "consecutive chain pieces meet away from their node point";
          }
        } else if (ic.kind != IntersectionKind::Disjoint) {
          bad = true;
          why = "non-consecutive chain pieces intersect";
        }
        if (bad) {
          out.ok = false;
          out.component = c;
          out.pieceK = k + 1;
          out.pieceL = l + 1;
          out.detail = why;
          return out;
        }
      }
  }
  return out;
}

// ---------------------------------------------------------------------------
// One-shot wrappers

Chain chain_between(const PolyhedralSystem& sys, const Point& x, const Point& y) {
  MainTreeBuilder b(sys);
  return b.chainBetween(x, y);
}

Multizipper build_multizipper(const PolyhedralSystem& sys) {
  MainTreeBuilder b(sys);
  return b.multizipper();
}

TreeSkeleton tree_skeleton(const PolyhedralSystem& sys, int n) {
  MainTreeBuilder b(sys);
  return b.skeleton(n);
}

OrderReport point_order(const PolyhedralSystem& sys, const Point& x, int nStab) {
  MainTreeBuilder b(sys);
  return b.pointOrder(x, nStab);
}

}  // namespace dendrite
