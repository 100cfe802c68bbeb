#include "dendrite/geometry.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <map>
#include <numbers>

namespace dendrite {

namespace {

constexpr double kPi = std::numbers::pi;

std::string formatPoint(const Vec& v) {
  char buf[96];
  if (v.dim() == 1) {
    std::snprintf(buf, sizeof buf, "(%.12g)", v[0]);
  } else if (v.dim() == 2) {
    std::snprintf(buf, sizeof buf, "(%.12g, %.12g)", v[0], v[1]);
  } else {
    std::snprintf(buf, sizeof buf, "(%.12g, %.12g, %.12g)", v[0], v[1], v[2]);
  }
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// Vec

Vec::Vec(std::initializer_list<double> xs) {
  if (xs.size() == 0 || xs.size() > 3) throw DimensionMismatch("point dimension must be 1, 2 or 3");
  dim_ = static_cast<int>(xs.size());
  int i = 0;
  for (double x : xs) c_[static_cast<std::size_t>(i++)] = x;
}

Vec::Vec(std::span<const double> xs) {
  if (xs.size() == 0 || xs.size() > 3) throw DimensionMismatch("point dimension must be 1, 2 or 3");
  dim_ = static_cast<int>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) c_[i] = xs[i];
}

Vec Vec::zeros(int dim) {
  if (dim < 1 || dim > 3) throw DimensionMismatch("point dimension must be 1, 2 or 3");
  Vec v;
  v.dim_ = dim;
  return v;
}

void Vec::requireSameDim(const Vec& o) const {
  if (dim_ != o.dim_) throw DimensionMismatch("operand dimensions differ");
}

Vec Vec::operator+(const Vec& o) const {
  requireSameDim(o);
  Vec r = *this;
  for (int i = 0; i < dim_; ++i) r[i] += o[i];
  return r;
}

Vec Vec::operator-(const Vec& o) const {
  requireSameDim(o);
  Vec r = *this;
  for (int i = 0; i < dim_; ++i) r[i] -= o[i];
  return r;
}

Vec Vec::operator*(double s) const {
  Vec r = *this;
  for (int i = 0; i < dim_; ++i) r[i] *= s;
  return r;
}

double Vec::dot(const Vec& o) const {
  requireSameDim(o);
  double acc = 0.0;
  for (int i = 0; i < dim_; ++i) acc += (*this)[i] * o[i];
  return acc;
}

Vec Vec::normalized() const {
  double n = norm();
  if (n == 0.0) throw Error("cannot normalize a zero vector");
  return *this * (1.0 / n);
}

std::vector<double> Vec::toVector() const {
  std::vector<double> out(static_cast<std::size_t>(dim_));
  for (int i = 0; i < dim_; ++i) out[static_cast<std::size_t>(i)] = (*this)[i];
  return out;
}

std::string Vec::str() const { return formatPoint(*this); }

double cross2(const Vec& a, const Vec& b) { return a[0] * b[1] - a[1] * b[0]; }

Vec cross3(const Vec& a, const Vec& b) {
  return Vec{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
             a[0] * b[1] - a[1] * b[0]};
}

// ---------------------------------------------------------------------------
// Mat

Mat Mat::identity(int dim) {
  Mat m;
  m.dim_ = dim;
  for (int i = 0; i < dim; ++i) m.at(i, i) = 1.0;
  return m;
}

Mat Mat::fromRows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty() || rows.size() > 3) throw DimensionMismatch("matrix dimension must be 1, 2 or 3");
  Mat m;
  m.dim_ = static_cast<int>(rows.size());
  for (int r = 0; r < m.dim_; ++r) {
    if (static_cast<int>(rows[static_cast<std::size_t>(r)].size()) != m.dim_)
      throw DimensionMismatch("matrix must be square");
    for (int c = 0; c < m.dim_; ++c)
      m.at(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  }
  return m;
}

Mat Mat::fromColumns(std::span<const Vec> cols) {
  Mat m;
  m.dim_ = static_cast<int>(cols.size());
  for (int c = 0; c < m.dim_; ++c)
    for (int r = 0; r < m.dim_; ++r) m.at(r, c) = cols[static_cast<std::size_t>(c)][r];
  return m;
}

Vec Mat::apply(const Vec& v) const {
  if (v.dim() != dim_) throw DimensionMismatch("matrix/vector dimensions differ");
  Vec out = Vec::zeros(dim_);
  for (int r = 0; r < dim_; ++r) {
    double acc = 0.0;
    for (int c = 0; c < dim_; ++c) acc += at(r, c) * v[c];
    out[r] = acc;
  }
  return out;
}

Mat Mat::times(const Mat& o) const {
  if (o.dim_ != dim_) throw DimensionMismatch("matrix dimensions differ");
  Mat out;
  out.dim_ = dim_;
  for (int r = 0; r < dim_; ++r)
    for (int c = 0; c < dim_; ++c) {
      double acc = 0.0;
      for (int k = 0; k < dim_; ++k) acc += at(r, k) * o.at(k, c);
      out.at(r, c) = acc;
    }
  return out;
}

Mat Mat::transposed() const {
  Mat out;
  out.dim_ = dim_;
  for (int r = 0; r < dim_; ++r)
    for (int c = 0; c < dim_; ++c) out.at(r, c) = at(c, r);
  return out;
}

double Mat::determinant() const {
  switch (dim_) {
    case 1:
      return at(0, 0);
    case 2:
      return at(0, 0) * at(1, 1) - at(0, 1) * at(1, 0);
    case 3:
      return at(0, 0) * (at(1, 1) * at(2, 2) - at(1, 2) * at(2, 1)) -
             at(0, 1) * (at(1, 0) * at(2, 2) - at(1, 2) * at(2, 0)) +
             at(0, 2) * (at(1, 0) * at(2, 1) - at(1, 1) * at(2, 0));
    default:
      throw DimensionMismatch("matrix has no dimension");
  }
}

bool Mat::isOrthogonal(double tol) const {
  Mat gram = transposed().times(*this);
  for (int r = 0; r < dim_; ++r)
    for (int c = 0; c < dim_; ++c) {
      double expect = (r == c) ? 1.0 : 0.0;
      if (std::abs(gram.at(r, c) - expect) > tol) return false;
    }
  return true;
}

// ---------------------------------------------------------------------------
// Similarity

Similarity::Similarity(double ratio, Mat orthogonal, Vec translation, double tol)
    : ratio_(ratio), orthogonal_(orthogonal), translation_(translation) {
  if (!(ratio > 0.0 && ratio < 1.0))
    throw Error("similarity ratio must lie in (0,1), got " + std::to_string(ratio));
  if (orthogonal.dim() != translation.dim())
    throw DimensionMismatch("orthogonal part and translation dimensions differ");
  if (!orthogonal_.isOrthogonal(std::max(tol, 1e-12) * 1e3))
    throw Error("matrix is not orthogonal within tolerance");
}

Point Similarity::apply(const Point& x) const {
  if (x.dim() != dim()) throw DimensionMismatch("similarity applied to point of wrong dimension");
  return orthogonal_.apply(x) * ratio_ + translation_;
}

Point Similarity::applyInverse(const Point& x) const {
  if (x.dim() != dim()) throw DimensionMismatch("similarity applied to point of wrong dimension");
  return orthogonal_.transposed().apply((x - translation_) * (1.0 / ratio_));
}

Similarity Similarity::compose(const Similarity& inner) const {
  // this(inner(x)) = r1*O1*(r2*O2*x + t2) + t1
  double r = ratio_ * inner.ratio_;
  Mat o = orthogonal_.times(inner.orthogonal_);
  Vec t = orthogonal_.apply(inner.translation_) * ratio_ + translation_;
  Similarity out = *this;
  out.ratio_ = r;
  out.orthogonal_ = o;
  out.translation_ = t;
  return out;
}

Point apply_similarity(const Similarity& s, const Point& x) { return s.apply(x); }

// ---------------------------------------------------------------------------
// Polyhedron construction and queries

void Polyhedron::finalize() {
  diameter_ = 0.0;
  for (std::size_t i = 0; i < vertices_.size(); ++i)
    for (std::size_t j = i + 1; j < vertices_.size(); ++j)
      diameter_ = std::max(diameter_, vertices_[i].dist(vertices_[j]));
}

Polyhedron Polyhedron::interval(const Point& a, const Point& b) {
  if (a.dim() != 1 || b.dim() != 1) throw InvalidPolyhedron("interval endpoints must be 1-dimensional");
  if (a.dist(b) == 0.0) throw InvalidPolyhedron("interval endpoints coincide");
  Polyhedron p;
  p.dim_ = 1;
  p.vertices_ = {a, b};
  p.finalize();
  return p;
}

Polyhedron Polyhedron::polygon(std::vector<Point> ccwVertices) {
  const int n = static_cast<int>(ccwVertices.size());
  if (n < 3) throw InvalidPolyhedron("polygon needs at least 3 vertices");
  for (const Point& v : ccwVertices) {
    if (v.dim() != 2) throw InvalidPolyhedron("polygon vertices must be 2-dimensional");
    if (!std::isfinite(v[0]) || !std::isfinite(v[1])) throw InvalidPolyhedron("polygon vertex not finite");
  }
  Polyhedron p;
  p.dim_ = 2;
  p.vertices_ = std::move(ccwVertices);
  p.finalize();

  double area2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const Point& a = p.vertices_[static_cast<std::size_t>(i)];
    const Point& b = p.vertices_[static_cast<std::size_t>((i + 1) % n)];
    area2 += cross2(a, b);
  }
  if (area2 <= 0.0)
    throw InvalidPolyhedron("polygon vertices must be in counter-clockwise order");

  const double strict = 1e-9 * p.diameter_ * p.diameter_;
  for (int i = 0; i < n; ++i) {
    const Point& a = p.vertices_[static_cast<std::size_t>(i)];
    const Point& b = p.vertices_[static_cast<std::size_t>((i + 1) % n)];
    const Point& c = p.vertices_[static_cast<std::size_t>((i + 2) % n)];
    if (cross2(b - a, c - b) <= strict)
      throw InvalidPolyhedron("polygon is not strictly convex at vertex " +
                              std::to_string((i + 1) % n));
  }
  return p;
}

namespace {

Vec newellNormal(const std::vector<Point>& verts, const std::vector<int>& cycle) {
  Vec n{0.0, 0.0, 0.0};
  const int k = static_cast<int>(cycle.size());
  for (int i = 0; i < k; ++i) {
    const Point& a = verts[static_cast<std::size_t>(cycle[static_cast<std::size_t>(i)])];
    const Point& b = verts[static_cast<std::size_t>(cycle[static_cast<std::size_t>((i + 1) % k)])];
    n[0] += (a[1] - b[1]) * (a[2] + b[2]);
    n[1] += (a[2] - b[2]) * (a[0] + b[0]);
    n[2] += (a[0] - b[0]) * (a[1] + b[1]);
  }
  return n;
}

}  // namespace

Polyhedron Polyhedron::polytope(std::vector<Point> vertices,
                                std::vector<std::vector<int>> faces) {
  const int n = static_cast<int>(vertices.size());
  if (n < 4) throw InvalidPolyhedron("polytope needs at least 4 vertices");
  for (const Point& v : vertices)
    if (v.dim() != 3) throw InvalidPolyhedron("polytope vertices must be 3-dimensional");
  if (faces.size() < 4) throw InvalidPolyhedron("polytope needs at least 4 faces");

  Polyhedron p;
  p.dim_ = 3;
  p.vertices_ = std::move(vertices);
  p.faces_ = std::move(faces);
  p.finalize();

  std::map<std::pair<int, int>, int> edgeUse;
  std::vector<int> vertexUse(static_cast<std::size_t>(n), 0);
  for (const auto& f : p.faces_) {
    if (f.size() < 3) throw InvalidPolyhedron("face needs at least 3 vertices");
    for (std::size_t i = 0; i < f.size(); ++i) {
      int a = f[i], b = f[(i + 1) % f.size()];
      if (a < 0 || a >= n || b < 0 || b >= n) throw InvalidPolyhedron("face vertex index out of range");
      if (a == b) throw InvalidPolyhedron("face repeats a vertex");
      ++vertexUse[static_cast<std::size_t>(a)];
      ++edgeUse[{std::min(a, b), std::max(a, b)}];
    }
  }
  for (auto& [e, cnt] : edgeUse)
    if (cnt != 2) throw InvalidPolyhedron("every polytope edge must bound exactly 2 faces");
  for (int v = 0; v < n; ++v)
    if (vertexUse[static_cast<std::size_t>(v)] < 3)
      throw InvalidPolyhedron("vertex " + std::to_string(v) + " lies on fewer than 3 faces");
  const int E = static_cast<int>(edgeUse.size());
  const int F = static_cast<int>(p.faces_.size());
  if (n - E + F != 2) throw InvalidPolyhedron("face structure violates Euler's formula");

  const double eps = 1e-9 * p.diameter_;
  const Point c = p.centroid();
  for (const auto& f : p.faces_) {
    Vec nrm = newellNormal(p.vertices_, f);
    if (nrm.norm() == 0.0) throw InvalidPolyhedron("degenerate face");
    nrm = nrm.normalized();
    const Point& v0 = p.vertices_[static_cast<std::size_t>(f[0])];
    for (int idx : f)
      if (std::abs(nrm.dot(p.vertices_[static_cast<std::size_t>(idx)] - v0)) > eps)
        throw InvalidPolyhedron("face is not planar");
    if (nrm.dot(c - v0) > 0.0) nrm = nrm * -1.0;  // make outward
    for (const Point& v : p.vertices_)
      if (nrm.dot(v - v0) > eps) throw InvalidPolyhedron("polytope is not convex");
  }
  return p;
}

Point Polyhedron::centroid() const {
  Point c = Vec::zeros(dim_);
  for (const Point& v : vertices_) c = c + v;
  return c * (1.0 / static_cast<double>(vertices_.size()));
}

bool Polyhedron::containsPoint(const Point& p, double absTol) const {
  if (p.dim() != dim_) throw DimensionMismatch("point/polyhedron dimensions differ");
  switch (dim_) {
    case 1: {
      double lo = std::min(vertices_[0][0], vertices_[1][0]);
      double hi = std::max(vertices_[0][0], vertices_[1][0]);
      return p[0] >= lo - absTol && p[0] <= hi + absTol;
    }
    case 2: {
      const int n = vertexCount();
      for (int i = 0; i < n; ++i) {
        const Point& a = vertices_[static_cast<std::size_t>(i)];
        const Point& b = vertices_[static_cast<std::size_t>((i + 1) % n)];
        Vec e = b - a;
        double side = orientation_ * cross2(e, p - a);
        if (side < -absTol * e.norm()) return false;
      }
      return true;
    }
    default: {
      const Point c = centroid();
      for (const auto& f : faces_) {
        Vec nrm = newellNormal(vertices_, f).normalized();
        const Point& v0 = vertices_[static_cast<std::size_t>(f[0])];
        if (nrm.dot(c - v0) > 0.0) nrm = nrm * -1.0;
        if (nrm.dot(p - v0) > absTol) return false;
      }
      return true;
    }
  }
}

int Polyhedron::findVertex(const Point& p, double absTol) const {
  for (int k = 0; k < vertexCount(); ++k)
    if (vertices_[static_cast<std::size_t>(k)].dist(p) <= absTol) return k;
  return -1;
}

Polyhedron Polyhedron::image(const Similarity& s) const {
  if (s.dim() != dim_) throw DimensionMismatch("similarity/polyhedron dimensions differ");
  Polyhedron out;
  out.dim_ = dim_;
  out.faces_ = faces_;
  out.vertices_.reserve(vertices_.size());
  for (const Point& v : vertices_) out.vertices_.push_back(s.apply(v));
  out.orientation_ = orientation_ * (s.orientationReversing() ? -1 : 1);
  out.diameter_ = diameter_ * s.ratio();
  return out;
}

double diameter(const Polyhedron& p) { return p.diameter(); }

bool polyhedron_contains(const Polyhedron& outer, const Polyhedron& inner, double relTol) {
  if (outer.dim() != inner.dim()) throw DimensionMismatch("polyhedra dimensions differ");
  const double eps = relTol * std::max(outer.diameter(), inner.diameter());
  for (const Point& v : inner.vertices())
    if (!outer.containsPoint(v, eps)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Distance primitives

namespace {

double pointSegmentDist(const Point& p, const Point& a, const Point& b) {
  Vec ab = b - a;
  double len2 = ab.dot(ab);
  if (len2 == 0.0) return p.dist(a);
  double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return p.dist(a + ab * t);
}

// Clamped closest-approach parameters (s on [p1,q1], t on [p2,q2]).
std::pair<double, double> segSegClosest(const Point& p1, const Point& q1,
                                        const Point& p2, const Point& q2) {
  Vec d1 = q1 - p1, d2 = q2 - p2, r = p1 - p2;
  double a = d1.dot(d1), e = d2.dot(d2), f = d2.dot(r);
  double c = d1.dot(r), b = d1.dot(d2);
  double denom = a * e - b * b;
  double s = 0.0;
  if (denom > 1e-30) s = std::clamp((b * f - c * e) / denom, 0.0, 1.0);
  double t = (e > 0.0) ? (b * s + f) / e : 0.0;
  if (t < 0.0) {
    t = 0.0;
    s = (a > 0.0) ? std::clamp(-c / a, 0.0, 1.0) : 0.0;
  } else if (t > 1.0) {
    t = 1.0;
    s = (a > 0.0) ? std::clamp((b - c) / a, 0.0, 1.0) : 0.0;
  } else if (denom <= 1e-30) {
    // parallel segments: the initial s = 0 guess may sit at the far end
    s = (a > 0.0) ? std::clamp((b * t - c) / a, 0.0, 1.0) : 0.0;
  }
  return {s, t};
}

double segSegDist(const Point& p1, const Point& q1, const Point& p2, const Point& q2) {
  auto [s, t] = segSegClosest(p1, q1, p2, q2);
  return (p1 + (q1 - p1) * s).dist(p2 + (q2 - p2) * t);
}

std::vector<std::pair<int, int>> polytopeEdges(const Polyhedron& p) {
  std::map<std::pair<int, int>, bool> seen;
  for (const auto& f : p.faces())
    for (std::size_t i = 0; i < f.size(); ++i) {
      int a = f[i], b = f[(i + 1) % f.size()];
      seen[{std::min(a, b), std::max(a, b)}] = true;
    }
  std::vector<std::pair<int, int>> out;
  out.reserve(seen.size());
  for (auto& [e, _] : seen) out.push_back(e);
  return out;
}

// Distance from a point to a convex planar face polygon in R^3.
double pointFaceDist(const Point& p, const Polyhedron& poly, const std::vector<int>& face) {
  Vec nrm = newellNormal(poly.vertices(), face).normalized();
  const Point& v0 = poly.vertex(face[0]);
  double h = nrm.dot(p - v0);
  Point foot = p - nrm * h;
  // foot inside the face polygon? check against every face edge in-plane
  bool inside = true;
  const int k = static_cast<int>(face.size());
  for (int i = 0; i < k && inside; ++i) {
    const Point& a = poly.vertex(face[static_cast<std::size_t>(i)]);
    const Point& b = poly.vertex(face[static_cast<std::size_t>((i + 1) % k)]);
    Vec edgeNormal = cross3(nrm, b - a);  // points to one side consistently
    // orient edgeNormal toward the face interior using the next vertex
    const Point& probe = poly.vertex(face[static_cast<std::size_t>((i + 2) % k)]);
    if (edgeNormal.dot(probe - a) < 0.0) edgeNormal = edgeNormal * -1.0;
    if (edgeNormal.dot(foot - a) < 0.0) inside = false;
  }
  if (inside) return std::abs(h);
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < k; ++i) {
    const Point& a = poly.vertex(face[static_cast<std::size_t>(i)]);
    const Point& b = poly.vertex(face[static_cast<std::size_t>((i + 1) % k)]);
    best = std::min(best, pointSegmentDist(p, a, b));
  }
  return best;
}

// Candidate contact points: vertices of one body inside the other plus
// boundary-boundary intersection points. The convex intersection, when it is
// nonempty, is the hull of these points, so its diameter equals theirs.
void appendSegSeg2Candidates(const Point& p, const Point& q, const Point& r,
                             const Point& s, double eps, std::vector<Point>& out) {
  Vec u = q - p, w = s - r;
  double du = u.norm(), dw = w.norm();
  if (du == 0.0 || dw == 0.0) return;
  double denom = cross2(u, w);
  if (std::abs(denom) > 1e-12 * du * dw) {
    double t = cross2(r - p, w) / denom;
    double tau = cross2(r - p, u) / denom;
    double et = eps / du, es = eps / dw;
    if (t >= -et && t <= 1.0 + et && tau >= -es && tau <= 1.0 + es)
      out.push_back(p + u * std::clamp(t, 0.0, 1.0));
    return;
  }
  // near-parallel: collinear overlap contributes its endpoints
  auto lineDist = [&](const Point& x) { return std::abs(cross2(u, x - p)) / du; };
  if (lineDist(r) <= eps && lineDist(s) <= eps) {
    double a = (r - p).dot(u) / (du * du);
    double b = (s - p).dot(u) / (du * du);
    double lo = std::max(0.0, std::min(a, b));
    double hi = std::min(1.0, std::max(a, b));
    if (hi >= lo - eps / du) {
      out.push_back(p + u * lo);
      out.push_back(p + u * hi);
    }
  }
}

void appendSegFace3Candidates(const Point& p, const Point& q, const Polyhedron& poly,
                              const std::vector<int>& face, double eps,
                              std::vector<Point>& out) {
  Vec nrm = newellNormal(poly.vertices(), face).normalized();
  const Point& v0 = poly.vertex(face[0]);
  double dp = nrm.dot(p - v0), dq = nrm.dot(q - v0);

  auto inFace = [&](const Point& x) {
    const int k = static_cast<int>(face.size());
    for (int i = 0; i < k; ++i) {
      const Point& a = poly.vertex(face[static_cast<std::size_t>(i)]);
      const Point& b = poly.vertex(face[static_cast<std::size_t>((i + 1) % k)]);
      Vec edgeNormal = cross3(nrm, b - a);
      const Point& probe = poly.vertex(face[static_cast<std::size_t>((i + 2) % k)]);
      if (edgeNormal.dot(probe - a) < 0.0) edgeNormal = edgeNormal * -1.0;
      if (edgeNormal.dot(x - a) < -eps * edgeNormal.norm()) return false;
    }
    return true;
  };

  if (std::abs(dp) <= eps && std::abs(dq) <= eps) {
    // coplanar segment: clip each endpoint and edge crossings
    if (inFace(p)) out.push_back(p);
    if (inFace(q)) out.push_back(q);
    const int k = static_cast<int>(face.size());
    for (int i = 0; i < k; ++i) {
      const Point& a = poly.vertex(face[static_cast<std::size_t>(i)]);
      const Point& b = poly.vertex(face[static_cast<std::size_t>((i + 1) % k)]);
      if (segSegDist(p, q, a, b) <= eps) {
        auto [s, t] = segSegClosest(p, q, a, b);
        (void)t;
        out.push_back(p + (q - p) * s);
      }
    }
    return;
  }
  if ((dp > eps && dq > eps) || (dp < -eps && dq < -eps)) return;
  double t = dp / (dp - dq);
  if (!std::isfinite(t)) return;
  Point x = p + (q - p) * std::clamp(t, 0.0, 1.0);
  if (inFace(x)) out.push_back(x);
}

std::vector<Point> contactCandidates(const Polyhedron& a, const Polyhedron& b, double eps) {
  std::vector<Point> out;
  for (const Point& v : a.vertices())
    if (b.containsPoint(v, eps)) out.push_back(v);
  for (const Point& v : b.vertices())
    if (a.containsPoint(v, eps)) out.push_back(v);

  if (a.dim() == 2) {
    const int na = a.vertexCount(), nb = b.vertexCount();
    for (int i = 0; i < na; ++i)
      for (int j = 0; j < nb; ++j)
        appendSegSeg2Candidates(a.vertex(i), a.vertex((i + 1) % na), b.vertex(j),
                                b.vertex((j + 1) % nb), eps, out);
  } else if (a.dim() == 3) {
    auto edgesA = polytopeEdges(a);
    auto edgesB = polytopeEdges(b);
    for (const auto& [u, v] : edgesA)
      for (const auto& f : b.faces())
        appendSegFace3Candidates(a.vertex(u), a.vertex(v), b, f, eps, out);
    for (const auto& [u, v] : edgesB)
      for (const auto& f : a.faces())
        appendSegFace3Candidates(b.vertex(u), b.vertex(v), a, f, eps, out);
    for (const auto& [u1, v1] : edgesA)
      for (const auto& [u2, v2] : edgesB)
        if (segSegDist(a.vertex(u1), a.vertex(v1), b.vertex(u2), b.vertex(v2)) <= eps) {
          auto [s, t] = segSegClosest(a.vertex(u1), a.vertex(v1), b.vertex(u2), b.vertex(v2));
          (void)t;
          out.push_back(a.vertex(u1) + (a.vertex(v1) - a.vertex(u1)) * s);
        }
  }
  return out;
}

}  // namespace

double polyhedron_distance(const Polyhedron& q1, const Polyhedron& q2) {
  if (q1.dim() != q2.dim()) throw DimensionMismatch("polyhedra dimensions differ");
  switch (q1.dim()) {
    case 1: {
      double lo1 = std::min(q1.vertex(0)[0], q1.vertex(1)[0]);
      double hi1 = std::max(q1.vertex(0)[0], q1.vertex(1)[0]);
      double lo2 = std::min(q2.vertex(0)[0], q2.vertex(1)[0]);
      double hi2 = std::max(q2.vertex(0)[0], q2.vertex(1)[0]);
      return std::max({lo2 - hi1, lo1 - hi2, 0.0});
    }
    case 2: {
      if (!contactCandidates(q1, q2, 0.0).empty()) return 0.0;
      double best = std::numeric_limits<double>::infinity();
      const int n1 = q1.vertexCount(), n2 = q2.vertexCount();
      for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j) {
          best = std::min(best, pointSegmentDist(q1.vertex(i), q2.vertex(j),
                                                 q2.vertex((j + 1) % n2)));
          best = std::min(best, pointSegmentDist(q2.vertex(j), q1.vertex(i),
                                                 q1.vertex((i + 1) % n1)));
        }
      return best;
    }
    default: {
      if (!contactCandidates(q1, q2, 0.0).empty()) return 0.0;
      double best = std::numeric_limits<double>::infinity();
      for (const Point& v : q1.vertices())
        for (const auto& f : q2.faces()) best = std::min(best, pointFaceDist(v, q2, f));
      for (const Point& v : q2.vertices())
        for (const auto& f : q1.faces()) best = std::min(best, pointFaceDist(v, q1, f));
      auto e1 = polytopeEdges(q1);
      auto e2 = polytopeEdges(q2);
      for (const auto& [u1, v1] : e1)
        for (const auto& [u2, v2] : e2)
          best = std::min(best, segSegDist(q1.vertex(u1), q1.vertex(v1), q2.vertex(u2),
                                           q2.vertex(v2)));
      return best;
    }
  }
}

IntersectionClass classify_intersection(const Polyhedron& q1, const Polyhedron& q2,
                                        double relTol) {
  if (q1.dim() != q2.dim()) throw DimensionMismatch("polyhedra dimensions differ");
  const double eps = relTol * std::max(q1.diameter(), q2.diameter());

  std::vector<Point> pts = contactCandidates(q1, q2, eps);
  if (pts.empty()) {
    double d = polyhedron_distance(q1, q2);
    if (d > eps) return {IntersectionKind::Disjoint, {}, -1, -1};
    // touching contact that slipped past the candidate enumeration
    pts.push_back(q1.centroid());
  }

  double diam = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      diam = std::max(diam, pts[i].dist(pts[j]));
  if (diam > eps) return {IntersectionKind::Overlap, {}, -1, -1};

  const Point& contact = pts.front();
  int k1 = q1.findVertex(contact, eps);
  int k2 = q2.findVertex(contact, eps);
  if (k1 >= 0 && k2 >= 0)
    return {IntersectionKind::SharedVertex, q1.vertex(k1), k1, k2};
  return {IntersectionKind::Overlap, contact, -1, -1};
}

// ---------------------------------------------------------------------------
// Solid angles

double full_angle(int dim) {
  switch (dim) {
    case 1:
      return 2.0;
    case 2:
      return 2.0 * kPi;
    case 3:
      return 4.0 * kPi;
    default:
      throw DimensionMismatch("ambient dimension must be 1, 2 or 3");
  }
}

namespace {

// Neighbour vertices of vertex v, in cyclic order around the vertex cone,
// recovered by walking face-to-face across the shared edges.
std::vector<int> orderedLink(const Polyhedron& p, int v) {
  struct Incident {
    int face;
    int prev;
    int next;
  };
  std::vector<Incident> inc;
  const auto& faces = p.faces();
  for (int fi = 0; fi < static_cast<int>(faces.size()); ++fi) {
    const auto& f = faces[static_cast<std::size_t>(fi)];
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (f[i] == v) {
        int prev = f[(i + f.size() - 1) % f.size()];
        int next = f[(i + 1) % f.size()];
        inc.push_back({fi, prev, next});
        break;
      }
    }
  }
  if (inc.size() < 3) throw DegenerateAngle("vertex lies on fewer than 3 faces");

  auto otherFace = [&](int neighbor, int notFace) -> const Incident* {
    for (const auto& e : inc)
      if (e.face != notFace && (e.prev == neighbor || e.next == neighbor)) return &e;
    return nullptr;
  };

  std::vector<int> ring{inc[0].prev, inc[0].next};
  int curFace = inc[0].face;
  int curNeighbor = inc[0].next;
  while (true) {
    const Incident* nf = otherFace(curNeighbor, curFace);
    if (nf == nullptr) throw DegenerateAngle("vertex link is not a closed cycle");
    int w = (nf->prev == curNeighbor) ? nf->next : nf->prev;
    if (w == ring.front()) break;
    ring.push_back(w);
    curFace = nf->face;
    curNeighbor = w;
    if (ring.size() > inc.size()) throw DegenerateAngle("vertex link walk did not close");
  }
  return ring;
}

double sphericalTriangleArea(const Vec& u0, const Vec& u1, const Vec& u2) {
  double triple = std::abs(u0.dot(cross3(u1, u2)));
  double denom = 1.0 + u0.dot(u1) + u1.dot(u2) + u2.dot(u0);
  return 2.0 * std::atan2(triple, denom);
}

}  // namespace

SolidAngleValue solid_angle_measure(const Polyhedron& p, int vertexIndex) {
  if (vertexIndex < 0 || vertexIndex >= p.vertexCount())
    throw Error("vertex index out of range");
  SolidAngleValue out;
  out.full = full_angle(p.dim());
  switch (p.dim()) {
    case 1:
      out.measure = 1.0;
      return out;
    case 2: {
      const int n = p.vertexCount();
      const Point& v = p.vertex(vertexIndex);
      Vec a = p.vertex((vertexIndex + n - 1) % n) - v;
      Vec b = p.vertex((vertexIndex + 1) % n) - v;
      if (a.norm() == 0.0 || b.norm() == 0.0) throw DegenerateAngle("zero-length polygon edge");
      out.measure = std::atan2(std::abs(cross2(a, b)), a.dot(b));
      if (out.measure <= 0.0) throw DegenerateAngle("degenerate interior angle");
      return out;
    }
    default: {
      std::vector<int> ring = orderedLink(p, vertexIndex);
      const Point& v = p.vertex(vertexIndex);
      std::vector<Vec> dirs;
      dirs.reserve(ring.size());
      for (int u : ring) dirs.push_back((p.vertex(u) - v).normalized());
      double total = 0.0;
      for (std::size_t i = 1; i + 1 < dirs.size(); ++i)
        total += sphericalTriangleArea(dirs[0], dirs[i], dirs[i + 1]);
      if (total <= 0.0) throw DegenerateAngle("vertex cone has zero measure");
      out.measure = total;
      return out;
    }
  }
}

// ---------------------------------------------------------------------------
// Angular sectors

namespace {

double wrapAngle(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a < 0.0) a += 2.0 * kPi;
  return a;
}

double circularOverlap(double s1, double w1, double s2, double w2) {
  double d = wrapAngle(s2 - s1);
  double part1 = std::max(0.0, std::min(w1, d + w2) - d);
  double part2 = (d + w2 > 2.0 * kPi) ? std::max(0.0, std::min(w1, d + w2 - 2.0 * kPi)) : 0.0;
  return part1 + part2;
}

}  // namespace

AngularSector vertex_sector(const Polyhedron& p, int vertexIndex) {
  AngularSector sec;
  sec.dim = p.dim();
  sec.measure = solid_angle_measure(p, vertexIndex).measure;
  switch (p.dim()) {
    case 1: {
      double other = p.vertex(1 - vertexIndex)[0];
      sec.direction = (other > p.vertex(vertexIndex)[0]) ? 1 : -1;
      return sec;
    }
    case 2: {
      const int n = p.vertexCount();
      int nextIdx = (vertexIndex + 1) % n;
      int prevIdx = (vertexIndex + n - 1) % n;
      if (p.orientation() < 0) std::swap(nextIdx, prevIdx);
      const Point& v = p.vertex(vertexIndex);
      Vec toNext = p.vertex(nextIdx) - v;
      sec.start = wrapAngle(std::atan2(toNext[1], toNext[0]));
      sec.width = sec.measure;
      return sec;
    }
    default: {
      std::vector<int> ring = orderedLink(p, vertexIndex);
      const Point& v = p.vertex(vertexIndex);
      for (int u : ring) sec.dirs.push_back((p.vertex(u) - v).normalized());
      std::sort(sec.dirs.begin(), sec.dirs.end(), [](const Vec& a, const Vec& b) {
        for (int i = 0; i < 3; ++i) {
          if (a[i] < b[i]) return true;
          if (a[i] > b[i]) return false;
        }
        return false;
      });
      return sec;
    }
  }
}

bool sectors_equal(const AngularSector& a, const AngularSector& b, double angTol) {
  if (a.dim != b.dim) return false;
  switch (a.dim) {
    case 1:
      return a.direction == b.direction;
    case 2: {
      double ds = wrapAngle(a.start - b.start);
      if (ds > kPi) ds = 2.0 * kPi - ds;
      return ds <= angTol && std::abs(a.width - b.width) <= angTol;
    }
    default: {
      if (a.dirs.size() != b.dirs.size()) return false;
      std::vector<bool> used(b.dirs.size(), false);
      for (const Vec& da : a.dirs) {
        bool found = false;
        for (std::size_t j = 0; j < b.dirs.size(); ++j) {
          if (!used[j] && da.dist(b.dirs[j]) <= angTol) {
            used[j] = true;
            found = true;
            break;
          }
        }
        if (!found) return false;
      }
      return true;
    }
  }
}

bool sectors_disjoint(const AngularSector& a, const AngularSector& b, double angTol) {
  if (a.dim != b.dim) throw DimensionMismatch("sector dimensions differ");
  switch (a.dim) {
    case 1:
      return a.direction != b.direction;
    case 2:
      return circularOverlap(a.start, a.width, b.start, b.width) <= angTol;
    default:
      throw Error("interior disjointness of 3D cones is decided via cylinder intersections");
  }
}

// ---------------------------------------------------------------------------
// Similarity from a vertex correspondence

namespace {

Vec perp2(const Vec& v) { return Vec{-v[1], v[0]}; }

Vec orthogonalize(const Vec& v, const Vec& unit) { return v - unit * v.dot(unit); }

bool verifyMap(const Similarity& s, const std::vector<Point>& src,
               const std::vector<Point>& dst, double eps) {
  for (std::size_t i = 0; i < src.size(); ++i)
    if (s.apply(src[i]).dist(dst[i]) > eps) return false;
  return true;
}

}  // namespace

Similarity similarity_from_vertex_map(const Polyhedron& source,
                                      const std::vector<Point>& targetVertices,
                                      double relTol) {
  const int n = source.vertexCount();
  if (static_cast<int>(targetVertices.size()) != n)
    throw Error("target vertex count differs from source vertex count");
  const int d = source.dim();
  for (const Point& t : targetVertices)
    if (t.dim() != d) throw DimensionMismatch("target vertex has wrong dimension");

  // All pairwise distances must scale by one ratio.
  double rmin = std::numeric_limits<double>::infinity();
  double rmax = 0.0;
  int bk = 0, bl = 1;
  double bestLen = -1.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double ds = source.vertex(i).dist(source.vertex(j));
      if (ds == 0.0) continue;
      double r = targetVertices[static_cast<std::size_t>(i)].dist(
                     targetVertices[static_cast<std::size_t>(j)]) /
                 ds;
      rmin = std::min(rmin, r);
      rmax = std::max(rmax, r);
      if (ds > bestLen) {
        bestLen = ds;
        bk = i;
        bl = j;
      }
    }
  double rmid = 0.5 * (rmin + rmax);
  double spread = (rmid > 0.0) ? (rmax - rmin) / rmid : std::numeric_limits<double>::infinity();
  if (spread > std::max(100.0 * relTol, 1e-12) * 1e3) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "target vertices are not a similar copy of the source "
                  "(pairwise distance ratio spread %.3g)",
                  spread);
    throw NoSimilarityExists(buf, spread);
  }
  const double ratio =
      targetVertices[static_cast<std::size_t>(bk)].dist(targetVertices[static_cast<std::size_t>(bl)]) /
      bestLen;

  Point srcCentroid = source.centroid();
  Point dstCentroid = Vec::zeros(d);
  for (const Point& t : targetVertices) dstCentroid = dstCentroid + t;
  dstCentroid = dstCentroid * (1.0 / n);

  double diamT = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      diamT = std::max(diamT, targetVertices[static_cast<std::size_t>(i)].dist(
                                  targetVertices[static_cast<std::size_t>(j)]));
  const double verifyEps = std::max(relTol * std::max(diamT, source.diameter()), 1e-14);

  std::vector<Mat> candidates;
  if (d == 1) {
    double num = targetVertices[static_cast<std::size_t>(bl)][0] -
                 targetVertices[static_cast<std::size_t>(bk)][0];
    double den = source.vertex(bl)[0] - source.vertex(bk)[0];
    candidates.push_back(Mat::fromRows({{(num / den >= 0.0) ? 1.0 : -1.0}}));
  } else if (d == 2) {
    Vec u = (source.vertex(bl) - source.vertex(bk)).normalized();
    Vec up = (targetVertices[static_cast<std::size_t>(bl)] -
              targetVertices[static_cast<std::size_t>(bk)])
                 .normalized();
    std::array<Vec, 2> bcols{u, perp2(u)};
    Mat bT = Mat::fromColumns(bcols).transposed();
    std::array<Vec, 2> c1{up, perp2(up)};
    std::array<Vec, 2> c2{up, perp2(up) * -1.0};
    candidates.push_back(Mat::fromColumns(c1).times(bT));
    candidates.push_back(Mat::fromColumns(c2).times(bT));
  } else {
    Vec e1 = source.vertex(bl) - source.vertex(bk);
    int third = -1;
    double bestArea = 0.0;
    for (int j = 0; j < n; ++j) {
      double area = cross3(source.vertex(j) - source.vertex(bk), e1).norm();
      if (area > bestArea) {
        bestArea = area;
        third = j;
      }
    }
    if (third < 0) throw NoSimilarityExists("source vertices are collinear", spread);
    Vec b1 = e1.normalized();
    Vec b2 = orthogonalize(source.vertex(third) - source.vertex(bk), b1).normalized();
    Vec b3 = cross3(b1, b2);
    std::array<Vec, 3> bcols{b1, b2, b3};
    Mat bT = Mat::fromColumns(bcols).transposed();

    Vec f1 = targetVertices[static_cast<std::size_t>(bl)] -
             targetVertices[static_cast<std::size_t>(bk)];
    Vec f2 = targetVertices[static_cast<std::size_t>(third)] -
             targetVertices[static_cast<std::size_t>(bk)];
    Vec c1v = f1.normalized();
    Vec c2v = orthogonalize(f2, c1v).normalized();
    Vec c3v = cross3(c1v, c2v);
    std::array<Vec, 3> cc1{c1v, c2v, c3v};
    std::array<Vec, 3> cc2{c1v, c2v, c3v * -1.0};
    candidates.push_back(Mat::fromColumns(cc1).times(bT));
    candidates.push_back(Mat::fromColumns(cc2).times(bT));
  }

  for (const Mat& o : candidates) {
    Vec t = dstCentroid - o.apply(srcCentroid) * ratio;
    Similarity cand(ratio, o, t, relTol);
    if (verifyMap(cand, source.vertices(), targetVertices, verifyEps)) return cand;
  }
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "no similarity realizes the vertex correspondence "
                "(pairwise distance ratio spread %.3g)",
                spread);
  throw NoSimilarityExists(buf, spread);
}

}  // namespace dendrite
