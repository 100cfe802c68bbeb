#pragma once

#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

// Geometric primitives for ambient dimension d in {1,2,3}: points,
// contraction similarities, convex polyhedra, intersection classification
// and solid-angle measures. Everything here is immutable after construction
// and safe for unrestricted concurrent use.

namespace dendrite {

/// Default relative tolerance for all coincidence tests. Absolute tolerances
/// are derived from it by scaling with the diameter of the operands.
inline constexpr double kDefaultTolerance = 1e-9;

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct DimensionMismatch : Error {
  using Error::Error;
};

struct InvalidPolyhedron : Error {
  using Error::Error;
};

/// Thrown by similarity_from_vertex_map when the target vertex set is not
/// similar to the source. Carries the maximal pairwise-distance ratio spread.
struct NoSimilarityExists : Error {
  NoSimilarityExists(const std::string& what, double spread_)
      : Error(what), spread(spread_) {}
  double spread;
};

struct DegenerateAngle : Error {
  using Error::Error;
};

/// Point (or displacement vector) in R^d, d <= 3.
class Vec {
 public:
  Vec() = default;
  Vec(std::initializer_list<double> xs);
  explicit Vec(std::span<const double> xs);
  static Vec zeros(int dim);

  int dim() const { return dim_; }
  double operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }
  double& operator[](int i) { return c_[static_cast<std::size_t>(i)]; }

  Vec operator+(const Vec& o) const;
  Vec operator-(const Vec& o) const;
  Vec operator*(double s) const;
  double dot(const Vec& o) const;
  double norm() const { return std::sqrt(dot(*this)); }
  double dist(const Vec& o) const { return (*this - o).norm(); }
  Vec normalized() const;

  std::vector<double> toVector() const;
  std::string str() const;

 private:
  void requireSameDim(const Vec& o) const;
  std::array<double, 3> c_{0.0, 0.0, 0.0};
  int dim_ = 0;
};

using Point = Vec;

double cross2(const Vec& a, const Vec& b);
Vec cross3(const Vec& a, const Vec& b);

/// Dense d x d matrix, d <= 3. Used for the orthogonal part of similarities.
class Mat {
 public:
  Mat() = default;
  static Mat identity(int dim);
  static Mat fromRows(const std::vector<std::vector<double>>& rows);
  /// Columns become the images of the standard basis vectors.
  static Mat fromColumns(std::span<const Vec> cols);

  int dim() const { return dim_; }
  double at(int r, int c) const { return m_[static_cast<std::size_t>(r * 3 + c)]; }
  double& at(int r, int c) { return m_[static_cast<std::size_t>(r * 3 + c)]; }

  Vec apply(const Vec& v) const;
  Mat times(const Mat& o) const;
  Mat transposed() const;
  double determinant() const;
  bool isOrthogonal(double tol) const;

 private:
  std::array<double, 9> m_{};
  int dim_ = 0;
};

/// Contraction similarity S(x) = ratio * orthogonal * x + translation with
/// ratio in (0,1). The orthogonal part may reverse orientation; reports
/// surface the determinant sign.
class Similarity {
 public:
  Similarity(double ratio, Mat orthogonal, Vec translation,
             double tol = kDefaultTolerance);

  Point apply(const Point& x) const;
  /// Solves S(y) = x for y.
  Point applyInverse(const Point& x) const;
  /// Composition this ∘ inner, i.e. x -> this(inner(x)).
  Similarity compose(const Similarity& inner) const;

  double ratio() const { return ratio_; }
  const Mat& orthogonal() const { return orthogonal_; }
  const Vec& translation() const { return translation_; }
  int dim() const { return translation_.dim(); }
  bool orientationReversing() const { return orthogonal_.determinant() < 0.0; }

 private:
  double ratio_;
  Mat orthogonal_;
  Vec translation_;
};

Point apply_similarity(const Similarity& s, const Point& x);

/// Convex polyhedron in R^d, d in {1,2,3}, given by its extreme points.
///
/// d=1: a segment (two endpoints). d=2: a convex polygon with vertices in
/// cyclic order (counter-clockwise on construction; images under
/// orientation-reversing similarities keep the index order and flip the
/// recorded orientation instead). d=3: a convex polytope with a face list
/// of vertex-index cycles.
class Polyhedron {
 public:
  /// Empty polyhedron; assign a factory result before use.
  Polyhedron() = default;

  static Polyhedron interval(const Point& a, const Point& b);
  static Polyhedron polygon(std::vector<Point> ccwVertices);
  static Polyhedron polytope(std::vector<Point> vertices,
                             std::vector<std::vector<int>> faces);

  int dim() const { return dim_; }
  int vertexCount() const { return static_cast<int>(vertices_.size()); }
  const Point& vertex(int k) const { return vertices_[static_cast<std::size_t>(k)]; }
  const std::vector<Point>& vertices() const { return vertices_; }
  const std::vector<std::vector<int>>& faces() const { return faces_; }
  /// +1 while the stored d=2 vertex cycle is counter-clockwise, -1 after an
  /// orientation-reversing similarity. Meaningless for d != 2.
  int orientation() const { return orientation_; }

  double diameter() const { return diameter_; }
  Point centroid() const;

  bool containsPoint(const Point& p, double absTol) const;
  /// Index of the vertex within absTol of p, or -1.
  int findVertex(const Point& p, double absTol) const;

  /// Image under a similarity; vertex k of the image is s(vertex k).
  Polyhedron image(const Similarity& s) const;

 private:
  void finalize();

  std::vector<Point> vertices_;
  std::vector<std::vector<int>> faces_;  // d=3 only
  int dim_ = 0;
  int orientation_ = 1;
  double diameter_ = 0.0;
};

double diameter(const Polyhedron& p);

bool polyhedron_contains(const Polyhedron& outer, const Polyhedron& inner,
                         double relTol = kDefaultTolerance);

enum class IntersectionKind { Disjoint, SharedVertex, Overlap };

struct IntersectionClass {
  IntersectionKind kind = IntersectionKind::Disjoint;
  Point point;             // set for SharedVertex
  int indexInFirst = -1;   // vertex index within the first operand
  int indexInSecond = -1;  // vertex index within the second operand
};

/// Classifies the intersection of two convex polyhedra of equal dimension:
/// Disjoint (min distance above tolerance), SharedVertex (the intersection
/// has negligible diameter and coincides with a vertex of both), Overlap
/// (anything else, including edge/face contact and point contact away from
/// a mutual vertex).
IntersectionClass classify_intersection(const Polyhedron& q1, const Polyhedron& q2,
                                        double relTol = kDefaultTolerance);

/// Minimum distance between two convex polyhedra (0 if they intersect).
double polyhedron_distance(const Polyhedron& q1, const Polyhedron& q2);

struct SolidAngleValue {
  double measure = 0.0;  // directions for d=1, radians for d=2, steradians for d=3
  double full = 0.0;     // theta_F: 2, 2*pi or 4*pi
};

/// Full-angle measure theta_F for the ambient dimension.
double full_angle(int dim);

/// (d-1)-dimensional angular measure of the vertex cone: 1 for a segment
/// endpoint, the interior angle for a polygon, the spherical excess of the
/// triangulated vertex link for a polytope.
SolidAngleValue solid_angle_measure(const Polyhedron& p, int vertexIndex);

/// Angular footprint of a polyhedron at one of its vertices, in a shape that
/// supports equality and (for d <= 2) disjointness tests. Used to classify
/// the stabilized cylinder cones around points of the attractor.
struct AngularSector {
  int dim = 0;
  int direction = 0;            // d=1: +1 or -1
  double start = 0.0;           // d=2: start angle in [0, 2*pi)
  double width = 0.0;           // d=2
  std::vector<Vec> dirs;        // d=3: unit edge directions, sorted
  double measure = 0.0;
};

AngularSector vertex_sector(const Polyhedron& p, int vertexIndex);
bool sectors_equal(const AngularSector& a, const AngularSector& b,
                   double angTol = 1e-7);
/// Interior-disjointness; exact for d in {1,2}. Throws for d=3 (use cylinder
/// intersection classification there instead).
bool sectors_disjoint(const AngularSector& a, const AngularSector& b,
                      double angTol = 1e-7);

/// Recovers the similarity sending the vertices of `source` onto
/// `targetVertices` in order. Throws NoSimilarityExists when the targets are
/// not an (orientation-preserving or reversing) similar copy of the source.
Similarity similarity_from_vertex_map(const Polyhedron& source,
                                      const std::vector<Point>& targetVertices,
                                      double relTol = kDefaultTolerance);

}  // namespace dendrite
