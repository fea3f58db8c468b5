#pragma once

// Convex bodies in [0,1]^d for d = 2, 3, given as hulls of dyadic points.
// Volumes are exact; lengths and areas go through square-root enclosures and
// use the Euclidean metric.

#include <cstddef>
#include <string>
#include <vector>

#include "cms/dyadic.hpp"

namespace cms {

class ConvexBody {
 public:
  /// Hull of the points. Throws std::invalid_argument for points outside the
  /// cube, an empty list, or d not in {2, 3}.
  static ConvexBody hull(std::size_t dim, const std::vector<DyadicVector>& points);

  static ConvexBody parse_json(const std::string& text);
  static ConvexBody load(const std::string& path);
  std::string to_json() const;

  std::size_t dim() const noexcept { return dim_; }
  /// 0 for a point, 1 for a segment, ... up to dim for a full body.
  int rank() const noexcept { return rank_; }
  /// d = 2: counter-clockwise. d = 3: lexicographic.
  const std::vector<DyadicVector>& vertices() const noexcept { return vertices_; }
  /// d = 3: vertex indices of each face, counter-clockwise seen from outside
  /// (a single unoriented polygon when rank is 2).
  const std::vector<std::vector<std::size_t>>& faces() const noexcept { return faces_; }
  /// Outward normal of each face (unnormalized), for rank-3 bodies.
  const std::vector<DyadicVector>& normals() const noexcept { return normals_; }

  bool contains(const DyadicVector& x) const;
  /// Exact squared Euclidean distance from x to the body.
  mpq_class squared_distance(const DyadicVector& x) const;

  friend bool operator==(const ConvexBody& a, const ConvexBody& b) {
    return a.dim_ == b.dim_ && a.vertices_ == b.vertices_;
  }

 private:
  ConvexBody() = default;
  std::size_t dim_ = 0;
  int rank_ = 0;
  std::vector<DyadicVector> vertices_;
  std::vector<std::vector<std::size_t>> faces_;
  std::vector<DyadicVector> normals_;
};

/// Exact d-volume (0 for lower-dimensional bodies). Dyadic in the plane, a
/// rational with denominator dividing 3 * 2^k in space.
mpq_class volume(const ConvexBody& b);

/// Perimeter (d = 2) or boundary area (d = 3) with width <= 2^-k. Throws
/// std::invalid_argument for lower-dimensional bodies.
DyadicInterval surface(const ConvexBody& b, int k);

/// Euclidean Hausdorff distance with width <= 2^-k.
DyadicInterval hausdorff_convex(const ConvexBody& v, const ConvexBody& w, int k);

/// Distinct hulls of at most max_vertices points of the level-m grid in
/// [0,1]^2. Throws SearchExhausted beyond 2^22 subsets.
std::vector<ConvexBody> kc_sample(int m, std::size_t max_vertices);

/// pi to 64 bits: [lo, lo + 2^-64].
DyadicInterval pi_enclosure();

enum class IsoSchedule {
  regular,  // regular k-gons, shrunk just enough to be feasible
  refined,  // regular k-gons, radius pushed up to the feasibility boundary by bisection
};

struct IsoperimetricResult {
  DyadicInterval enclosure;  // contains 1/(4 pi)
  ConvexBody best;
  int sides = 0;
  DyadicInterval perimeter;  // of best; hi <= 1
};

/// max area subject to perimeter <= 1 over polygons with up to max_gon sides.
/// The upper end is 1/(4 pi) rounded outward at 2^-(n+16).
IsoperimetricResult isoperimetric(int n, int max_gon, IsoSchedule schedule = IsoSchedule::refined);

/// Regular k-gon centred in the square with circumradius r, vertices rounded
/// to the 2^-grid lattice.
ConvexBody regular_polygon(int k, double r, int grid);

}  // namespace cms
