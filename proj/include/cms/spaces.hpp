#pragma once

// Presented compact metric spaces: a dense enumeration whose first 2^D(m)
// indices cover the space with closed balls of radius 2^-(m+1), an exact
// metric on the enumerated points and a rounding function onto each level.
//
// Points are handled through their coordinates. The unit interval and the
// circle use the obvious real coordinate in [0,1); Cantor space uses the
// binary expansion sum_i b_i 2^-(i+1), so eventually-zero sequences become
// dyadics in [0,1). Products concatenate coordinates and use the max metric.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cms/dyadic.hpp"

namespace cms {

using Index = std::uint64_t;

class PresentedSpace;
using SpacePtr = std::shared_ptr<const PresentedSpace>;

struct CoveringReport {
  bool ok = false;
  Dyadic worst_gap;
};

class PresentedSpace {
 public:
  virtual ~PresentedSpace() = default;

  virtual std::string id() const = 0;
  /// D(m): level m consists of the indices below 2^D(m).
  virtual int level_exponent(int m) const = 0;
  /// 2^D(m); throws std::overflow_error beyond 63 bits.
  Index level_size(int m) const;
  /// Smallest level containing u (so level_of(0) == 0).
  int level_of(Index u) const;
  /// The enumeration may be partial; concrete spaces are total.
  virtual bool in_domain(Index /*u*/) const { return true; }

  virtual std::size_t dimension() const = 0;
  virtual DyadicVector coordinates(Index u) const = 0;
  /// Exact distance between two coordinate tuples.
  virtual Dyadic point_distance(std::span<const Dyadic> a, std::span<const Dyadic> b) const = 0;
  /// Interval of width <= 2^-k containing d(xi(u), xi(v)). All built-in spaces
  /// return a point interval because their metrics are exact on dyadics.
  virtual DyadicInterval distance_enclosure(Index u, Index v, int k) const;
  Dyadic distance(Index u, Index v) const;

  /// Rounding function: a level-m index within 2^-(m+1) of xi(u).
  virtual Index round(Index u, int m) const = 0;
  /// A level-m index within 2^-(m+1) of the given coordinates.
  virtual Index locate(std::span<const Dyadic> coords, int m) const = 0;
  /// Every level-m index (in the domain) within closed distance `radius`.
  virtual std::vector<Index> neighbors(std::span<const Dyadic> coords, const Dyadic& radius,
                                       int m) const = 0;
  /// Every level-m index whose coordinates lie in the closed coordinate box.
  virtual std::vector<Index> indices_in_box(std::span<const Dyadic> lo, std::span<const Dyadic> hi,
                                            int m) const = 0;
  /// Declared separation exponent eta(m), when the enumeration is separated.
  virtual std::optional<int> separation(int /*m*/) const { return std::nullopt; }

  /// Largest distance from a probe_level point to its nearest level-m point.
  virtual Dyadic covering_gap(int m, int probe_level) const;
};

/// Shared implementation of the three one-dimensional spaces. They all use the
/// enumeration 0, 1/2, 1/4, 3/4, 1/8, ... so level m is the grid k / 2^D(m).
class GridSpace1D : public PresentedSpace {
 public:
  std::size_t dimension() const override { return 1; }
  DyadicVector coordinates(Index u) const override { return {coordinate(u)}; }
  Dyadic point_distance(std::span<const Dyadic> a, std::span<const Dyadic> b) const override {
    return distance_1d(a[0], b[0]);
  }
  Index locate(std::span<const Dyadic> coords, int m) const override;
  std::vector<Index> neighbors(std::span<const Dyadic> coords, const Dyadic& radius,
                               int m) const override;
  std::vector<Index> indices_in_box(std::span<const Dyadic> lo, std::span<const Dyadic> hi,
                                    int m) const override;

  /// The enumerated point with index u.
  static Dyadic coordinate(Index u);
  /// Index of the dyadic k / 2^bits in [0,1); inverse of coordinate().
  static Index index_of_grid(std::uint64_t k, int bits);
  /// Index of a dyadic in [0,1) that lies on some grid.
  static Index index_of(const Dyadic& x);

 protected:
  virtual Dyadic distance_1d(const Dyadic& a, const Dyadic& b) const = 0;
  /// Grid position (in units of 2^-D(m)) of the level-m point nearest to x.
  virtual std::int64_t nearest_grid(const Dyadic& x, int m) const = 0;
};

/// [0,1] with |x - y|, D(m) = m + 1.
class UnitInterval : public GridSpace1D {
 public:
  std::string id() const override { return "interval"; }
  int level_exponent(int m) const override { return m + 1; }
  Index round(Index u, int m) const override;
  std::optional<int> separation(int m) const override { return m + 1; }

 protected:
  Dyadic distance_1d(const Dyadic& a, const Dyadic& b) const override { return (a - b).abs(); }
  std::int64_t nearest_grid(const Dyadic& x, int m) const override;
};

/// [0,1) mod 1 with min{|x-y|, 1-|x-y|}, D(m) = m.
class Circle : public GridSpace1D {
 public:
  std::string id() const override { return "circle"; }
  int level_exponent(int m) const override { return m; }
  Index round(Index u, int m) const override;
  std::vector<Index> neighbors(std::span<const Dyadic> coords, const Dyadic& radius,
                               int m) const override;
  std::optional<int> separation(int m) const override { return m; }

 protected:
  Dyadic distance_1d(const Dyadic& a, const Dyadic& b) const override;
  std::int64_t nearest_grid(const Dyadic& x, int m) const override;
};

/// {0,1}^N with the Baire metric 2^-min{n : v_n != w_n}, D(m) = m + 1.
/// Rounding is truncation after m + 1 symbols.
class Cantor : public GridSpace1D {
 public:
  std::string id() const override { return "cantor"; }
  int level_exponent(int m) const override { return m + 1; }
  Index round(Index u, int m) const override;
  std::vector<Index> neighbors(std::span<const Dyadic> coords, const Dyadic& radius,
                               int m) const override;
  std::optional<int> separation(int m) const override { return m; }

 protected:
  Dyadic distance_1d(const Dyadic& a, const Dyadic& b) const override;
  std::int64_t nearest_grid(const Dyadic& x, int m) const override;
};

/// X x Y with the max metric, D(m) = D_X(m) + D_Y(m) and the block layout
/// that makes every level an initial segment of the enumeration.
class ProductSpace : public PresentedSpace {
 public:
  ProductSpace(SpacePtr left, SpacePtr right);

  const SpacePtr& left() const noexcept { return left_; }
  const SpacePtr& right() const noexcept { return right_; }

  std::string id() const override;
  int level_exponent(int m) const override {
    return left_->level_exponent(m) + right_->level_exponent(m);
  }
  bool in_domain(Index w) const override;
  std::size_t dimension() const override { return left_->dimension() + right_->dimension(); }
  DyadicVector coordinates(Index w) const override;
  Dyadic point_distance(std::span<const Dyadic> a, std::span<const Dyadic> b) const override;
  Index round(Index w, int m) const override;
  Index locate(std::span<const Dyadic> coords, int m) const override;
  std::vector<Index> neighbors(std::span<const Dyadic> coords, const Dyadic& radius,
                               int m) const override;
  std::vector<Index> indices_in_box(std::span<const Dyadic> lo, std::span<const Dyadic> hi,
                                    int m) const override;
  std::optional<int> separation(int m) const override;
  Dyadic covering_gap(int m, int probe_level) const override;

  Index pair(Index u, Index v) const;
  std::pair<Index, Index> unpair(Index w) const;

 private:
  SpacePtr left_;
  SpacePtr right_;
};

SpacePtr unit_interval();
SpacePtr circle();
SpacePtr cantor();
SpacePtr product(SpacePtr left, SpacePtr right);
/// [0,1]^d as ((I x I) x I) ...
SpacePtr cube(int d);

/// Parses "interval", "circle", "cantor", "cube:d" and "product(a,b)".
SpacePtr space_from_id(std::string_view id);

CoveringReport covering_check(const PresentedSpace& space, int m, int probe_level);

/// D(n): an upper bound on log2 of the number of 2^-(n+1) balls needed to cover.
int entropy_upper(const PresentedSpace& space, int n);

/// Largest d(xi(round(u, m)), xi(u)) over the given indices.
Dyadic worst_rounding_error(const PresentedSpace& space, std::span<const Index> indices, int m);

/// All domain indices of level m, ascending.
std::vector<Index> level_indices(const PresentedSpace& space, int m);

}  // namespace cms
