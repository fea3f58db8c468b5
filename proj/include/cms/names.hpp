#pragma once

// Names of points and of non-empty compact sets.
//
// A point name answers a precision m with a level-m index u_m whose point is
// within 2^-m of the named point. A set name answers m with a non-empty finite
// set A_m of level-m indices whose points are within Hausdorff distance 2^-m of
// the named set. Both memoize their answers; queries are pure.

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "cms/spaces.hpp"

namespace cms {

class PointName {
 public:
  using Query = std::function<Index(int)>;

  PointName(SpacePtr space, Query query);

  const SpacePtr& space() const noexcept { return space_; }
  Index query(int m) const;
  DyadicVector coordinates(int m) const { return space_->coordinates(query(m)); }

  /// Name of the point with the given coordinates (located level by level).
  static PointName at(SpacePtr space, DyadicVector coords);

 private:
  struct Memo {
    std::mutex mutex;
    std::map<int, Index> levels;
  };
  SpacePtr space_;
  Query query_;
  std::shared_ptr<Memo> memo_;
};

class SetName {
 public:
  using Query = std::function<std::vector<Index>(int)>;
  /// Optional fast test "u belongs to the level-m cover".
  using Member = std::function<bool(int, Index)>;

  SetName(SpacePtr space, Query query, bool standard = false, Member member = {});

  const SpacePtr& space() const noexcept { return space_; }
  bool standard() const noexcept { return standard_; }
  /// Sorted, duplicate-free and non-empty; throws EmptyResult otherwise.
  std::vector<Index> query(int m) const;
  /// Same as query, without copying.
  std::shared_ptr<const std::vector<Index>> cover(int m) const;
  bool contains(int m, Index u) const;
  /// Members of the level-m cover within closed distance radius of x.
  std::vector<Index> local(int m, std::span<const Dyadic> x, const Dyadic& radius) const;

 private:
  struct Memo {
    std::mutex mutex;
    std::map<int, std::shared_ptr<const std::vector<Index>>> levels;
  };
  SpacePtr space_;
  Query query_;
  bool standard_;
  Member member_;
  std::shared_ptr<Memo> memo_;
};

SetName space_as_name(SpacePtr space);
SetName union_of(const SetName& a, const SetName& b);
/// Standard name of the same set, computed from level m + 3 of the input.
SetName standardize(const SetName& a);
PointName select_point(const SetName& a);
SetName point_to_singleton(const PointName& x);
/// Throws ContractViolation (possibly lazily, from query) if the set is not a singleton.
PointName singleton_to_point(const SetName& a);
/// Over-approximating name of the intersection with the quantifiers cut at depth.
SetName intersect_truncated(const SetName& a, const SetName& b, int depth);
/// Width 2^-n enclosure of the Hausdorff distance between the named sets.
DyadicInterval hausdorff_between(const SetName& a, const SetName& b, int n);

/// Exact Hausdorff distance between two finite index sets of one space.
Dyadic finite_hausdorff(const PresentedSpace& space, const std::vector<Index>& a,
                        const std::vector<Index>& b);
/// Exact distance from a point to the nearest member of a sorted level-m index set.
Dyadic distance_to_cover(const PresentedSpace& space, std::span<const Dyadic> x,
                         const std::vector<Index>& cover, int m);

/// Bit-set encoding of finite index sets: {0, 2} <-> 5.
mpz_class hyper_encode(const std::vector<Index>& set);
std::vector<Index> hyper_decode(const mpz_class& code);

/// A set given by points in JSON: either the finite set itself or the
/// per-coordinate interval hull of the points. It has an exact distance oracle.
struct FixtureSet {
  enum class Kind { finite, interval_hull };

  SpacePtr space;
  Kind kind = Kind::finite;
  std::vector<DyadicVector> points;

  static FixtureSet parse_json(const std::string& text);
  static FixtureSet load(const std::string& path);
  std::string to_json() const;

  /// Exact distance from a point to the set.
  Dyadic distance(std::span<const Dyadic> x) const;
  /// The standard name {a : d(a) <= 2^-(m+1)}.
  SetName name() const;
  /// Level-m candidates that may lie within `radius` of the set.
  std::vector<Index> candidates(const Dyadic& radius, int m) const;
};

}  // namespace cms
