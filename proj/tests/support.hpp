#pragma once

// Oracles shared by the unit tests and the acceptance suite.

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "cms/expr.hpp"
#include "cms/names.hpp"

namespace cms::testing {

inline std::string data_path(const std::string& rel) { return std::string(CMS_TEST_DATA) + "/" + rel; }

inline FixtureSet fixture(const std::string& name) { return FixtureSet::load(data_path("sets/" + name + ".json")); }

inline const std::vector<std::string>& fixture_library() {
  static const std::vector<std::string> names{
      "half",  "ends", "zero",          "one",          "left_half", "right_half",
      "middle", "quarter", "pair", "triple",       "arc",          "circle_pair", "cantor_block",
      "cantor_point", "box", "scatter", "cylinder_point"};
  return names;
}

/// Points of the denoted set on the level-`level` grid (plus the listed points).
inline std::vector<DyadicVector> fixture_samples(const FixtureSet& w, int level) {
  std::vector<DyadicVector> out = w.points;
  if (w.kind == FixtureSet::Kind::interval_hull) {
    for (Index u : w.candidates(Dyadic(0), level)) {
      DyadicVector x = w.space->coordinates(u);
      if (w.distance(x).is_zero()) out.push_back(std::move(x));
    }
  }
  return out;
}

using DistanceOracle = std::function<Dyadic(std::span<const Dyadic>)>;

/// Counts violations of the name bound at level m: cover points farther than
/// 2^-m from the set, and samples of the set farther than 2^-m from the cover.
inline int name_violations(const SetName& a, const DistanceOracle& oracle,
                           const std::vector<DyadicVector>& samples, int m) {
  const auto& s = *a.space();
  const auto& cover = a.query(m);
  const Dyadic bound = Dyadic::pow2(-m);
  int bad = 0;
  for (Index u : cover) {
    const DyadicVector x = s.coordinates(u);
    if (bound < oracle(x)) ++bad;
  }
  for (const auto& x : samples) {
    if (bound < distance_to_cover(s, x, cover, m)) ++bad;
  }
  return bad;
}

/// Counts level-m points that break either standard-name window inequality.
inline int standard_window_violations(const SetName& a, const DistanceOracle& oracle, int m) {
  const auto& s = *a.space();
  const auto& cover = a.query(m);
  int bad = 0;
  for (Index u : level_indices(s, m)) {
    const DyadicVector x = s.coordinates(u);
    const Dyadic d = oracle(x);
    const bool in = std::binary_search(cover.begin(), cover.end(), u);
    if (in && !(d < Dyadic::pow2(-m))) ++bad;
    if (!in && !(Dyadic::pow2(-m - 1) < d)) ++bad;
  }
  return bad;
}

/// Counts pairs (m, n) breaking d(u_m, u_n) <= 2^-m + 2^-n.
inline int consistency_violations(const PointName& x, int top) {
  const auto& s = *x.space();
  int bad = 0;
  for (int m = 0; m <= top; ++m) {
    for (int n = m + 1; n <= top; ++n) {
      if (Dyadic::pow2(-m) + Dyadic::pow2(-n) < s.distance(x.query(m), x.query(n))) ++bad;
    }
  }
  return bad;
}

/// Random dyadic in [lo, hi] on the grid 2^-bits.
inline Dyadic random_dyadic(std::mt19937_64& rng, const Dyadic& lo, const Dyadic& hi, int bits) {
  const mpz_class a = lo.ceil_scaled(bits), b = hi.floor_scaled(bits);
  const mpz_class span = b - a + 1;
  std::uniform_int_distribution<unsigned long> pick(0, span.get_ui() - 1);
  return Dyadic(a + mpz_class(pick(rng)), bits);
}

/// Random expression in x0..x(dim-1) of the given depth.
inline Expr random_expr(std::mt19937_64& rng, int dim, int depth) {
  if (depth == 0 || rng() % 4 == 0) {
    if (rng() % 3 == 0) return Expr::constant(random_dyadic(rng, Dyadic(-1), Dyadic(1), 3));
    return Expr::coord(static_cast<int>(rng() % dim));
  }
  switch (rng() % 7) {
    case 0:
      return Expr::unary(Expr::Op::neg, random_expr(rng, dim, depth - 1));
    case 1:
      return Expr::unary(Expr::Op::abs, random_expr(rng, dim, depth - 1));
    case 2:
      return Expr::binary(Expr::Op::add, random_expr(rng, dim, depth - 1), random_expr(rng, dim, depth - 1));
    case 3:
      return Expr::binary(Expr::Op::sub, random_expr(rng, dim, depth - 1), random_expr(rng, dim, depth - 1));
    case 4:
      return Expr::binary(Expr::Op::mul, random_expr(rng, dim, depth - 1), random_expr(rng, dim, depth - 1));
    case 5:
      return Expr::binary(Expr::Op::min, random_expr(rng, dim, depth - 1), random_expr(rng, dim, depth - 1));
    default:
      return Expr::binary(Expr::Op::max, random_expr(rng, dim, depth - 1), random_expr(rng, dim, depth - 1));
  }
}

inline int max_level_for(const SpacePtr& s) { return s->dimension() == 1 ? 10 : 6; }

}  // namespace cms::testing
