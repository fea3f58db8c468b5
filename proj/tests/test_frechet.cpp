#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cms/errors.hpp"
#include "frechet_support.hpp"

using namespace cms;
using namespace cms::testing;

namespace {

Dyadic q(const char* s) { return Dyadic::parse(s); }

DyadicVector pt(const char* x, const char* y) { return {q(x), q(y)}; }

Curve expr_path(std::initializer_list<const char*> comps) {
  std::vector<Expr> es;
  for (const char* c : comps) es.push_back(Expr::parse(c));
  return Curve::from_exprs(Topology::path, es);
}

bool coupling_ok(const Coupling& c, std::size_t n1, std::size_t n2) {
  if (c.empty() || c.front() != std::pair<std::size_t, std::size_t>{0, 0}) return false;
  if (c.back() != std::pair<std::size_t, std::size_t>{n1 - 1, n2 - 1}) return false;
  for (std::size_t k = 1; k < c.size(); ++k) {
    const auto di = c[k].first - c[k - 1].first, dj = c[k].second - c[k - 1].second;
    if (di > 1 || dj > 1 || di + dj == 0) return false;
  }
  return true;
}

Dyadic coupling_cost(const Coupling& c, const std::vector<DyadicVector>& p, const std::vector<DyadicVector>& r) {
  Dyadic out;
  for (auto [i, j] : c) out = max(out, point_distance(p[i], r[j]));
  return out;
}

}  // namespace

TEST_CASE("discrete Fréchet examples") {
  const std::vector<DyadicVector> p{pt("0", "0"), pt("1", "0")};
  const std::vector<DyadicVector> r{pt("0", "1"), pt("1", "1")};
  CHECK(discrete_frechet(p, p).value == Dyadic(0));
  const auto d = discrete_frechet(p, r);
  CHECK(d.value == Dyadic(1));
  CHECK(coupling_ok(d.coupling, 2, 2));
  CHECK_THROWS_AS(discrete_frechet({}, p), std::invalid_argument);
}

TEST_CASE("discrete Fréchet matches exhaustive couplings") {
  std::mt19937_64 rng(7);
  int mismatches = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = random_points(rng, 1 + rng() % 12, 2);
    const auto r = random_points(rng, 1 + rng() % 12, 2);
    const auto d = discrete_frechet(p, r);
    if (d.value != brute_force_frechet(p, r)) ++mismatches;
    if (d.value != discrete_frechet_value(p, r)) ++mismatches;
    CHECK(coupling_ok(d.coupling, p.size(), r.size()));
    CHECK(coupling_cost(d.coupling, p, r) == d.value);
  }
  CHECK(mismatches == 0);
}

TEST_CASE("large coordinates take the exact path") {
  std::vector<DyadicVector> p{{Dyadic(mpz_class(1) << 80, 0)}, {Dyadic(0)}};
  std::vector<DyadicVector> r{{Dyadic(0)}, {Dyadic(mpz_class(3), 70)}};
  CHECK(discrete_frechet_value(p, r) == brute_force_frechet(p, r));
}

TEST_CASE("curve construction") {
  CHECK_THROWS_AS(Curve::from_samples(Topology::path, {pt("0", "0"), pt("1", "0"), pt("1", "1"), pt("0", "1")}, Dyadic(8)),
                  std::invalid_argument);
  CHECK_THROWS_AS(Curve::from_samples(Topology::path, {pt("0", "0"), pt("1", "0")}, q("1/2")),
                  std::invalid_argument);
  CHECK_THROWS_AS(Curve::from_samples(Topology::loop, {pt("0", "0"), pt("1", "0")}, Dyadic(1)),
                  std::invalid_argument);
  const Curve c = Curve::from_samples(Topology::path, {pt("0", "0"), pt("1", "0"), pt("1", "1")}, Dyadic(2));
  CHECK(c.at(q("1/4")) == pt("1/2", "0"));
  CHECK(c.at(q("3/4")) == pt("1", "1/2"));
  CHECK(c.sample(2).size() == 5);
  CHECK(c.exact_at(1));
  CHECK_FALSE(c.exact_at(0));
  CHECK(c.reversed().at(Dyadic(0)) == pt("1", "1"));

  const Curve back = Curve::parse_json(c.to_json());
  CHECK(back.samples() == c.samples());
  CHECK(back.lipschitz() == c.lipschitz());
  CHECK_THROWS_AS(Curve::parse_json("{\"topology\":\"knot\",\"lipschitz\":\"1\",\"samples\":[]}"), ParseError);
  CHECK_THROWS_AS(Curve::parse_json("{"), ParseError);

  const Curve e = expr_path({"x0", "x0 * x0"});
  CHECK(e.at(q("1/2")) == pt("1/2", "1/4"));
  CHECK_FALSE(e.exact_at(20));
}

TEST_CASE("Fréchet paths examples") {
  const Curve a = expr_path({"x0", "x0 * x0"});
  const auto self = frechet_paths(a, a, Orientation::oriented, 8);
  CHECK(self.enclosure.contains(Dyadic(0)));
  CHECK(self.enclosure.hi() <= Dyadic::pow2(-8));

  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 3; ++trial) {
    const auto [sa, sb] = offset_pair(random_staircase(rng, 10), 10, Dyadic(1));
    const auto r = frechet_paths(sa, sb, Orientation::oriented, 8);
    CHECK(r.enclosure.contains(Dyadic(1)));
    CHECK(r.enclosure.width() <= Dyadic::pow2(-8));
  }

  const Curve seg = polyline_curve(Topology::path, {pt("0", "0"), pt("1", "1")}, 0);
  const auto un = frechet_paths(seg, seg.reversed(), Orientation::unoriented, 6);
  CHECK(un.enclosure.contains(Dyadic(0)));
  CHECK(un.reversed);
  const auto ori = frechet_paths(seg, seg.reversed(), Orientation::oriented, 6);
  CHECK(ori.enclosure.contains(Dyadic(1)));

  CHECK_THROWS_AS(frechet_paths(square_loop(Dyadic(1), 2), seg, Orientation::oriented, 4), std::invalid_argument);
}

TEST_CASE("Fréchet loops examples") {
  const Curve sq = square_loop(q("1/2"), 4);
  const auto turned = frechet_loops(sq, rotate_samples(sq, 4), Orientation::oriented, 8);
  CHECK(turned.enclosure.contains(Dyadic(0)));
  CHECK(turned.enclosure.hi() <= Dyadic::pow2(-8));
  const auto self = frechet_loops(sq, sq, Orientation::oriented, 6);
  CHECK(self.enclosure.contains(Dyadic(0)));

  const auto nested = frechet_loops(square_loop(q("1/4"), 4), square_loop(q("1/2"), 4), Orientation::oriented, 6);
  CHECK(nested.enclosure.contains(q("1/4")));
  CHECK(nested.enclosure.width() <= Dyadic::pow2(-6));

  // Coarse oracle: all shifts of the outer square times all couplings.
  const auto inner = square_loop(q("1/4"), 3).samples();
  const auto outer = square_loop(q("1/2"), 3).samples();
  std::optional<Dyadic> best;
  for (std::size_t r = 0; r < 8; ++r) {
    std::vector<DyadicVector> rot;
    for (std::size_t i = 0; i <= 8; ++i) rot.push_back(outer[(i + r) % 8]);
    const Dyadic v = brute_force_frechet(inner, rot);
    if (!best || v < *best) best = v;
  }
  CHECK(*best == q("1/4"));

  const auto backwards = frechet_loops(sq, sq.reversed(), Orientation::unoriented, 6);
  CHECK(backwards.enclosure.contains(Dyadic(0)));
}

TEST_CASE("Go chains") {
  const auto m1 = go_chain_covers(1);
  const GoChain diagonal{{0, 0}, {1, 0}, {1, 1}, {2, 1}, {2, 2}};
  CHECK(std::find(m1.begin(), m1.end(), diagonal) != m1.end());
  for (int m = 0; m <= 3; ++m) {
    for (const auto& c : go_chain_covers(m)) CHECK(is_go_chain(c, m));
  }
  CHECK(is_go_chain({{0, 0}, {0, 1}, {0, 2}, {1, 2}, {2, 2}}, 1));
  CHECK_FALSE(is_go_chain({{0, 0}, {0, 1}, {0, 2}, {0, 3}, {1, 3}, {2, 3}, {3, 3}, {4, 3}, {4, 4}}, 2));
  CHECK_FALSE(is_go_chain({{0, 0}, {1, 1}, {2, 2}}, 1));
  CHECK_THROWS_AS(go_chain_covers(5), std::invalid_argument);

  // Piecewise-linear homeomorphisms with slopes in [1/2, 2] land on an
  // enumerated chain whose lattice points stay within one cell of the graph.
  const auto m3 = go_chain_covers(3);
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Dyadic> y{Dyadic()};
    std::vector<Dyadic> slopes;
    for (int i = 0; i < 4; ++i) slopes.push_back(random_dyadic(rng, q("1/2"), Dyadic(2), 3));
    Dyadic total;
    for (const auto& s : slopes) total = total + s.scaled(-2);
    // Rescale to end at 1; keep only instances whose slopes stay in range.
    const mpq_class scale = mpq_class(1) / total.to_mpq();
    bool ok = true;
    std::vector<std::pair<Dyadic, Dyadic>> knots{{Dyadic(), Dyadic()}};
    mpq_class acc = 0;
    for (int i = 0; i < 4; ++i) {
      acc += slopes[i].to_mpq() * scale / 4;
      const DyadicInterval e = enclose(acc, 12);
      knots.emplace_back(Dyadic(i + 1).scaled(-2), i == 3 ? Dyadic(1) : e.lo());
    }
    for (std::size_t i = 1; i < knots.size(); ++i) {
      const Dyadic slope = (knots[i].second - knots[i - 1].second).scaled(2);
      if (slope < q("1/2") || Dyadic(2) < slope) ok = false;
    }
    if (!ok) continue;
    PiecewiseLinear phi{knots};
    auto f = [&](const Dyadic& t) {
      const DyadicInterval e = enclose(phi.at(t.to_mpq()), 30);
      return e.lo();
    };
    const GoChain c = go_chain_for(f, 3);
    CHECK(std::find(m3.begin(), m3.end(), c) != m3.end());
    // Both directions of the Hausdorff bound, in lattice units, with the
    // graph sampled at spacing 1/32 of a unit.
    std::vector<std::pair<mpq_class, mpq_class>> graph;
    for (int t = 0; t <= 256; ++t) graph.emplace_back(mpq_class(t, 32), phi.at(mpq_class(t, 256)) * 8);
    const mpq_class tol = mpq_class(1) + mpq_class(1, 16);
    for (auto [i, j] : c) {
      mpq_class best = 100;
      for (const auto& [gx, gy] : graph) best = std::min<mpq_class>(best, std::max<mpq_class>(abs(gx - i), abs(gy - j)));
      CHECK(best <= tol);
    }
    for (const auto& [gx, gy] : graph) {
      mpq_class best = 100;
      for (auto [i, j] : c) best = std::min<mpq_class>(best, std::max<mpq_class>(abs(gx - i), abs(gy - j)));
      CHECK(best <= tol);
    }
  }
}

TEST_CASE("Go chains against the DP at level 3") {
  std::mt19937_64 rng(9);
  const auto chains = go_chain_covers(3);
  for (int trial = 0; trial < 10; ++trial) {
    const Curve a = random_polyline(rng, Topology::path, 4, 3);
    // B follows A through a reparametrization with slopes 1/2 and 2, plus noise.
    const std::vector<std::pair<Dyadic, Dyadic>> sigma{
        {Dyadic(0), Dyadic(0)}, {q("1/2"), q("1/4")}, {q("3/4"), q("3/4")}, {Dyadic(1), Dyadic(1)}};
    const auto bent = a.reparametrized(sigma).sample(3);
    std::vector<DyadicVector> noisy;
    for (auto x : bent) {
      for (auto& c : x) c = c + random_dyadic(rng, q("-1/8"), q("1/8"), 3);
      noisy.push_back(x);
    }
    const Curve b = Curve::from_samples(Topology::path, noisy, sample_lipschitz(noisy, 3));
    const auto pa = a.sample(3), pb = b.sample(3);
    Dyadic best(1000);
    for (const auto& c : chains) best = min(best, chain_cost(c, pa, pb));
    const Dyadic dp = discrete_frechet_value(pa, pb);
    CHECK(dp <= best);
    CHECK(best <= dp + (a.lipschitz() + b.lipschitz()).scaled(-3));
  }
}

TEST_CASE("lip2 factorization") {
  auto check = [](const std::vector<Dyadic>& phi, int m) {
    const auto f = lip2_factorize(phi);
    int bad = 0;
    const auto& ck = f.chi.knots;
    const auto& pk = f.psi.knots;
    if (ck.front().first != Dyadic(0) || ck.back().first != Dyadic(1)) ++bad;
    for (std::size_t i = 0; i < ck.size(); ++i) {
      for (std::size_t j = i + 1; j < ck.size(); ++j) {
        const Dyadic ds = ck[j].first - ck[i].first;
        const Dyadic dt = ck[j].second - ck[i].second;
        const Dyadic dp = pk[j].second - pk[i].second;
        if (ds < dt.halve() || ds.twice() < dt || ds.twice() < dp || dt.sign() < 0 || dp.sign() < 0) ++bad;
      }
    }
    // psi o chi^-1 against the linear interpolation of phi, on a finer grid.
    PiecewiseLinear chi_inv;
    for (const auto& [s, t] : ck) chi_inv.knots.emplace_back(t, s);
    const int fine = m + 3;
    for (long i = 0; i <= (1L << fine); ++i) {
      const mpq_class t(i, 1L << fine);
      const mpq_class got = f.psi.at(chi_inv.at(t));
      const long cell = std::min(i >> 3, (1L << m) - 1);
      const mpq_class lam = t * (1L << m) - cell;
      const mpq_class want = phi[cell].to_mpq() + lam * (phi[cell + 1].to_mpq() - phi[cell].to_mpq());
      if (abs(got - want) > mpq_class(2, 1L << m)) ++bad;
    }
    return bad;
  };

  std::vector<Dyadic> id, clamp;
  for (int i = 0; i <= 8; ++i) {
    id.emplace_back(mpz_class(i), 3);
    clamp.push_back(min(Dyadic(1), Dyadic(mpz_class(2 * i), 3)));
  }
  const auto f = lip2_factorize(id);
  for (std::size_t i = 0; i < id.size(); ++i) {
    CHECK(f.psi.knots[i].first == id[i]);
    CHECK(f.psi.knots[i].second == id[i]);
    CHECK(f.chi.knots[i].second == id[i]);
  }
  CHECK(check(id, 3) == 0);
  CHECK(check(clamp, 3) == 0);

  std::mt19937_64 rng(3);
  int bad = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 2 + static_cast<int>(rng() % 4);
    const long n = 1L << m;
    std::vector<long> steps(n + 1);
    for (long i = 1; i < n; ++i) steps[i] = static_cast<long>(rng() % (n + 1));
    steps[0] = 0, steps[n] = n;
    std::sort(steps.begin(), steps.end());
    std::vector<Dyadic> phi;
    for (long s : steps) phi.emplace_back(mpz_class(s), m);
    bad += check(phi, m);
  }
  CHECK(bad == 0);

  CHECK_THROWS_AS(lip2_factorize({Dyadic(0), q("3/4"), q("1/2"), Dyadic(1), Dyadic(1)}), std::invalid_argument);
  CHECK_THROWS_AS(lip2_factorize({q("1/4"), Dyadic(1)}), std::invalid_argument);
}

TEST_CASE("finer DP values fall inside the enclosure") {
  std::mt19937_64 rng(21);
  std::vector<std::pair<Curve, Curve>> pairs;
  for (int i = 0; i < 6; ++i) {
    pairs.emplace_back(random_polyline(rng, Topology::path, 4, 4), random_polyline(rng, Topology::path, 2, 4));
  }
  pairs.emplace_back(expr_path({"x0", "x0 * x0"}), expr_path({"1 - x0", "x0 * (1 - x0)"}));
  for (const auto& [a, b] : pairs) {
    for (int n : {2, 4}) {
      const auto r = frechet_paths(a, b, Orientation::oriented, n);
      const int fine = r.resolution + 4;
      const Dyadic v = discrete_frechet_value(a.sample(fine), b.sample(fine));
      CHECK(r.enclosure.contains(v));
      CHECK(r.enclosure.width() <= Dyadic::pow2(-n));
      CHECK(coupling_cost(r.witness, a.sample(r.resolution), b.sample(r.resolution)) <= r.enclosure.hi());
    }
  }
}

TEST_CASE("symmetry, triangle inequality and reparametrization") {
  std::mt19937_64 rng(33);
  const int n = 4;
  for (int trial = 0; trial < 5; ++trial) {
    const Curve a = random_polyline(rng, Topology::path, 2, 3);
    const Curve b = random_polyline(rng, Topology::path, 4, 3);
    const Curve c = random_polyline(rng, Topology::path, 2, 3);
    const auto ab = frechet_paths(a, b, Orientation::unoriented, n).enclosure;
    const auto ba = frechet_paths(b, a, Orientation::unoriented, n).enclosure;
    CHECK(ab.overlaps(ba));
    const auto bc = frechet_paths(b, c, Orientation::unoriented, n).enclosure;
    const auto ac = frechet_paths(a, c, Orientation::unoriented, n).enclosure;
    CHECK(ac.hi() <= ab.hi() + bc.hi() + ab.width() + bc.width() + ac.width());

    const std::vector<std::pair<Dyadic, Dyadic>> sigma{
        {Dyadic(0), Dyadic(0)}, {q("3/4"), q("1/2")}, {Dyadic(1), Dyadic(1)}};
    CHECK_THROWS_AS(a.reparametrized(sigma), std::invalid_argument);
    const std::vector<std::pair<Dyadic, Dyadic>> tau{
        {Dyadic(0), Dyadic(0)}, {q("1/4"), q("1/2")}, {q("1/2"), q("5/8")}, {q("3/4"), q("3/4")}, {Dyadic(1), Dyadic(1)}};
    const auto moved = frechet_paths(a.reparametrized(tau), b, Orientation::oriented, n).enclosure;
    const auto plain = frechet_paths(a, b, Orientation::oriented, n).enclosure;
    const Dyadic slack = moved.width() + plain.width();
    CHECK((moved.lo() - plain.lo()).abs() <= slack);
    CHECK((moved.hi() - plain.hi()).abs() <= slack);
  }
}

TEST_CASE("loop enclosures are invariant under cyclic shifts") {
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 4; ++trial) {
    auto small_loop = [&] {
      auto v = random_points(rng, 5, 2);
      for (auto& x : v) {
        for (auto& c : x) c = c.scaled(-3);
      }
      v.back() = v.front();
      return polyline_curve(Topology::loop, v, 5);
    };
    const Curve a = small_loop();
    const Curve b = small_loop();
    const auto base = frechet_loops(a, b, Orientation::oriented, 3);
    for (std::size_t shift : {4u, 12u, 28u}) {
      const auto moved = frechet_loops(a, rotate_samples(b, shift), Orientation::oriented, 3);
      CHECK(moved.enclosure.lo() == base.enclosure.lo());
      CHECK(moved.enclosure.hi() == base.enclosure.hi());
    }
    const int fine = base.resolution + 2;
    std::optional<Dyadic> best;
    const auto pa = a.sample(fine), pb = b.sample(fine);
    for (std::size_t r = 0; r < (std::size_t{1} << fine); ++r) {
      std::vector<DyadicVector> rot;
      for (std::size_t i = 0; i < pb.size(); ++i) rot.push_back(pb[(i + r) % (pb.size() - 1)]);
      const Dyadic v = discrete_frechet_value(pa, rot);
      if (!best || v < *best) best = v;
    }
    CHECK(base.enclosure.contains(*best));
  }
}
