#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cms/errors.hpp"
#include "cms/optimize.hpp"
#include "support.hpp"

using namespace cms;
using namespace cms::testing;

namespace {

Dyadic q(const char* s) { return Dyadic::parse(s); }

OptProblem problem(int d, const char* obj, const char* con) { return OptProblem(d, Expr::parse(obj), Expr::parse(con)); }

// max of the objective over feasible points of the 2^-bits grid.
std::optional<Dyadic> grid_max(const OptProblem& p, int bits) {
  std::optional<Dyadic> best;
  const long n = 1L << bits;
  std::vector<long> idx(p.dim, 0);
  for (;;) {
    DyadicVector x;
    for (long i : idx) x.emplace_back(mpz_class(i), bits);
    if (p.constraint.eval(x).sign() <= 0) {
      const Dyadic v = p.objective.eval(x);
      if (!best || *best < v) best = v;
    }
    std::size_t k = 0;
    while (k < idx.size() && ++idx[k] > n) idx[k++] = 0;
    if (k == idx.size()) break;
  }
  return best;
}

void check_witness(const OptProblem& p, const OptResult& r) {
  REQUIRE_FALSE(r.witness.empty());
  CHECK(p.constraint.eval_interval(r.witness).hi().sign() <= 0);
  CHECK(p.objective.eval_interval(r.witness).lo() == r.enclosure.lo());
}

}  // namespace

TEST_CASE("problem windows") {
  CHECK_THROWS_AS(problem(1, "x0 + 1", "x0"), ContractViolation);
  CHECK_THROWS_AS(problem(1, "x0", "x0 * 4"), ContractViolation);
  CHECK_THROWS_AS(problem(1, "x1", "x0"), std::invalid_argument);
}

TEST_CASE("analytic optima") {
  struct Case {
    int dim;
    const char* obj;
    const char* con;
    const char* optimum;
  };
  for (const Case& c : {Case{1, "x0", "x0 - 1/2", "1/2"}, Case{1, "1 - abs(x0 - 1/4)", "x0 - 1", "1"},
                        Case{2, "(x0 + x1) * 1/2", "max(x0, x1) - 1/2", "1/2"}}) {
    CAPTURE(c.obj);
    const OptProblem p = problem(c.dim, c.obj, c.con);
    const auto r = maximize(p, 10);
    CHECK(r.status == OptStatus::converged);
    CHECK(r.enclosure.contains(q(c.optimum)));
    CHECK(r.enclosure.width() <= Dyadic::pow2(-10));
    check_witness(p, r);
    CHECK(*grid_max(p, 6) == q(c.optimum));
  }
}

TEST_CASE("budget-truncated runs stay sound and shrink monotonically") {
  const OptProblem p = problem(2, "(x0 + x1) * 1/2", "max(x0, x1) - 1/2");
  std::optional<DyadicInterval> prev;
  for (std::size_t budget : {1, 2, 3, 5, 8, 20, 50, 200, 1000}) {
    const auto r = maximize(p, 12, budget);
    CHECK(r.enclosure.contains(q("1/2")));
    CHECK(r.cells <= budget + 1);
    if (prev) CHECK(prev->contains(r.enclosure));
    prev = r.enclosure;
  }
}

TEST_CASE("constant objectives, infeasibility and order") {
  for (const char* con : {"x0 - 1/2", "abs(x0 - 1/2) - 1/4", "neg(x0)"}) {
    const auto r = maximize(problem(1, "3/4", con), 12);
    CHECK(r.enclosure.contains(q("3/4")));
    CHECK(r.enclosure.width() <= Dyadic::pow2(-12));
  }
  const auto none = maximize(problem(1, "x0", "1/4"), 10);
  CHECK(none.status == OptStatus::infeasible);
  const auto starved = maximize(problem(1, "x0", "1/8 - abs(x0 - 1/2)"), 10, 1);
  CHECK(starved.status == OptStatus::infeasible_at_budget);
  CHECK(starved.enclosure.contains(Dyadic(1)));
  CHECK(maximize(problem(1, "x0", "1/8 - abs(x0 - 1/2)"), 10).enclosure.contains(Dyadic(1)));

  const OptProblem p = problem(2, "(x0 + x1) * 1/2", "max(x0, x1) - 1/2");
  const auto a = maximize(p, 10), b = maximize(p, 10);
  CHECK(a.enclosure == b.enclosure);
  CHECK(a.witness == b.witness);
  const auto wide = maximize(p, 10, std::size_t{1} << 20, CellOrder::breadth_first);
  CHECK(wide.status == OptStatus::converged);
  CHECK(wide.enclosure.contains(q("1/2")));
  CHECK(wide.enclosure.overlaps(a.enclosure));
}

TEST_CASE("random problems against a grid oracle") {
  std::mt19937_64 rng(12);
  int tried = 0;
  for (int trial = 0; tried < 30 && trial < 2000; ++trial) {
    const int dim = 1 + static_cast<int>(rng() % 2);
    // Objectives mapped into [0,1] by clamping; constraints halved into range.
    const Expr obj = Expr::binary(Expr::Op::max, Expr::constant(Dyadic(0)),
                                  Expr::binary(Expr::Op::min, Expr::constant(Dyadic(1)), random_expr(rng, dim, 3)));
    const Expr con = Expr::binary(Expr::Op::max, Expr::constant(Dyadic(-1)),
                                  Expr::binary(Expr::Op::min, Expr::constant(Dyadic(1)), random_expr(rng, dim, 3)));
    std::optional<OptProblem> p;
    try {
      p.emplace(dim, obj, con);
    } catch (const std::exception&) {
      continue;
    }
    const auto g = grid_max(*p, dim == 1 ? 8 : 5);
    if (!g) continue;
    ++tried;
    const auto r = maximize(*p, 8, 1 << 14);
    CAPTURE(obj.to_string());
    CAPTURE(con.to_string());
    CHECK(*g <= r.enclosure.hi());
    if (r.status == OptStatus::converged || r.status == OptStatus::unconverged) check_witness(*p, r);
  }
  CHECK(tried == 30);
}

TEST_CASE("feasible regions") {
  struct Case {
    int dim;
    const char* con;
    std::function<Dyadic(std::span<const Dyadic>)> dist;
  };
  const std::vector<Case> cases{
      {1, "x0 - 1/2", [](std::span<const Dyadic> x) { return max(Dyadic(0), x[0] - q("1/2")); }},
      {1, "abs(x0 - 1/2) - 1/4",
       [](std::span<const Dyadic> x) { return max(max(Dyadic(0), q("1/4") - x[0]), x[0] - q("3/4")); }},
      {2, "min(x0, x1) - 1/2", [](std::span<const Dyadic> x) { return max(Dyadic(0), min(x[0], x[1]) - q("1/2")); }},
  };
  for (const auto& c : cases) {
    CAPTURE(c.con);
    const OptProblem p = problem(c.dim, "0", c.con);
    const SetName region = feasible_region(p);
    const int fine = c.dim == 1 ? 9 : 6;
    std::vector<DyadicVector> samples;
    for (Index u : level_indices(*region.space(), fine)) {
      const auto x = region.space()->coordinates(u);
      if (c.dist(x).is_zero()) samples.push_back(x);
    }
    for (int m = 0; m <= (c.dim == 1 ? 8 : 5); ++m) CHECK(name_violations(region, c.dist, samples, m) == 0);
  }
  CHECK_THROWS_AS(feasible_region(problem(1, "0", "1/4")).query(3), EmptyResult);
  CHECK_THROWS_AS(feasible_region(problem(2, "0", "abs(x0 - x1) - 1/1024"), 10).query(8), SearchExhausted);
}
