#include "cms/optimize.hpp"

#include <algorithm>
#include <queue>
#include <set>

#include "cms/errors.hpp"
#include "cms/spaces.hpp"

namespace cms {

namespace {

Box whole_cube(int dim) { return Box(dim, DyadicInterval(Dyadic(0), Dyadic(1))); }

// Widest side, lowest index on ties.
std::size_t widest(const Box& b) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < b.size(); ++i) {
    if (b[best].width() < b[i].width()) best = i;
  }
  return best;
}

std::pair<Box, Box> bisect(const Box& b) {
  const std::size_t i = widest(b);
  const Dyadic mid = b[i].midpoint();
  Box left = b, right = b;
  left[i] = DyadicInterval(b[i].lo(), mid);
  right[i] = DyadicInterval(mid, b[i].hi());
  return {std::move(left), std::move(right)};
}

DyadicVector midpoint(const Box& b) {
  DyadicVector out;
  for (const auto& side : b) out.push_back(side.midpoint());
  return out;
}

struct Cell {
  Box box;
  DyadicInterval value;
  Dyadic width;
  std::uint64_t seq = 0;
};

bool box_less(const Box& a, const Box& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].lo() != b[i].lo()) return a[i].lo() < b[i].lo();
  }
  return false;
}

}  // namespace

OptProblem::OptProblem(int d, Expr obj, Expr con) : dim(d), objective(std::move(obj)), constraint(std::move(con)) {
  if (dim < 1) throw std::invalid_argument("optimization needs dimension >= 1");
  if (objective.arity() > dim || constraint.arity() > dim) {
    throw std::invalid_argument("expression uses a coordinate beyond the dimension");
  }
  const Box cube = whole_cube(dim);
  const DyadicInterval o = objective.eval_interval(cube);
  const DyadicInterval c = constraint.eval_interval(cube);
  if (!DyadicInterval(Dyadic(0), Dyadic(1)).contains(o)) {
    throw ContractViolation("objective range " + o.to_string() + " leaves [0,1]; rescale it");
  }
  if (!DyadicInterval(Dyadic(-1), Dyadic(1)).contains(c)) {
    throw ContractViolation("constraint range " + c.to_string() + " leaves [-1,1]; rescale it");
  }
}

const char* to_string(OptStatus s) {
  switch (s) {
    case OptStatus::converged:
      return "converged";
    case OptStatus::unconverged:
      return "unconverged";
    case OptStatus::infeasible_at_budget:
      return "infeasible-at-budget";
    case OptStatus::infeasible:
      return "infeasible";
  }
  return "?";
}

OptResult maximize(const OptProblem& p, int n, std::size_t budget, CellOrder order) {
  if (budget == 0) throw std::invalid_argument("budget must be positive");
  auto later = [order](const Cell& a, const Cell& b) {
    // priority_queue pops the greatest; "a before b" means b wins.
    if (order == CellOrder::best_first) {
      if (a.value.hi() != b.value.hi()) return a.value.hi() < b.value.hi();
    }
    if (a.width != b.width) return a.width < b.width;
    if (box_less(a.box, b.box)) return false;
    if (box_less(b.box, a.box)) return true;
    return a.seq > b.seq;
  };
  std::priority_queue<Cell, std::vector<Cell>, decltype(later)> frontier(later);
  std::multiset<Dyadic> uppers;
  std::optional<Dyadic> lo;
  OptResult out;
  std::uint64_t seq = 0;

  auto probe = [&](const Cell& c, const DyadicInterval& phi) {
    if (phi.hi().sign() <= 0) {
      if (!lo || *lo < c.value.lo()) lo = c.value.lo(), out.witness = c.box;
      return;
    }
    const DyadicVector x = midpoint(c.box);
    if (p.constraint.eval(x).sign() <= 0) {
      const Dyadic v = p.objective.eval(x);
      if (!lo || *lo < v) {
        lo = v;
        out.witness.clear();
        for (const auto& xi : x) out.witness.emplace_back(xi);
      }
    }
  };
  auto admit = [&](Box box) {
    ++out.cells;
    const DyadicInterval phi = p.constraint.eval_interval(box);
    if (phi.lo().sign() > 0) return;
    Cell c{std::move(box), {}, {}, seq++};
    c.value = p.objective.eval_interval(c.box);
    if (lo && c.value.hi() < *lo) return;
    c.width = c.box[widest(c.box)].width();
    probe(c, phi);
    uppers.insert(c.value.hi());
    frontier.push(std::move(c));
  };

  const Box root = whole_cube(p.dim);
  const DyadicInterval trivial = p.objective.eval_interval(root);
  admit(root);
  const Dyadic target = Dyadic::pow2(-n);
  for (;;) {
    const Dyadic hi = uppers.empty() ? (lo ? *lo : trivial.lo()) : *uppers.rbegin();
    if (lo && hi - *lo <= target) {
      out.status = OptStatus::converged;
      break;
    }
    if (frontier.empty() || out.cells >= budget) {
      out.status = lo ? OptStatus::unconverged : frontier.empty() ? OptStatus::infeasible : OptStatus::infeasible_at_budget;
      break;
    }
    Cell c = frontier.top();
    frontier.pop();
    uppers.erase(uppers.find(c.value.hi()));
    auto [left, right] = bisect(c.box);
    admit(std::move(left));
    admit(std::move(right));
  }
  const Dyadic hi = uppers.empty() ? (lo ? *lo : trivial.hi()) : max(*uppers.rbegin(), lo ? *lo : *uppers.rbegin());
  out.enclosure = lo ? DyadicInterval(*lo, hi) : DyadicInterval(trivial.lo(), max(trivial.lo(), hi));
  return out;
}

SetName feasible_region(const OptProblem& p, std::size_t budget) {
  const SpacePtr space = cube(p.dim);
  auto query = [p, budget, space](int m) {
    const Dyadic side = Dyadic::pow2(-(m + 1));
    std::vector<Box> stack{whole_cube(p.dim)}, kept;
    std::size_t cells = 0;
    while (!stack.empty()) {
      Box b = std::move(stack.back());
      stack.pop_back();
      if (++cells > budget) throw SearchExhausted("feasible_region: cell budget exhausted");
      const DyadicInterval phi = p.constraint.eval_interval(b);
      if (phi.lo().sign() > 0) continue;
      if (phi.hi().sign() <= 0 || b[widest(b)].width() <= side) {
        kept.push_back(std::move(b));
        continue;
      }
      auto [l, r] = bisect(b);
      stack.push_back(std::move(r));
      stack.push_back(std::move(l));
    }
    if (kept.empty()) throw EmptyResult("feasible_region: the constraint set is empty");
    std::vector<Index> out;
    for (const auto& b : kept) {
      DyadicVector lo, hi;
      for (const auto& s : b) {
        lo.push_back(max(Dyadic(0), s.lo() - side));
        hi.push_back(min(Dyadic(1), s.hi() + side));
      }
      const auto got = space->indices_in_box(lo, hi, m);
      out.insert(out.end(), got.begin(), got.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  };
  return SetName(space, query);
}

}  // namespace cms
