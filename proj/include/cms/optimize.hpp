#pragma once

// Certified max of an objective over {constraint <= 0} in [0,1]^d by interval
// branch and bound.

#include <cstddef>
#include <vector>

#include "cms/expr.hpp"
#include "cms/names.hpp"

namespace cms {

using Box = std::vector<DyadicInterval>;

struct OptProblem {
  /// Throws ContractViolation when the objective's range enclosure over the
  /// cube leaves [0,1] or the constraint's leaves [-1,1], and
  /// std::invalid_argument when an expression uses coordinates beyond dim.
  OptProblem(int dim, Expr objective, Expr constraint);

  int dim;
  Expr objective;
  Expr constraint;
};

enum class OptStatus {
  converged,             // width <= 2^-n
  unconverged,           // budget ran out; the interval is still sound
  infeasible_at_budget,  // no feasible point found yet; lo is only the trivial bound
  infeasible,            // every cell was refuted: the constraint set is empty
};

const char* to_string(OptStatus s);

enum class CellOrder {
  best_first,     // largest objective upper bound first
  breadth_first,  // widest cells first
};

struct OptResult {
  DyadicInterval enclosure;
  /// Box certified feasible whose objective lower bound is enclosure.lo
  /// (a point box when it came from a midpoint probe); empty if none.
  Box witness;
  OptStatus status = OptStatus::unconverged;
  std::size_t cells = 0;
};

/// Budget counts evaluated cells.
OptResult maximize(const OptProblem& p, int n, std::size_t budget = std::size_t{1} << 20,
                   CellOrder order = CellOrder::best_first);

/// Name of {x : constraint(x) <= 0} on cube(dim): level m keeps every level-m
/// point within 2^-(m+1) of a cell of side <= 2^-(m+1) not refuted by
/// interval evaluation. Throws SearchExhausted past the budget and EmptyResult
/// when the set is refuted outright.
SetName feasible_region(const OptProblem& p, std::size_t budget = std::size_t{1} << 20);

}  // namespace cms
