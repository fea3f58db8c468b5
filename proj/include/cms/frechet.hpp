#pragma once

// Certified Fréchet distances between Lipschitz paths and loops under the max
// metric. The workhorse is the bottleneck DP over monotone couplings of
// uniform samples; its value is turned into an enclosure using the declared
// Lipschitz bounds.

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cms/expr.hpp"

namespace cms {

enum class Topology { path, loop };
enum class Orientation { oriented, unoriented };

/// A curve on [0,1] (or the circle for loops) into the max-metric cube. It is
/// either the polyline through 2^k + 1 uniform samples or an exact evaluator.
class Curve {
 public:
  using Evaluator = std::function<DyadicVector(const Dyadic&)>;

  /// Throws std::invalid_argument when the samples break the declared bound,
  /// the count is not 2^k + 1, or a loop does not close.
  static Curve from_samples(Topology topology, std::vector<DyadicVector> samples, Dyadic lipschitz);
  static Curve from_function(Topology topology, std::size_t dim, Dyadic lipschitz, Evaluator f);
  /// Components are expressions in x0 = t; the Lipschitz bound is derived.
  static Curve from_exprs(Topology topology, const std::vector<Expr>& components);

  static Curve parse_json(const std::string& text);
  static Curve load(const std::string& path);
  std::string to_json() const;

  Topology topology() const noexcept { return topology_; }
  std::size_t dim() const noexcept { return dim_; }
  const Dyadic& lipschitz() const noexcept { return lipschitz_; }
  /// Level k of the sample grid, for sample curves.
  std::optional<int> sample_level() const noexcept { return level_; }
  const std::vector<DyadicVector>& samples() const noexcept { return samples_; }

  DyadicVector at(const Dyadic& t) const;
  /// The 2^m + 1 values at i 2^-m.
  std::vector<DyadicVector> sample(int m) const;
  /// True when the polyline through sample(m) is the curve itself.
  bool exact_at(int m) const { return level_ && *level_ <= m; }

  Curve reversed() const;
  /// t -> curve(sigma(t)) for a non-decreasing piecewise-linear sigma with
  /// dyadic knots; the Lipschitz bound is multiplied by sigma's.
  Curve reparametrized(const std::vector<std::pair<Dyadic, Dyadic>>& sigma_knots) const;

 private:
  Curve() = default;
  Topology topology_ = Topology::path;
  std::size_t dim_ = 0;
  Dyadic lipschitz_;
  std::optional<int> level_;
  std::vector<DyadicVector> samples_;
  Evaluator eval_;
};

using Coupling = std::vector<std::pair<std::size_t, std::size_t>>;

struct DiscreteFrechet {
  Dyadic value;
  Coupling coupling;
};

/// Exact discrete Fréchet distance (steps (1,0), (0,1), (1,1)) with a witness.
DiscreteFrechet discrete_frechet(const std::vector<DyadicVector>& p,
                                 const std::vector<DyadicVector>& q);
/// Value only; cheaper in memory.
Dyadic discrete_frechet_value(const std::vector<DyadicVector>& p,
                              const std::vector<DyadicVector>& q);

struct FrechetResult {
  DyadicInterval enclosure;
  int resolution = 0;
  Coupling witness;
  bool reversed = false;
  /// Loops: B was started at shift * 2^-resolution.
  std::size_t shift = 0;
};

FrechetResult frechet_paths(const Curve& a, const Curve& b, Orientation orientation, int n);
FrechetResult frechet_loops(const Curve& a, const Curve& b, Orientation orientation, int n);

/// Lattice points (i, j) of a monotone right/up path from (0,0) to (2^m, 2^m).
using GoChain = std::vector<std::pair<int, int>>;

/// Unit right/up steps, endpoints at the corners, never three ups or three
/// rights in a row.
bool is_go_chain(const GoChain& chain, int m);
/// Every Go chain at level m; m <= 3.
std::vector<GoChain> go_chain_covers(int m);
/// The chain that follows the graph of phi (slopes in [1/2, 2]) within 2^-m.
GoChain go_chain_for(const std::function<Dyadic(const Dyadic&)>& phi, int m);
/// max over chain points of |A(i 2^-m) - B(j 2^-m)|.
Dyadic chain_cost(const GoChain& chain, const std::vector<DyadicVector>& a,
                  const std::vector<DyadicVector>& b);

/// Piecewise-linear map through dyadic knots with increasing abscissae.
struct PiecewiseLinear {
  std::vector<std::pair<Dyadic, Dyadic>> knots;
  mpq_class at(const mpq_class& x) const;
};

struct Lip2Factorization {
  PiecewiseLinear psi;
  PiecewiseLinear chi;
};

/// phi sampled at i 2^-m (non-decreasing, phi(0) = 0, phi(1) = 1) as psi o chi^-1
/// with both factors 2-Lipschitz.
Lip2Factorization lip2_factorize(const std::vector<Dyadic>& phi);

}  // namespace cms
