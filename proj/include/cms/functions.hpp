#pragma once

// Equicontinuous functions between presented spaces, in two forms: a finite
// map with a binary modulus of continuity, and a name of the graph.
//
// A FunctionObject answers map(n, a) for a level-mu(n) domain index a with a
// level-n codomain index whose point is within 2^-n of f(x), for every x in
// the domain within 2^-mu(n) of a.

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "cms/expr.hpp"
#include "cms/names.hpp"

namespace cms {

using Modulus = std::function<int(int)>;

class FunctionObject {
 public:
  using Map = std::function<Index(int, Index)>;
  using Evaluator = std::function<DyadicVector(std::span<const Dyadic>)>;

  FunctionObject(SetName domain, SpacePtr codomain, Modulus modulus, Map map,
                 Evaluator exact = {});

  /// f given exactly on coordinates, Lipschitz with constant L.
  static FunctionObject from_evaluator(SetName domain, SpacePtr codomain, Dyadic lipschitz,
                                       Evaluator exact);

  const SetName& domain() const noexcept { return domain_; }
  const SpacePtr& domain_space() const noexcept { return domain_.space(); }
  const SpacePtr& codomain() const noexcept { return codomain_; }
  int modulus(int n) const { return modulus_(n); }
  const Modulus& modulus_fn() const noexcept { return modulus_; }
  Index map(int n, Index a) const;
  bool has_exact() const noexcept { return static_cast<bool>(exact_); }
  DyadicVector exact(std::span<const Dyadic> x) const;

  /// Level-n codomain index within 2^-n of f(x).
  Index apply(const PointName& x, int n) const { return map(n, x.query(modulus(n))); }

 private:
  SetName domain_;
  SpacePtr codomain_;
  Modulus modulus_;
  Map map_;
  Evaluator exact_;
};

FunctionObject identity(SpacePtr space);
FunctionObject constant(SetName domain, SpacePtr codomain, DyadicVector value);
/// Projection of a product onto its left (which = 0) or right (which = 1) factor.
FunctionObject projection(SpacePtr product_space, int which);

/// Affine window [lo, lo + 2^k] that a real-valued expression is rescaled from.
struct Window {
  Dyadic lo;
  Dyadic hi;
  Dyadic width() const { return hi - lo; }
  Dyadic to_unit(const Dyadic& v) const;
  Dyadic from_unit(const Dyadic& t) const;
};

/// Smallest power-of-two window containing the interval.
Window window_for(const DyadicInterval& range);

/// x -> (e(x) - lo) / (hi - lo) from a cube (or interval) into the unit interval.
/// Without a window, one is chosen from the interval evaluation over the domain.
FunctionObject from_expr(const Expr& e, SetName domain, std::optional<Window> window = {});
/// Several expressions into cube:k sharing one window.
FunctionObject from_exprs(const std::vector<Expr>& es, SetName domain, Window window);

class GraphName {
 public:
  /// Cover pairs (u, v) at level m whose first coordinate is within radius of x.
  using Local = std::function<std::vector<std::pair<Index, Index>>(int, std::span<const Dyadic>,
                                                                   const Dyadic&)>;

  explicit GraphName(SetName set, Local local = {});

  const SetName& set() const noexcept { return set_; }
  const ProductSpace& space() const noexcept { return *product_; }
  const SpacePtr& domain_space() const noexcept { return product_->left(); }
  const SpacePtr& codomain_space() const noexcept { return product_->right(); }
  std::vector<std::pair<Index, Index>> pairs(int m) const;
  std::vector<std::pair<Index, Index>> near(int m, std::span<const Dyadic> x,
                                            const Dyadic& radius) const;

 private:
  SetName set_;
  const ProductSpace* product_;
  Local local_;
};

GraphName graph_from_function(const FunctionObject& f);

/// Level cap for the open-ended searches; CMS_LEVEL_CAP overrides the default of 24.
int level_cap();

/// Level-n codomain index within 2^-n of f(x); throws ContractViolation past the cap.
Index eval_from_graph(const GraphName& g, const PointName& x, int n, int cap = level_cap());

/// Smallest m > n such that level-(m+2) cover points with first coordinates within
/// 2^-m have second coordinates within 2^-n + 2^-m.
int modulus_from_graph(const GraphName& g, int n, int cap = level_cap());
/// The binary modulus n -> modulus_from_graph(n + 1) + 1.
Modulus derived_modulus(const GraphName& g, int cap = level_cap());

GraphName restrict_graph(const GraphName& g, const SetName& v, int cap = level_cap());
SetName image(const FunctionObject& f);
/// Preimage of a regular set under an open map, quantifiers truncated at depth.
SetName preimage_regular(const FunctionObject& f, const SetName& v, int depth);
/// y -> f(x, y) for f on a product X x Y.
FunctionObject curry(const FunctionObject& f, const PointName& x);
/// x -> g(f(x)).
FunctionObject compose(const FunctionObject& f, const FunctionObject& g);

}  // namespace cms
