#pragma once

// Expressions over cube coordinates x0, x1, ...: dyadic constants, neg, abs,
// +, -, *, min and max. Evaluation is exact at points and sound on boxes, and
// every expression carries a syntactic Lipschitz bound for the max metric.

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cms/dyadic.hpp"

namespace cms {

class Expr {
 public:
  enum class Op { constant, coord, neg, abs, add, sub, mul, min, max };

  /// Throws ParseError with the offending position.
  static Expr parse(std::string_view text);

  static Expr constant(Dyadic value);
  static Expr coord(int index);
  static Expr unary(Op op, Expr child);
  static Expr binary(Op op, Expr lhs, Expr rhs);

  Op op() const noexcept { return node_->op; }
  const Dyadic& value() const { return node_->value; }
  int coord_index() const noexcept { return node_->index; }
  const std::vector<Expr>& children() const noexcept { return node_->children; }

  /// 1 + the largest coordinate index used (0 for constant expressions).
  int arity() const;

  Dyadic eval(std::span<const Dyadic> point) const;
  DyadicInterval eval_interval(std::span<const DyadicInterval> box) const;
  /// Lipschitz bound on [0,1]^dim with respect to the max metric.
  Dyadic lipschitz_bound(int dim) const;

  /// Canonical, fully parenthesized text; negative constants print as neg(c).
  std::string to_string() const;
  /// The tree that parse(to_string()) produces: negative constants become neg(c).
  Expr canonical() const;

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  struct Node {
    Op op = Op::constant;
    Dyadic value;
    int index = 0;
    std::vector<Expr> children;
  };
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

/// Binary modulus n -> n + max(0, ceil(log2 L)) witnessing a Lipschitz bound L.
int lipschitz_modulus(const Dyadic& lipschitz, int n);

/// The unit cube [0,1]^dim as a box.
std::vector<DyadicInterval> unit_box(int dim);

}  // namespace cms
