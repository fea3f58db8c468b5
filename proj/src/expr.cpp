#include "cms/expr.hpp"

#include <cctype>

#include "cms/errors.hpp"

namespace cms {

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expr parse() {
    Expr e = expr();
    skip();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  Expr expr() {
    Expr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = Expr::binary(Expr::Op::add, lhs, term());
      } else if (accept('-')) {
        lhs = Expr::binary(Expr::Op::sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  Expr term() {
    Expr lhs = factor();
    while (accept('*')) lhs = Expr::binary(Expr::Op::mul, lhs, factor());
    return lhs;
  }

  Expr factor() {
    skip();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (c == '-') {
      ++pos_;
      return Expr::unary(Expr::Op::neg, factor());
    }
    if (c == '(') {
      ++pos_;
      Expr inner = expr();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return literal();
    if (std::isalpha(static_cast<unsigned char>(c))) return word();
    fail(std::string("unexpected character '") + c + "'");
  }

  Expr literal() {
    const std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    };
    digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < text_.size() && text_[pos_] == '/') {
      ++pos_;
      if (text_.substr(pos_, 2) == "2^") pos_ += 2;
      digits();
    }
    const std::string_view lit = text_.substr(start, pos_ - start);
    try {
      return Expr::constant(Dyadic::parse(lit));
    } catch (const ParseError& e) {
      throw ParseError("invalid literal '" + std::string(lit) +
                           "' (only dyadic rationals are allowed)",
                       start);
    }
  }

  Expr word() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    const std::string name(text_.substr(start, pos_ - start));
    if (name.size() > 1 && name[0] == 'x' &&
        name.find_first_not_of("0123456789", 1) == std::string::npos) {
      if (name.size() > 4) throw ParseError("coordinate index too large", start);
      return Expr::coord(std::stoi(name.substr(1)));
    }
    Expr::Op op;
    int arity;
    if (name == "min") {
      op = Expr::Op::min, arity = 2;
    } else if (name == "max") {
      op = Expr::Op::max, arity = 2;
    } else if (name == "abs") {
      op = Expr::Op::abs, arity = 1;
    } else if (name == "neg") {
      op = Expr::Op::neg, arity = 1;
    } else {
      throw ParseError("unknown identifier '" + name + "'", start);
    }
    expect('(');
    std::vector<Expr> args{expr()};
    while (accept(',')) args.push_back(expr());
    expect(')');
    if (arity == 1) {
      if (args.size() != 1) throw ParseError(name + " takes one argument", start);
      return Expr::unary(op, args[0]);
    }
    if (args.size() < 2) throw ParseError(name + " takes at least two arguments", start);
    Expr out = args[0];
    for (std::size_t i = 1; i < args.size(); ++i) out = Expr::binary(op, out, args[i]);
    return out;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

Dyadic sup_abs(const DyadicInterval& i) { return max(i.lo().abs(), i.hi().abs()); }

}  // namespace

Expr Expr::parse(std::string_view text) { return Parser(text).parse(); }

Expr Expr::constant(Dyadic value) {
  auto n = std::make_shared<Node>();
  n->op = Op::constant;
  n->value = std::move(value);
  return Expr(std::move(n));
}

Expr Expr::coord(int index) {
  if (index < 0) throw std::invalid_argument("negative coordinate index");
  auto n = std::make_shared<Node>();
  n->op = Op::coord;
  n->index = index;
  return Expr(std::move(n));
}

Expr Expr::unary(Op op, Expr child) {
  if (op != Op::neg && op != Op::abs) throw std::invalid_argument("not a unary operator");
  auto n = std::make_shared<Node>();
  n->op = op;
  n->children.push_back(std::move(child));
  return Expr(std::move(n));
}

Expr Expr::binary(Op op, Expr lhs, Expr rhs) {
  if (op != Op::add && op != Op::sub && op != Op::mul && op != Op::min && op != Op::max) {
    throw std::invalid_argument("not a binary operator");
  }
  auto n = std::make_shared<Node>();
  n->op = op;
  n->children.push_back(std::move(lhs));
  n->children.push_back(std::move(rhs));
  return Expr(std::move(n));
}

int Expr::arity() const {
  if (op() == Op::coord) return coord_index() + 1;
  int out = 0;
  for (const auto& c : children()) out = std::max(out, c.arity());
  return out;
}

Dyadic Expr::eval(std::span<const Dyadic> p) const {
  const auto& ch = children();
  switch (op()) {
    case Op::constant:
      return value();
    case Op::coord:
      if (static_cast<std::size_t>(coord_index()) >= p.size()) {
        throw std::out_of_range("expression uses x" + std::to_string(coord_index()) +
                                " beyond the point dimension");
      }
      return p[coord_index()];
    case Op::neg:
      return -ch[0].eval(p);
    case Op::abs:
      return ch[0].eval(p).abs();
    case Op::add:
      return ch[0].eval(p) + ch[1].eval(p);
    case Op::sub:
      return ch[0].eval(p) - ch[1].eval(p);
    case Op::mul:
      return ch[0].eval(p) * ch[1].eval(p);
    case Op::min:
      return min(ch[0].eval(p), ch[1].eval(p));
    case Op::max:
      return max(ch[0].eval(p), ch[1].eval(p));
  }
  return {};
}

DyadicInterval Expr::eval_interval(std::span<const DyadicInterval> box) const {
  const auto& ch = children();
  switch (op()) {
    case Op::constant:
      return DyadicInterval(value());
    case Op::coord:
      if (static_cast<std::size_t>(coord_index()) >= box.size()) {
        throw std::out_of_range("expression uses x" + std::to_string(coord_index()) +
                                " beyond the box dimension");
      }
      return box[coord_index()];
    case Op::neg:
      return -ch[0].eval_interval(box);
    case Op::abs:
      return abs(ch[0].eval_interval(box));
    case Op::add:
      return ch[0].eval_interval(box) + ch[1].eval_interval(box);
    case Op::sub:
      return ch[0].eval_interval(box) - ch[1].eval_interval(box);
    case Op::mul:
      return ch[0].eval_interval(box) * ch[1].eval_interval(box);
    case Op::min:
      return min(ch[0].eval_interval(box), ch[1].eval_interval(box));
    case Op::max:
      return max(ch[0].eval_interval(box), ch[1].eval_interval(box));
  }
  return {};
}

Dyadic Expr::lipschitz_bound(int dim) const {
  const auto& ch = children();
  switch (op()) {
    case Op::constant:
      return {};
    case Op::coord:
      return Dyadic(1);
    case Op::neg:
    case Op::abs:
      return ch[0].lipschitz_bound(dim);
    case Op::add:
    case Op::sub:
      return ch[0].lipschitz_bound(dim) + ch[1].lipschitz_bound(dim);
    case Op::min:
    case Op::max:
      return max(ch[0].lipschitz_bound(dim), ch[1].lipschitz_bound(dim));
    case Op::mul: {
      const auto box = unit_box(dim);
      const Dyadic a_sup = sup_abs(ch[0].eval_interval(box));
      const Dyadic b_sup = sup_abs(ch[1].eval_interval(box));
      return ch[0].lipschitz_bound(dim) * b_sup + ch[1].lipschitz_bound(dim) * a_sup;
    }
  }
  return {};
}

std::string Expr::to_string() const {
  const auto& ch = children();
  switch (op()) {
    case Op::constant:
      return value().sign() < 0 ? "neg(" + (-value()).to_string() + ")" : value().to_string();
    case Op::coord:
      return "x" + std::to_string(coord_index());
    case Op::neg:
      return "neg(" + ch[0].to_string() + ")";
    case Op::abs:
      return "abs(" + ch[0].to_string() + ")";
    case Op::add:
      return "(" + ch[0].to_string() + " + " + ch[1].to_string() + ")";
    case Op::sub:
      return "(" + ch[0].to_string() + " - " + ch[1].to_string() + ")";
    case Op::mul:
      return "(" + ch[0].to_string() + " * " + ch[1].to_string() + ")";
    case Op::min:
      return "min(" + ch[0].to_string() + ", " + ch[1].to_string() + ")";
    case Op::max:
      return "max(" + ch[0].to_string() + ", " + ch[1].to_string() + ")";
  }
  return {};
}

Expr Expr::canonical() const {
  switch (op()) {
    case Op::constant:
      if (value().sign() < 0) return unary(Op::neg, constant(-value()));
      return *this;
    case Op::coord:
      return *this;
    case Op::neg:
    case Op::abs:
      return unary(op(), children()[0].canonical());
    default:
      return binary(op(), children()[0].canonical(), children()[1].canonical());
  }
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (a.op() != b.op()) return false;
  if (a.op() == Expr::Op::constant) return a.value() == b.value();
  if (a.op() == Expr::Op::coord) return a.coord_index() == b.coord_index();
  const auto& x = a.children();
  const auto& y = b.children();
  if (x.size() != y.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] == y[i])) return false;
  }
  return true;
}

int lipschitz_modulus(const Dyadic& lipschitz, int n) {
  if (lipschitz.sign() <= 0) return n;
  return n + static_cast<int>(std::max<std::int64_t>(0, lipschitz.ceil_log2_abs()));
}

std::vector<DyadicInterval> unit_box(int dim) {
  return std::vector<DyadicInterval>(static_cast<std::size_t>(dim),
                                     DyadicInterval(Dyadic(0), Dyadic(1)));
}

}  // namespace cms
