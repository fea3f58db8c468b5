#include "cms/functions.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <mutex>

#include "cms/errors.hpp"

namespace cms {

namespace {

void sort_unique(std::vector<Index>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

bool cube_like(const PresentedSpace& s) {
  if (s.id() == "interval") return true;
  const auto* p = dynamic_cast<const ProductSpace*>(&s);
  return p && cube_like(*p->left()) && cube_like(*p->right());
}

const ProductSpace& as_product(const SpacePtr& s, const char* what) {
  const auto* p = dynamic_cast<const ProductSpace*>(s.get());
  if (!p) throw std::invalid_argument(std::string(what) + ": expected a product space");
  return *p;
}

}  // namespace

FunctionObject::FunctionObject(SetName domain, SpacePtr codomain, Modulus modulus, Map map,
                               Evaluator exact)
    : domain_(std::move(domain)),
      codomain_(std::move(codomain)),
      modulus_(std::move(modulus)),
      map_(std::move(map)),
      exact_(std::move(exact)) {
  if (!codomain_ || !modulus_ || !map_) throw std::invalid_argument("FunctionObject: missing part");
}

FunctionObject FunctionObject::from_evaluator(SetName domain, SpacePtr codomain, Dyadic lipschitz,
                                              Evaluator exact) {
  if (lipschitz.sign() < 0) throw std::invalid_argument("negative Lipschitz bound");
  // |f(x) - f(a)| <= 2^-(n+1) and locating costs another 2^-(n+1).
  Modulus mu;
  if (lipschitz.is_zero()) {
    mu = [](int n) { return std::max(n, 0); };
  } else {
    const int extra = static_cast<int>(std::max<std::int64_t>(0, lipschitz.ceil_log2_abs()));
    mu = [extra](int n) { return n + 1 + extra; };
  }
  auto x = domain.space();
  auto y = codomain;
  Map map = [x, y, exact](int n, Index a) { return y->locate(exact(x->coordinates(a)), n); };
  return FunctionObject(std::move(domain), std::move(codomain), std::move(mu), std::move(map),
                        std::move(exact));
}

Index FunctionObject::map(int n, Index a) const {
  const Index out = map_(n, a);
  if (out >= codomain_->level_size(n)) {
    throw ContractViolation("function map answered outside level " + std::to_string(n));
  }
  return out;
}

DyadicVector FunctionObject::exact(std::span<const Dyadic> x) const {
  if (!exact_) throw std::logic_error("function has no exact evaluator");
  return exact_(x);
}

FunctionObject identity(SpacePtr space) {
  return FunctionObject::from_evaluator(space_as_name(space), space, Dyadic(1),
                                        [](std::span<const Dyadic> x) {
                                          return DyadicVector(x.begin(), x.end());
                                        });
}

FunctionObject constant(SetName domain, SpacePtr codomain, DyadicVector value) {
  if (value.size() != codomain->dimension()) throw std::invalid_argument("constant: dimension");
  return FunctionObject::from_evaluator(std::move(domain), std::move(codomain), Dyadic(0),
                                        [value](std::span<const Dyadic>) { return value; });
}

FunctionObject projection(SpacePtr product_space, int which) {
  const ProductSpace& p = as_product(product_space, "projection");
  if (which != 0 && which != 1) throw std::invalid_argument("projection: which must be 0 or 1");
  const std::size_t k = p.left()->dimension();
  SpacePtr target = which == 0 ? p.left() : p.right();
  return FunctionObject::from_evaluator(
      space_as_name(product_space), target, Dyadic(1), [k, which](std::span<const Dyadic> x) {
        auto part = which == 0 ? x.first(k) : x.subspan(k);
        return DyadicVector(part.begin(), part.end());
      });
}

// ---------------------------------------------------------------------------

Dyadic Window::to_unit(const Dyadic& v) const {
  return (v - lo).scaled(-width().ceil_log2_abs());
}

Dyadic Window::from_unit(const Dyadic& t) const { return lo + t.scaled(width().ceil_log2_abs()); }

Window window_for(const DyadicInterval& range) {
  if (Dyadic(0) <= range.lo() && range.hi() <= Dyadic(1)) return {Dyadic(0), Dyadic(1)};
  const Dyadic span = range.hi() - range.lo();
  std::int64_t k = span.is_zero() ? 0 : span.ceil_log2_abs();
  for (;; ++k) {
    const Dyadic lo = range.lo().floor_to(1 - k);
    if (range.hi() <= lo + Dyadic::pow2(k)) return {lo, lo + Dyadic::pow2(k)};
  }
}

namespace {

FunctionObject from_expr_list(const std::vector<Expr>& es, SetName domain, const Window& w) {
  const auto& x = *domain.space();
  if (!cube_like(x)) throw std::invalid_argument("expressions need an interval or cube domain");
  const int dim = static_cast<int>(x.dimension());
  const Dyadic width = w.width();
  if (width.sign() <= 0 || Dyadic::pow2(width.ceil_log2_abs()) != width) {
    throw std::invalid_argument("window width must be a power of two");
  }
  Dyadic lip;
  for (const auto& e : es) {
    if (e.arity() > dim) {
      throw std::invalid_argument("expression uses more coordinates than the domain has");
    }
    lip = max(lip, e.lipschitz_bound(dim));
  }
  lip = lip.scaled(-width.ceil_log2_abs());
  SpacePtr y = es.size() == 1 ? unit_interval() : cube(static_cast<int>(es.size()));
  return FunctionObject::from_evaluator(
      std::move(domain), std::move(y), lip, [es, w](std::span<const Dyadic> p) {
        DyadicVector out;
        for (const auto& e : es) {
          Dyadic t = w.to_unit(e.eval(p));
          if (t.sign() < 0 || Dyadic(1) < t) {
            throw ContractViolation("expression value " + e.eval(p).to_string() +
                                    " leaves the window");
          }
          out.push_back(std::move(t));
        }
        return out;
      });
}

}  // namespace

FunctionObject from_expr(const Expr& e, SetName domain, std::optional<Window> window) {
  const int dim = static_cast<int>(domain.space()->dimension());
  if (e.arity() > dim) throw std::invalid_argument("expression uses more coordinates than the domain has");
  const Window w = window ? *window : window_for(e.eval_interval(unit_box(dim)));
  return from_expr_list({e}, std::move(domain), w);
}

FunctionObject from_exprs(const std::vector<Expr>& es, SetName domain, Window window) {
  if (es.empty()) throw std::invalid_argument("from_exprs: no expressions");
  return from_expr_list(es, std::move(domain), window);
}

// ---------------------------------------------------------------------------

GraphName::GraphName(SetName set, Local local)
    : set_(std::move(set)), product_(&as_product(set_.space(), "GraphName")), local_(std::move(local)) {}

std::vector<std::pair<Index, Index>> GraphName::pairs(int m) const {
  const auto cover = set_.cover(m);
  std::vector<std::pair<Index, Index>> out;
  out.reserve(cover->size());
  for (Index w : *cover) out.push_back(product_->unpair(w));
  return out;
}

std::vector<std::pair<Index, Index>> GraphName::near(int m, std::span<const Dyadic> x,
                                                     const Dyadic& radius) const {
  if (local_) return local_(m, x, radius);
  const auto& xs = *product_->left();
  std::vector<std::pair<Index, Index>> out;
  for (const auto& uv : pairs(m)) {
    if (xs.point_distance(xs.coordinates(uv.first), x) <= radius) out.push_back(uv);
  }
  return out;
}

GraphName graph_from_function(const FunctionObject& f) {
  const SpacePtr x = f.domain_space();
  const SpacePtr y = f.codomain();
  const auto p = std::static_pointer_cast<const ProductSpace>(product(x, y));
  // Domain points come from level max(mu(m+2), m+2) so that the X parts still
  // cover at level m when the modulus is small.
  auto source = [f](int m) { return std::max(f.modulus(m + 2), m + 2); };
  SetName set(p, [f, x, y, p, source](int m) {
    std::vector<Index> out;
    for (Index u : *f.domain().cover(source(m))) {
      out.push_back(p->pair(x->round(u, m), y->round(f.map(m + 2, u), m)));
    }
    return out;
  });
  GraphName::Local local = [f, x, y, source](int m, std::span<const Dyadic> at,
                                             const Dyadic& radius) {
    std::vector<std::pair<Index, Index>> out;
    const int k = source(m);
    for (Index u : f.domain().local(k, at, radius + Dyadic::pow2(-m - 1))) {
      const Index ru = x->round(u, m);
      if (x->point_distance(x->coordinates(ru), at) <= radius) {
        out.emplace_back(ru, y->round(f.map(m + 2, u), m));
      }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  };
  return GraphName(std::move(set), std::move(local));
}

int level_cap() {
  if (const char* env = std::getenv("CMS_LEVEL_CAP")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0 && v < 60) return static_cast<int>(v);
  }
  return 24;
}

Index eval_from_graph(const GraphName& g, const PointName& x, int n, int cap) {
  const auto& xs = *g.domain_space();
  const auto& ys = *g.codomain_space();
  if (x.space()->id() != xs.id()) throw std::invalid_argument("eval_from_graph: space mismatch");
  for (int m = n + 3; m <= cap; ++m) {
    const DyadicVector at = xs.coordinates(x.query(m));
    const auto near = g.near(m, at, Dyadic::pow2(-m + 1));
    if (near.empty()) {
      throw ContractViolation("eval_from_graph: point lies outside the graph's domain");
    }
    std::vector<Index> values;
    for (const auto& uv : near) values.push_back(uv.second);
    sort_unique(values);
    std::vector<DyadicVector> coords;
    for (Index v : values) coords.push_back(ys.coordinates(v));
    const Dyadic bound = Dyadic::pow2(-n) - Dyadic::pow2(-m);
    for (Index cand : ys.neighbors(coords.front(), bound, n)) {
      const DyadicVector c = ys.coordinates(cand);
      const bool ok = std::all_of(coords.begin(), coords.end(), [&](const DyadicVector& v) {
        return ys.point_distance(c, v) < bound;
      });
      if (ok) return cand;
    }
  }
  throw ContractViolation("eval_from_graph: level cap " + std::to_string(cap) +
                          " exceeded (contract violation or point outside the domain)");
}

int modulus_from_graph(const GraphName& g, int n, int cap) {
  const auto& xs = *g.domain_space();
  const auto& ys = *g.codomain_space();
  for (int m = n + 1; m <= cap; ++m) {
    const int level = m + 2;
    std::map<Index, std::vector<DyadicVector>> fibers;
    for (const auto& [u, v] : g.pairs(level)) fibers[u].push_back(ys.coordinates(v));
    const Dyadic reach = Dyadic::pow2(-m);
    const Dyadic allowed = Dyadic::pow2(-n) + reach;
    bool ok = true;
    for (auto it = fibers.begin(); ok && it != fibers.end(); ++it) {
      for (Index u2 : xs.neighbors(xs.coordinates(it->first), reach, level)) {
        if (u2 < it->first) continue;
        auto other = fibers.find(u2);
        if (other == fibers.end()) continue;
        for (const auto& a : it->second) {
          for (const auto& b : other->second) {
            if (allowed < ys.point_distance(a, b)) ok = false;
          }
        }
        if (!ok) break;
      }
    }
    if (ok) return m;
  }
  throw ContractViolation("modulus_from_graph: level cap " + std::to_string(cap) + " exceeded");
}

Modulus derived_modulus(const GraphName& g, int cap) {
  struct Cache {
    std::mutex mutex;
    std::map<int, int> values;
  };
  auto cache = std::make_shared<Cache>();
  return [g, cap, cache](int n) {
    {
      std::lock_guard lock(cache->mutex);
      auto it = cache->values.find(n);
      if (it != cache->values.end()) return it->second;
    }
    const int m = modulus_from_graph(g, n + 1, cap) + 1;
    std::lock_guard lock(cache->mutex);
    cache->values.emplace(n, m);
    return m;
  };
}

GraphName restrict_graph(const GraphName& g, const SetName& v, int cap) {
  if (v.space()->id() != g.domain_space()->id()) {
    throw std::invalid_argument("restrict: set lives in another space");
  }
  const SetName a = v.standard() ? v : standardize(v);
  const SetName b = g.set().standard() ? g.set() : standardize(g.set());
  const Modulus mu = derived_modulus(g, cap);
  const SpacePtr p = g.set().space();
  return GraphName(SetName(p, [a, b, mu, p](int m) {
    const auto& prod = static_cast<const ProductSpace&>(*p);
    const int n = mu(m + 2) + 1;
    std::vector<Index> out;
    for (Index w : *b.cover(n)) {
      const auto [u, y] = prod.unpair(w);
      if (a.contains(n, u)) out.push_back(prod.pair(prod.left()->round(u, m), prod.right()->round(y, m)));
    }
    return out;
  }));
}

SetName image(const FunctionObject& f) {
  return SetName(f.codomain(), [f](int m) {
    std::vector<Index> out;
    for (Index a : *f.domain().cover(f.modulus(m))) out.push_back(f.map(m, a));
    return out;
  });
}

SetName preimage_regular(const FunctionObject& f, const SetName& v, int depth) {
  if (v.space()->id() != f.codomain()->id()) {
    throw std::invalid_argument("preimage: set lives in another space");
  }
  if (depth < 0) throw std::invalid_argument("preimage: negative depth");
  struct Witnesses {
    std::mutex mutex;
    std::map<std::pair<int, int>, std::shared_ptr<const std::vector<Index>>> sets;
  };
  auto memo = std::make_shared<Witnesses>();
  // Domain points a' at level mu(n') whose value is within 2^-n + 2^-n' of B_n.
  auto witnesses = [f, v, memo](int n, int n2) {
    {
      std::lock_guard lock(memo->mutex);
      auto it = memo->sets.find({n, n2});
      if (it != memo->sets.end()) return it->second;
    }
    const auto& ys = *f.codomain();
    const auto target = v.cover(n);
    const Dyadic slack = Dyadic::pow2(-n) + Dyadic::pow2(-n2);
    std::vector<Index> out;
    for (Index a : *f.domain().cover(f.modulus(n2))) {
      const DyadicVector y = ys.coordinates(f.map(n2, a));
      if (distance_to_cover(ys, y, *target, n) <= slack) out.push_back(a);
    }
    auto shared = std::make_shared<const std::vector<Index>>(std::move(out));
    std::lock_guard lock(memo->mutex);
    return memo->sets.emplace(std::make_pair(n, n2), std::move(shared)).first->second;
  };
  const SpacePtr x = f.domain_space();
  return SetName(x, [f, x, depth, witnesses](int m) {
    // Candidates from the strictest pair, then filtered by every other pair.
    std::vector<Index> cand;
    {
      const int k = f.modulus(depth);
      const Dyadic r = Dyadic::pow2(-m) + Dyadic::pow2(-k);
      for (Index a : *witnesses(depth, depth)) {
        auto near = x->neighbors(x->coordinates(a), r, m);
        cand.insert(cand.end(), near.begin(), near.end());
      }
      sort_unique(cand);
    }
    for (int n = depth; n >= 0; --n) {
      for (int n2 = depth; n2 >= 0; --n2) {
        if (n == depth && n2 == depth) continue;
        const auto w = witnesses(n, n2);
        const int k = f.modulus(n2);
        const Dyadic r = Dyadic::pow2(-m) + Dyadic::pow2(-k);
        std::erase_if(cand, [&](Index c) {
          for (Index a : x->neighbors(x->coordinates(c), r, k)) {
            if (std::binary_search(w->begin(), w->end(), a)) return false;
          }
          return true;
        });
      }
    }
    if (cand.empty()) {
      throw EmptyResult("preimage is empty at level " + std::to_string(m) +
                        " (infeasible, or depth too small)");
    }
    return cand;
  });
}

FunctionObject curry(const FunctionObject& f, const PointName& x) {
  const SpacePtr s = f.domain_space();
  const ProductSpace& p = as_product(s, "curry");
  if (x.space()->id() != p.left()->id()) throw std::invalid_argument("curry: point space mismatch");
  const SpacePtr y = p.right();
  auto mu = f.modulus_fn();
  return FunctionObject(space_as_name(y), f.codomain(), mu, [f, x, s, mu](int n, Index b) {
    const auto& prod = static_cast<const ProductSpace&>(*s);
    return f.map(n, prod.pair(x.query(mu(n)), b));
  });
}

FunctionObject compose(const FunctionObject& f, const FunctionObject& g) {
  if (f.codomain()->id() != g.domain_space()->id()) {
    throw std::invalid_argument("compose: codomain and domain differ");
  }
  auto mu_f = f.modulus_fn();
  auto mu_g = g.modulus_fn();
  FunctionObject::Evaluator exact;
  if (f.has_exact() && g.has_exact()) {
    exact = [f, g](std::span<const Dyadic> x) { return g.exact(f.exact(x)); };
  }
  return FunctionObject(
      f.domain(), g.codomain(), [mu_f, mu_g](int n) { return mu_f(mu_g(n)); },
      [f, g](int n, Index a) { return g.map(n, f.map(g.modulus(n), a)); }, std::move(exact));
}

}  // namespace cms
