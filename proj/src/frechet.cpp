#include "cms/frechet.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <sstream>

#include "cms/errors.hpp"

namespace cms {

namespace {

using json = nlohmann::json;

// Largest sample level for which a DP (with witness) is attempted.
constexpr int kMaxResolution = 13;

Dyadic max_distance(std::span<const Dyadic> a, std::span<const Dyadic> b) {
  Dyadic out;
  for (std::size_t k = 0; k < a.size(); ++k) out = max(out, (a[k] - b[k]).abs());
  return out;
}

int log2_exact(std::size_t n) {
  int k = 0;
  while ((std::size_t{1} << k) < n) ++k;
  return (std::size_t{1} << k) == n ? k : -1;
}

Dyadic lerp(const Dyadic& a, const Dyadic& b, const Dyadic& lambda) { return a + lambda * (b - a); }

// ---------------------------------------------------------------------------
// Bottleneck DP. Distances come from a functor over (i, j); the value type is
// either int64 (fixed-point fast path) or Dyadic.

enum : std::uint8_t { kDiag = 0, kUp = 1, kLeft = 2 };

template <class Cost, class Dist>
Cost bottleneck(std::size_t n1, std::size_t n2, const Dist& dist, std::vector<std::uint8_t>* dirs) {
  std::vector<Cost> prev(n2), cur(n2);
  if (dirs) dirs->assign(n1 * n2, kDiag);
  for (std::size_t i = 0; i < n1; ++i) {
    for (std::size_t j = 0; j < n2; ++j) {
      Cost d = dist(i, j);
      if (i == 0 && j == 0) {
        cur[j] = d;
        continue;
      }
      std::uint8_t from;
      const Cost* best;
      if (i == 0) {
        best = &cur[j - 1], from = kLeft;
      } else if (j == 0) {
        best = &prev[j], from = kUp;
      } else {
        best = &prev[j - 1], from = kDiag;
        if (prev[j] < *best) best = &prev[j], from = kUp;
        if (cur[j - 1] < *best) best = &cur[j - 1], from = kLeft;
      }
      cur[j] = *best < d ? d : *best;
      if (dirs) (*dirs)[i * n2 + j] = from;
    }
    std::swap(prev, cur);
  }
  return prev[n2 - 1];
}

Coupling backtrack(std::size_t n1, std::size_t n2, const std::vector<std::uint8_t>& dirs) {
  Coupling out;
  std::size_t i = n1 - 1, j = n2 - 1;
  out.emplace_back(i, j);
  while (i > 0 || j > 0) {
    switch (dirs[i * n2 + j]) {
      case kDiag:
        --i, --j;
        break;
      case kUp:
        --i;
        break;
      default:
        --j;
        break;
    }
    out.emplace_back(i, j);
  }
  std::reverse(out.begin(), out.end());
  return out;
}

// Both point lists on one fixed-point scale 2^-exponent, when it fits.
struct FixedPoint {
  std::int64_t exponent = 0;
  std::size_t dim = 0;
  std::vector<std::int64_t> p, q;
};

std::optional<FixedPoint> to_fixed(const std::vector<DyadicVector>& p,
                                   const std::vector<DyadicVector>& q, std::size_t rotation) {
  FixedPoint out;
  out.dim = p.front().size();
  for (const auto* list : {&p, &q}) {
    for (const auto& x : *list) {
      for (const auto& c : x) out.exponent = std::max(out.exponent, c.exponent());
    }
  }
  auto convert = [&](const std::vector<DyadicVector>& list, std::vector<std::int64_t>& dst, std::size_t r) {
    dst.reserve(list.size() * out.dim);
    for (std::size_t i = 0; i < list.size(); ++i) {
      for (const auto& c : list[r == 0 ? i : (i + r) % (list.size() - 1)]) {
        const mpz_class v = c.mantissa() << static_cast<mp_bitcnt_t>(out.exponent - c.exponent());
        if (mpz_sizeinbase(v.get_mpz_t(), 2) > 61) return false;
        dst.push_back(v.get_si());
      }
    }
    return true;
  };
  if (!convert(p, out.p, 0) || !convert(q, out.q, rotation)) return std::nullopt;
  return out;
}

// Rotation r: q index j reads q[(j + r) mod period] (period = q.size() - 1
// for closed sample lists; r = 0 means no rotation).
struct Problem {
  const std::vector<DyadicVector>& p;
  const std::vector<DyadicVector>& q;
  std::size_t rotation = 0;

  std::size_t q_index(std::size_t j) const {
    if (rotation == 0) return j;
    const std::size_t period = q.size() - 1;
    return (j + rotation) % period;
  }
};

template <class Result>
Result run_dp(const Problem& pr, bool with_witness, Coupling* witness) {
  const std::size_t n1 = pr.p.size(), n2 = pr.q.size();
  if (n1 == 0 || n2 == 0) throw std::invalid_argument("discrete_frechet: empty point list");
  if (pr.p.front().size() != pr.q.front().size()) {
    throw std::invalid_argument("discrete_frechet: dimension mismatch");
  }
  std::vector<std::uint8_t> dirs;
  Dyadic value;
  if (auto fx = to_fixed(pr.p, pr.q, pr.rotation)) {
    const std::size_t d = fx->dim;
    auto dist = [&](std::size_t i, std::size_t j) {
      const std::int64_t* a = fx->p.data() + i * d;
      const std::int64_t* b = fx->q.data() + j * d;
      std::int64_t out = 0;
      for (std::size_t k = 0; k < d; ++k) out = std::max(out, a[k] > b[k] ? a[k] - b[k] : b[k] - a[k]);
      return out;
    };
    const std::int64_t v = bottleneck<std::int64_t>(n1, n2, dist, with_witness ? &dirs : nullptr);
    value = Dyadic(mpz_class(static_cast<long>(v)), fx->exponent);
  } else {
    auto dist = [&](std::size_t i, std::size_t j) { return max_distance(pr.p[i], pr.q[pr.q_index(j)]); };
    value = bottleneck<Dyadic>(n1, n2, dist, with_witness ? &dirs : nullptr);
  }
  if (with_witness && witness) *witness = backtrack(n1, n2, dirs);
  return value;
}

Dyadic dp_value(const Problem& pr) { return run_dp<Dyadic>(pr, false, nullptr); }

DiscreteFrechet dp_with_witness(const Problem& pr) {
  DiscreteFrechet out;
  out.value = run_dp<Dyadic>(pr, true, &out.coupling);
  return out;
}

std::string topology_name(Topology t) { return t == Topology::path ? "path" : "loop"; }

Dyadic parse_dyadic_json(const json& v) {
  if (v.is_string()) return Dyadic::parse(v.get<std::string>());
  if (v.is_number_integer()) return Dyadic(v.get<long>());
  if (v.is_number()) return Dyadic::parse(v.dump());
  throw ParseError("expected a dyadic number", 0);
}

}  // namespace

// ---------------------------------------------------------------------------

Curve Curve::from_samples(Topology topology, std::vector<DyadicVector> samples, Dyadic lipschitz) {
  if (samples.size() < 2) throw std::invalid_argument("curve needs at least two samples");
  const int k = log2_exact(samples.size() - 1);
  if (k < 0) throw std::invalid_argument("curve sample count must be 2^k + 1");
  if (lipschitz.sign() < 0) throw std::invalid_argument("negative Lipschitz bound");
  const std::size_t dim = samples.front().size();
  if (dim == 0) throw std::invalid_argument("curve samples need coordinates");
  const Dyadic step_bound = lipschitz.scaled(-k);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].size() != dim) throw std::invalid_argument("curve samples differ in dimension");
    if (i > 0 && step_bound < max_distance(samples[i - 1], samples[i])) {
      throw std::invalid_argument("samples " + std::to_string(i - 1) + " and " + std::to_string(i) +
                                  " break the declared Lipschitz bound");
    }
  }
  if (topology == Topology::loop && samples.front() != samples.back()) {
    throw std::invalid_argument("loop samples must start and end at the same point");
  }
  Curve c;
  c.topology_ = topology;
  c.dim_ = dim;
  c.lipschitz_ = std::move(lipschitz);
  c.level_ = k;
  c.samples_ = std::move(samples);
  return c;
}

Curve Curve::from_function(Topology topology, std::size_t dim, Dyadic lipschitz, Evaluator f) {
  if (lipschitz.sign() < 0) throw std::invalid_argument("negative Lipschitz bound");
  if (!f || dim == 0) throw std::invalid_argument("curve needs an evaluator and a dimension");
  Curve c;
  c.topology_ = topology;
  c.dim_ = dim;
  c.lipschitz_ = std::move(lipschitz);
  c.eval_ = std::move(f);
  if (topology == Topology::loop && c.at(Dyadic(0)) != c.at(Dyadic(1))) {
    throw std::invalid_argument("loop must start and end at the same point");
  }
  return c;
}

Curve Curve::from_exprs(Topology topology, const std::vector<Expr>& components) {
  if (components.empty()) throw std::invalid_argument("curve needs components");
  Dyadic lip;
  for (const auto& e : components) {
    if (e.arity() > 1) throw std::invalid_argument("curve components may only use x0");
    lip = max(lip, e.lipschitz_bound(1));
  }
  return from_function(topology, components.size(), lip, [components](const Dyadic& t) {
    const DyadicVector x{t};
    DyadicVector out;
    for (const auto& e : components) out.push_back(e.eval(x));
    return out;
  });
}

Curve Curve::parse_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("curve json: ") + e.what(), e.byte);
  }
  const std::string topo = j.value("topology", "path");
  Topology t;
  if (topo == "path") {
    t = Topology::path;
  } else if (topo == "loop") {
    t = Topology::loop;
  } else {
    throw ParseError("unknown topology '" + topo + "'", 0);
  }
  if (!j.contains("lipschitz") || !j.contains("samples")) {
    throw ParseError("curve json needs \"lipschitz\" and \"samples\"", 0);
  }
  std::vector<DyadicVector> samples;
  for (const auto& row : j.at("samples")) {
    DyadicVector x;
    for (const auto& v : row) x.push_back(parse_dyadic_json(v));
    samples.push_back(std::move(x));
  }
  if (j.contains("dim") && !samples.empty() && j.at("dim").get<std::size_t>() != samples.front().size()) {
    throw ParseError("curve json: \"dim\" disagrees with the samples", 0);
  }
  return from_samples(t, std::move(samples), parse_dyadic_json(j.at("lipschitz")));
}

Curve Curve::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str());
}

std::string Curve::to_json() const {
  if (!level_) throw std::logic_error("only sample curves have a json form");
  json j;
  j["topology"] = topology_name(topology_);
  j["dim"] = dim_;
  j["lipschitz"] = lipschitz_.to_string();
  json rows = json::array();
  for (const auto& x : samples_) {
    json row = json::array();
    for (const auto& c : x) row.push_back(c.to_string());
    rows.push_back(std::move(row));
  }
  j["samples"] = std::move(rows);
  return j.dump();
}

DyadicVector Curve::at(const Dyadic& t) const {
  if (t.sign() < 0 || Dyadic(1) < t) throw std::invalid_argument("curve parameter outside [0,1]");
  if (eval_) {
    DyadicVector out = eval_(t);
    if (out.size() != dim_) throw std::invalid_argument("curve evaluator returned wrong dimension");
    return out;
  }
  const int k = *level_;
  const std::size_t last = samples_.size() - 1;
  const mpz_class cell = t.floor_scaled(k);
  const std::size_t i = std::min<std::size_t>(cell.get_ui(), last - 1);
  const Dyadic lambda = t.scaled(k) - Dyadic(static_cast<long>(i));
  if (lambda.is_zero()) return samples_[i];
  DyadicVector out;
  for (std::size_t c = 0; c < dim_; ++c) out.push_back(lerp(samples_[i][c], samples_[i + 1][c], lambda));
  return out;
}

std::vector<DyadicVector> Curve::sample(int m) const {
  if (m < 0 || m > 30) throw std::invalid_argument("sample level out of range");
  const std::size_t n = std::size_t{1} << m;
  std::vector<DyadicVector> out;
  out.reserve(n + 1);
  if (level_ && m <= *level_) {
    const std::size_t stride = std::size_t{1} << (*level_ - m);
    for (std::size_t i = 0; i <= n; ++i) out.push_back(samples_[i * stride]);
    return out;
  }
  for (std::size_t i = 0; i <= n; ++i) out.push_back(at(Dyadic(mpz_class(static_cast<unsigned long>(i)), m)));
  return out;
}

Curve Curve::reversed() const {
  Curve c = *this;
  if (level_) {
    std::reverse(c.samples_.begin(), c.samples_.end());
  } else {
    auto f = eval_;
    c.eval_ = [f](const Dyadic& t) { return f(Dyadic(1) - t); };
  }
  return c;
}

Curve Curve::reparametrized(const std::vector<std::pair<Dyadic, Dyadic>>& knots) const {
  if (knots.size() < 2 || knots.front().first != Dyadic(0) || knots.back().first != Dyadic(1) ||
      knots.front().second != Dyadic(0) || knots.back().second != Dyadic(1)) {
    throw std::invalid_argument("reparametrization must map 0 to 0 and 1 to 1");
  }
  Dyadic slope_bound;
  std::vector<std::int64_t> shifts;
  for (std::size_t i = 1; i < knots.size(); ++i) {
    const Dyadic dx = knots[i].first - knots[i - 1].first;
    const Dyadic dy = knots[i].second - knots[i - 1].second;
    if (dx.sign() <= 0 || dy.sign() < 0) throw std::invalid_argument("reparametrization must be monotone");
    const std::int64_t k = -dx.exponent();
    if (dx.mantissa() != 1) throw std::invalid_argument("knot spacing must be a power of two");
    shifts.push_back(k);
    slope_bound = max(slope_bound, dy.scaled(-k));
  }
  Curve base = *this;
  auto sigma = [knots, shifts](const Dyadic& t) {
    std::size_t i = 1;
    while (i + 1 < knots.size() && knots[i].first < t) ++i;
    return knots[i - 1].second + (t - knots[i - 1].first) * (knots[i].second - knots[i - 1].second).scaled(-shifts[i - 1]);
  };
  return from_function(topology_, dim_, lipschitz_ * slope_bound,
                       [base, sigma](const Dyadic& t) { return base.at(sigma(t)); });
}

// ---------------------------------------------------------------------------

DiscreteFrechet discrete_frechet(const std::vector<DyadicVector>& p, const std::vector<DyadicVector>& q) {
  return dp_with_witness(Problem{p, q});
}

Dyadic discrete_frechet_value(const std::vector<DyadicVector>& p, const std::vector<DyadicVector>& q) {
  return dp_value(Problem{p, q});
}

namespace {

void check_pair(const Curve& a, const Curve& b, Topology want, int n) {
  if (a.topology() != want || b.topology() != want) {
    throw std::invalid_argument(want == Topology::path ? "frechet_paths needs two paths"
                                                       : "frechet_loops needs two loops");
  }
  if (a.dim() != b.dim()) throw std::invalid_argument("curves live in different dimensions");
  if (n < 0) throw std::invalid_argument("negative precision");
}

// Sampling slack below the DP value and above it (zero when both polylines
// are the curves themselves).
struct Slack {
  Dyadic below;
  Dyadic above;
};

Slack slack_at(const Curve& a, const Curve& b, int m) {
  const Dyadic l = a.lipschitz() + b.lipschitz();
  const bool exact = a.exact_at(m) && b.exact_at(m);
  return {l.scaled(-m), exact ? Dyadic() : l.scaled(-m - 1)};
}

FrechetResult oriented_path(const Curve& a, const Curve& b, int n) {
  const Dyadic target = Dyadic::pow2(-n);
  int m = 0;
  for (;; ++m) {
    if (m > kMaxResolution) throw SearchExhausted("frechet: resolution above 2^13 samples needed");
    const Slack s = slack_at(a, b, m);
    if (s.below + s.above <= target) break;
  }
  const auto pa = a.sample(m), pb = b.sample(m);
  DiscreteFrechet dp = dp_with_witness(Problem{pa, pb});
  const Slack s = slack_at(a, b, m);
  Dyadic lo = dp.value - s.below;
  if (lo.sign() < 0) lo = Dyadic();
  FrechetResult r;
  r.enclosure = DyadicInterval(lo, dp.value + s.above);
  r.resolution = m;
  r.witness = std::move(dp.coupling);
  return r;
}

FrechetResult combine_unoriented(FrechetResult fwd, FrechetResult rev) {
  const Dyadic lo = min(fwd.enclosure.lo(), rev.enclosure.lo());
  const Dyadic hi = min(fwd.enclosure.hi(), rev.enclosure.hi());
  FrechetResult out = rev.enclosure.hi() < fwd.enclosure.hi() ? std::move(rev) : std::move(fwd);
  out.enclosure = DyadicInterval(lo, hi);
  return out;
}

FrechetResult oriented_loop(const Curve& a, const Curve& b, int n) {
  const Dyadic target = Dyadic::pow2(-n);
  const Dyadic lb = b.lipschitz();
  int top = 0;
  for (;; ++top) {
    if (top > kMaxResolution) throw SearchExhausted("frechet: resolution above 2^13 samples needed");
    const Slack s = slack_at(a, b, top);
    if (s.below + s.above + lb.scaled(-top) <= target) break;
  }
  // Shift sigma = r 2^-j stands for every shift within 2^-j of it; the path
  // distance moves by at most L_B per unit of shift.
  std::vector<std::size_t> candidates;
  const int first = std::min(top, 3);
  for (std::size_t r = 0; r < (std::size_t{1} << first); ++r) candidates.push_back(r);
  std::optional<Dyadic> best_upper;
  for (int j = first;; ++j) {
    const auto pa = a.sample(j), pb = b.sample(j);
    const Slack s = slack_at(a, b, j);
    const Dyadic spread = lb.scaled(-j);
    std::vector<Dyadic> values;
    values.reserve(candidates.size());
    for (std::size_t r : candidates) {
      values.push_back(dp_value(Problem{pa, pb, r}));
      const Dyadic upper = values.back() + s.above;
      if (!best_upper || upper < *best_upper) best_upper = upper;
    }
    std::vector<std::size_t> keep;
    std::optional<Dyadic> lowest;
    std::size_t best_index = 0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      const Dyadic lower = values[i] - s.below - spread;
      if (lower <= *best_upper) {
        keep.push_back(candidates[i]);
        if (!lowest || lower < *lowest) lowest = lower;
      }
      if (values[i] < values[best_index]) best_index = i;
    }
    if (!lowest) throw std::logic_error("frechet_loops: every shift was pruned");
    // Stop once the enclosure is already narrow enough.
    if (j == top || *best_upper - max(Dyadic(), *lowest) <= target) {
      const std::size_t r = candidates[best_index];
      FrechetResult out;
      out.enclosure = DyadicInterval(max(Dyadic(), *lowest), *best_upper);
      out.resolution = j;
      out.shift = r;
      out.witness = dp_with_witness(Problem{pa, pb, r}).coupling;
      return out;
    }
    const std::size_t period = std::size_t{1} << (j + 1);
    std::vector<std::size_t> next;
    for (std::size_t r : keep) {
      next.push_back((2 * r + period - 1) % period);
      next.push_back(2 * r);
      next.push_back((2 * r + 1) % period);
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    candidates = std::move(next);
  }
}

}  // namespace

FrechetResult frechet_paths(const Curve& a, const Curve& b, Orientation orientation, int n) {
  check_pair(a, b, Topology::path, n);
  FrechetResult fwd = oriented_path(a, b, n);
  if (orientation == Orientation::oriented) return fwd;
  FrechetResult rev = oriented_path(a, b.reversed(), n);
  rev.reversed = true;
  return combine_unoriented(std::move(fwd), std::move(rev));
}

FrechetResult frechet_loops(const Curve& a, const Curve& b, Orientation orientation, int n) {
  check_pair(a, b, Topology::loop, n);
  FrechetResult fwd = oriented_loop(a, b, n);
  if (orientation == Orientation::oriented) return fwd;
  FrechetResult rev = oriented_loop(a, b.reversed(), n);
  rev.reversed = true;
  return combine_unoriented(std::move(fwd), std::move(rev));
}

// ---------------------------------------------------------------------------

bool is_go_chain(const GoChain& chain, int m) {
  if (m < 0 || m > 20) return false;
  const int n = 1 << m;
  if (chain.empty() || chain.front() != std::pair{0, 0} || chain.back() != std::pair{n, n}) return false;
  int ups = 0, rights = 0;
  for (std::size_t k = 1; k < chain.size(); ++k) {
    const int dx = chain[k].first - chain[k - 1].first;
    const int dy = chain[k].second - chain[k - 1].second;
    if (dx == 1 && dy == 0) {
      ++rights, ups = 0;
    } else if (dx == 0 && dy == 1) {
      ++ups, rights = 0;
    } else {
      return false;
    }
    if (ups > 2 || rights > 2) return false;
  }
  return true;
}

std::vector<GoChain> go_chain_covers(int m) {
  if (m < 0 || m > 3) throw std::invalid_argument("go_chain_covers: level above the enumeration cap 3");
  const int n = 1 << m;
  std::vector<GoChain> out;
  GoChain path{{0, 0}};
  // run > 0: that many rights in a row; run < 0: that many ups.
  std::function<void(int, int, int)> walk = [&](int x, int y, int run) {
    if (x == n && y == n) {
      out.push_back(path);
      return;
    }
    if (x < n && run < 2) {
      path.emplace_back(x + 1, y);
      walk(x + 1, y, run > 0 ? run + 1 : 1);
      path.pop_back();
    }
    if (y < n && run > -2) {
      path.emplace_back(x, y + 1);
      walk(x, y + 1, run < 0 ? run - 1 : -1);
      path.pop_back();
    }
  };
  walk(0, 0, 0);
  return out;
}

GoChain go_chain_for(const std::function<Dyadic(const Dyadic&)>& phi, int m) {
  if (m < 0 || m > 20) throw std::invalid_argument("go_chain_for: level out of range");
  const int n = 1 << m;
  std::vector<int> y(n + 1);
  for (int i = 0; i <= n; ++i) y[i] = static_cast<int>(phi(Dyadic(mpz_class(i), m)).floor_scaled(m).get_si());
  if (y[0] != 0 || y[n] != n) throw std::invalid_argument("go_chain_for: phi must fix 0 and 1");
  GoChain chain{{0, 0}};
  for (int i = 0; i < n; ++i) {
    chain.emplace_back(i + 1, y[i]);
    for (int v = y[i] + 1; v <= y[i + 1]; ++v) chain.emplace_back(i + 1, v);
  }
  if (!is_go_chain(chain, m)) throw std::invalid_argument("go_chain_for: phi has slopes outside [1/2, 2]");
  return chain;
}

Dyadic chain_cost(const GoChain& chain, const std::vector<DyadicVector>& a,
                  const std::vector<DyadicVector>& b) {
  Dyadic out;
  for (const auto& [i, j] : chain) out = max(out, max_distance(a.at(i), b.at(j)));
  return out;
}

mpq_class PiecewiseLinear::at(const mpq_class& x) const {
  if (knots.size() < 2) throw std::logic_error("piecewise-linear map needs two knots");
  std::size_t i = 1;
  while (i + 1 < knots.size() && knots[i].first.to_mpq() < x) ++i;
  const mpq_class x0 = knots[i - 1].first.to_mpq(), x1 = knots[i].first.to_mpq();
  const mpq_class y0 = knots[i - 1].second.to_mpq(), y1 = knots[i].second.to_mpq();
  return y0 + (x - x0) * (y1 - y0) / (x1 - x0);
}

Lip2Factorization lip2_factorize(const std::vector<Dyadic>& phi) {
  if (phi.size() < 2) throw std::invalid_argument("lip2_factorize: need at least two samples");
  const int m = log2_exact(phi.size() - 1);
  if (m < 0) throw std::invalid_argument("lip2_factorize: sample count must be 2^m + 1");
  if (phi.front() != Dyadic(0) || phi.back() != Dyadic(1)) {
    throw std::invalid_argument("lip2_factorize: phi must map 0 to 0 and 1 to 1");
  }
  Lip2Factorization out;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    if (i > 0 && phi[i] < phi[i - 1]) throw std::invalid_argument("lip2_factorize: phi is not monotone");
    const Dyadic t(mpz_class(static_cast<unsigned long>(i)), m);
    // s = (t + phi(t)) / 2 is strictly increasing; chi inverts it.
    const Dyadic s = (t + phi[i]).halve();
    out.chi.knots.emplace_back(s, t);
    out.psi.knots.emplace_back(s, phi[i]);
  }
  return out;
}

}  // namespace cms
