#include "cms/names.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "cms/errors.hpp"

namespace cms {

namespace {

bool contains_sorted(const std::vector<Index>& v, Index u) {
  return std::binary_search(v.begin(), v.end(), u);
}

void sort_unique(std::vector<Index>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

void require_same_space(const SetName& a, const SetName& b, const char* what) {
  if (a.space()->id() != b.space()->id()) {
    throw std::invalid_argument(std::string(what) + ": names live in different spaces (" +
                                a.space()->id() + " vs " + b.space()->id() + ")");
  }
}

void flatten(const SpacePtr& s, std::vector<SpacePtr>& out) {
  if (auto p = std::dynamic_pointer_cast<const ProductSpace>(s)) {
    flatten(p->left(), out);
    flatten(p->right(), out);
  } else {
    out.push_back(s);
  }
}

}  // namespace

// ---------------------------------------------------------------------------

PointName::PointName(SpacePtr space, Query query)
    : space_(std::move(space)), query_(std::move(query)), memo_(std::make_shared<Memo>()) {}

Index PointName::query(int m) const {
  if (m < 0) throw std::invalid_argument("PointName::query: negative precision");
  {
    std::lock_guard lock(memo_->mutex);
    auto it = memo_->levels.find(m);
    if (it != memo_->levels.end()) return it->second;
  }
  const Index u = query_(m);
  if (u >= space_->level_size(m)) {
    throw ContractViolation("point name answered outside level " + std::to_string(m));
  }
  std::lock_guard lock(memo_->mutex);
  memo_->levels.emplace(m, u);
  return u;
}

PointName PointName::at(SpacePtr space, DyadicVector coords) {
  if (coords.size() != space->dimension()) {
    throw std::invalid_argument("PointName::at: dimension mismatch");
  }
  auto s = space;
  return PointName(std::move(space), [s, coords = std::move(coords)](int m) {
    return s->locate(coords, m);
  });
}

SetName::SetName(SpacePtr space, Query query, bool standard, Member member)
    : space_(std::move(space)),
      query_(std::move(query)),
      standard_(standard),
      member_(std::move(member)),
      memo_(std::make_shared<Memo>()) {}

std::vector<Index> SetName::query(int m) const { return *cover(m); }

std::shared_ptr<const std::vector<Index>> SetName::cover(int m) const {
  if (m < 0) throw std::invalid_argument("SetName::query: negative precision");
  {
    std::lock_guard lock(memo_->mutex);
    auto it = memo_->levels.find(m);
    if (it != memo_->levels.end()) return it->second;
  }
  std::vector<Index> cover = query_(m);
  sort_unique(cover);
  if (cover.empty()) throw EmptyResult("empty cover at level " + std::to_string(m));
  if (cover.back() >= space_->level_size(m)) {
    throw ContractViolation("set name answered outside level " + std::to_string(m));
  }
  auto shared = std::make_shared<const std::vector<Index>>(std::move(cover));
  std::lock_guard lock(memo_->mutex);
  auto [it, inserted] = memo_->levels.emplace(m, std::move(shared));
  return it->second;
}

bool SetName::contains(int m, Index u) const {
  if (member_) return u < space_->level_size(m) && member_(m, u);
  const auto c = cover(m);
  return std::binary_search(c->begin(), c->end(), u);
}

std::vector<Index> SetName::local(int m, std::span<const Dyadic> x, const Dyadic& radius) const {
  std::vector<Index> out;
  if (member_) {
    for (Index u : space_->neighbors(x, radius, m)) {
      if (member_(m, u)) out.push_back(u);
    }
    return out;
  }
  for (Index u : *cover(m)) {
    if (space_->point_distance(space_->coordinates(u), x) <= radius) out.push_back(u);
  }
  return out;
}

// ---------------------------------------------------------------------------

SetName space_as_name(SpacePtr space) {
  auto s = space;
  return SetName(
      std::move(space), [s](int m) { return level_indices(*s, m); }, true,
      [s](int, Index u) { return s->in_domain(u); });
}

SetName union_of(const SetName& a, const SetName& b) {
  require_same_space(a, b, "union");
  return SetName(a.space(), [a, b](int m) {
    std::vector<Index> out = a.query(m);
    const auto& other = b.query(m);
    out.insert(out.end(), other.begin(), other.end());
    return out;
  });
}

SetName standardize(const SetName& a) {
  auto s = a.space();
  return SetName(
      s,
      [a, s](int m) {
        // Admit a' when d(a', a) < 7 * 2^-(m+3) for some a in A_{m+3}. The
        // enclosure is taken at precision m + 6; a straddling enclosure admits.
        const Dyadic window = Dyadic(7) * Dyadic::pow2(-m - 3);
        std::vector<Index> out;
        for (Index fine : a.query(m + 3)) {
          const DyadicVector x = s->coordinates(fine);
          for (Index u : s->neighbors(x, window, m)) {
            if (s->distance_enclosure(u, fine, m + 6).lo() < window) out.push_back(u);
          }
        }
        return out;
      },
      true,
      [a, s](int m, Index u) {
        const Dyadic window = Dyadic(7) * Dyadic::pow2(-m - 3);
        for (Index fine : a.local(m + 3, s->coordinates(u), window)) {
          if (s->distance_enclosure(u, fine, m + 6).lo() < window) return true;
        }
        return false;
      });
}

PointName select_point(const SetName& a) {
  struct Chain {
    std::mutex mutex;
    std::vector<Index> links;  // links[k] lies in A_{k+3}
  };
  auto chain = std::make_shared<Chain>();
  auto s = a.space();
  return PointName(s, [a, s, chain](int m) {
    std::lock_guard lock(chain->mutex);
    auto& links = chain->links;
    if (links.empty()) links.push_back(a.query(3).front());
    while (static_cast<int>(links.size()) <= m) {
      const int k = static_cast<int>(links.size());
      // Some point of A_{k+3} is within 2^-(k+2) + 2^-(k+3) of the previous link.
      const Dyadic step = Dyadic(3) * Dyadic::pow2(-k - 3);
      const auto& cover = a.query(k + 3);
      const DyadicVector x = s->coordinates(links.back());
      std::optional<Index> next;
      for (Index u : s->neighbors(x, step, k + 3)) {
        if (contains_sorted(cover, u)) {
          next = u;
          break;
        }
      }
      if (!next) {
        throw ContractViolation("select_point: no continuation at level " + std::to_string(k) +
                                "; the set name violates its contract");
      }
      links.push_back(*next);
    }
    return s->round(links[m], m);
  });
}

SetName point_to_singleton(const PointName& x) {
  return SetName(x.space(), [x](int m) { return std::vector<Index>{x.query(m)}; });
}

namespace {

// Every level-k cover point of a singleton lies within 2^-k of it, so no cover
// point may be farther than 2^-(k-1) from the first one.
void check_singleton_level(const SetName& a, int k) {
  const auto& cover = a.query(k);
  const auto& s = *a.space();
  const DyadicVector first = s.coordinates(cover.front());
  const Dyadic limit = Dyadic::pow2(-k + 1);
  for (Index u : cover) {
    const DyadicVector y = s.coordinates(u);
    if (limit < s.point_distance(first, y)) {
      throw ContractViolation("singleton_to_point: cover points at level " + std::to_string(k) +
                              " are too far apart for a singleton");
    }
  }
}

}  // namespace

PointName singleton_to_point(const SetName& a) {
  for (int k = 0; k <= 6; ++k) {
    if (a.query(k).size() > 4096) break;
    check_singleton_level(a, k);
  }
  auto s = a.space();
  return PointName(s, [a, s](int m) {
    check_singleton_level(a, m + 2);
    return s->round(a.query(m + 2).front(), m);
  });
}

SetName intersect_truncated(const SetName& a, const SetName& b, int depth) {
  require_same_space(a, b, "intersect");
  if (depth < 0) throw std::invalid_argument("intersect_truncated: negative depth");
  struct Witnesses {
    std::mutex mutex;
    // good[n][n'] = { a in A_n : some b in B_n' within 2^-n + 2^-n' }
    std::vector<std::vector<std::vector<Index>>> good;
  };
  auto w = std::make_shared<Witnesses>();
  auto s = a.space();
  auto witnesses = [a, b, s, w, depth]() -> const std::vector<std::vector<std::vector<Index>>>& {
    std::lock_guard lock(w->mutex);
    if (!w->good.empty()) return w->good;
    std::vector<std::vector<std::vector<Index>>> good(depth + 1,
                                                      std::vector<std::vector<Index>>(depth + 1));
    for (int n = 0; n <= depth; ++n) {
      for (int n2 = 0; n2 <= depth; ++n2) {
        const Dyadic r = Dyadic::pow2(-n) + Dyadic::pow2(-n2);
        const auto& bn = b.query(n2);
        for (Index u : a.query(n)) {
          const DyadicVector x = s->coordinates(u);
          if (distance_to_cover(*s, x, bn, n2) <= r) good[n][n2].push_back(u);
        }
        if (good[n][n2].empty()) {
          throw EmptyResult("intersection is empty or depth too small: no witnesses at n=" +
                            std::to_string(n) + ", n'=" + std::to_string(n2));
        }
      }
    }
    w->good = std::move(good);
    return w->good;
  };
  return SetName(s, [a, s, depth, witnesses](int m) {
    const auto& good = witnesses();
    std::vector<Index> out;
    for (Index c : a.query(m)) {
      const DyadicVector x = s->coordinates(c);
      bool keep = true;
      for (int n = 0; n <= depth && keep; ++n) {
        const Dyadic r = Dyadic::pow2(-n) + Dyadic::pow2(-m);
        for (int n2 = 0; n2 <= depth && keep; ++n2) {
          keep = distance_to_cover(*s, x, good[n][n2], n) <= r;
        }
      }
      if (keep) out.push_back(c);
    }
    if (out.empty()) {
      throw EmptyResult("intersection is empty or depth too small at level " + std::to_string(m));
    }
    return out;
  });
}

Dyadic distance_to_cover(const PresentedSpace& space, std::span<const Dyadic> x,
                         const std::vector<Index>& cover, int m) {
  if (cover.empty()) throw std::invalid_argument("distance_to_cover: empty cover");
  auto brute = [&] {
    std::optional<Dyadic> best;
    for (Index u : cover) {
      const DyadicVector y = space.coordinates(u);
      Dyadic d = space.point_distance(x, y);
      if (!best || d < *best) best = std::move(d);
    }
    return *best;
  };
  if (cover.size() <= 32) return brute();
  for (Dyadic r = Dyadic::pow2(-m); r <= Dyadic(1); r = r.twice()) {
    std::optional<Dyadic> best;
    const auto near = space.neighbors(x, r, m);
    if (near.size() > 4 * cover.size()) break;
    for (Index u : near) {
      if (!contains_sorted(cover, u)) continue;
      const DyadicVector y = space.coordinates(u);
      Dyadic d = space.point_distance(x, y);
      if (!best || d < *best) best = std::move(d);
    }
    if (best) return *best;
  }
  return brute();
}

namespace {

// True when d(x, y) >= |x_0 - y_0| for every pair of points.
bool first_coordinate_bounds(const PresentedSpace& s) {
  const PresentedSpace* p = &s;
  while (const auto* prod = dynamic_cast<const ProductSpace*>(p)) p = prod->left().get();
  return p->id() != "circle";
}

}  // namespace

Dyadic finite_hausdorff(const PresentedSpace& space, const std::vector<Index>& a,
                        const std::vector<Index>& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("finite_hausdorff: empty set");
  const bool sweep = first_coordinate_bounds(space);
  auto points = [&](const std::vector<Index>& set) {
    std::vector<DyadicVector> out;
    out.reserve(set.size());
    for (Index u : set) out.push_back(space.coordinates(u));
    if (sweep) {
      std::sort(out.begin(), out.end(),
                [](const DyadicVector& x, const DyadicVector& y) { return x[0] < y[0]; });
    }
    return out;
  };
  const auto pa = points(a), pb = points(b);
  // Points are scanned outward from the first coordinate of x and the scan
  // stops once that coordinate alone is farther than the best so far.
  auto nearest = [&](const DyadicVector& x, const std::vector<DyadicVector>& to) {
    std::optional<Dyadic> best;
    auto visit = [&](const DyadicVector& y) {
      Dyadic d = space.point_distance(x, y);
      if (!best || d < *best) best = std::move(d);
    };
    if (!sweep) {
      for (const auto& y : to) visit(y);
      return *best;
    }
    const auto mid = std::lower_bound(to.begin(), to.end(), x[0],
                                      [](const DyadicVector& y, const Dyadic& v) { return y[0] < v; });
    auto up = mid;
    auto down = mid;
    while (up != to.end() || down != to.begin()) {
      bool moved = false;
      if (up != to.end() && (!best || (*up)[0] - x[0] < *best)) {
        visit(*up++);
        moved = true;
      }
      if (down != to.begin() && (!best || x[0] - (*(down - 1))[0] < *best)) {
        visit(*--down);
        moved = true;
      }
      if (!moved) break;
    }
    return *best;
  };
  auto directed = [&](const std::vector<DyadicVector>& from, const std::vector<DyadicVector>& to) {
    Dyadic worst;
    for (const auto& x : from) {
      Dyadic d = nearest(x, to);
      if (worst < d) worst = std::move(d);
    }
    return worst;
  };
  return max(directed(pa, pb), directed(pb, pa));
}

DyadicInterval hausdorff_between(const SetName& a, const SetName& b, int n) {
  require_same_space(a, b, "hausdorff");
  const int m = n + 2;
  // Distances here are exact, so enclosure widths contribute nothing extra.
  const Dyadic h = finite_hausdorff(*a.space(), a.query(m), b.query(m));
  const Dyadic slack = Dyadic::pow2(-m).twice();
  Dyadic lo = h - slack;
  if (lo.sign() < 0) lo = Dyadic();
  return {lo, h + slack};
}

mpz_class hyper_encode(const std::vector<Index>& set) {
  if (set.empty()) throw std::invalid_argument("hyper_encode: empty set");
  mpz_class code;
  for (Index u : set) mpz_setbit(code.get_mpz_t(), static_cast<mp_bitcnt_t>(u));
  return code;
}

std::vector<Index> hyper_decode(const mpz_class& code) {
  if (code <= 0) throw std::invalid_argument("hyper_decode: code must be positive");
  std::vector<Index> out;
  for (mp_bitcnt_t bit = mpz_scan1(code.get_mpz_t(), 0); bit != ~mp_bitcnt_t{0};
       bit = mpz_scan1(code.get_mpz_t(), bit + 1)) {
    out.push_back(static_cast<Index>(bit));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Fixture sets

FixtureSet FixtureSet::parse_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  FixtureSet out;
  out.space = space_from_id(j.at("space").get<std::string>());
  const std::string kind = j.value("kind", "finite");
  if (kind == "finite") {
    out.kind = Kind::finite;
  } else if (kind == "interval-hull") {
    out.kind = Kind::interval_hull;
  } else {
    throw std::invalid_argument("fixture: unknown kind '" + kind + "'");
  }
  for (const auto& p : j.at("points")) {
    DyadicVector coords;
    for (const auto& c : p) coords.push_back(Dyadic::parse(c.get<std::string>()));
    if (coords.size() != out.space->dimension()) {
      throw std::invalid_argument("fixture: point dimension does not match the space");
    }
    out.points.push_back(std::move(coords));
  }
  if (out.points.empty()) throw std::invalid_argument("fixture: no points");
  return out;
}

FixtureSet FixtureSet::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_json(buffer.str());
}

std::string FixtureSet::to_json() const {
  nlohmann::json j;
  j["space"] = space->id();
  j["kind"] = kind == Kind::finite ? "finite" : "interval-hull";
  j["points"] = nlohmann::json::array();
  for (const auto& p : points) {
    nlohmann::json row = nlohmann::json::array();
    for (const auto& c : p) row.push_back(c.to_string());
    j["points"].push_back(row);
  }
  return j.dump();
}

Dyadic FixtureSet::distance(std::span<const Dyadic> x) const {
  if (kind == Kind::finite) {
    std::optional<Dyadic> best;
    for (const auto& p : points) {
      Dyadic d = space->point_distance(x, p);
      if (!best || d < *best) best = std::move(d);
    }
    return *best;
  }
  std::vector<SpacePtr> factors;
  flatten(space, factors);
  Dyadic worst;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    Dyadic lo = points[0][i], hi = points[0][i];
    for (const auto& p : points) {
      lo = min(lo, p[i]);
      hi = max(hi, p[i]);
    }
    if (lo <= x[i] && x[i] <= hi) continue;
    const auto& f = *factors[i];
    const Dyadic* xi = &x[i];
    Dyadic d = min(f.point_distance({xi, 1}, {&lo, 1}), f.point_distance({xi, 1}, {&hi, 1}));
    if (worst < d) worst = std::move(d);
  }
  return worst;
}

std::vector<Index> FixtureSet::candidates(const Dyadic& radius, int m) const {
  std::vector<Index> out;
  if (kind == Kind::finite) {
    for (const auto& p : points) {
      auto near = space->neighbors(p, radius, m);
      out.insert(out.end(), near.begin(), near.end());
    }
    sort_unique(out);
    return out;
  }
  std::vector<SpacePtr> factors;
  flatten(space, factors);
  const bool wraps = std::any_of(factors.begin(), factors.end(),
                                 [](const SpacePtr& f) { return f->id() == "circle"; });
  if (wraps) return level_indices(*space, m);
  DyadicVector lo = points[0], hi = points[0];
  for (const auto& p : points) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      lo[i] = min(lo[i], p[i]);
      hi[i] = max(hi[i], p[i]);
    }
  }
  for (std::size_t i = 0; i < lo.size(); ++i) {
    lo[i] = lo[i] - radius;
    hi[i] = hi[i] + radius;
  }
  return space->indices_in_box(lo, hi, m);
}

SetName FixtureSet::name() const {
  auto self = std::make_shared<const FixtureSet>(*this);
  return SetName(
      space,
      [self](int m) {
        const Dyadic r = Dyadic::pow2(-m - 1);
        std::vector<Index> out;
        for (Index u : self->candidates(r, m)) {
          const DyadicVector x = self->space->coordinates(u);
          if (self->distance(x) <= r) out.push_back(u);
        }
        return out;
      },
      true,
      [self](int m, Index u) {
        return self->distance(self->space->coordinates(u)) <= Dyadic::pow2(-m - 1);
      });
}

}  // namespace cms
