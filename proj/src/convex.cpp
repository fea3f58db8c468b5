#include "cms/convex.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <set>
#include <sstream>

#include "cms/errors.hpp"

namespace cms {

namespace {

using json = nlohmann::json;

// Exact vector helpers. Dyadic versions drive the combinatorics; rational
// versions are used for projections.
using P3 = std::array<Dyadic, 3>;
using Q3 = std::array<mpq_class, 3>;

P3 lift(const DyadicVector& x) { return {x[0], x[1], x.size() > 2 ? x[2] : Dyadic()}; }

template <class T>
std::array<T, 3> sub(const std::array<T, 3>& a, const std::array<T, 3>& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
template <class T>
std::array<T, 3> cross(const std::array<T, 3>& a, const std::array<T, 3>& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
template <class T>
T dot(const std::array<T, 3>& a, const std::array<T, 3>& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

Q3 to_q(const DyadicVector& x) {
  return {x[0].to_mpq(), x[1].to_mpq(), x.size() > 2 ? x[2].to_mpq() : mpq_class(0)};
}

bool is_zero(const P3& v) { return v[0].is_zero() && v[1].is_zero() && v[2].is_zero(); }

Dyadic cross2(const DyadicVector& o, const DyadicVector& a, const DyadicVector& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

// Andrew's monotone chain: indices of the strict hull, counter-clockwise,
// starting at the lexicographically smallest point. Input must be sorted and
// free of duplicates.
std::vector<std::size_t> hull2(const std::vector<DyadicVector>& pts) {
  const std::size_t n = pts.size();
  if (n <= 2) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(i);
    return out;
  }
  std::vector<std::size_t> h(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (k >= 2 && cross2(pts[h[k - 2]], pts[h[k - 1]], pts[i]).sign() <= 0) --k;
    h[k++] = i;
  }
  for (std::size_t i = n - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross2(pts[h[k - 2]], pts[h[k - 1]], pts[i]).sign() <= 0) --k;
    h[k++] = i;
  }
  h.resize(k - 1);
  return h;
}

mpq_class norm2(const Q3& v) { return dot(v, v); }

mpq_class segment_distance2(const Q3& p, const Q3& a, const Q3& b) {
  const Q3 d = sub(b, a);
  const mpq_class dd = norm2(d);
  if (dd == 0) return norm2(sub(p, a));
  mpq_class t = dot(sub(p, a), d) / dd;
  if (t < 0) t = 0;
  if (t > 1) t = 1;
  const Q3 foot{a[0] + t * d[0], a[1] + t * d[1], a[2] + t * d[2]};
  return norm2(sub(p, foot));
}

mpq_class triangle_distance2(const Q3& p, const Q3& a, const Q3& b, const Q3& c) {
  const Q3 n = cross(sub(b, a), sub(c, a));
  const mpq_class nn = norm2(n);
  if (nn != 0 && dot(n, cross(sub(b, a), sub(p, a))) >= 0 && dot(n, cross(sub(c, b), sub(p, b))) >= 0 &&
      dot(n, cross(sub(a, c), sub(p, c))) >= 0) {
    const mpq_class h = dot(sub(p, a), n);
    return h * h / nn;
  }
  return std::min({segment_distance2(p, a, b), segment_distance2(p, b, c), segment_distance2(p, c, a)});
}

Dyadic to_dyadic_exact(const mpq_class& q) {
  const mpz_class& den = q.get_den();
  const std::size_t bits = mpz_sizeinbase(den.get_mpz_t(), 2) - 1;
  if (mpz_scan1(den.get_mpz_t(), 0) != bits) throw std::logic_error("value is not dyadic");
  return Dyadic(q.get_num(), static_cast<std::int64_t>(bits));
}

int ceil_log2(std::size_t n) {
  int k = 0;
  while ((std::size_t{1} << k) < n) ++k;
  return k;
}

Dyadic parse_number(const json& v) {
  if (v.is_string()) return Dyadic::parse(v.get<std::string>());
  if (v.is_number_integer()) return Dyadic(v.get<long>());
  if (v.is_number()) return Dyadic::parse(v.dump());
  throw ParseError("expected a dyadic number", 0);
}

}  // namespace

ConvexBody ConvexBody::hull(std::size_t dim, const std::vector<DyadicVector>& points) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("convex bodies live in dimension 2 or 3");
  if (points.empty()) throw std::invalid_argument("hull of no points");
  for (const auto& x : points) {
    if (x.size() != dim) throw std::invalid_argument("point of the wrong dimension");
    for (const auto& c : x) {
      if (c.sign() < 0 || Dyadic(1) < c) throw std::invalid_argument("point outside the unit cube");
    }
  }
  std::vector<DyadicVector> pts = points;
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  ConvexBody b;
  b.dim_ = dim;
  if (dim == 2) {
    for (std::size_t i : hull2(pts)) b.vertices_.push_back(pts[i]);
    b.rank_ = std::min<int>(2, static_cast<int>(b.vertices_.size()) - 1);
    return b;
  }

  // Affine rank in space.
  std::vector<P3> p;
  for (const auto& x : pts) p.push_back(lift(x));
  P3 n{};
  b.rank_ = pts.size() > 1 ? 1 : 0;
  for (std::size_t i = 2; i < p.size() && b.rank_ < 2; ++i) {
    n = cross(sub(p[1], p[0]), sub(p[i], p[0]));
    if (!is_zero(n)) b.rank_ = 2;
  }
  for (std::size_t i = 2; i < p.size() && b.rank_ == 2; ++i) {
    if (!dot(n, sub(p[i], p[0])).is_zero()) b.rank_ = 3;
  }

  // Strict hull of a coplanar subset, via the projection that drops a
  // coordinate where the normal is non-zero.
  auto planar = [&](const std::vector<std::size_t>& idx, const P3& normal) {
    int drop = 0;
    for (int a = 0; a < 3; ++a) {
      if (!normal[a].is_zero()) drop = a;
    }
    std::vector<std::pair<DyadicVector, std::size_t>> proj;
    for (std::size_t i : idx) {
      DyadicVector y;
      for (int a = 0; a < 3; ++a) {
        if (a != drop) y.push_back(p[i][a]);
      }
      proj.emplace_back(std::move(y), i);
    }
    std::sort(proj.begin(), proj.end());
    std::vector<DyadicVector> flat;
    for (const auto& e : proj) flat.push_back(e.first);
    std::vector<std::size_t> out;
    for (std::size_t h : hull2(flat)) out.push_back(proj[h].second);
    return out;
  };

  if (b.rank_ <= 1) {
    b.vertices_.push_back(pts.front());
    if (b.rank_ == 1) b.vertices_.push_back(pts.back());
    return b;
  }

  std::vector<std::size_t> all(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) all[i] = i;
  std::vector<std::vector<std::size_t>> polys;
  std::vector<P3> normals;
  if (b.rank_ == 2) {
    polys.push_back(planar(all, n));
    normals.push_back(n);
  } else {
    std::set<std::vector<std::size_t>> seen;
    for (std::size_t i = 0; i < p.size(); ++i) {
      for (std::size_t j = i + 1; j < p.size(); ++j) {
        for (std::size_t k = j + 1; k < p.size(); ++k) {
          P3 f = cross(sub(p[j], p[i]), sub(p[k], p[i]));
          if (is_zero(f)) continue;
          int pos = 0, neg = 0;
          std::vector<std::size_t> on;
          for (std::size_t t = 0; t < p.size(); ++t) {
            const int s = dot(f, sub(p[t], p[i])).sign();
            if (s > 0) ++pos;
            if (s < 0) ++neg;
            if (s == 0) on.push_back(t);
          }
          if (pos > 0 && neg > 0) continue;
          if (!seen.insert(on).second) continue;
          if (pos > 0) f = {-f[0], -f[1], -f[2]};
          std::vector<std::size_t> poly = planar(on, f);
          const P3 g = cross(sub(p[poly[1]], p[poly[0]]), sub(p[poly[2]], p[poly[0]]));
          if (dot(g, f).sign() < 0) std::reverse(poly.begin(), poly.end());
          polys.push_back(std::move(poly));
          normals.push_back(f);
        }
      }
    }
  }
  std::vector<std::size_t> used;
  for (const auto& poly : polys) used.insert(used.end(), poly.begin(), poly.end());
  std::sort(used.begin(), used.end());
  used.erase(std::unique(used.begin(), used.end()), used.end());
  for (std::size_t i : used) b.vertices_.push_back(pts[i]);
  for (const auto& poly : polys) {
    std::vector<std::size_t> face;
    for (std::size_t i : poly) face.push_back(std::lower_bound(used.begin(), used.end(), i) - used.begin());
    b.faces_.push_back(std::move(face));
  }
  for (const auto& f : normals) b.normals_.push_back({f[0], f[1], f[2]});
  return b;
}

ConvexBody ConvexBody::parse_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("body json: ") + e.what(), e.byte);
  }
  if (!j.contains("dim") || !j.contains("vertices")) throw ParseError("body json needs \"dim\" and \"vertices\"", 0);
  std::vector<DyadicVector> pts;
  for (const auto& row : j.at("vertices")) {
    DyadicVector x;
    for (const auto& v : row) x.push_back(parse_number(v));
    pts.push_back(std::move(x));
  }
  return hull(j.at("dim").get<std::size_t>(), pts);
}

ConvexBody ConvexBody::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str());
}

std::string ConvexBody::to_json() const {
  json rows = json::array();
  for (const auto& x : vertices_) {
    json row = json::array();
    for (const auto& c : x) row.push_back(c.to_string());
    rows.push_back(std::move(row));
  }
  json j;
  j["dim"] = dim_;
  j["vertices"] = std::move(rows);
  return j.dump();
}

bool ConvexBody::contains(const DyadicVector& x) const {
  if (x.size() != dim_) throw std::invalid_argument("point of the wrong dimension");
  if (rank_ == 2 && dim_ == 2) {
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
      if (cross2(vertices_[i], vertices_[(i + 1) % vertices_.size()], x).sign() < 0) return false;
    }
    return true;
  }
  if (rank_ == 3) {
    const P3 y = lift(x);
    for (std::size_t f = 0; f < faces_.size(); ++f) {
      const P3 nrm = lift(normals_[f]);
      if (dot(nrm, sub(y, lift(vertices_[faces_[f][0]]))).sign() > 0) return false;
    }
    return true;
  }
  return squared_distance(x) == 0;
}

mpq_class ConvexBody::squared_distance(const DyadicVector& x) const {
  if (x.size() != dim_) throw std::invalid_argument("point of the wrong dimension");
  const Q3 p = to_q(x);
  if (rank_ == 0) return norm2(sub(p, to_q(vertices_[0])));
  if (rank_ == 1) return segment_distance2(p, to_q(vertices_[0]), to_q(vertices_[1]));
  if (rank_ == static_cast<int>(dim_) && contains(x)) return 0;
  std::vector<Q3> v;
  for (const auto& y : vertices_) v.push_back(to_q(y));
  std::optional<mpq_class> best;
  auto take = [&](const mpq_class& d) {
    if (!best || d < *best) best = d;
  };
  if (dim_ == 2) {
    for (std::size_t i = 0; i < v.size(); ++i) take(segment_distance2(p, v[i], v[(i + 1) % v.size()]));
  } else {
    for (const auto& face : faces_) {
      for (std::size_t i = 1; i + 1 < face.size(); ++i) take(triangle_distance2(p, v[face[0]], v[face[i]], v[face[i + 1]]));
    }
  }
  return *best;
}

mpq_class volume(const ConvexBody& b) {
  if (b.rank() < static_cast<int>(b.dim())) return 0;
  const auto& v = b.vertices();
  if (b.dim() == 2) {
    Dyadic twice;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const auto& a = v[i];
      const auto& c = v[(i + 1) % v.size()];
      twice = twice + a[0] * c[1] - c[0] * a[1];
    }
    return twice.halve().to_mpq();
  }
  const P3 o = lift(v[0]);
  Dyadic six;
  for (const auto& face : b.faces()) {
    const P3 a = sub(lift(v[face[0]]), o);
    for (std::size_t i = 1; i + 1 < face.size(); ++i) {
      six = six + dot(a, cross(sub(lift(v[face[i]]), o), sub(lift(v[face[i + 1]]), o)));
    }
  }
  return six.to_mpq() / 6;
}

DyadicInterval surface(const ConvexBody& b, int k) {
  if (b.rank() < static_cast<int>(b.dim())) throw std::invalid_argument("surface of a degenerate body");
  const auto& v = b.vertices();
  DyadicInterval total(Dyadic(0));
  if (b.dim() == 2) {
    const int p = k + ceil_log2(v.size()) + 1;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const Q3 e = sub(to_q(v[(i + 1) % v.size()]), to_q(v[i]));
      total = total + sqrt_enclosure(norm2(e), p);
    }
    return total;
  }
  // Twice the area of each face is the length of the summed edge cross products.
  const int p = k + ceil_log2(b.faces().size()) + 1;
  for (const auto& face : b.faces()) {
    P3 acc{};
    for (std::size_t i = 0; i < face.size(); ++i) {
      const P3 c = cross(lift(v[face[i]]), lift(v[face[(i + 1) % face.size()]]));
      for (int a = 0; a < 3; ++a) acc[a] = acc[a] + c[a];
    }
    const DyadicInterval twice = sqrt_enclosure(dot(acc, acc).to_mpq(), p);
    total = total + DyadicInterval(twice.lo().halve(), twice.hi().halve());
  }
  return total;
}

DyadicInterval hausdorff_convex(const ConvexBody& v, const ConvexBody& w, int k) {
  if (v.dim() != w.dim()) throw std::invalid_argument("bodies in different dimensions");
  mpq_class worst = 0;
  for (const auto& x : v.vertices()) worst = std::max(worst, w.squared_distance(x));
  for (const auto& x : w.vertices()) worst = std::max(worst, v.squared_distance(x));
  return sqrt_enclosure(worst, k);
}

std::vector<ConvexBody> kc_sample(int m, std::size_t max_vertices) {
  if (m < 0 || m > 10 || max_vertices == 0) throw std::invalid_argument("kc_sample: bad level or vertex count");
  const std::size_t side = (std::size_t{1} << m) + 1;
  const std::size_t n = side * side;
  // Number of non-empty subsets of size <= max_vertices, capped.
  constexpr double kCap = double(1 << 22);
  double total = 0, term = 1;
  for (std::size_t j = 1; j <= std::min(max_vertices, n); ++j) {
    term = term * double(n - j + 1) / double(j);
    total += term;
  }
  if (total > kCap) throw SearchExhausted("kc_sample: more than 2^22 subsets");
  std::vector<DyadicVector> grid;
  for (std::size_t i = 0; i < side; ++i) {
    for (std::size_t j = 0; j < side; ++j) {
      grid.push_back({Dyadic(mpz_class(static_cast<unsigned long>(i)), m),
                      Dyadic(mpz_class(static_cast<unsigned long>(j)), m)});
    }
  }
  std::set<std::vector<DyadicVector>> seen;
  std::vector<ConvexBody> out;
  std::vector<DyadicVector> pick;
  std::function<void(std::size_t)> walk = [&](std::size_t from) {
    if (!pick.empty()) {
      ConvexBody b = ConvexBody::hull(2, pick);
      if (seen.insert(b.vertices()).second) out.push_back(std::move(b));
    }
    if (pick.size() == max_vertices) return;
    for (std::size_t i = from; i < n; ++i) {
      pick.push_back(grid[i]);
      walk(i + 1);
      pick.pop_back();
    }
  };
  walk(0);
  return out;
}

DyadicInterval pi_enclosure() {
  // floor(pi * 2^64): the leading hexadecimal digits of pi, 3.243F6A8885A308D3...
  const Dyadic lo(mpz_class("3243F6A8885A308D3", 16), 64);
  return {lo, lo + Dyadic::pow2(-64)};
}

ConvexBody regular_polygon(int k, double r, int grid) {
  if (k < 3) throw std::invalid_argument("a polygon needs three sides");
  const int g = std::min(grid, 50);
  const double pi = std::acos(-1.0);
  std::vector<DyadicVector> pts;
  for (int j = 0; j < k; ++j) {
    const double a = 2 * pi * j / k;
    DyadicVector x;
    for (double c : {0.5 + r * std::cos(a), 0.5 + r * std::sin(a)}) {
      x.emplace_back(mpz_class(static_cast<long>(std::llround(std::ldexp(c, g)))), g);
    }
    pts.push_back(std::move(x));
  }
  return ConvexBody::hull(2, pts);
}

IsoperimetricResult isoperimetric(int n, int max_gon, IsoSchedule schedule) {
  if (n < 1) throw std::invalid_argument("precision must be at least 1");
  if (max_gon < 3) throw std::invalid_argument("max-gon must be at least 3");
  const int grid = n + 16;
  const double pi = std::acos(-1.0);
  std::optional<IsoperimetricResult> best;
  std::optional<Dyadic> best_area;
  auto consider = [&](int k, const ConvexBody& body, const DyadicInterval& per) {
    const Dyadic area = to_dyadic_exact(volume(body));
    if (!best_area || *best_area < area) {
      best_area = area;
      best = IsoperimetricResult{DyadicInterval(area), body, k, per};
    }
  };
  for (int k = 3; k <= max_gon; ++k) {
    const double radius = 1.0 / (2.0 * k * std::sin(pi / k));
    auto feasible = [&](double s) -> std::optional<std::pair<ConvexBody, DyadicInterval>> {
      ConvexBody body = regular_polygon(k, radius * s, grid);
      if (body.rank() < 2) return std::nullopt;
      DyadicInterval per = surface(body, grid);
      if (Dyadic(1) < per.hi()) return std::nullopt;
      return std::pair{std::move(body), std::move(per)};
    };
    if (schedule == IsoSchedule::regular) {
      for (double margin = std::ldexp(1.0, -(std::min(grid, 50) - 4)); margin < 1; margin *= 2) {
        if (auto hit = feasible(1 - margin)) {
          consider(k, hit->first, hit->second);
          break;
        }
      }
    } else {
      double lo = 0.5, hi = 1.0;
      auto keep = feasible(lo);
      for (int step = 0; step < 40; ++step) {
        const double mid = (lo + hi) / 2;
        if (auto hit = feasible(mid)) {
          lo = mid;
          keep = std::move(hit);
        } else {
          hi = mid;
        }
      }
      if (keep) consider(k, keep->first, keep->second);
    }
  }
  const mpq_class upper = mpq_class(1) / (4 * pi_enclosure().lo().to_mpq());
  best->enclosure = DyadicInterval(*best_area, enclose(upper, grid).hi());
  return *best;
}

}  // namespace cms
