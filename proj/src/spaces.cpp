#include "cms/spaces.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

#include "cms/errors.hpp"

namespace cms {

namespace {

std::int64_t to_int64(const mpz_class& z) {
  if (!z.fits_slong_p()) throw std::overflow_error("grid position out of range");
  return z.get_si();
}

// Grid positions k in [ceil(lo * 2^bits), floor(hi * 2^bits)] clamped to [0, 2^bits).
std::pair<std::int64_t, std::int64_t> grid_range(const Dyadic& lo, const Dyadic& hi, int bits) {
  const std::int64_t top = (std::int64_t{1} << bits) - 1;
  const Dyadic zero;
  const Dyadic one(1);
  const std::int64_t a = lo < zero ? 0 : (one < lo ? top + 1 : to_int64(lo.ceil_scaled(bits)));
  const std::int64_t b = hi < zero ? -1 : (one < hi ? top : to_int64(hi.floor_scaled(bits)));
  return {std::max<std::int64_t>(a, 0), std::min(b, top)};
}

void check_bits(int bits) {
  if (bits > 63) throw std::overflow_error("level exceeds 63 index bits");
}

}  // namespace

Index PresentedSpace::level_size(int m) const {
  const int bits = level_exponent(m);
  check_bits(bits);
  return Index{1} << bits;
}

int PresentedSpace::level_of(Index u) const {
  int m = 0;
  while (level_exponent(m) < 64 && u >= (Index{1} << level_exponent(m))) ++m;
  return m;
}

DyadicInterval PresentedSpace::distance_enclosure(Index u, Index v, int /*k*/) const {
  return DyadicInterval(distance(u, v));
}

Dyadic PresentedSpace::distance(Index u, Index v) const {
  const DyadicVector a = coordinates(u);
  const DyadicVector b = coordinates(v);
  return point_distance(a, b);
}

Dyadic PresentedSpace::covering_gap(int m, int probe_level) const {
  const Dyadic radius = Dyadic::pow2(-m);
  std::vector<Index> level;  // filled lazily for the exhaustive fallback
  Dyadic worst;
  const Index probes = level_size(probe_level);
  for (Index p = 0; p < probes; ++p) {
    const DyadicVector x = coordinates(p);
    std::vector<Index> near = neighbors(x, radius, m);
    if (near.empty()) {
      if (level.empty()) level = level_indices(*this, m);
      near = level;
    }
    std::optional<Dyadic> best;
    for (Index q : near) {
      const DyadicVector y = coordinates(q);
      Dyadic d = point_distance(x, y);
      if (!best || d < *best) best = std::move(d);
    }
    if (best && worst < *best) worst = *best;
  }
  return worst;
}

// ---------------------------------------------------------------------------
// One-dimensional grids

Dyadic GridSpace1D::coordinate(Index u) {
  if (u == 0) return {};
  const int j = std::bit_width(u) - 1;
  const Index a = u - (Index{1} << j);
  return Dyadic(mpz_class(static_cast<unsigned long>(2 * a + 1)), j + 1);
}

Index GridSpace1D::index_of_grid(std::uint64_t k, int bits) {
  if (k == 0) return 0;
  const int t = std::countr_zero(k);
  const std::uint64_t c = k >> t;
  const int s = bits - t;
  return (Index{1} << (s - 1)) + (c - 1) / 2;
}

Index GridSpace1D::index_of(const Dyadic& x) {
  if (x.is_zero()) return 0;
  if (x.sign() < 0 || x.exponent() < 1 || x.exponent() > 63) {
    throw std::invalid_argument("index_of: " + x.to_string() + " is not a grid point of [0,1)");
  }
  return index_of_grid(x.mantissa().get_ui(), static_cast<int>(x.exponent()));
}

Index GridSpace1D::locate(std::span<const Dyadic> coords, int m) const {
  const int bits = level_exponent(m);
  check_bits(bits);
  return index_of_grid(static_cast<std::uint64_t>(nearest_grid(coords[0], m)), bits);
}

std::vector<Index> GridSpace1D::neighbors(std::span<const Dyadic> coords, const Dyadic& radius,
                                          int m) const {
  const int bits = level_exponent(m);
  check_bits(bits);
  const auto [a, b] = grid_range(coords[0] - radius, coords[0] + radius, bits);
  std::vector<Index> out;
  for (std::int64_t k = a; k <= b; ++k) {
    const Index u = index_of_grid(static_cast<std::uint64_t>(k), bits);
    if (in_domain(u)) out.push_back(u);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Index> GridSpace1D::indices_in_box(std::span<const Dyadic> lo,
                                               std::span<const Dyadic> hi, int m) const {
  const int bits = level_exponent(m);
  check_bits(bits);
  const auto [a, b] = grid_range(lo[0], hi[0], bits);
  std::vector<Index> out;
  for (std::int64_t k = a; k <= b; ++k) {
    const Index u = index_of_grid(static_cast<std::uint64_t>(k), bits);
    if (in_domain(u)) out.push_back(u);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// The closed-form rounding of the interval enumeration: an index on a finer
// level, u = a + 2^(m+n), goes to 2^m + round((2a+1)/2^(n+1) - 1/2), which is
// 2^m + floor(a / 2^n) because the argument is never a half-integer.
Index UnitInterval::round(Index u, int m) const {
  check_bits(m + 1);
  if (u < (Index{1} << (m + 1))) return u;
  const int j = std::bit_width(u) - 1;  // j = m + n with n >= 1
  const Index a = u - (Index{1} << j);
  const int n = j - m;
  return (Index{1} << m) + (a >> n);
}

std::int64_t UnitInterval::nearest_grid(const Dyadic& x, int m) const {
  const int bits = level_exponent(m);
  const std::int64_t top = (std::int64_t{1} << bits) - 1;
  if (x.sign() <= 0) return 0;
  if (Dyadic(1) <= x) return top;
  return std::min(to_int64(x.scaled(bits).round_to(0).floor_scaled(0)), top);
}

Dyadic Circle::distance_1d(const Dyadic& a, const Dyadic& b) const {
  Dyadic d = (a - b).abs();
  Dyadic wrap = Dyadic(1) - d;
  return min(d, wrap);
}

std::int64_t Circle::nearest_grid(const Dyadic& x, int m) const {
  const int bits = level_exponent(m);
  const std::int64_t size = std::int64_t{1} << bits;
  const Dyadic r = x.scaled(bits).round_to(0);
  std::int64_t k = to_int64(r.floor_scaled(0));
  k %= size;
  if (k < 0) k += size;
  return k;
}

Index Circle::round(Index u, int m) const {
  const DyadicVector x = coordinates(u);
  return locate(x, m);
}

std::vector<Index> Circle::neighbors(std::span<const Dyadic> coords, const Dyadic& radius,
                                     int m) const {
  const int bits = level_exponent(m);
  check_bits(bits);
  const std::int64_t size = std::int64_t{1} << bits;
  std::vector<Index> out;
  if (Dyadic(1) <= radius.twice()) {
    for (std::int64_t k = 0; k < size; ++k) {
      const Index u = index_of_grid(static_cast<std::uint64_t>(k), bits);
      if (in_domain(u)) out.push_back(u);
    }
  } else {
    const std::int64_t a = to_int64((coords[0] - radius).ceil_scaled(bits));
    const std::int64_t b = to_int64((coords[0] + radius).floor_scaled(bits));
    for (std::int64_t k = a; k <= b; ++k) {
      std::int64_t kk = k % size;
      if (kk < 0) kk += size;
      const Index u = index_of_grid(static_cast<std::uint64_t>(kk), bits);
      if (in_domain(u)) out.push_back(u);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Dyadic Cantor::distance_1d(const Dyadic& a, const Dyadic& b) const {
  if (a == b) return {};
  const std::int64_t e = std::max<std::int64_t>({a.exponent(), b.exponent(), 0});
  const mpz_class x = a.floor_scaled(e);
  const mpz_class y = b.floor_scaled(e);
  mpz_class diff;
  mpz_xor(diff.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t());
  const auto highest = static_cast<std::int64_t>(mpz_sizeinbase(diff.get_mpz_t(), 2)) - 1;
  const std::int64_t position = e - 1 - highest;  // first differing symbol
  return Dyadic::pow2(-position);
}

std::int64_t Cantor::nearest_grid(const Dyadic& x, int m) const {
  const int bits = level_exponent(m);
  const std::int64_t top = (std::int64_t{1} << bits) - 1;
  if (x.sign() <= 0) return 0;
  return std::min(to_int64(x.floor_scaled(bits)), top);
}

Index Cantor::round(Index u, int m) const {
  const DyadicVector x = coordinates(u);
  return locate(x, m);
}

std::vector<Index> Cantor::neighbors(std::span<const Dyadic> coords, const Dyadic& radius,
                                     int m) const {
  const int bits = level_exponent(m);
  check_bits(bits);
  const Dyadic& x = coords[0];
  // Points within radius share the first p symbols with x, p minimal with 2^-p <= radius.
  int p = 0;
  if (radius.sign() <= 0) {
    p = bits;
  } else {
    while (p < bits && radius < Dyadic::pow2(-p)) ++p;
  }
  const int shared = std::min(p, bits);
  const std::int64_t prefix = to_int64(x.floor_scaled(shared));
  const std::int64_t first = prefix << (bits - shared);
  const std::int64_t count = std::int64_t{1} << (bits - shared);
  std::vector<Index> out;
  for (std::int64_t k = first; k < first + count; ++k) {
    const Dyadic y(mpz_class(static_cast<long>(k)), bits);
    if (distance_1d(x, y) <= radius) {
      const Index u = index_of_grid(static_cast<std::uint64_t>(k), bits);
      if (in_domain(u)) out.push_back(u);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Products

ProductSpace::ProductSpace(SpacePtr left, SpacePtr right)
    : left_(std::move(left)), right_(std::move(right)) {
  if (!left_ || !right_) throw std::invalid_argument("ProductSpace: null factor");
}

std::string ProductSpace::id() const {
  return "product(" + left_->id() + "," + right_->id() + ")";
}

namespace {

// Level sizes with the convention that "level -1" holds only index 0.
Index size_at(const PresentedSpace& s, int m) { return m < 0 ? 1 : s.level_size(m); }
int factor_level(const PresentedSpace& s, Index u) { return u == 0 ? -1 : s.level_of(u); }

}  // namespace

// Level m is laid out after level m-1 in two blocks: first the pairs whose X
// part is new at level m and whose Y part is old, then every X part of level m
// paired with the Y parts new at level m.
Index ProductSpace::pair(Index u, Index v) const {
  const int lu = factor_level(*left_, u);
  const int lv = factor_level(*right_, v);
  const int m = std::max(lu, lv);
  if (m < 0) return 0;
  check_bits(level_exponent(m));
  const Index p_prev = size_at(*left_, m - 1);
  const Index q_prev = size_at(*right_, m - 1);
  const Index p = size_at(*left_, m);
  const Index base = p_prev * q_prev;
  const Index new_x = p - p_prev;
  if (lv < m) return base + new_x * v + (u - p_prev);
  return base + new_x * q_prev + p * (v - q_prev) + u;
}

std::pair<Index, Index> ProductSpace::unpair(Index w) const {
  if (w == 0) return {0, 0};
  int m = 0;
  while (w >= level_size(m)) ++m;
  const Index p_prev = size_at(*left_, m - 1);
  const Index q_prev = size_at(*right_, m - 1);
  const Index p = size_at(*left_, m);
  const Index new_x = p - p_prev;
  Index offset = w - p_prev * q_prev;
  const Index first_block = new_x * q_prev;
  if (offset < first_block) return {p_prev + offset % new_x, offset / new_x};
  offset -= first_block;
  return {offset % p, q_prev + offset / p};
}

bool ProductSpace::in_domain(Index w) const {
  const auto [u, v] = unpair(w);
  return left_->in_domain(u) && right_->in_domain(v);
}

DyadicVector ProductSpace::coordinates(Index w) const {
  const auto [u, v] = unpair(w);
  DyadicVector out = left_->coordinates(u);
  DyadicVector tail = right_->coordinates(v);
  out.insert(out.end(), std::make_move_iterator(tail.begin()), std::make_move_iterator(tail.end()));
  return out;
}

Dyadic ProductSpace::point_distance(std::span<const Dyadic> a, std::span<const Dyadic> b) const {
  const std::size_t k = left_->dimension();
  Dyadic dx = left_->point_distance(a.first(k), b.first(k));
  Dyadic dy = right_->point_distance(a.subspan(k), b.subspan(k));
  return max(dx, dy);
}

Index ProductSpace::round(Index w, int m) const {
  const auto [u, v] = unpair(w);
  return pair(left_->round(u, m), right_->round(v, m));
}

Index ProductSpace::locate(std::span<const Dyadic> coords, int m) const {
  const std::size_t k = left_->dimension();
  return pair(left_->locate(coords.first(k), m), right_->locate(coords.subspan(k), m));
}

std::vector<Index> ProductSpace::neighbors(std::span<const Dyadic> coords, const Dyadic& radius,
                                           int m) const {
  const std::size_t k = left_->dimension();
  const std::vector<Index> xs = left_->neighbors(coords.first(k), radius, m);
  const std::vector<Index> ys = right_->neighbors(coords.subspan(k), radius, m);
  std::vector<Index> out;
  out.reserve(xs.size() * ys.size());
  for (Index u : xs) {
    for (Index v : ys) out.push_back(pair(u, v));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Index> ProductSpace::indices_in_box(std::span<const Dyadic> lo,
                                                std::span<const Dyadic> hi, int m) const {
  const std::size_t k = left_->dimension();
  const std::vector<Index> xs = left_->indices_in_box(lo.first(k), hi.first(k), m);
  const std::vector<Index> ys = right_->indices_in_box(lo.subspan(k), hi.subspan(k), m);
  std::vector<Index> out;
  out.reserve(xs.size() * ys.size());
  for (Index u : xs) {
    for (Index v : ys) out.push_back(pair(u, v));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<int> ProductSpace::separation(int m) const {
  const auto a = left_->separation(m);
  const auto b = right_->separation(m);
  if (!a || !b) return std::nullopt;
  return std::max(*a, *b);
}

// Under the max metric the nearest level-m point to (x, y) is the pair of the
// nearest points, so the worst gap over a product probe grid is the larger of
// the factor gaps.
Dyadic ProductSpace::covering_gap(int m, int probe_level) const {
  return max(left_->covering_gap(m, probe_level), right_->covering_gap(m, probe_level));
}

// ---------------------------------------------------------------------------

SpacePtr unit_interval() {
  static const SpacePtr instance = std::make_shared<UnitInterval>();
  return instance;
}

SpacePtr circle() {
  static const SpacePtr instance = std::make_shared<Circle>();
  return instance;
}

SpacePtr cantor() {
  static const SpacePtr instance = std::make_shared<Cantor>();
  return instance;
}

SpacePtr product(SpacePtr left, SpacePtr right) {
  return std::make_shared<ProductSpace>(std::move(left), std::move(right));
}

namespace {

class CubeSpace : public ProductSpace {
 public:
  CubeSpace(SpacePtr left, SpacePtr right, int d)
      : ProductSpace(std::move(left), std::move(right)), d_(d) {}
  std::string id() const override { return "cube:" + std::to_string(d_); }

 private:
  int d_;
};

}  // namespace

SpacePtr cube(int d) {
  if (d < 1) throw std::invalid_argument("cube: dimension must be positive");
  SpacePtr out = unit_interval();
  for (int i = 2; i <= d; ++i) out = std::make_shared<CubeSpace>(out, unit_interval(), i);
  return out;
}

namespace {

SpacePtr parse_space(std::string_view text, std::size_t& pos) {
  auto skip = [&] {
    while (pos < text.size() && text[pos] == ' ') ++pos;
  };
  skip();
  auto starts = [&](std::string_view word) { return text.substr(pos, word.size()) == word; };
  if (starts("interval")) {
    pos += 8;
    return unit_interval();
  }
  if (starts("circle")) {
    pos += 6;
    return circle();
  }
  if (starts("cantor")) {
    pos += 6;
    return cantor();
  }
  if (starts("cube:")) {
    pos += 5;
    const std::size_t start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (start == pos) throw ParseError("expected cube dimension", pos);
    return cube(std::stoi(std::string(text.substr(start, pos - start))));
  }
  if (starts("product(")) {
    pos += 8;
    SpacePtr a = parse_space(text, pos);
    skip();
    if (pos >= text.size() || text[pos] != ',') throw ParseError("expected ','", pos);
    ++pos;
    SpacePtr b = parse_space(text, pos);
    skip();
    if (pos >= text.size() || text[pos] != ')') throw ParseError("expected ')'", pos);
    ++pos;
    return product(std::move(a), std::move(b));
  }
  throw ParseError("unknown space id", pos);
}

}  // namespace

SpacePtr space_from_id(std::string_view id) {
  std::size_t pos = 0;
  SpacePtr out = parse_space(id, pos);
  if (pos != id.size()) throw ParseError("trailing characters in space id", pos);
  return out;
}

CoveringReport covering_check(const PresentedSpace& space, int m, int probe_level) {
  if (probe_level <= m) throw std::invalid_argument("covering_check: probe_level must exceed m");
  CoveringReport report;
  report.worst_gap = space.covering_gap(m, probe_level);
  report.ok = report.worst_gap <= Dyadic::pow2(-m - 1) + Dyadic::pow2(-probe_level);
  return report;
}

int entropy_upper(const PresentedSpace& space, int n) { return space.level_exponent(n); }

Dyadic worst_rounding_error(const PresentedSpace& space, std::span<const Index> indices, int m) {
  const Index size = space.level_size(m);
  Dyadic worst;
  for (Index u : indices) {
    const Index r = space.round(u, m);
    if (r >= size) {
      throw ContractViolation("rounding left level " + std::to_string(m) + " for index " +
                              std::to_string(u));
    }
    Dyadic d = space.distance(r, u);
    if (worst < d) worst = std::move(d);
  }
  return worst;
}

std::vector<Index> level_indices(const PresentedSpace& space, int m) {
  const Index size = space.level_size(m);
  std::vector<Index> out;
  out.reserve(size);
  for (Index u = 0; u < size; ++u) {
    if (space.in_domain(u)) out.push_back(u);
  }
  return out;
}

}  // namespace cms
