#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "cms/convex.hpp"
#include "cms/errors.hpp"
#include "cms/frechet.hpp"
#include "cms/functions.hpp"
#include "cms/optimize.hpp"
#include "cms/spaces.hpp"

using namespace cms;
using Json = nlohmann::ordered_json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string approx(const Dyadic& x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x.to_double());
  return buf;
}

Json dyadic_json(const Dyadic& x) { return Json{{"exact", x.to_string()}, {"decimal", approx(x)}}; }

Json interval_json(const DyadicInterval& v) {
  return Json{{"lo", v.lo().to_string()},
              {"hi", v.hi().to_string()},
              {"lo_decimal", approx(v.lo())},
              {"hi_decimal", approx(v.hi())},
              {"width", v.width().to_string()}};
}

Json box_json(const Box& b) {
  Json out = Json::array();
  for (const auto& side : b) out.push_back(side.is_point() ? Json(side.lo().to_string()) : interval_json(side));
  return out;
}

// Human form: one "key: value" line per field, nested objects flattened with dots.
void print_human(const Json& j, const std::string& prefix = "") {
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (it->is_object()) {
      if (it->contains("lo") && it->contains("hi") && it->size() == 5) {
        std::cout << key << ": [" << (*it)["lo"].get<std::string>() << ", " << (*it)["hi"].get<std::string>()
                  << "] ~ [" << (*it)["lo_decimal"].get<std::string>() << ", "
                  << (*it)["hi_decimal"].get<std::string>() << "]\n";
      } else {
        print_human(*it, key);
      }
    } else if (it->is_string()) {
      std::cout << key << ": " << it->get<std::string>() << "\n";
    } else {
      std::cout << key << ": " << it->dump() << "\n";
    }
  }
}

Orientation parse_orientation(const std::string& s) {
  return s == "unoriented" ? Orientation::unoriented : Orientation::oriented;
}

Json run_frechet(const std::string& a_path, const std::string& b_path, int n, const std::string& orient,
                 bool witness) {
  const Curve a = Curve::load(a_path);
  const Curve b = Curve::load(b_path);
  if (a.topology() != b.topology()) throw UsageError("curves must share a topology (path or loop)");
  const bool loop = a.topology() == Topology::loop;
  const auto r = loop ? frechet_loops(a, b, parse_orientation(orient), n)
                      : frechet_paths(a, b, parse_orientation(orient), n);
  Json out{{"topology", loop ? "loop" : "path"}, {"orientation", orient}, {"precision", n},
           {"enclosure", interval_json(r.enclosure)}, {"resolution", r.resolution}, {"reversed", r.reversed}};
  if (loop) out["shift"] = r.shift;
  if (witness) {
    Json c = Json::array();
    for (auto [i, j] : r.witness) c.push_back({i, j});
    out["witness"] = c;
  }
  return out;
}

Json run_spaces_check(const std::string& id, int cover_top, int round_top, int pair_top) {
  const SpacePtr s = space_from_id(id);
  Json out{{"space", s->id()}, {"dimension", s->dimension()}};
  bool ok = true;
  Json cover = Json::array();
  for (int m = 0; m <= cover_top; ++m) {
    const auto rep = covering_check(*s, m, m + (s->dimension() == 1 ? 4 : 2));
    ok = ok && rep.ok;
    cover.push_back({{"m", m}, {"ok", rep.ok}, {"worst_gap", rep.worst_gap.to_string()}});
  }
  out["covering"] = cover;
  Json rounding = Json::array();
  for (int m = 0; m <= round_top; ++m) {
    const auto idx = level_indices(*s, m + 1);
    const Dyadic worst = worst_rounding_error(*s, idx, m);
    const bool good = worst <= Dyadic::pow2(-m - 1);
    ok = ok && good;
    rounding.push_back({{"m", m}, {"ok", good}, {"checked", idx.size()}, {"worst", worst.to_string()}});
  }
  out["rounding"] = rounding;
  if (const auto* p = dynamic_cast<const ProductSpace*>(s.get())) {
    Json pairs = Json::array();
    for (int m = 0; m <= pair_top; ++m) {
      const Index size = p->level_size(m);
      std::vector<bool> seen(size, false);
      bool good = true;
      for (Index u = 0; u < p->left()->level_size(m); ++u) {
        for (Index v = 0; v < p->right()->level_size(m); ++v) {
          const Index w = p->pair(u, v);
          if (w >= size || seen[w] || p->unpair(w) != std::make_pair(u, v)) {
            good = false;
            continue;
          }
          seen[w] = true;
        }
      }
      ok = ok && good;
      pairs.push_back({{"m", m}, {"ok", good}, {"size", size}});
    }
    out["pairing"] = pairs;
  }
  out["ok"] = ok;
  return out;
}

// Exhaustive search over monotone couplings, for the selftest.
Dyadic brute_coupling(const std::vector<DyadicVector>& p, const std::vector<DyadicVector>& q) {
  auto dist = [&](std::size_t i, std::size_t j) {
    Dyadic d;
    for (std::size_t k = 0; k < p[i].size(); ++k) d = max(d, (p[i][k] - q[j][k]).abs());
    return d;
  };
  std::optional<Dyadic> best;
  std::function<void(std::size_t, std::size_t, Dyadic)> walk = [&](std::size_t i, std::size_t j, Dyadic acc) {
    acc = max(acc, dist(i, j));
    if (best && *best <= acc) return;
    if (i + 1 == p.size() && j + 1 == q.size()) {
      best = acc;
      return;
    }
    if (i + 1 < p.size()) walk(i + 1, j, acc);
    if (j + 1 < q.size()) walk(i, j + 1, acc);
    if (i + 1 < p.size() && j + 1 < q.size()) walk(i + 1, j + 1, acc);
  };
  walk(0, 0, Dyadic(0));
  return *best;
}

Dyadic random_dyadic(std::mt19937_64& rng, int bits) {
  return Dyadic(mpz_class(static_cast<unsigned long>(rng() % ((1UL << bits) + 1))), bits);
}

Json run_selftest(std::uint64_t seed, int rounds) {
  std::mt19937_64 rng(seed);
  Json out{{"seed", seed}};
  bool ok = true;
  auto record = [&](const char* name, int checked, int bad) {
    out[name] = {{"checked", checked}, {"violations", bad}};
    ok = ok && bad == 0;
  };

  {  // discrete Fréchet DP against exhaustive couplings
    int bad = 0;
    for (int t = 0; t < rounds; ++t) {
      auto pts = [&](std::size_t count) {
        std::vector<DyadicVector> v(count);
        for (auto& x : v) x = {random_dyadic(rng, 4), random_dyadic(rng, 4)};
        return v;
      };
      const auto p = pts(1 + rng() % 7), q = pts(1 + rng() % 7);
      if (discrete_frechet_value(p, q) != brute_coupling(p, q)) ++bad;
    }
    record("discrete_frechet", rounds, bad);
  }
  {  // covering and rounding on every built-in space
    int checked = 0, bad = 0;
    for (const char* id : {"interval", "circle", "cantor", "cube:2", "cube:3"}) {
      const SpacePtr s = space_from_id(id);
      for (int m = 0; m <= 4; ++m) {
        ++checked;
        if (!covering_check(*s, m, m + 2).ok) ++bad;
        const auto idx = level_indices(*s, m + 1);
        if (Dyadic::pow2(-m - 1) < worst_rounding_error(*s, idx, m)) ++bad;
      }
    }
    record("spaces", checked, bad);
  }
  {  // point names: consistency and rounding of located points
    int bad = 0;
    const SpacePtr sq = cube(2);
    for (int t = 0; t < rounds; ++t) {
      const PointName x = PointName::at(sq, {random_dyadic(rng, 12), random_dyadic(rng, 12)});
      for (int m = 0; m <= 8; ++m) {
        if (Dyadic::pow2(-m) + Dyadic::pow2(-9) < sq->distance(x.query(m), x.query(9))) ++bad;
      }
    }
    record("point_names", rounds, bad);
  }
  {  // graph evaluation against direct evaluation
    int bad = 0, checked = 0;
    const SpacePtr I = unit_interval();
    for (int t = 0; checked < rounds && t < 50 * rounds; ++t) {
      const Expr e = Expr::binary(Expr::Op::min, Expr::constant(Dyadic(1)),
                                  Expr::binary(Expr::Op::max, Expr::constant(Dyadic(0)),
                                               Expr::binary(Expr::Op::mul, Expr::constant(random_dyadic(rng, 3)),
                                                            Expr::binary(Expr::Op::sub, Expr::coord(0),
                                                                         Expr::constant(random_dyadic(rng, 3))))));
      const FunctionObject f = from_expr(e, space_as_name(I), Window{Dyadic(0), Dyadic(1)});
      const GraphName g = graph_from_function(f);
      ++checked;
      const PointName x = PointName::at(I, {random_dyadic(rng, 10)});
      const Dyadic a = I->coordinates(eval_from_graph(g, x, 7))[0];
      const Dyadic b = e.eval(x.coordinates(30));
      if (Dyadic::pow2(-6) < (a - b).abs()) ++bad;
    }
    record("graph_evaluation", checked, bad);
  }
  {  // volume is Lipschitz in the Hausdorff distance
    int bad = 0;
    for (int t = 0; t < rounds; ++t) {
      auto body = [&] {
        std::vector<DyadicVector> v;
        for (int k = 0; k < 5; ++k) v.push_back({random_dyadic(rng, 6), random_dyadic(rng, 6)});
        return ConvexBody::hull(2, v);
      };
      const ConvexBody a = body(), b = body();
      const mpq_class dv = abs(volume(a) - volume(b));
      const Dyadic h = hausdorff_convex(a, b, 20).hi();
      if (4 * h.to_mpq() + Dyadic::pow2(-16).to_mpq() < dv) ++bad;
    }
    record("volume_lipschitz", rounds, bad);
  }
  {  // optimizer enclosures contain the best feasible grid value
    int bad = 0;
    for (int t = 0; t < rounds; ++t) {
      const Dyadic c = random_dyadic(rng, 4);
      const OptProblem p(1, Expr::binary(Expr::Op::sub, Expr::constant(Dyadic(1)),
                                         Expr::unary(Expr::Op::abs, Expr::binary(Expr::Op::sub, Expr::coord(0),
                                                                                 Expr::constant(c)))),
                         Expr::binary(Expr::Op::sub, Expr::coord(0), Expr::constant(Dyadic(1).halve())));
      // Optimum 1 - max(0, c - 1/2).
      const Dyadic optimum = Dyadic(1) - max(Dyadic(0), c - Dyadic(1).halve());
      const auto r = maximize(p, 10);
      if (!r.enclosure.contains(optimum)) ++bad;
    }
    record("optimize", rounds, bad);
  }
  out["ok"] = ok;
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cms: certified computations on presented compact metric spaces"};
  app.require_subcommand(1);
  app.fallthrough();
  bool json = false;
  std::uint64_t seed = 1;
  app.add_flag("--json", json, "Emit one JSON record instead of key: value lines");
  app.add_option("--seed", seed, "Seed for randomized suites")->capture_default_str();

  std::function<Json()> action;
  auto precision = [](CLI::App* sub, int& n, int deflt) {
    n = deflt;
    sub->add_option("--precision,-n", n, "Target width exponent n (width <= 2^-n)")
        ->check(CLI::Range(1, 200))
        ->capture_default_str();
  };

  // frechet
  std::string a_path, b_path, orientation = "oriented";
  bool witness = false;
  int fr_n = 8;
  auto* fr = app.add_subcommand("frechet", "Fréchet distance between two curve files");
  fr->add_option("--a", a_path, "First curve (JSON)")->required()->check(CLI::ExistingFile);
  fr->add_option("--b", b_path, "Second curve (JSON)")->required()->check(CLI::ExistingFile);
  precision(fr, fr_n, 8);
  fr->add_option("--orientation", orientation)->check(CLI::IsMember({"oriented", "unoriented"}))->capture_default_str();
  fr->add_flag("--witness", witness, "Print the witness coupling");
  fr->callback([&] { action = [&] { return run_frechet(a_path, b_path, fr_n, orientation, witness); }; });

  // hausdorff
  std::string ha, hb;
  int h_n = 16;
  auto* hd = app.add_subcommand("hausdorff", "Hausdorff distance between two convex bodies");
  hd->add_option("--a", ha)->required()->check(CLI::ExistingFile);
  hd->add_option("--b", hb)->required()->check(CLI::ExistingFile);
  precision(hd, h_n, 16);
  hd->callback([&] {
    action = [&] {
      const auto v = hausdorff_convex(ConvexBody::load(ha), ConvexBody::load(hb), h_n);
      return Json{{"precision", h_n}, {"enclosure", interval_json(v)}};
    };
  });

  // volume
  std::string body_path;
  auto* vol = app.add_subcommand("volume", "Exact volume of a convex body");
  vol->add_option("--body", body_path)->required()->check(CLI::ExistingFile);
  vol->callback([&] {
    action = [&] {
      const ConvexBody b = ConvexBody::load(body_path);
      const mpq_class v = volume(b);
      return Json{{"dim", b.dim()}, {"volume", v.get_str()}, {"decimal", std::to_string(v.get_d())}};
    };
  });

  // surface
  int s_n = 16;
  auto* surf = app.add_subcommand("surface", "Perimeter (2D) or surface area (3D) of a convex body");
  surf->add_option("--body", body_path)->required()->check(CLI::ExistingFile);
  precision(surf, s_n, 16);
  surf->callback([&] {
    action = [&] {
      const ConvexBody b = ConvexBody::load(body_path);
      return Json{{"dim", b.dim()}, {"precision", s_n}, {"enclosure", interval_json(surface(b, s_n))}};
    };
  });

  // isoperimetric
  int iso_n = 10, max_gon = 64;
  std::string schedule = "refined";
  auto* iso = app.add_subcommand("isoperimetric", "Max area at perimeter <= 1 over polygons");
  precision(iso, iso_n, 10);
  iso->add_option("--max-gon", max_gon)->check(CLI::Range(3, 1 << 12))->capture_default_str();
  iso->add_option("--schedule", schedule)->check(CLI::IsMember({"regular", "refined"}))->capture_default_str();
  iso->callback([&] {
    action = [&] {
      const auto r = isoperimetric(iso_n, max_gon, schedule == "regular" ? IsoSchedule::regular : IsoSchedule::refined);
      return Json{{"precision", iso_n}, {"max_gon", max_gon}, {"enclosure", interval_json(r.enclosure)},
                  {"sides", r.sides}, {"perimeter", interval_json(r.perimeter)}};
    };
  });

  // optimize
  int dim = 1, opt_n = 10;
  std::size_t budget = std::size_t{1} << 20;
  std::string objective, constraint, order = "best-first";
  auto* opt = app.add_subcommand("optimize", "Certified max of an objective under a constraint on [0,1]^d");
  opt->add_option("--dim", dim)->check(CLI::Range(1, 16))->capture_default_str();
  opt->add_option("--objective", objective, "Expression with range in [0,1]")->required();
  opt->add_option("--constraint", constraint, "Feasible where <= 0; range in [-1,1]")->required();
  precision(opt, opt_n, 10);
  opt->add_option("--budget", budget, "Cell budget")->check(CLI::PositiveNumber)->capture_default_str();
  opt->add_option("--order", order)->check(CLI::IsMember({"best-first", "breadth-first"}))->capture_default_str();
  opt->callback([&] {
    action = [&] {
      const OptProblem p(dim, Expr::parse(objective), Expr::parse(constraint));
      const auto r = maximize(p, opt_n, budget, order == "breadth-first" ? CellOrder::breadth_first : CellOrder::best_first);
      return Json{{"objective", p.objective.to_string()}, {"constraint", p.constraint.to_string()},
                  {"precision", opt_n}, {"status", to_string(r.status)}, {"enclosure", interval_json(r.enclosure)},
                  {"witness", box_json(r.witness)}, {"cells", r.cells}};
    };
  });

  // eval
  std::string expr_text;
  std::vector<std::string> at;
  int ev_n = 8;
  auto* ev = app.add_subcommand("eval", "Evaluate an expression function through its graph name");
  ev->add_option("--expr", expr_text, "Expression in x0..x(d-1)")->required();
  ev->add_option("--at", at, "Point coordinates as dyadic strings")->required();
  precision(ev, ev_n, 8);
  ev->callback([&] {
    action = [&] {
      const Expr e = Expr::parse(expr_text);
      const int d = static_cast<int>(at.size());
      if (e.arity() > d) throw UsageError("--at needs one coordinate per variable");
      DyadicVector x;
      for (const auto& s : at) x.push_back(Dyadic::parse(s));
      const SpacePtr dom = cube(d);
      const Window w = window_for(e.eval_interval(Box(d, DyadicInterval(Dyadic(0), Dyadic(1)))));
      const FunctionObject f = from_expr(e, space_as_name(dom), w);
      const GraphName g = graph_from_function(f);
      // Codomain accuracy 2^-(n + k) in unit coordinates gives 2^-n after rescaling by 2^k.
      int k = 0;
      while (Dyadic::pow2(k) < w.width()) ++k;
      const Index v = eval_from_graph(g, PointName::at(dom, x), ev_n + k);
      const Dyadic value = w.from_unit(unit_interval()->coordinates(v)[0]);
      return Json{{"expr", e.to_string()}, {"precision", ev_n}, {"value", dyadic_json(value)},
                  {"direct", dyadic_json(e.eval(x))}};
    };
  });

  // spaces-check
  std::string space_id = "interval";
  int cover_top = 10, round_top = 8, pair_top = 6;
  auto* sc = app.add_subcommand("spaces-check", "Covering, rounding and pairing validators for a space");
  sc->add_option("--space", space_id, "interval, circle, cantor, cube:d or product(a,b)")->capture_default_str();
  sc->add_option("--covering-level", cover_top)->check(CLI::Range(0, 20))->capture_default_str();
  sc->add_option("--rounding-level", round_top)->check(CLI::Range(0, 20))->capture_default_str();
  sc->add_option("--pairing-level", pair_top)->check(CLI::Range(0, 12))->capture_default_str();
  sc->callback([&] { action = [&] { return run_spaces_check(space_id, cover_top, round_top, pair_top); }; });

  // selftest
  int rounds = 20;
  auto* st = app.add_subcommand("selftest", "Randomized property suite");
  st->add_option("--rounds", rounds)->check(CLI::Range(1, 10000))->capture_default_str();
  st->callback([&] { action = [&] { return run_selftest(seed, rounds); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 2;
  }

  try {
    const Json out = action();
    if (json) {
      std::cout << out.dump() << "\n";
    } else {
      print_human(out);
    }
    if (out.contains("ok") && !out["ok"].get<bool>()) return 1;
    return 0;
  } catch (const ContractViolation& e) {
    std::cerr << "contract violation: " << e.what() << "\n";
    return 1;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "usage: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
