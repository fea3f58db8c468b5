#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cms/convex.hpp"
#include "cms/errors.hpp"
#include "cms/frechet.hpp"
#include "cms/functions.hpp"
#include "cms/optimize.hpp"
#include "cms/spaces.hpp"

namespace py = pybind11;
using namespace cms;

namespace {

// Values cross the boundary as exact rational strings ("p/q"), which
// fractions.Fraction parses directly.
std::string rational(const Dyadic& x) { return x.to_mpq().get_str(); }

py::dict interval(const DyadicInterval& v) {
  py::dict d;
  d["lo"] = rational(v.lo());
  d["hi"] = rational(v.hi());
  return d;
}

std::vector<DyadicVector> points(const std::vector<std::vector<std::string>>& rows) {
  std::vector<DyadicVector> out;
  for (const auto& row : rows) {
    DyadicVector x;
    for (const auto& s : row) x.push_back(Dyadic::parse(s));
    out.push_back(std::move(x));
  }
  return out;
}

Orientation orientation(const std::string& s) {
  if (s == "oriented") return Orientation::oriented;
  if (s == "unoriented") return Orientation::unoriented;
  throw std::invalid_argument("orientation must be 'oriented' or 'unoriented'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Certified computations on presented compact metric spaces";

  static py::exception<ContractViolation> contract(m, "ContractViolation", PyExc_RuntimeError);
  static py::exception<SearchExhausted> exhausted(m, "SearchExhausted", PyExc_RuntimeError);
  static py::exception<EmptyResult> empty(m, "EmptyResult", PyExc_RuntimeError);
  static py::exception<ParseError> parse(m, "ParseError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ContractViolation& e) {
      contract(e.what());
    } catch (const SearchExhausted& e) {
      exhausted(e.what());
    } catch (const EmptyResult& e) {
      empty(e.what());
    } catch (const ParseError& e) {
      parse(e.what());
    }
  });

  m.def("canonical_expr", [](const std::string& text) { return Expr::parse(text).to_string(); }, py::arg("text"));
  m.def(
      "eval_expr",
      [](const std::string& text, const std::vector<std::string>& point) {
        DyadicVector x;
        for (const auto& s : point) x.push_back(Dyadic::parse(s));
        return rational(Expr::parse(text).eval(x));
      },
      py::arg("expr"), py::arg("point"));
  m.def(
      "eval_from_graph",
      [](const std::string& text, const std::vector<std::string>& point, int n) {
        const Expr e = Expr::parse(text);
        const int d = static_cast<int>(point.size());
        if (e.arity() > d) throw std::invalid_argument("point needs one coordinate per variable");
        DyadicVector x;
        for (const auto& s : point) x.push_back(Dyadic::parse(s));
        const SpacePtr dom = cube(d);
        const Window w = window_for(e.eval_interval(unit_box(d)));
        int k = 0;
        while (Dyadic::pow2(k) < w.width()) ++k;
        const GraphName g = graph_from_function(from_expr(e, space_as_name(dom), w));
        const Index v = eval_from_graph(g, PointName::at(dom, x), n + k);
        return rational(w.from_unit(unit_interval()->coordinates(v)[0]));
      },
      py::arg("expr"), py::arg("point"), py::arg("precision"),
      "Value of the expression at the point read off its graph name, within 2^-precision.");

  m.def(
      "covering_check",
      [](const std::string& space, int level, int probe_level) {
        const auto r = covering_check(*space_from_id(space), level, probe_level);
        return py::make_tuple(r.ok, rational(r.worst_gap));
      },
      py::arg("space"), py::arg("level"), py::arg("probe_level"));
  m.def(
      "worst_rounding_error",
      [](const std::string& space, int level, int from_level) {
        const SpacePtr s = space_from_id(space);
        const auto idx = level_indices(*s, from_level);
        return rational(worst_rounding_error(*s, idx, level));
      },
      py::arg("space"), py::arg("level"), py::arg("from_level"));

  m.def(
      "discrete_frechet",
      [](const std::vector<std::vector<std::string>>& p, const std::vector<std::vector<std::string>>& q) {
        const auto r = discrete_frechet(points(p), points(q));
        return py::make_tuple(rational(r.value), r.coupling);
      },
      py::arg("p"), py::arg("q"));
  m.def(
      "frechet",
      [](const std::string& a_json, const std::string& b_json, int precision, const std::string& orient) {
        const Curve a = Curve::parse_json(a_json), b = Curve::parse_json(b_json);
        if (a.topology() != b.topology()) throw std::invalid_argument("curves must share a topology");
        const auto r = a.topology() == Topology::loop ? frechet_loops(a, b, orientation(orient), precision)
                                                      : frechet_paths(a, b, orientation(orient), precision);
        py::dict d = interval(r.enclosure);
        d["resolution"] = r.resolution;
        d["reversed"] = r.reversed;
        d["shift"] = r.shift;
        return d;
      },
      py::arg("a"), py::arg("b"), py::arg("precision"), py::arg("orientation") = "oriented",
      "Fréchet enclosure between two curves given as JSON text.");

  m.def(
      "hull",
      [](std::size_t dim, const std::vector<std::vector<std::string>>& pts) {
        return ConvexBody::hull(dim, points(pts)).to_json();
      },
      py::arg("dim"), py::arg("points"), "Convex hull as body JSON text.");
  m.def("volume", [](const std::string& body) { return volume(ConvexBody::parse_json(body)).get_str(); },
        py::arg("body"));
  m.def(
      "surface", [](const std::string& body, int k) { return interval(surface(ConvexBody::parse_json(body), k)); },
      py::arg("body"), py::arg("precision"));
  m.def(
      "hausdorff",
      [](const std::string& a, const std::string& b, int k) {
        return interval(hausdorff_convex(ConvexBody::parse_json(a), ConvexBody::parse_json(b), k));
      },
      py::arg("a"), py::arg("b"), py::arg("precision"));
  m.def(
      "isoperimetric",
      [](int n, int max_gon, const std::string& schedule) {
        const auto r = isoperimetric(n, max_gon, schedule == "regular" ? IsoSchedule::regular : IsoSchedule::refined);
        py::dict d = interval(r.enclosure);
        d["sides"] = r.sides;
        d["best"] = r.best.to_json();
        return d;
      },
      py::arg("precision"), py::arg("max_gon"), py::arg("schedule") = "refined");

  m.def(
      "maximize",
      [](int dim, const std::string& objective, const std::string& constraint, int precision, std::size_t budget,
         const std::string& order) {
        const OptProblem p(dim, Expr::parse(objective), Expr::parse(constraint));
        const auto r = maximize(p, precision, budget,
                                order == "breadth-first" ? CellOrder::breadth_first : CellOrder::best_first);
        py::dict d = interval(r.enclosure);
        d["status"] = to_string(r.status);
        d["cells"] = r.cells;
        py::list witness;
        for (const auto& side : r.witness) witness.append(py::make_tuple(rational(side.lo()), rational(side.hi())));
        d["witness"] = witness;
        return d;
      },
      py::arg("dim"), py::arg("objective"), py::arg("constraint"), py::arg("precision"),
      py::arg("budget") = std::size_t{1} << 20, py::arg("order") = "best-first");
}
