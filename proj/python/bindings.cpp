#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "obddproof/bdd.hpp"
#include "obddproof/bounds.hpp"
#include "obddproof/cnf.hpp"
#include "obddproof/oracle.hpp"
#include "obddproof/order.hpp"
#include "obddproof/refutation.hpp"

namespace py = pybind11;
using namespace obddproof;

namespace {

// PHP_n has n(n+1) variables; column-major orders need the pigeon map.
std::optional<PigeonMap> map_for(const CnfFormula& f, std::optional<int> holes) {
  if (!holes) return std::nullopt;
  PigeonMap map(*holes);
  if (map.num_vars() != f.num_vars()) throw std::invalid_argument("holes does not match the formula");
  return map;
}

ScheduleSpec schedule_spec(const std::string& text, std::optional<std::uint64_t> seed) {
  ScheduleSpec spec;
  const auto colon = text.find(':');
  spec.kind = parse_schedule_kind(text.substr(0, colon));
  if (colon != std::string::npos) {
    spec.seed = std::stoull(text.substr(colon + 1));
  } else {
    spec.seed = seed;
  }
  if (spec.kind == ScheduleKind::Random && !spec.seed) throw std::invalid_argument("random schedule needs a seed");
  return spec;
}

py::dict summary(const RefutationResult& r) {
  py::dict d;
  d["refuted"] = r.refuted;
  d["truncated"] = r.truncated;
  d["max_intermediate"] = r.max_intermediate;
  d["total_size"] = r.total_size;
  d["steps"] = r.trace.size();
  d["sizes"] = [&] {
    std::vector<std::size_t> sizes;
    for (const auto& rec : r.trace) sizes.push_back(rec.size);
    return sizes;
  }();
  d["trace_jsonl"] = trace_to_jsonl(r);
  d["csv"] = trace_to_csv(r);
  return d;
}

py::dict refute(const CnfFormula& f, const std::string& order, const std::string& schedule,
                std::optional<std::uint64_t> seed, bool projection, std::optional<int> holes, std::size_t node_budget) {
  const VarOrderSpec spec = parse_order_spec(order, f.num_vars(), map_for(f, holes));
  const ScheduleSpec s = schedule_spec(schedule, seed);
  RunLimits limits;
  limits.node_budget = node_budget;
  const Schedule steps = builtin_schedule(f, s.kind, spec, ScheduleOptions{s.seed, projection, limits});
  return summary(run_schedule(f, spec, steps, limits));
}

py::dict verify(const CnfFormula& f, const std::string& trace_jsonl, const std::string& order,
                std::optional<int> holes) {
  const VarOrderSpec spec = parse_order_spec(order, f.num_vars(), map_for(f, holes));
  const VerifyReport rep = verify_refutation(f, spec, trace_from_jsonl(trace_jsonl));
  std::vector<std::string> messages;
  for (const auto& v : rep.violations) messages.push_back(std::string(to_string(v.kind)) + ": " + v.message);
  py::dict d;
  d["valid"] = rep.valid();
  d["violations"] = messages;
  return d;
}

py::list sweep_rows(const CnfFormula& f, const std::vector<std::string>& orders,
                    const std::vector<std::string>& schedules, std::optional<std::uint64_t> seed, unsigned jobs,
                    std::optional<int> holes) {
  std::vector<VarOrderSpec> order_specs;
  for (const auto& o : orders) order_specs.push_back(parse_order_spec(o, f.num_vars(), map_for(f, holes)));
  std::vector<ScheduleSpec> schedule_specs;
  for (const auto& s : schedules) schedule_specs.push_back(schedule_spec(s, seed));
  std::vector<SweepRow> rows;
  {
    py::gil_scoped_release release;
    rows = sweep(f, order_specs, schedule_specs, SweepOptions{jobs, {}});
  }
  py::list out;
  for (const auto& row : rows) {
    py::dict d;
    d["order"] = row.order_label;
    d["schedule"] = row.schedule_label;
    d["seed"] = row.seed;
    d["refuted"] = row.refuted;
    d["max_intermediate"] = row.max_intermediate;
    d["total_size"] = row.total_size;
    d["steps"] = row.steps;
    d["error"] = row.error;
    out.append(d);
  }
  return out;
}

py::dict fooling(std::size_t num_vars, const std::string& table, std::size_t k, const std::vector<std::size_t>& a,
                 std::optional<std::vector<bool>> z, std::optional<std::vector<std::uint32_t>> order) {
  const auto t = oracle::TruthTable::from_bits(num_vars, table);
  VarOrder vo = VarOrder::identity(num_vars);
  if (order) {
    std::vector<VarId> seq;
    for (auto v : *order) seq.push_back(VarId(v));
    vo = VarOrder::from_sequence(seq);
  }
  NodeStore store(vo);
  const bounds::FoolingCertificate cert{k, a, z.value_or(std::vector<bool>(k, false))};
  const auto v = bounds::check_fooling(store, oracle::canonical_bdd(t, store), cert);
  py::dict d;
  d["certified"] = v.certified;
  d["bound"] = v.certified ? py::cast(v.bound.convert_to<std::uint64_t>()) : py::none();
  d["actual_size"] = v.actual_size;
  d["counterexample"] = v.counterexample ? py::cast(*v.counterexample) : py::none();
  d["json"] = v.to_json(cert);
  return d;
}

py::object lemma(const std::string& coloring, bool conjectured) {
  const auto m = bounds::MatrixColoring::parse(coloring);
  const auto c = conjectured ? bounds::LemmaConstant::Conjectured : bounds::LemmaConstant::Proven;
  const auto result = bounds::lemma_matrix_select(m, c);
  if (const auto* inf = std::get_if<bounds::Infeasible>(&result)) return py::str(inf->reason);
  const auto& w = std::get<bounds::SelectionWitness>(result);
  py::list pairs;
  for (const auto& [white, black] : w.pairs) {
    pairs.append(py::make_tuple(py::make_tuple(white.row, white.col), py::make_tuple(black.row, black.col)));
  }
  py::dict d;
  d["kind"] = w.kind == bounds::SelectionWitness::Kind::Rows ? "rows" : "columns";
  d["indices"] = w.indices;
  d["pairs"] = pairs;
  d["verified"] = bounds::verify_selection(w, m);
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "OBDD refutations of CNF formulas and lower-bound checkers";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<NodeBudgetExceeded>(m, "NodeBudgetExceeded", PyExc_MemoryError);

  py::class_<CnfFormula>(m, "Formula")
      .def_static("from_dimacs", &parse_dimacs, py::arg("text"))
      .def_static("php", [](int n) { return gen_php(n).formula; }, py::arg("n"))
      .def_static("pc_star", &gen_pc_star, py::arg("n"))
      .def_property_readonly("num_vars", &CnfFormula::num_vars)
      .def_property_readonly("num_clauses", &CnfFormula::num_clauses)
      .def("clauses",
           [](const CnfFormula& f) {
             std::vector<std::vector<int>> out;
             for (std::size_t c = 0; c < f.num_clauses(); ++c) {
               std::vector<int> lits;
               for (const Literal& l : f.clause(c).literals()) lits.push_back(l.to_dimacs());
               out.push_back(lits);
             }
             return out;
           })
      .def("to_dimacs", &write_dimacs)
      .def("is_satisfiable", [](const CnfFormula& f) { return !oracle::table_of_cnf(f).all_zero(); });

  m.def("pigeon_map_json", [](int n) { return PigeonMap(n).to_json(); }, py::arg("n"));
  m.def("refute", &refute, py::arg("formula"), py::arg("order") = "row-major", py::arg("schedule") = "linear",
        py::arg("seed") = py::none(), py::arg("projection") = false, py::arg("holes") = py::none(),
        py::arg("node_budget") = RunLimits{}.node_budget);
  m.def("verify", &verify, py::arg("formula"), py::arg("trace_jsonl"), py::arg("order") = "row-major",
        py::arg("holes") = py::none());
  m.def("sweep", &sweep_rows, py::arg("formula"), py::arg("orders") = std::vector<std::string>{"row-major"},
        py::arg("schedules") = std::vector<std::string>{"linear"}, py::arg("seed") = py::none(), py::arg("jobs") = 1,
        py::arg("holes") = py::none());
  m.def("check_fooling", &fooling, py::arg("num_vars"), py::arg("table"), py::arg("k"), py::arg("A"),
        py::arg("z") = py::none(), py::arg("order") = py::none(),
        "Truth table bits are little-endian in the variable index; A holds 1-based prefix positions.");
  m.def("lemma_select", &lemma, py::arg("coloring"), py::arg("conjectured") = false,
        "Returns a witness dict, or the reason string when no witness of size floor(cn) is required.");
  m.def(
      "floor_cn", [](std::size_t n, bool conjectured) {
        return bounds::floor_cn(n, conjectured ? bounds::LemmaConstant::Conjectured : bounds::LemmaConstant::Proven);
      },
      py::arg("n"), py::arg("conjectured") = false);
  m.def("theoretical_bound", [](std::size_t n) { return bounds::theoretical_bound(n); }, py::arg("n"));
  m.def("base_exceeds_1025_certified", &bounds::base_exceeds_1025_certified);
}
