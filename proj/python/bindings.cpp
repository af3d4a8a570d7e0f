#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <sstream>

#include "letrecopt/cli.hpp"
#include "letrecopt/corpus.hpp"
#include "letrecopt/transform.hpp"

namespace py = pybind11;
using namespace letrecopt;

namespace {

py::dict statsDict(const ReductionStats& s) {
  py::dict d;
  d["beta"] = s.betaSteps;
  d["gbeta"] = s.gbetaSteps;
  d["unfold"] = s.unfoldSteps;
  d["fuel_used"] = s.fuelUsed;
  d["fuel_exhausted"] = s.fuelExhausted;
  return d;
}

const char* verdictName(Verdict::Kind k) {
  switch (k) {
    case Verdict::Kind::EquivalentToDepth: return "equivalent";
    case Verdict::Kind::Distinct: return "distinct";
    case Verdict::Kind::Inconclusive: return "inconclusive";
  }
  return "?";
}

py::dict verdictDict(const Verdict& v) {
  py::dict d;
  d["verdict"] = verdictName(v.kind);
  d["depth"] = v.depth;
  d["witness"] = v.witness;
  d["reason"] = v.reason;
  return d;
}

py::dict nodeDict(const BindingNode& n) {
  py::dict d;
  switch (n.kind) {
    case BindingNode::Kind::Variable: d["kind"] = "variable"; break;
    case BindingNode::Kind::Expression: d["kind"] = "expression"; break;
    case BindingNode::Kind::Blackhole: d["kind"] = "blackhole"; break;
  }
  d["label"] = n.label;
  if (n.kind == BindingNode::Kind::Expression) d["pos"] = positionToString(n.at);
  return d;
}

// Bound names replaced by binding depth, so α-equivalent terms agree.
void canonical(const Term& t, std::map<VarName, std::size_t>& scope, std::size_t depth, std::string& out) {
  switch (t.kind()) {
    case TermKind::Var: {
      auto it = scope.find(t.name());
      out += it == scope.end() ? "v" + t.name() : "#" + std::to_string(it->second);
      out += ' ';
      return;
    }
    case TermKind::Abs: {
      auto saved = scope;
      scope[t.binder()] = depth;
      out += "(L ";
      canonical(t.body(), scope, depth + 1, out);
      out += ')';
      scope = std::move(saved);
      return;
    }
    case TermKind::App:
      out += "(A ";
      canonical(t.fun(), scope, depth, out);
      canonical(t.arg(), scope, depth, out);
      out += ')';
      return;
    case TermKind::Letrec: {
      auto saved = scope;
      for (std::size_t i = 0; i < t.defCount(); ++i) scope[t.defName(i)] = depth + i;
      const std::size_t inner = depth + t.defCount();
      out += "(R ";
      for (std::size_t i = 0; i < t.defCount(); ++i) canonical(t.defBody(i), scope, inner, out);
      canonical(t.body(), scope, inner, out);
      out += ')';
      scope = std::move(saved);
      return;
    }
  }
}

std::size_t alphaHash(const Term& t) {
  std::map<VarName, std::size_t> scope;
  std::string s;
  canonical(t, scope, 0, s);
  return std::hash<std::string>{}(s);
}

TypeEnv signature(const std::string& sig) { return sig.empty() ? TypeEnv{} : parseSignature(sig); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Binding analysis and optimization of letrec terms";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<TypeError>(m, "UntypableError", PyExc_ValueError);
  py::register_exception<NotApplicable>(m, "NotApplicable", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_OSError);

  py::class_<Term>(m, "Term")
      .def(py::init([](const std::string& src) { return parse(src); }), py::arg("source"))
      .def("__str__", [](const Term& t) { return print(t); })
      .def("__repr__", [](const Term& t) { return "Term(" + print(t) + ")"; })
      .def("__eq__", [](const Term& a, const Term& b) { return alphaEq(a, b); })
      .def("__hash__", &alphaHash)
      .def_property_readonly("free_vars", [](const Term& t) { return freeVars(t); })
      .def("distinctly_bound", [](const Term& t) { return ensureDistinctlyBound(t); })
      .def("apply", [](const Term& t, const std::vector<Term>& args) { return Term::apps(t, args); });

  m.def("parse", [](const std::string& src) { return parse(src); }, py::arg("source"));

  m.def(
      "infer_type", [](const Term& t, const std::string& sig) { return printType(inferTypes(t, signature(sig)).rootType()); },
      py::arg("term"), py::arg("sig") = "");
  m.def(
      "is_typable", [](const Term& t, const std::string& sig) { return isTypable(t, signature(sig)); }, py::arg("term"),
      py::arg("sig") = "");

  m.def(
      "analyze",
      [](const Term& t, const std::string& sig) {
        Analysis a = analyze(t, signature(sig));
        const BindingGraph& g = a.graph;
        py::list edges;
        for (const auto& [from, to] : g.edges()) {
          py::dict e = nodeDict(g.node(from));
          e["var"] = g.node(to).label;
          edges.append(e);
        }
        py::list doms;
        for (const auto& [v, w] : strongDomFixpoint(g.digraph())) {
          py::dict d;
          d["dominator"] = nodeDict(g.node(v));
          d["dominated"] = nodeDict(g.node(w));
          doms.append(d);
        }
        py::dict out;
        out["term"] = print(a.term);
        out["type"] = printType(a.typed.rootType());
        out["edges"] = edges;
        out["cycles"] = parameterCycles(g);
        out["dominators"] = doms;
        return out;
      },
      py::arg("term"), py::arg("sig") = "");
  m.def(
      "to_dot", [](const Term& t, const std::string& sig) { return toDot(analyze(t, signature(sig)).graph); },
      py::arg("term"), py::arg("sig") = "");

  m.def(
      "strong_dominators",
      [](std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
        Digraph g(n);
        for (const auto& [u, v] : edges) {
          if (u >= n || v >= n) throw py::index_error("edge endpoint out of range");
          g.addEdge(u, v);
        }
        const DomPairs pairs = strongDomFixpoint(g);
        return std::vector<std::pair<std::size_t, std::size_t>>(pairs.begin(), pairs.end());
      },
      py::arg("vertices"), py::arg("edges"));

  m.def(
      "optimize",
      [](const Term& t, const std::string& sig, std::size_t maxUnfolds, std::size_t verifyDepth, std::uint64_t fuel) {
        OptOptions o;
        o.sig = signature(sig);
        o.maxUnfolds = maxUnfolds;
        o.verifyDepth = verifyDepth;
        o.fuel = fuel;
        OptResult r = optimize(t, o);
        py::list steps;
        for (const OptStep& s : r.report.steps) {
          py::dict d;
          d["description"] = describe(s.candidate);
          d["unfolded"] = s.unfolded;
          d["before"] = positionToString(s.before);
          d["eliminated"] = s.eliminated;
          d["term"] = s.termAfter;
          d["verification"] = verdictDict(s.verdict);
          steps.append(d);
        }
        py::dict report;
        report["steps"] = steps;
        report["binders_eliminated"] = r.report.binderEliminated;
        report["aborted"] = r.report.aborted;
        report["error"] = r.report.error;
        report["stats_before"] = statsDict(r.report.statsBefore);
        report["stats_after"] = statsDict(r.report.statsAfter);
        return py::make_tuple(r.term, report);
      },
      py::arg("term"), py::arg("sig") = "", py::arg("max_unfolds") = 1, py::arg("verify_depth") = 8,
      py::arg("fuel") = kDefaultFuel);

  m.def(
      "evaluate",
      [](const Term& t, std::uint64_t fuel, bool betaOnly) {
        EvalResult r = normalOrderEval(t, fuel, betaOnly ? Strategy::BetaOnly : Strategy::Normal);
        return py::make_tuple(r.term, statsDict(r.stats));
      },
      py::arg("term"), py::arg("fuel") = kDefaultFuel, py::arg("beta_only") = false);
  m.def(
      "approximate", [](const Term& t, std::size_t depth, std::uint64_t fuel) { return printApprox(boehmApprox(t, depth, fuel)); },
      py::arg("term"), py::arg("depth"), py::arg("fuel") = kDefaultFuel);
  m.def(
      "count_steps", [](const Term& t, std::size_t depth, std::uint64_t fuel) { return statsDict(countStepsToDepth(t, depth, fuel)); },
      py::arg("term"), py::arg("depth"), py::arg("fuel") = kDefaultFuel);

  m.def(
      "check_equiv",
      [](const Term& a, const Term& b, std::size_t depth, std::uint64_t fuel) { return verdictDict(checkOpEq(a, b, depth, fuel)); },
      py::arg("a"), py::arg("b"), py::arg("depth") = 8, py::arg("fuel") = kDefaultFuel);
  m.def(
      "experiments",
      [](const Term& a, const Term& b, std::size_t rounds, std::uint32_t seed, std::uint64_t fuel) {
        return verdictDict(applicativeExperiments(a, b, rounds, seed, fuel));
      },
      py::arg("a"), py::arg("b"), py::arg("rounds") = 5, py::arg("seed") = 42, py::arg("fuel") = kDefaultFuel);

  m.def(
      "run",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code = runCommand(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs a letrec-opt command line; returns (exit code, stdout, stderr).");
}
