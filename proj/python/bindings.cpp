#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "vispi/equiv.hpp"
#include "vispi/testkit.hpp"
#include "vispi/traceprops.hpp"
#include "vispi/typecheck.hpp"
#include "vispi/typedlts.hpp"

namespace py = pybind11;
using namespace vispi;

namespace {

// pybind11 cannot hold shared_ptr<const T>
struct Process {
    ProcP p;
};

// a parsed source file; name sorts come from its declarations
struct Program {
    ProcFile file;

    Process proc(const std::string& name) const { return {file.get(name)}; }

    std::vector<std::string> names() const {
        std::vector<std::string> o;
        for (auto& [n, _] : file.procs) o.push_back(n);
        return o;
    }

    Process term(const std::string& text) const { return {parseProc(text, file.decls)}; }

    TypingEnv env(const std::string& vis, const std::string& stack) const {
        return {parseVis(vis, file.decls), stack.empty() ? Stack{} : parseStack(stack, file.decls)};
    }

    NameSet nameSet(const std::vector<std::string>& xs) const {
        std::vector<Name> v;
        for (auto& x : xs) v.push_back(resolveName(file.decls, x));
        return mkSet(v);
    }

    Trace trace(const std::vector<std::string>& actions) const {
        Trace t;
        for (auto& a : actions) t.push_back(parseAction(a, file.decls));
        return t;
    }
};

std::vector<Value> values(const std::vector<long long>& xs) {
    std::vector<Value> v;
    for (long long x : xs) v.push_back(Value::integer(x));
    return v;
}

Bounds bounds(int depth, int tauBound, const std::vector<long long>& vals) {
    Bounds b;
    b.depth = depth;
    b.tauBound = tauBound;
    b.values = values(vals);
    return b;
}

py::dict verdictDict(const Verdict& v) {
    py::dict d;
    d["verdict"] = showVerdict(v.kind);
    d["equivalent"] = v.equivalent();
    d["depth"] = v.depth;
    d["tau_bound"] = v.tauBound;
    d["witness"] = v.witnessText();
    std::vector<std::string> tr;
    for (auto& a : v.trace) tr.push_back(showAction(a));
    d["trace"] = tr;
    d["side"] = v.side;
    d["moves"] = v.moves;
    d["note"] = v.note;
    return d;
}

const std::vector<long long> kDefaultValues{0, 1, 2};

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "visibility-typed internal pi-calculus: type checking, typed traces and equivalences";
    py::register_exception<Error>(m, "VispiError", PyExc_ValueError);

    py::enum_<Mode>(m, "Mode").value("SEQ", Mode::Seq).value("WB", Mode::WB);

    py::class_<Process>(m, "Process")
        .def("__str__", [](const Process& p) { return show(p.p); })
        .def("__repr__", [](const Process& p) { return "<Process " + show(p.p) + ">"; })
        .def("canonical_key", [](const Process& p) { return canonKey(p.p); })
        .def("free_names", [](const Process& p) {
            std::vector<std::string> o;
            for (Name n : freeNames(p.p)) o.push_back(str(n));
            return o;
        })
        .def("size", [](const Process& p) { return procSize(p.p); })
        .def("__or__", [](const Process& a, const Process& b) { return Process{par2(a.p, b.p)}; });

    py::class_<TypingEnv>(m, "TypingEnv")
        .def("__str__", &TypingEnv::show)
        .def("__repr__", [](const TypingEnv& e) { return "<TypingEnv " + e.show() + ">"; })
        .def("__eq__", [](const TypingEnv& a, const TypingEnv& b) { return a == b; })
        .def_property_readonly("holds_thread", [](const TypingEnv& e) { return e.vis.hasStar(); })
        .def_property_readonly("transitive", [](const TypingEnv& e) { return checkTransitive(e.vis); })
        .def("closure", [](const TypingEnv& e) { return TypingEnv{transitiveClosure(e.vis), e.stack}; });

    py::class_<Program>(m, "Program")
        .def(py::init([](const std::string& text) { return Program{parseFile(text)}; }), py::arg("text"))
        .def_property_readonly("mode", [](const Program& p) { return p.file.decls.mode; })
        .def("names", &Program::names)
        .def("proc", &Program::proc, py::arg("name"))
        .def("__getitem__", &Program::proc)
        .def("term", &Program::term, py::arg("text"), "parse a process term against this program's declarations")
        .def("env", &Program::env, py::arg("vis"), py::arg("stack") = "")
        .def("env_file", [](const Program& p, const std::string& text) {
            EnvFile f = parseEnvFile(text, p.file.decls);
            return py::make_tuple(f.player, f.hasObserver ? py::cast(f.observer) : py::none());
        }, py::arg("text"), "(player, observer or None) from `player ...; observer ...;` text")
        .def("env_family", [](const Program& p, const std::string& text) { return parseEnvFamily(text, p.file.decls); },
             py::arg("text"))
        .def("prune", [](const Program& p, const std::vector<std::string>& names, const TypingEnv& delta, const Process& proc) {
            return Process{prune(p.nameSet(names), delta.vis, proc.p)};
        }, py::arg("names"), py::arg("delta"), py::arg("proc"))
        .def("view", [](const Program& p, const std::vector<std::string>& start, const std::vector<std::string>& actions) {
            std::vector<std::string> o;
            for (Name n : view(p.nameSet(start), p.trace(actions))) o.push_back(str(n));
            return o;
        }, py::arg("start"), py::arg("actions"))
        .def("respects_views", [](const Program& p, const std::vector<std::string>& start, const std::vector<std::string>& actions) {
            return respectsViews(p.nameSet(start), p.trace(actions));
        }, py::arg("start"), py::arg("actions"))
        .def("well_bracketed", [](const Program& p, const std::vector<std::string>& actions) {
            return wellBracketed(p.trace(actions));
        }, py::arg("actions"));

    m.def("check", [](Mode mode, const TypingEnv& env, const Process& p, bool gate) {
        CheckOptions o;
        o.transitivityGate = gate;
        CheckResult r = check(mode, env, p.p, o);
        py::dict d;
        d["ok"] = r.ok();
        if (r.err) {
            d["rule"] = r.err->rule;
            d["path"] = r.err->path;
            d["witness"] = r.err->witness;
        }
        return d;
    }, py::arg("mode"), py::arg("env"), py::arg("proc"), py::arg("transitivity_gate") = true);

    m.def("compatible", [](Mode mode, const TypingEnv& a, const TypingEnv& b) { return compatible(a, b, mode); },
          py::arg("mode"), py::arg("player"), py::arg("observer"));

    m.def("steps", [](const Process& p, const std::vector<long long>& vals) {
        std::vector<std::pair<std::string, Process>> o;
        for (auto& s : strongSteps(p.p, values(vals))) o.push_back({showAction(s.act), Process{s.proc}});
        return o;
    }, py::arg("proc"), py::arg("values") = kDefaultValues);

    m.def("typed_steps", [](Mode mode, const TypingEnv& obs, const Process& p, const std::vector<long long>& vals) {
        std::vector<py::tuple> o;
        for (auto& s : typedSteps(mode, {obs, p.p}, values(vals)))
            o.push_back(py::make_tuple(showAction(s.act), Process{s.next.proc}, s.next.obs));
        return o;
    }, py::arg("mode"), py::arg("observer"), py::arg("proc"), py::arg("values") = kDefaultValues);

    m.def("traces", [](Mode mode, const TypingEnv& obs, const Process& p, int depth, int tauBound, const std::vector<long long>& vals) {
        TraceSet ts = typedTraces(mode, {obs, p.p}, depth, values(vals), tauBound);
        return py::make_tuple(ts.keys(), ts.truncated);
    }, py::arg("mode"), py::arg("observer"), py::arg("proc"), py::arg("depth") = 8, py::arg("tau_bound") = 64,
       py::arg("values") = kDefaultValues, "(trace strings, truncated)");

    m.def("trace_equiv", [](Mode mode, const Process& p, const Process& q, const TypingEnv& delta, const TypingEnv& theta, int depth,
                            int tauBound, const std::vector<long long>& vals) {
        Verdict v;
        {
            py::gil_scoped_release nogil;
            v = traceEquiv(mode, p.p, q.p, delta, theta, bounds(depth, tauBound, vals));
        }
        return verdictDict(v);
    }, py::arg("mode"), py::arg("p"), py::arg("q"), py::arg("delta"), py::arg("theta"), py::arg("depth") = 8,
       py::arg("tau_bound") = 64, py::arg("values") = kDefaultValues);

    m.def("bisim", [](Mode mode, const Process& p, const Process& q, const TypingEnv& delta, const TypingEnv& theta, int depth,
                      int tauBound, const std::vector<long long>& vals) {
        Verdict v;
        {
            py::gil_scoped_release nogil;
            v = bisim(mode, p.p, q.p, delta, theta, bounds(depth, tauBound, vals));
        }
        return verdictDict(v);
    }, py::arg("mode"), py::arg("p"), py::arg("q"), py::arg("delta"), py::arg("theta"), py::arg("depth") = 8,
       py::arg("tau_bound") = 64, py::arg("values") = kDefaultValues);

    m.def("may_test", [](Mode mode, const Process& p, const Process& q, const TypingEnv& delta,
                         const std::vector<std::tuple<std::string, Process, TypingEnv>>& observers, int tauBound) {
        std::vector<Observer> obs;
        for (auto& [n, r, e] : observers) obs.push_back({n, r.p, e});
        MayReport rep = mayTest(mode, p.p, q.p, delta, obs, kNone, tauBound);
        std::vector<py::dict> rows;
        for (auto& row : rep.rows) {
            py::dict d;
            d["observer"] = row.observer;
            d["error"] = row.error;
            d["left"] = showBarb(row.left);
            d["right"] = showBarb(row.right);
            d["distinguishes"] = row.distinguishes();
            rows.push_back(d);
        }
        return rows;
    }, py::arg("mode"), py::arg("p"), py::arg("q"), py::arg("delta"), py::arg("observers"), py::arg("tau_bound") = 64,
       "observers: (name, process, environment) triples");

    m.def("generate", [](Mode mode, uint64_t seed, int depth, int servers, int fo, int active) {
        GenConfig cfg;
        cfg.mode = mode;
        cfg.seed = seed;
        cfg.depth = depth;
        cfg.servers = servers;
        cfg.fo = fo;
        Rng rng(seed);
        TypingEnv player = genEnv(cfg, rng, active < 0 ? std::bernoulli_distribution(0.5)(rng) : active == 1);
        TypingEnv observer = genObserver(cfg, player, rng);
        return py::make_tuple(Process{genTypable(cfg, player, rng)}, player, observer);
    }, py::arg("mode"), py::arg("seed") = 1, py::arg("depth") = 4, py::arg("servers") = 3, py::arg("fo") = 1,
       py::arg("active") = -1, "(process, player environment, observer environment), typable by construction");
}
