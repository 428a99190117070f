#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "vispi/equiv.hpp"
#include "vispi/testkit.hpp"
#include "vispi/traceprops.hpp"
#include "vispi/typecheck.hpp"
#include "vispi/typedlts.hpp"

using namespace vispi;
using json = nlohmann::json;

namespace {

enum Exit { kOk = 0, kFail = 1, kInconclusive = 2, kUsage = 64 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Opts {
    std::string mode;
    std::string env, obs;
    int depth = 8;
    int tauBound = 64;
    std::string values = "0,1,2";
    bool json = false;
    uint64_t seed = 1;
};

std::string readFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<Value> parseValues(const std::string& s) {
    std::vector<Value> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok.erase(std::remove_if(tok.begin(), tok.end(), ::isspace), tok.end());
        if (tok.empty()) continue;
        if (tok == "()") out.push_back(Value::unit());
        else if (tok == "true" || tok == "false") out.push_back(Value::boolean(tok == "true"));
        else {
            try {
                size_t used = 0;
                long long v = std::stoll(tok, &used);
                if (used != tok.size()) throw std::invalid_argument(tok);
                out.push_back(Value::integer(v));
            } catch (const std::exception&) {
                throw UsageError("bad value '" + tok + "' in --values");
            }
        }
    }
    if (out.empty()) throw UsageError("--values must name at least one value");
    return out;
}

std::string showValue(const Value& v) {
    if (v.kind == Value::Unit) return "()";
    if (v.kind == Value::Bool) return v.n ? "true" : "false";
    return std::to_string(v.n);
}

json boundsJson(const Opts& o, const std::vector<Value>& vals) {
    json vs = json::array();
    for (auto& v : vals) vs.push_back(showValue(v));
    return {{"depth", o.depth}, {"tauBound", o.tauBound}, {"values", vs}};
}

std::string boundsText(const Opts& o, const std::vector<Value>& vals) {
    std::string s = "depth " + std::to_string(o.depth) + ", tau-bound " + std::to_string(o.tauBound) + ", values {";
    for (size_t i = 0; i < vals.size(); ++i) s += (i ? "," : "") + showValue(vals[i]);
    return s + "}";
}

// process references: file, file:Name, or a bare Name looked up in the last file given
struct Procs {
    std::map<std::string, ProcFile> files;
    Decls decls;
    bool haveDecls = false;
    std::string lastFile;

    void mergeDecls(const Decls& d) {
        if (!haveDecls) {
            decls = d;
            haveDecls = true;
            return;
        }
        for (auto& [n, c] : d.classes) {
            auto it = decls.classes.find(n);
            if (it != decls.classes.end() && it->second != c) throw UsageError("name " + n + " declared with two sorts");
            if (it == decls.classes.end()) {
                decls.classes.emplace(n, c);
                decls.order.push_back(n);
            }
        }
    }

    const ProcFile& load(const std::string& path) {
        auto it = files.find(path);
        if (it == files.end()) {
            it = files.emplace(path, parseFile(readFile(path))).first;
            mergeDecls(it->second.decls);
        }
        lastFile = path;
        return it->second;
    }

    std::pair<std::string, ProcP> resolve(const std::string& ref) {
        std::string path = ref, name;
        if (!std::ifstream(ref)) {
            auto colon = ref.rfind(':');
            if (colon != std::string::npos && std::ifstream(ref.substr(0, colon))) {
                path = ref.substr(0, colon);
                name = ref.substr(colon + 1);
            } else if (!lastFile.empty()) {
                path = lastFile;
                name = ref;
            } else {
                throw UsageError("cannot open " + ref);
            }
        }
        const ProcFile& f = load(path);
        if (f.procs.empty()) throw UsageError(path + " defines no process");
        if (name.empty()) return f.procs.front();
        return {name, f.get(name)};
    }
};

Mode modeOf(const Opts& o, const Procs& ps) {
    if (o.mode == "seq") return Mode::Seq;
    if (o.mode == "wb") return Mode::WB;
    if (!o.mode.empty()) throw UsageError("--mode must be seq or wb");
    return ps.decls.mode;
}

EnvFile loadEnv(const Opts& o, const Decls& d, bool required) {
    if (o.env.empty()) {
        if (required) throw UsageError("--env is required");
        return {};
    }
    return parseEnvFile(readFile(o.env), d);
}

// observer environments: --obs (an environment file or a family of `vis ... stack ...` entries), else the
// observer section of --env
std::vector<TypingEnv> loadObservers(const Opts& o, const Decls& d, const EnvFile& env) {
    if (o.obs.empty()) {
        if (!env.hasObserver) throw UsageError("no observer environment: add an observer section to --env or pass --obs");
        return {env.observer};
    }
    std::string text = readFile(o.obs);
    try {
        EnvFile f = parseEnvFile(text, d);
        if (!f.hasObserver) throw UsageError(o.obs + " has no observer section");
        return {f.observer};
    } catch (const Error&) {
        auto fam = parseEnvFamily(text, d);
        if (fam.empty()) throw UsageError(o.obs + " holds no observer environment");
        return fam;
    }
}

NameSet parseNameSet(const std::string& text, const Decls& d) {
    std::string s;
    for (char c : text)
        if (!std::isspace((unsigned char)c) && c != '{' && c != '}') s += c;
    NameSet out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        if (isReservedSpelling(tok)) out.push_back(intern(tok, tok[0] == 'p' ? NClass::Cont : NClass::Server));
        else out.push_back(resolveName(d, tok));
    }
    return mkSet(out);
}

int verdictExit(VerdictKind k) {
    switch (k) {
        case VerdictKind::Equivalent: return kOk;
        case VerdictKind::Distinguished: return kFail;
        case VerdictKind::Inconclusive: return kInconclusive;
    }
    return kFail;
}

json errJson(const TypeError& e) { return {{"rule", e.rule}, {"path", e.path}, {"witness", e.witness}}; }

// ---------- subcommands ----------

int cmdCheck(const Opts& o, const std::vector<std::string>& refs, bool noGate) {
    Procs ps;
    std::vector<std::pair<std::string, ProcP>> items;
    for (auto& r : refs) items.push_back(ps.resolve(r));
    Mode m = modeOf(o, ps);
    EnvFile env = loadEnv(o, ps.decls, true);
    CheckOptions co;
    co.transitivityGate = !noGate;
    bool all = true;
    json rows = json::array();
    for (auto& [name, p] : items) {
        CheckResult r = check(m, env.player, p, co);
        all = all && r.ok();
        json row = {{"proc", name}, {"typable", r.ok()}};
        if (!r.ok()) row["error"] = errJson(*r.err);
        rows.push_back(row);
        if (!o.json) {
            std::cout << name << ": " << (r.ok() ? "typable" : "not typable") << "\n";
            if (!r.ok()) std::cerr << name << ": " << r.err->show() << "\n";
        }
    }
    if (o.json)
        std::cout << json{{"command", "check"}, {"mode", m == Mode::Seq ? "seq" : "wb"},
                          {"env", env.player.show()}, {"results", rows}}
                         .dump(2)
                  << "\n";
    return all ? kOk : kFail;
}

int cmdStep(const Opts& o, const std::string& ref, const std::string& weak) {
    Procs ps;
    auto [name, p] = ps.resolve(ref);
    Mode m = modeOf(o, ps);
    auto vals = parseValues(o.values);
    json rows = json::array();
    auto emit = [&](const std::string& act, const ProcP& q, const std::string& obs) {
        rows.push_back({{"action", act}, {"next", show(q)}, {"observer", obs}});
        if (!o.json) std::cout << act << "  ->  " << show(q) << (obs.empty() ? "" : "    [" + obs + "]") << "\n";
    };
    if (o.env.empty()) {
        if (!weak.empty()) throw UsageError("--weak needs --env");
        for (auto& st : strongSteps(p, vals)) emit(showAction(st.act), st.proc, "");
    } else {
        EnvFile env = loadEnv(o, ps.decls, true);
        TypingEnv obs = loadObservers(o, ps.decls, env).front();
        if (weak.empty()) {
            for (auto& st : typedSteps(m, {obs, p}, vals)) emit(showAction(st.act), st.next.proc, st.next.obs.show());
        } else {
            Action mu = parseAction(weak, ps.decls);
            TypedWeak w = typedWeakSteps(m, {obs, p}, mu, vals, o.tauBound);
            for (auto& s : w.states) emit(showAction(mu), s.proc, s.obs.show());
            if (w.truncated && !o.json) std::cerr << "tau-bound reached; the list may be incomplete\n";
        }
    }
    if (o.json) std::cout << json{{"command", "step"}, {"proc", name}, {"steps", rows}}.dump(2) << "\n";
    return kOk;
}

int cmdTraces(const Opts& o, const std::string& ref, bool showObs) {
    Procs ps;
    auto [name, p] = ps.resolve(ref);
    Mode m = modeOf(o, ps);
    auto vals = parseValues(o.values);
    EnvFile env = loadEnv(o, ps.decls, true);
    TypingEnv obs = loadObservers(o, ps.decls, env).front();
    TraceSet ts = typedTraces(m, {obs, p}, o.depth, vals, o.tauBound);
    json rows = json::array();
    if (!o.json) std::cout << "# " << name << ": " << ts.traces.size() << " traces, " << boundsText(o, vals) << "\n";
    for (auto& t : ts.traces) {
        std::string line;
        json obsSeq = json::array();
        if (t.trace.empty()) line = "eps";
        for (size_t i = 0; i < t.trace.size(); ++i) {
            if (i) line += " . ";
            line += showAction(t.trace[i]);
            if (showObs) line += " [" + t.obs[i + 1].show() + "]";
            obsSeq.push_back(t.obs[i + 1].show());
        }
        json row = {{"trace", showTrace(t.trace)}};
        if (showObs) row["observer"] = obsSeq;
        rows.push_back(row);
        if (!o.json) std::cout << line << "\n";
    }
    if (o.json)
        std::cout << json{{"command", "traces"}, {"proc", name},       {"observer", obs.show()},
                          {"bounds", boundsJson(o, vals)}, {"truncated", ts.truncated}, {"traces", rows}}
                         .dump(2)
                  << "\n";
    else if (ts.truncated)
        std::cerr << "tau-bound reached; the set may be incomplete\n";
    return ts.truncated ? kInconclusive : kOk;
}

int cmdEquiv(const Opts& o, const std::string& kind, const std::vector<std::string>& refs) {
    if (refs.size() != 2) throw UsageError("equiv takes two processes");
    if (kind != "trace" && kind != "bisim") throw UsageError("--kind must be trace or bisim");
    Procs ps;
    auto [ln, p] = ps.resolve(refs[0]);
    auto [rn, q] = ps.resolve(refs[1]);
    Mode m = modeOf(o, ps);
    auto vals = parseValues(o.values);
    EnvFile env = loadEnv(o, ps.decls, true);
    auto family = loadObservers(o, ps.decls, env);
    Bounds b{o.depth, o.tauBound, vals};
    VerdictKind overall = VerdictKind::Equivalent;
    json rows = json::array();
    for (auto& th : family) {
        Verdict v;
        try {
            v = kind == "trace" ? traceEquiv(m, p, q, env.player, th, b) : bisim(m, p, q, env.player, th, b);
        } catch (const Error& e) {
            if (o.json)
                std::cout << json{{"command", "equiv"}, {"error", e.what()}, {"observer", th.show()}}.dump(2) << "\n";
            else
                std::cerr << "error under " << th.show() << ": " << e.what() << "\n";
            return kFail;
        }
        if (v.kind == VerdictKind::Distinguished || (v.kind == VerdictKind::Inconclusive && overall == VerdictKind::Equivalent))
            overall = v.kind;
        json row = {{"observer", th.show()}, {"verdict", showVerdict(v.kind)}};
        if (v.distinguished()) {
            row["witness"] = v.witnessText();
            if (kind == "trace") row["onlyIn"] = v.side == 1 ? ln : rn;
            else row["moves"] = v.moves;
        }
        if (!v.note.empty()) row["note"] = v.note;
        rows.push_back(row);
        if (!o.json) {
            std::cout << "under " << th.show() << ": " << showVerdict(v.kind);
            if (v.distinguished() && kind == "trace") std::cout << " (only " << (v.side == 1 ? ln : rn) << " has the trace)";
            std::cout << "\n";
            if (v.distinguished()) std::cout << "  witness: " << v.witnessText() << "\n";
            if (!v.note.empty()) std::cout << "  note: " << v.note << "\n";
        }
    }
    if (o.json)
        std::cout << json{{"command", "equiv"},  {"kind", kind},  {"left", ln},       {"right", rn},
                          {"verdict", showVerdict(overall)}, {"bounds", boundsJson(o, vals)}, {"results", rows}}
                         .dump(2)
                  << "\n";
    else
        std::cout << ln << " vs " << rn << " (" << kind << "): " << showVerdict(overall) << " [" << boundsText(o, vals)
                  << "]\n";
    return verdictExit(overall);
}

int cmdMaytest(const Opts& o, const std::vector<std::string>& observerRefs, const std::string& omegaName,
               const std::vector<std::string>& refs) {
    if (refs.size() != 2) throw UsageError("maytest takes two processes");
    if (observerRefs.empty()) throw UsageError("maytest needs at least one --observer");
    Procs ps;
    auto [ln, p] = ps.resolve(refs[0]);
    auto [rn, q] = ps.resolve(refs[1]);
    std::vector<std::pair<std::string, ProcP>> obsProcs;
    for (auto& r : observerRefs) {
        ps.lastFile.clear();
        obsProcs.push_back(ps.resolve(r));
    }
    Mode m = modeOf(o, ps);
    EnvFile env = loadEnv(o, ps.decls, true);
    TypingEnv obsEnv = loadObservers(o, ps.decls, env).front();
    Name omega = omegaName.empty() ? Name(kNone) : resolveName(ps.decls, omegaName);
    std::vector<Observer> observers;
    for (auto& [n, r] : obsProcs) observers.push_back({n, r, obsEnv});
    MayReport rep = mayTest(m, p, q, env.player, observers, omega, o.tauBound);
    json rows = json::array();
    std::string witness;
    for (auto& row : rep.rows) {
        json j = {{"observer", row.observer}, {"left", showBarb(row.left)}, {"right", showBarb(row.right)}};
        if (!row.error.empty()) j["error"] = row.error;
        if (row.distinguishes() && witness.empty())
            witness = "success reachable only from " + (row.left == Barb::Yes ? ln : rn) + "|" + row.observer;
        rows.push_back(j);
        if (!o.json) {
            if (!row.error.empty()) std::cout << row.observer << ": error: " << row.error << "\n";
            else
                std::cout << row.observer << ": " << ln << "|" << row.observer << " " << showBarb(row.left) << ", " << rn
                          << "|" << row.observer << " " << showBarb(row.right) << "\n";
        }
    }
    int code = rep.anyDistinguishes() || rep.anyError() ? kFail : rep.anyUnknown() ? kInconclusive : kOk;
    std::string verdict = code == kOk ? "not distinguished" : code == kFail && !witness.empty() ? "distinguished"
                                                                : code == kFail ? "error" : "inconclusive";
    if (o.json) {
        json j = {{"command", "maytest"}, {"left", ln}, {"right", rn}, {"verdict", verdict}, {"tauBound", o.tauBound}, {"results", rows}};
        if (!witness.empty()) j["witness"] = witness;
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << verdict << " (tau-bound " << o.tauBound << ")";
        if (!witness.empty()) std::cout << ": " << witness;
        std::cout << "\n";
    }
    return code;
}

int cmdPrune(const Opts& o, const std::string& namesText, bool verify, const std::string& ref) {
    Procs ps;
    auto [name, p] = ps.resolve(ref);
    Mode m = modeOf(o, ps);
    EnvFile env = loadEnv(o, ps.decls, true);
    NameSet S = parseNameSet(namesText, ps.decls);
    ProcP pr = prune(S, env.player.vis, p);
    json j = {{"command", "prune"}, {"proc", name}, {"pruned", show(pr)}};
    if (!o.json) std::cout << declHeader(m, {pr}) << "proc " << name << "_pruned = " << show(pr) << ";\n";
    int code = kOk;
    if (verify) {
        auto vals = parseValues(o.values);
        TypingEnv reduced = env.player;
        for (Name s : S) reduced.vis.m.erase(s);
        CheckResult r = check(m, reduced, pr);
        j["retypes"] = r.ok();
        if (!r.ok()) {
            j["error"] = errJson(*r.err);
            if (!o.json) std::cerr << "pruned process does not type under " << reduced.show() << ": " << r.err->show() << "\n";
            code = kFail;
        } else {
            TypingEnv th = loadObservers(o, ps.decls, env).front();
            Verdict v = traceEquivUnchecked(m, p, pr, th, {o.depth, o.tauBound, vals});
            j["verdict"] = showVerdict(v.kind);
            j["bounds"] = boundsJson(o, vals);
            if (v.distinguished()) j["witness"] = v.witnessText();
            if (!o.json) {
                std::cerr << "# trace check against the original: " << showVerdict(v.kind) << " [" << boundsText(o, vals) << "]\n";
                if (v.distinguished()) std::cerr << "#   witness: " << v.witnessText() << "\n";
            }
            code = verdictExit(v.kind);
        }
    }
    if (o.json) std::cout << j.dump(2) << "\n";
    return code;
}

int cmdAnalyze(const Opts& o, const std::string& what, const std::string& startVis, const std::string& declsFile,
               const std::string& traceFile) {
    if (what != "views" && what != "wb") throw UsageError("--check must be views or wb");
    Decls d;
    if (!declsFile.empty()) d = parseFile(readFile(declsFile)).decls;
    std::stringstream in(readFile(traceFile));
    std::string line, declText;
    std::vector<std::string> actionLines;
    while (std::getline(in, line)) {
        auto s = line.substr(0, line.find('#'));
        s.erase(0, s.find_first_not_of(" \t\r"));
        if (s.empty()) continue;
        auto w = s.substr(0, s.find_first_of(" \t"));
        if (w == "mode" || w == "ho" || w == "con" || w == "fo" || w == "succ") declText += s + "\n";
        else actionLines.push_back(s);
    }
    if (!declText.empty()) {
        if (declText.rfind("mode", 0) != 0) declText = "mode wb;\n" + declText;
        Decls extra = parseFile(declText).decls;
        for (auto& [n, c] : extra.classes) d.classes[n] = c;
    }
    Trace t;
    for (auto& a : actionLines) t.push_back(parseAction(a, d));
    json j = {{"command", "analyze-trace"}, {"check", what}, {"trace", showTrace(t)}};
    bool holds;
    std::string why;
    if (what == "views") {
        if (startVis.empty()) throw UsageError("--check views needs --start-vis");
        NameSet start = parseNameSet(startVis, d);
        int bad = viewViolation(start, t);
        holds = bad < 0;
        if (!holds) {
            why = "action " + std::to_string(bad + 1) + " (" + showAction(t[size_t(bad)]) + ") uses a name outside its view " +
                  showSet(view(start, Trace(t.begin(), t.begin() + bad)));
            j["position"] = bad + 1;
        }
        j["start"] = showSet(start);
    } else {
        auto [qi, ai] = bracketViolation(t);
        holds = qi < 0;
        if (!holds) {
            why = "answer " + std::to_string(ai + 1) + " (" + showAction(t[size_t(ai)]) + ") closes question " +
                  std::to_string(qi + 1) + " (" + showAction(t[size_t(qi)]) + ") out of order";
            j["question"] = qi + 1;
            j["answer"] = ai + 1;
        }
    }
    j["holds"] = holds;
    if (!why.empty()) j["reason"] = why;
    if (o.json) std::cout << j.dump(2) << "\n";
    else {
        std::cout << (what == "views" ? "views: " : "well-bracketing: ") << (holds ? "holds" : "violated") << "\n";
        if (!holds) std::cout << "  " << why << "\n";
    }
    return holds ? kOk : kFail;
}

int cmdGen(const Opts& o, int servers, int fo, int active, const std::string& envOut) {
    GenConfig cfg;
    if (o.mode == "wb") cfg.mode = Mode::WB;
    else if (o.mode.empty() || o.mode == "seq") cfg.mode = Mode::Seq;
    else throw UsageError("--mode must be seq or wb");
    cfg.depth = o.depth;
    cfg.servers = servers;
    cfg.fo = fo;
    cfg.values = parseValues(o.values);
    cfg.seed = o.seed;
    Rng rng(o.seed);
    bool act = active < 0 ? std::bernoulli_distribution(0.5)(rng) : active == 1;
    TypingEnv player = genEnv(cfg, rng, act);
    ProcP p = genTypable(cfg, player, rng);
    TypingEnv obs = genObserver(cfg, player, rng);
    std::string envText = "player " + player.show() + ";\nobserver " + obs.show() + ";\n";
    if (!envOut.empty()) {
        std::ofstream f(envOut);
        if (!f) throw UsageError("cannot write " + envOut);
        f << envText;
    }
    if (o.json) {
        std::cout << json{{"command", "gen"}, {"seed", o.seed}, {"mode", cfg.mode == Mode::Seq ? "seq" : "wb"},
                          {"depth", o.depth}, {"player", player.show()}, {"observer", obs.show()}, {"proc", show(p)}}
                         .dump(2)
                  << "\n";
        return kOk;
    }
    std::cout << "# seed " << o.seed << ", depth " << o.depth << "\n";
    std::cout << "# player " << player.show() << "\n# observer " << obs.show() << "\n";
    std::vector<Name> envNames;
    for (const TypingEnv* e : {&player, &obs}) {
        for (auto& [k, v] : e->vis.m) {
            if (k != kStar) envNames.push_back(k);
            envNames.insert(envNames.end(), v.begin(), v.end());
        }
        for (auto& el : e->stack) envNames.push_back(el.n);
    }
    std::cout << declHeader(cfg.mode, {p}, envNames) << "proc P = " << show(p) << ";\n";
    return kOk;
}

void common(CLI::App* sc, Opts& o, bool bounds) {
    sc->add_option("--mode", o.mode, "seq or wb (default: the process file's header)");
    sc->add_option("--env", o.env, "environment file: player vis {...} stack [...]; observer vis {...} stack [...];");
    sc->add_option("--obs", o.obs, "observer environment(s); overrides the observer section of --env");
    sc->add_option("--values", o.values, "values tried for first-order inputs")->capture_default_str();
    sc->add_flag("--json", o.json, "machine-readable report");
    if (bounds) {
        sc->add_option("--depth", o.depth, "interactions explored")->capture_default_str()->check(CLI::NonNegativeNumber);
        sc->add_option("--tau-bound", o.tauBound, "internal steps between interactions")->capture_default_str()->check(CLI::NonNegativeNumber);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"vispi: typed pi-calculus with visibility: checking, transitions, equivalences"};
    app.require_subcommand(1);
    Opts o;

    std::vector<std::string> procs;
    std::string kind = "trace", weak, names, startVis, what, declsFile, traceFile, envOut, omegaName;
    std::vector<std::string> observers;
    bool noGate = false, showObs = false, verify = false;
    int servers = 3, fo = 1, active = -1;

    auto* check = app.add_subcommand("check", "type-check processes under the player environment");
    common(check, o, false);
    check->add_flag("--no-transitivity-gate", noGate, "skip the transitivity requirement (testing only)");
    check->add_option("procs", procs, "file, file:Name, or Name")->required();

    auto* step = app.add_subcommand("step", "list one-step transitions (typed when --env is given)");
    common(step, o, true);
    step->add_option("--weak", weak, "weak transitions along this action, e.g. 'a?<>(b1)' or tau");
    step->add_option("proc", procs)->required();

    auto* traces = app.add_subcommand("traces", "typed traces up to a depth");
    common(traces, o, true);
    traces->add_flag("--show-obs", showObs, "inline the observer environment after each action");
    traces->add_option("proc", procs)->required();

    auto* equiv = app.add_subcommand("equiv", "bounded typed trace equivalence or bisimilarity");
    common(equiv, o, true);
    equiv->add_option("--kind", kind, "trace or bisim")->capture_default_str();
    equiv->add_option("procs", procs, "two processes")->required()->expected(2);

    auto* may = app.add_subcommand("maytest", "compare success barbs against observer processes");
    common(may, o, true);
    may->add_option("--observer", observers, "observer process (file or file:Name), repeatable")->required();
    may->add_option("--omega", omegaName, "success name to watch (default: any)");
    may->add_option("procs", procs, "two processes")->required()->expected(2);

    auto* pr = app.add_subcommand("prune", "drop the input branches that can only be triggered through the given names");
    common(pr, o, true);
    pr->add_option("--names", names, "names to prune, e.g. {a,d}")->required();
    pr->add_flag("--verify", verify, "re-type the result and compare traces with the original");
    pr->add_option("proc", procs)->required();

    auto* an = app.add_subcommand("analyze-trace", "check a trace for views or well-bracketing");
    an->add_option("--check", what, "views or wb")->required();
    an->add_option("--start-vis", startVis, "initial view, e.g. {a,b}");
    an->add_option("--decls", declsFile, "process file whose declarations give the name sorts");
    an->add_flag("--json", o.json, "machine-readable report");
    an->add_option("tracefile", traceFile, "one action per line; declaration lines allowed")->required();

    auto* gen = app.add_subcommand("gen", "generate a typable process with its environments");
    gen->add_option("--mode", o.mode, "seq or wb")->capture_default_str();
    gen->add_option("--seed", o.seed)->capture_default_str();
    gen->add_option("--depth", o.depth)->capture_default_str()->check(CLI::NonNegativeNumber);
    gen->add_option("--values", o.values)->capture_default_str();
    gen->add_option("--servers", servers, "free server names")->capture_default_str()->check(CLI::Range(1, 8));
    gen->add_option("--fo", fo, "free first-order names")->capture_default_str()->check(CLI::Range(0, 3));
    gen->add_option("--active", active, "1 = holds the thread, 0 = does not, -1 = random")->capture_default_str();
    gen->add_option("--env-out", envOut, "also write the environments to this file");
    gen->add_flag("--json", o.json, "machine-readable report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (*check) return cmdCheck(o, procs, noGate);
        if (*step) return cmdStep(o, procs.at(0), weak);
        if (*traces) return cmdTraces(o, procs.at(0), showObs);
        if (*equiv) return cmdEquiv(o, kind, procs);
        if (*may) return cmdMaytest(o, observers, omegaName, procs);
        if (*pr) return cmdPrune(o, names, verify, procs.at(0));
        if (*an) return cmdAnalyze(o, what, startVis, declsFile, traceFile);
        if (*gen) return cmdGen(o, servers, fo, active, envOut);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}
