// one PASS/FAIL line per acceptance criterion; `acceptance 4 6` runs a subset
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "vispi/equiv.hpp"
#include "vispi/testkit.hpp"
#include "vispi/traceprops.hpp"
#include "vispi/typecheck.hpp"
#include "vispi/typedlts.hpp"

using namespace vispi;
using Clock = std::chrono::steady_clock;

namespace {

// pinned thresholds
constexpr double kGoldenSeconds = 1.0;
constexpr int kSRPerMode = 500, kSRDepth = 6, kSRWalk = 4;
constexpr double kSRSeconds = 300.0;
constexpr int kINCDepth = 10, kVisBehDepth = 6;
constexpr double kEquivSeconds = 60.0;
constexpr int kPruneExampleDepth = 8, kPruneInstances = 200, kPruneDepth = 5, kPruneTau = 16;
constexpr int kReentrantTau = 64, kReentrantBisimDepth = 10;
constexpr int kViewsPerMode = 300, kViewsDepth = 8, kViewsTau = 8;
constexpr int kWBInstances = 300, kWBDepth = 8, kWBTau = 8, kWBEmanatingDepth = 6, kWBEmanatingTau = 3;
constexpr int kCharPerMode = 100, kCharBound = 6, kCharObservers = 8;
constexpr int kOraclePerMode = 500, kOracleDepth = 4, kOracleTau = 3;
constexpr size_t kOracleCap = 20000;
constexpr int kLemmaInstances = 100, kLemmaPremiseDepth = 4, kLemmaDepth = 4, kLemmaTau = 8, kLemmaAttempts = 3000;

const std::vector<Value> kVals{Value::integer(0), Value::integer(1), Value::integer(2)};

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string slurp(const std::string& name) {
    std::ifstream in(std::string(VISPI_DATA_DIR) + "/" + name);
    if (!in) throw Error("missing data file " + name);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Example {
    ProcFile pf;
    EnvFile ef;
};
Example load(const std::string& stem) {
    Example e{parseFile(slurp(stem + ".proc")), {}};
    e.ef = parseEnvFile(slurp(stem + ".env"), e.pf.decls);
    return e;
}

struct Outcome {
    bool ok = true;
    std::string detail;
    void fail(const std::string& why) {
        if (ok) detail = why;
        ok = false;
    }
};

std::string fmt(const char* f, auto... xs) {
    std::string buf(std::snprintf(nullptr, 0, f, xs...), '\0');
    std::snprintf(buf.data(), buf.size() + 1, f, xs...);
    return buf;
}

std::set<std::string> keySet(const TraceSet& ts) {
    auto k = ts.keys();
    return {k.begin(), k.end()};
}

GenConfig config(Mode m, int depth, uint64_t seed) {
    GenConfig c;
    c.mode = m;
    c.depth = depth;
    c.seed = seed;
    return c;
}

const char* modeName(Mode m) { return m == Mode::Seq ? "seq" : "wb"; }

// a structurally congruent variant that still types; P+0 with P active is congruent but untypable
ProcP typedRewrite(Mode m, const TypingEnv& env, const ProcP& p, Rng& rng) {
    ProcP q = p;
    for (int i = 0; i < 2; ++i) {
        std::vector<ProcP> ok;
        for (auto& r : structCongruentStep(q))
            if (check(m, env, r).ok()) ok.push_back(r);
        if (!ok.empty()) q = ok[rng() % ok.size()];
    }
    return q == p ? par2(p, nil()) : q;
}

// ---- 1

Outcome golden() {
    Outcome o;
    auto timed = [&](const char* what, auto f) {
        auto t0 = Clock::now();
        bool good = f();
        double s = since(t0);
        if (!good) o.fail(std::string(what) + " gave the wrong verdict");
        else if (s >= kGoldenSeconds) o.fail(fmt("%s took %.2fs", what, s));
    };
    timed("display", [] {
        auto e = load("seq_display");
        return check(Mode::Seq, e.ef.player, e.pf.get("P")).ok();
    });
    timed("stored name", [] {
        auto e = load("not_typ_out");
        auto r = check(Mode::Seq, e.ef.player, e.pf.get("P"));
        return !r.ok() && r.err->rule == "O-HO" && r.err->witness.find("b") != std::string::npos;
    });
    timed("non-transitive environment", [] {
        auto e = load("ex_tr");
        auto r = check(Mode::Seq, e.ef.player, e.pf.get("P"));
        return !r.ok() && r.err->rule == "TRANS";
    });
    timed("cell increment", [] {
        auto e = load("ex_inc");
        return check(Mode::WB, e.ef.player, e.pf.get("P")).ok() && check(Mode::WB, e.ef.player, e.pf.get("Q")).ok();
    });
    timed("continuation used twice", [] {
        auto e = load("linearity");
        auto r = check(Mode::WB, e.ef.player, e.pf.get("P"));
        return !r.ok() && r.err->show().find("linear") != std::string::npos;
    });
    if (o.ok) o.detail = "5 golden verdicts, each under 1s";
    return o;
}

// ---- 2

Outcome subjectReduction() {
    Outcome o;
    auto t0 = Clock::now();
    std::string counts;
    for (Mode m : {Mode::Seq, Mode::WB}) {
        GenConfig cfg = config(m, kSRDepth, 11);
        Rng rng(cfg.seed);
        int procs = 0, checked = 0;
        std::map<std::string, int> outside;
        while (procs < kSRPerMode) {
            Instance in;
            try {
                in = genInstance(cfg, rng);
            } catch (const Error&) {
                continue;
            }
            ++procs;
            if (!check(m, in.player, in.proc).ok()) {
                o.fail(fmt("%s generator produced an untypable process", modeName(m)));
                continue;
            }
            // every transition from the root, then a random walk through typed derivatives
            TypingEnv env = in.player;
            ProcP p = in.proc;
            for (int stepNo = 0; stepNo <= kSRWalk; ++stepNo) {
                std::vector<std::pair<TypingEnv, ProcP>> next;
                for (auto& st : strongSteps(p, cfg.values, stepNo + 1)) {
                    SRWitness w = subjectReductionWitness(m, env, p, st.act, st.proc);
                    if (!w.env) {
                        ++outside[w.reason];
                        continue;
                    }
                    ++checked;
                    auto r = check(m, *w.env, st.proc);
                    if (!r.ok())
                        o.fail(fmt("%s: %s --%s--> %s does not re-type under %s: %s", modeName(m), show(p).c_str(),
                                   showAction(st.act).c_str(), show(st.proc).c_str(), w.env->show().c_str(),
                                   r.err->show().c_str()));
                    else next.push_back({*w.env, st.proc});
                }
                if (next.empty()) break;
                auto& pick = next[std::uniform_int_distribution<size_t>(0, next.size() - 1)(rng)];
                env = pick.first;
                p = pick.second;
            }
        }
        std::string why;
        for (auto& [r, n] : outside) why += fmt("%s%s %d", why.empty() ? "" : ", ", r.c_str(), n);
        counts += fmt("%s: %d processes, %d transitions re-typed, not covered: %s; ", modeName(m), procs, checked, why.c_str());
    }
    double s = since(t0);
    if (s >= kSRSeconds) o.fail(fmt("took %.1fs", s));
    if (o.ok) o.detail = counts + "0 failures";
    return o;
}

// ---- 3

Outcome transitivityNecessity() {
    Outcome o;
    auto e = load("ex_tr");
    CheckOptions off;
    off.transitivityGate = false;
    ProcP p = e.pf.get("P");
    if (check(Mode::Seq, e.ef.player, p).ok()) o.fail("the gate did not reject the configuration");
    if (!check(Mode::Seq, e.ef.player, p, off).ok()) o.fail("without the gate the configuration still does not type");
    auto taus = tauSteps(p);
    if (taus.empty()) o.fail("no internal step");
    for (auto& q : taus) {
        Action tau;
        SRWitness w = subjectReductionWitness(Mode::Seq, e.ef.player, p, tau, q);
        if (!w.env) {
            o.fail("no environment for the internal step");
            continue;
        }
        if (check(Mode::Seq, *w.env, q, off).ok()) o.fail("the derivative " + show(q) + " re-types");
    }
    if (o.ok) o.detail = "types without the gate; its internal derivative does not re-type";
    return o;
}

// ---- 4

Outcome equalities() {
    Outcome o;
    double worst = 0;
    auto family = [](const std::string& stem, const Decls& d) { return parseEnvFamily(slurp(stem + ".obs"), d); };
    auto run = [&](const std::string& stem, const char* left, const char* right, int depth) {
        auto e = load(stem);
        auto fam = family(stem, e.pf.decls);
        if (fam.size() != 5) o.fail(stem + ": observer family does not have 5 members");
        Bounds b;
        b.depth = depth;
        for (auto& th : fam) {
            auto t0 = Clock::now();
            Verdict v = traceEquiv(Mode::WB, e.pf.get(left), e.pf.get(right), e.ef.player, th, b);
            double s = since(t0);
            worst = std::max(worst, s);
            if (!v.equivalent()) o.fail(stem + " under " + th.show() + ": " + showVerdict(v.kind) + " " + v.witnessText());
            if (s >= kEquivSeconds) o.fail(fmt("%s took %.1fs", stem.c_str(), s));
        }
    };
    run("ex_inc", "P", "Q", kINCDepth);
    run("vis_beh_effect", "P", "Inlined", kVisBehDepth);
    if (o.ok) o.detail = fmt("both pairs equivalent under all 5 observers, slowest run %.2fs", worst);
    return o;
}

// ---- 5

NameSet prunable(const TypingEnv& delta, const TypingEnv& theta, Rng& rng) {
    VisEnv u = unionEnv(delta.vis, theta.vis);
    NameSet seen = u.at(kStar);
    std::vector<Name> cands;
    for (auto& [k, v] : delta.vis.m)
        if (k != kStar && cls(k) == NClass::Server && !setHas(seen, k)) cands.push_back(k);
    NameSet s;
    for (Name n : cands)
        if (std::bernoulli_distribution(0.6)(rng)) s.push_back(n);
    if (s.empty() && !cands.empty()) s.push_back(cands[0]);
    return mkSet(s);
}

TypingEnv without(const TypingEnv& e, const NameSet& s) {
    TypingEnv o = e;
    for (Name n : s) o.vis = restrict(o.vis, n);
    return o;
}

Outcome pruning() {
    Outcome o;
    {
        auto e = load("ex_prun");
        Bounds b;
        b.depth = kPruneExampleDepth;
        Verdict v = traceEquiv(Mode::Seq, e.pf.get("P"), e.pf.get("Pruned"), e.ef.player, e.ef.observer, b);
        if (!v.equivalent()) o.fail("worked example: " + std::string(showVerdict(v.kind)) + " " + v.witnessText());
    }
    int done = 0, trivial = 0, truncated = 0, attempts = 0;
    // the pruning lemma belongs to the sequential calculus: with a pending stack, a pruned input left as 0 does not type
    for (Mode m : {Mode::Seq}) {
        GenConfig cfg = config(m, 4, 21);
        Rng rng(cfg.seed);
        int target = kPruneInstances;
        int here = 0;
        while (here < target && attempts < 20 * kPruneInstances) {
            ++attempts;
            Instance in;
            try {
                in = genInstance(cfg, rng);
            } catch (const Error&) {
                continue;
            }
            NameSet s = prunable(in.player, in.observer, rng);
            if (s.empty()) {
                ++trivial;
                continue;
            }
            ProcP q = prune(s, in.player.vis, in.proc);
            TypingEnv smaller = without(in.player, s);
            auto r = check(m, smaller, q);
            if (!r.ok()) {
                o.fail(fmt("%s: pruning %s from %s gives %s, untypable under %s: %s", modeName(m), showSet(s).c_str(),
                           show(in.proc).c_str(), show(q).c_str(), smaller.show().c_str(), r.err->show().c_str()));
                ++here;
                continue;
            }
            TraceSet a = typedTraces(m, {in.observer, in.proc}, kPruneDepth, cfg.values, kPruneTau);
            TraceSet b = typedTraces(m, {in.observer, q}, kPruneDepth, cfg.values, kPruneTau);
            if (a.truncated || b.truncated) {
                ++truncated;
                continue;
            }
            ++here;
            if (keySet(a) != keySet(b))
                o.fail(fmt("%s: trace sets differ after pruning %s from %s", modeName(m), showSet(s).c_str(),
                           show(in.proc).c_str()));
        }
        done += here;
    }
    if (done < kPruneInstances) o.fail(fmt("only %d instances", done));
    if (o.ok)
        o.detail = fmt("worked example equivalent at depth %d; %d generated instances agree (%d with nothing to prune and "
                       "%d truncated searches skipped)",
                       kPruneExampleDepth, done, trivial, truncated);
    return o;
}

// ---- 6

Outcome reentrant() {
    Outcome o;
    auto pf = parseFile(slurp("reentrant.proc"));
    auto of = parseFile(slurp("reentrant_observer.proc"));
    auto ef = parseEnvFile(slurp("reentrant.env"), pf.decls);
    auto obsEnv = parseEnvFile(slurp("reentrant.env"), of.decls).observer;
    ProcP q1 = pf.get("Q1"), q2 = pf.get("Q2");
    MayReport r = mayTest(Mode::WB, q1, q2, ef.player, {{"R", of.get("R"), obsEnv}}, kNone, kReentrantTau);
    if (r.rows.size() != 1 || !r.rows[0].error.empty()) o.fail("observer R rejected: " + r.rows[0].error);
    else if (r.rows[0].left != Barb::No || r.rows[0].right != Barb::Yes)
        o.fail(std::string("Q1|R ") + showBarb(r.rows[0].left) + ", Q2|R " + showBarb(r.rows[0].right));
    // observers holding a, with or without a pending answer
    Decls d = pf.decls;
    std::vector<std::pair<std::string, std::string>> thetas{
        {"vis { *: {a} }", ""},
        {"vis { *: {a,s} }", "[s!]"},
        {"vis { *: {a,t} }", "[t!]"},
        {"vis { *: {a,s,t} }", "[s!]"},
        {"vis { *: {a,s}; t: {a} }", "[s!]"},
    };
    Bounds b;
    b.depth = kReentrantBisimDepth;
    int n = 0;
    for (auto& [vis, st] : thetas) {
        TypingEnv th{parseVis(vis, d), st.empty() ? Stack{} : parseStack(st, d)};
        if (!compatible(ef.player, th, Mode::WB)) {
            o.fail("test observer " + th.show() + " is not compatible");
            continue;
        }
        Verdict v = bisim(Mode::WB, q1, q2, ef.player, th, b);
        ++n;
        if (!v.distinguished()) o.fail("bisim under " + th.show() + ": " + showVerdict(v.kind));
    }
    if (o.ok) o.detail = fmt("Q1|R no, Q2|R yes within tau-bound %d; bisim distinguishes under %d observers", kReentrantTau, n);
    return o;
}

// ---- 7

Outcome views() {
    Outcome o;
    int traces = 0, procs = 0;
    for (Mode m : {Mode::Seq, Mode::WB}) {
        GenConfig cfg = config(m, 4, 31);
        Rng rng(cfg.seed);
        int here = 0;
        while (here < kViewsPerMode) {
            Instance in;
            try {
                in = genInstance(cfg, rng);
            } catch (const Error&) {
                continue;
            }
            ++here;
            NameSet start = unionEnv(in.player.vis, in.observer.vis).at(kStar);
            TraceSet ts = typedTraces(m, {in.observer, in.proc}, kViewsDepth, cfg.values, kViewsTau);
            for (auto& t : ts.traces) {
                ++traces;
                int bad = viewViolation(start, t.trace);
                if (bad >= 0)
                    o.fail(fmt("%s: %s under %s: trace %s leaves its view at %d", modeName(m), show(in.proc).c_str(),
                               in.observer.show().c_str(), showTrace(t.trace).c_str(), bad + 1));
            }
        }
        procs += here;
    }
    if (o.ok) o.detail = fmt("%d processes, %d traces up to depth %d, all within their views", procs, traces, kViewsDepth);
    return o;
}

// ---- 8

Outcome bracketing() {
    Outcome o;
    GenConfig cfg = config(Mode::WB, 4, 41);
    Rng rng(cfg.seed);
    int procs = 0, traces = 0;
    while (procs < kWBInstances) {
        Instance in;
        try {
            in = genInstance(cfg, rng);
        } catch (const Error&) {
            continue;
        }
        if (!isClean(in.player.stack)) continue;
        ++procs;
        auto judge = [&](const Trace& t, const char* how) {
            ++traces;
            auto [q, a] = bracketViolation(t);
            if (q >= 0 || a >= 0)
                o.fail(fmt("%s (%s): trace %s answers out of order", show(in.proc).c_str(), how, showTrace(t).c_str()));
        };
        EmanatingSet em = emanatingTraces(Mode::WB, in.player, in.proc, kWBEmanatingDepth, cfg.values, kWBEmanatingTau);
        for (auto& t : em.traces) judge(t, "emanating");
        TraceSet ts = typedTraces(Mode::WB, {in.observer, in.proc}, kWBDepth, cfg.values, kWBTau);
        for (auto& t : ts.traces) judge(t.trace, "observed");
    }
    if (o.ok) o.detail = fmt("%d clean-stack processes, %d traces (emanating to depth %d, observed to depth %d), all well bracketed",
                       procs, traces, kWBEmanatingDepth, kWBDepth);
    return o;
}

// ---- 9

Outcome characterisation() {
    Outcome o;
    int instances = 0, distinctions = 0, equivalents = 0, inconclusive = 0;
    for (Mode m : {Mode::Seq, Mode::WB}) {
        GenConfig cfg = config(m, 3, 51);
        GenConfig obsCfg = cfg;
        obsCfg.w.succ = 3;
        obsCfg.depth = 4;
        Rng rng(cfg.seed);
        int here = 0, attempts = 0;
        while (here < kCharPerMode && attempts < 20 * kCharPerMode) {
            ++attempts;
            Instance in;
            ProcP q;
            std::vector<Observer> obs;
            try {
                in = genInstance(cfg, rng);
                int src = std::uniform_int_distribution<int>(0, 2)(rng);
                if (src == 0) {
                    q = typedRewrite(m, in.player, in.proc, rng);
                } else if (src == 1) {
                    NameSet s = prunable(in.player, in.observer, rng);
                    q = prune(s, in.player.vis, in.proc);
                    if (!check(m, in.player, q).ok()) q = genTypable(cfg, in.player, rng);
                } else {
                    q = genTypable(cfg, in.player, rng);
                }
                for (int k = 0; k < kCharObservers; ++k)
                    obs.push_back({"R" + std::to_string(k), genTypable(obsCfg, in.observer, rng), in.observer});
            } catch (const Error&) {
                continue;
            }
            Bounds b;
            b.depth = kCharBound;
            b.tauBound = kCharBound;
            b.values = cfg.values;
            Verdict v = traceEquiv(m, in.proc, q, in.player, in.observer, b);
            if (v.kind == VerdictKind::Inconclusive) {
                ++inconclusive;
                continue;
            }
            ++here;
            MayReport r = mayTest(m, in.proc, q, in.player, obs, kNone, kCharBound);
            for (auto& row : r.rows) {
                if (!row.error.empty()) {
                    o.fail(fmt("%s: generated observer rejected: %s", modeName(m), row.error.c_str()));
                    continue;
                }
                if (!row.distinguishes()) continue;
                ++distinctions;
                if (!v.distinguished())
                    o.fail(fmt("%s: %s vs %s equivalent at depth %d yet observer %s separates them", modeName(m),
                               show(in.proc).c_str(), show(q).c_str(), kCharBound, show(obs[0].proc).c_str()));
            }
            equivalents += v.equivalent();
        }
        instances += here;
        if (here < kCharPerMode) o.fail(fmt("%s: only %d instances", modeName(m), here));
    }
    if (o.ok)
        o.detail = fmt("%d instances (%d trace-equivalent), %d may-test distinctions all matched by trace differences, %d "
                       "inconclusive skipped",
                       instances, equivalents, distinctions, inconclusive);
    return o;
}

// ---- 10

Outcome oracle() {
    Outcome o;
    std::string counts;
    for (Mode m : {Mode::Seq, Mode::WB}) {
        GenConfig cfg = config(m, 4, 61);
        Rng rng(cfg.seed);
        int agree = 0, capped = 0, attempts = 0;
        while (agree < kOraclePerMode && attempts < 4 * kOraclePerMode) {
            ++attempts;
            Instance in;
            try {
                in = genInstance(cfg, rng);
            } catch (const Error&) {
                continue;
            }
            std::set<std::string> brute;
            try {
                brute = bruteTraces(m, in.proc, in.observer, kOracleDepth, cfg.values, kOracleTau, kOracleCap);
            } catch (const Error&) {
                ++capped;
                continue;
            }
            TraceSet ts = typedTraces(m, {in.observer, in.proc}, kOracleDepth, cfg.values, kOracleTau);
            if (keySet(ts) == brute) ++agree;
            else {
                o.fail(fmt("%s: disagreement on %s under %s", modeName(m), show(in.proc).c_str(), in.observer.show().c_str()));
                break;
            }
        }
        if (agree < kOraclePerMode && o.ok) o.fail(fmt("%s: only %d instances compared", modeName(m), agree));
        counts += fmt("%s %d (%d over the interpreter cap skipped); ", modeName(m), agree, capped);
    }
    if (o.ok) o.detail = "agreement on " + counts + "0 disagreements";
    return o;
}

// ---- 11

struct LemmaCase {
    Mode m = Mode::Seq;
    TypingEnv delta, theta;
    ProcP p, q;
};

enum class Kind { Trace, Bisim };

Verdict compare(Kind k, const ProcP& p, const ProcP& q, const TypingEnv& d, const TypingEnv& th, int depth) {
    Bounds b;
    b.depth = depth;
    b.tauBound = kLemmaTau;
    return k == Kind::Trace ? traceEquiv(Mode::Seq, p, q, d, th, b) : bisim(Mode::Seq, p, q, d, th, b);
}

Name serverName(const std::string& s) { return intern(s, NClass::Server); }

// a partner for p that is equivalent by construction
ProcP partner(const GenConfig& cfg, const TypingEnv& delta, const TypingEnv& theta, const ProcP& p, Rng& rng) {
    switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
        case 0: return typedRewrite(cfg.mode, delta, p, rng);
        case 1: {
            ProcP q = prune(prunable(delta, theta, rng), delta.vis, p);
            if (check(cfg.mode, delta, q).ok()) return q;
            return par2(p, nil());
        }
        default: {
            Name z = serverName("zz");
            return par2(p, res(z, inp(z, kNone, kNone, kNone, nil())));
        }
    }
}

struct Conclusion {
    TypingEnv delta, theta;
    ProcP p, q;
};

using Build = std::function<std::optional<Conclusion>(const GenConfig&, Rng&, LemmaCase&)>;

bool okEnvs(const TypingEnv& d, const TypingEnv& th) {
    return checkTransitive(d.vis) && checkTransitive(th.vis) && checkTransitive(unionEnv(d.vis, th.vis)) &&
           compatible(d, th, Mode::Seq);
}

NameSet closeUnder(NameSet s, const VisEnv& e) {
    for (bool grew = true; grew;) {
        grew = false;
        for (Name n : NameSet(s))
            for (Name x : e.at(n))
                if (!setHas(s, x)) s = setInsert(s, x), grew = true;
    }
    return s;
}

// premise from a generated instance, conclusion from the lemma
std::optional<Conclusion> lemRestriction(const GenConfig& cfg, Rng& rng, LemmaCase& c) {
    Instance in = genInstance(cfg, rng);
    c = {Mode::Seq, in.player, in.observer, in.proc, partner(cfg, in.player, in.observer, in.proc, rng)};
    std::vector<Name> names;
    for (Name n : freeNames(c.p))
        if (cls(n) == NClass::Server) names.push_back(n);
    if (names.empty()) return std::nullopt;
    Name a = names[rng() % names.size()];
    return Conclusion{{restrict(c.delta.vis, a), {}}, {restrict(c.theta.vis, a), {}}, res(a, c.p), res(a, c.q)};
}

std::optional<Conclusion> lemInput(const GenConfig& cfg, Rng& rng, LemmaCase& c) {
    TypingEnv base = genEnv(cfg, rng, false);
    std::vector<Name> dom;
    for (auto& [k, v] : base.vis.m)
        if (cls(k) == NClass::Server) dom.push_back(k);
    if (dom.empty()) return std::nullopt;
    Name a = dom[rng() % dom.size()];
    Name b = serverName("rb");
    base.vis = transitiveClosure(extend(restrict(base.vis, a), a, setInsert(base.vis.at(a), a)));
    TypingEnv delta{extend(base.vis, kStar, setInsert(base.vis.at(a), b)), {}};
    TypingEnv th0 = genObserver(cfg, delta, rng);
    NameSet y = mkSet({a});
    for (Name n : base.vis.at(a))
        if (std::bernoulli_distribution(0.4)(rng)) y = setInsert(y, n);
    y = closeUnder(y, unionEnv(base.vis, th0.vis));
    TypingEnv theta{extend(th0.vis, b, setInsert(y, b)), {}};
    if (!okEnvs(delta, theta)) return std::nullopt;
    ProcP p = genTypable(cfg, delta, rng);
    c = {Mode::Seq, delta, theta, p, partner(cfg, delta, theta, p, rng)};
    Name x = intern("xi", NClass::Var);
    VisEnv noStar = delta.vis;
    noStar.m.erase(kStar);
    TypingEnv dc{restrict(noStar, b), {}};
    VisEnv tc = extend(theta.vis, kStar, theta.vis.at(b));
    return Conclusion{dc, {restrict(tc, b), {}}, inp(a, x, b, kNone, c.p), inp(a, x, b, kNone, c.q)};
}

std::optional<Conclusion> lemOutput(const GenConfig& cfg, Rng& rng, LemmaCase& c) {
    TypingEnv base = genEnv(cfg, rng, false);
    auto servers = serverPool(cfg.servers);
    Name a = servers[rng() % servers.size()];
    Name b = serverName("rb");
    NameSet v = mkSet({a});
    for (Name n : servers)
        if (std::bernoulli_distribution(0.4)(rng)) v = setInsert(v, n);
    v = closeUnder(v, base.vis);
    // the conclusion's player holds the thread and sees v
    TypingEnv dc{extend(base.vis, kStar, v), {}};
    if (!checkTransitive(dc.vis)) return std::nullopt;
    TypingEnv tc = genObserver(cfg, dc, rng);
    if (!tc.vis.has(a)) tc.vis = extend(tc.vis, a, closeUnder(setInsert({}, a), unionEnv(dc.vis, tc.vis)));
    TypingEnv delta{extend(base.vis, b, setInsert(v, b)), {}};
    TypingEnv theta{extend(tc.vis, kStar, setInsert(tc.vis.at(a), b)), {}};
    if (!okEnvs(dc, tc) || !okEnvs(delta, theta)) return std::nullopt;
    ProcP p = genTypable(cfg, delta, rng);
    c = {Mode::Seq, delta, theta, p, partner(cfg, delta, theta, p, rng)};
    Value val = cfg.values[rng() % cfg.values.size()];
    return Conclusion{dc, tc, out(a, lit(val), b, kNone, c.p), out(a, lit(val), b, kNone, c.q)};
}

std::optional<Conclusion> lemParallel(const GenConfig& cfg, Rng& rng, LemmaCase& c) {
    Instance in = genInstance(cfg, rng);
    c = {Mode::Seq, in.player, in.observer, in.proc, partner(cfg, in.player, in.observer, in.proc, rng)};
    auto parts = split(c.theta.vis, Mode::Seq);
    if (parts.empty()) return std::nullopt;
    auto& [t1, t2] = parts[rng() % parts.size()];
    TypingEnv env2{t2, {}};
    ProcP r = genTypable(cfg, env2, rng);
    TypingEnv dc{transitiveClosure(unionEnv(c.delta.vis, t2)), {}};
    return Conclusion{dc, {t1, {}}, par2(c.p, r), par2(c.q, r)};
}

std::optional<Conclusion> lemShrinking(const GenConfig& cfg, Rng& rng, LemmaCase& c) {
    Instance in = genInstance(cfg, rng);
    c = {Mode::Seq, in.player, in.observer, in.proc, partner(cfg, in.player, in.observer, in.proc, rng)};
    VisEnv s;
    for (auto& [k, v] : c.theta.vis.m) {
        if (k != kStar && std::bernoulli_distribution(0.3)(rng)) continue;
        NameSet keep;
        for (Name n : v)
            if (std::bernoulli_distribution(0.7)(rng)) keep = setInsert(keep, n);
        s.m[k] = keep;
    }
    if (!subsetOf(s, c.theta.vis) || s == c.theta.vis) return std::nullopt;
    return Conclusion{c.delta, {s, {}}, c.p, c.q};
}

std::optional<Conclusion> lemExtension(const GenConfig& cfg, Rng& rng, LemmaCase& c) {
    Instance in = genInstance(cfg, rng);
    c = {Mode::Seq, in.player, in.observer, in.proc, partner(cfg, in.player, in.observer, in.proc, rng)};
    NameSet used;
    for (auto& [k, v] : c.theta.vis.m) {
        if (k != kStar) used = setInsert(used, k);
        used = setUnion(used, v);
    }
    for (auto& p : {c.p, c.q})
        for (Name n : freeNames(p)) used = setInsert(used, n);
    std::vector<Name> spare;
    for (Name n : serverPool(8))
        if (!setHas(used, n)) spare.push_back(n);
    if (spare.empty()) return std::nullopt;
    Name u = spare[rng() % spare.size()];
    VisEnv e = c.theta.vis;
    for (auto& [k, v] : e.m)
        if (std::bernoulli_distribution(0.5)(rng)) v = setInsert(v, u);
    e = extend(e, u, mkSet({u}));
    if (projection(used, e) != c.theta.vis) return std::nullopt;
    return Conclusion{c.delta, {e, {}}, c.p, c.q};
}

Outcome lemmas() {
    Outcome o;
    std::vector<std::pair<const char*, Build>> all{{"restriction", lemRestriction}, {"input", lemInput},
                                                   {"output", lemOutput},           {"parallel", lemParallel},
                                                   {"shrinking", lemShrinking},     {"extension", lemExtension}};
    std::string counts;
    uint64_t seed = 71;
    for (auto& [name, build] : all) {
        GenConfig cfg = config(Mode::Seq, 3, seed++);
        Rng rng(cfg.seed);
        int applicable = 0, skipped = 0, attempts = 0;
        while (applicable < kLemmaInstances && attempts < kLemmaAttempts) {
            ++attempts;
            LemmaCase c;
            std::optional<Conclusion> cc;
            try {
                cc = build(cfg, rng, c);
            } catch (const Error&) {
                ++skipped;
                continue;
            }
            if (!cc) {
                ++skipped;
                continue;
            }
            try {
                requireTyped(Mode::Seq, cc->p, cc->q, cc->delta, cc->theta);
            } catch (const Error&) {
                ++skipped;
                continue;
            }
            bool premiseOk = true;
            for (Kind k : {Kind::Trace, Kind::Bisim}) {
                Verdict pre = compare(k, c.p, c.q, c.delta, c.theta, kLemmaPremiseDepth);
                if (pre.distinguished()) {
                    o.fail(fmt("%s: equivalent-by-construction pair %s / %s reported distinct (%s)", name, show(c.p).c_str(),
                               show(c.q).c_str(), pre.witnessText().c_str()));
                    premiseOk = false;
                } else if (!pre.equivalent()) premiseOk = false;
            }
            if (!premiseOk) {
                ++skipped;
                continue;
            }
            ++applicable;
            for (Kind k : {Kind::Trace, Kind::Bisim}) {
                Verdict v = compare(k, cc->p, cc->q, cc->delta, cc->theta, kLemmaDepth);
                if (v.distinguished())
                    o.fail(fmt("%s (%s): %s vs %s distinguished under %s / %s by %s", name, k == Kind::Trace ? "trace" : "bisim",
                               show(cc->p).c_str(), show(cc->q).c_str(), cc->delta.show().c_str(), cc->theta.show().c_str(),
                               v.witnessText().c_str()));
            }
        }
        if (applicable < kLemmaInstances) o.fail(fmt("%s: only %d applicable instances", name, applicable));
        counts += fmt("%s %d/%d, ", name, applicable, skipped);
    }
    if (o.ok) o.detail = "applicable/skipped per lemma: " + counts + "trace and bisim, 0 failures";
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::pair<int, std::function<Outcome()>>> criteria{
        {1, golden},       {2, subjectReduction}, {3, transitivityNecessity}, {4, equalities},
        {5, pruning},      {6, reentrant},        {7, views},                 {8, bracketing},
        {9, characterisation}, {10, oracle},      {11, lemmas},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
    int failed = 0;
    for (auto& [n, f] : criteria) {
        if (!only.empty() && !only.count(n)) continue;
        auto t0 = Clock::now();
        Outcome o;
        try {
            o = f();
        } catch (const std::exception& e) {
            o.fail(std::string("exception: ") + e.what());
        }
        failed += !o.ok;
        std::cout << "criterion " << n << ": " << (o.ok ? "PASS" : "FAIL") << "  " << o.detail << fmt("  (%.1fs)", since(t0))
                  << std::endl;
    }
    return failed ? 1 : 0;
}
