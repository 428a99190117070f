#include "vispi/typedlts.hpp"

#include "vispi/typecheck.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace vispi {

std::optional<ObserverEnv> observe(Mode m, const ObserverEnv& obs, const Action& a) {
    const VisEnv& th = obs.vis;
    bool star = th.hasStar();
    switch (a.kind) {
        case Action::Omega: return std::nullopt;
        case Action::Tau:
            if (star) return std::nullopt;
            return obs;
        case Action::Out:
            if (a.isFO()) {
                if (!star) return std::nullopt;
                return obs;
            }
            if (star || !th.has(a.subj)) return std::nullopt;
            if (m == Mode::Seq) return ObserverEnv{extend(th, kStar, setInsert(th.at(a.subj), a.b)), {}};
            if (cls(a.subj) == NClass::Server) {
                NameSet v = setInsert(setInsert(th.at(a.subj), a.b), a.p);
                return ObserverEnv{extend(th, kStar, v), push(obs.stack, sOut(a.p))};
            } else {
                const Stack& s = obs.stack;
                if (s.size() < 2 || s[0] != sIn(a.subj) || !s[1].out) return std::nullopt;
                VisEnv t = extend(restrict(th, a.subj), kStar, setInsert(th.at(a.subj), a.b));
                return ObserverEnv{t, Stack(s.begin() + 1, s.end())};
            }
        case Action::In: {
            if (a.isFO()) {
                if (star) return std::nullopt;
                return obs;
            }
            if (!star || !setHas(th.at(kStar), a.subj)) return std::nullopt;
            NameSet v = setInsert(th.at(kStar), a.b);
            VisEnv t = th;
            t.m.erase(kStar);
            if (m == Mode::Seq) return ObserverEnv{extend(t, a.b, v), {}};
            if (cls(a.subj) == NClass::Server) {
                t = extend(extend(t, a.p, v), a.b, v);
                return ObserverEnv{t, push(obs.stack, sIn(a.p))};
            }
            const Stack& s = obs.stack;
            if (s.empty() || s[0] != sOut(a.subj)) return std::nullopt;
            return ObserverEnv{extend(t, a.b, v), Stack(s.begin() + 1, s.end())};
        }
    }
    return std::nullopt;
}

std::vector<TypedStep> typedSteps(Mode m, const TypedState& s, const std::vector<Value>& values, int freshIdx) {
    std::vector<TypedStep> out;
    for (auto& st : strongSteps(s.proc, values, freshIdx))
        if (auto o = observe(m, s.obs, st.act)) out.push_back({st.act, {*o, st.proc}});
    return out;
}

TypedWeak typedTauClosure(Mode, const TypedState& s, int tauBound) {
    TypedWeak out;
    if (s.obs.vis.hasStar()) {
        out.states.push_back({s.obs, canonicalize(s.proc).proc});
        return out;
    }
    Closure c = tauClosure(s.proc, tauBound);
    out.truncated = c.truncated;
    for (auto& p : c.states) out.states.push_back({s.obs, p});
    return out;
}

namespace {

int indexOf(const Action& mu) {
    for (Name n : boundNames(mu)) {
        const std::string& s = str(n);
        if (isReservedSpelling(s)) return std::stoi(s.substr(1));
    }
    return -1;
}

}  // namespace

TypedWeak typedWeakSteps(Mode m, const TypedState& s, const Action& mu, const std::vector<Value>& values, int tauBound) {
    TypedWeak pre = typedTauClosure(m, s, tauBound);
    if (mu.kind == Action::Tau) return pre;
    TypedWeak out;
    out.truncated = pre.truncated;
    auto obs2 = observe(m, s.obs, mu);
    if (!obs2) return out;
    std::unordered_set<std::string> seen;
    int idx = indexOf(mu);
    for (auto& st : pre.states) {
        for (auto& step : strongSteps(st.proc, values, idx)) {
            if (!(step.act == mu)) continue;
            TypedWeak post = typedTauClosure(m, {*obs2, step.proc}, tauBound);
            out.truncated = out.truncated || post.truncated;
            for (auto& q : post.states)
                if (seen.insert(show(q.proc)).second) out.states.push_back(q);
        }
    }
    return out;
}

std::vector<std::string> TraceSet::keys() const {
    std::vector<std::string> k;
    for (auto& t : traces) k.push_back(showTrace(t.trace));
    return k;
}

bool TraceSet::contains(const Trace& t) const {
    for (auto& x : traces)
        if (x.trace == t) return true;
    return false;
}

namespace detail {

Macro closeMacro(Mode m, const ObserverEnv& obs, const std::vector<ProcP>& seeds, int tauBound) {
    Macro mc;
    mc.obs = obs;
    std::map<std::string, ProcP> byKey;
    for (auto& p : seeds) {
        TypedWeak c = typedTauClosure(m, {obs, p}, tauBound);
        mc.truncated = mc.truncated || c.truncated;
        for (auto& s : c.states) byKey.emplace(show(s.proc), s.proc);
    }
    mc.key = obs.show();
    for (auto& [k, p] : byKey) {
        mc.key += "\n" + k;
        mc.states.push_back(p);
    }
    return mc;
}

// visible successors grouped by action
std::map<Action, Macro> expandMacro(Mode m, const Macro& mc, int idx, const std::vector<Value>& values, int tauBound) {
    std::map<Action, std::pair<ObserverEnv, std::vector<ProcP>>> seeds;
    for (auto& p : mc.states)
        for (auto& st : strongSteps(p, values, idx)) {
            if (st.act.kind == Action::Tau || st.act.kind == Action::Omega) continue;
            auto o = observe(m, mc.obs, st.act);
            if (!o) continue;
            auto& slot = seeds[st.act];
            slot.first = *o;
            slot.second.push_back(st.proc);
        }
    std::map<Action, Macro> out;
    for (auto& [a, sd] : seeds) out.emplace(a, closeMacro(m, sd.first, sd.second, tauBound));
    return out;
}

}  // namespace detail

TraceSet typedTraces(Mode m, const TypedState& s, int depth, const std::vector<Value>& values, int tauBound) {
    using detail::Macro;
    TraceSet out;
    out.depth = depth;
    std::unordered_map<std::string, std::map<Action, Macro>> memo;
    struct Item {
        TypedTrace t;
        Macro mc;
    };
    std::vector<Item> level;
    Macro m0 = detail::closeMacro(m, s.obs, {s.proc}, tauBound);
    out.truncated = m0.truncated;
    level.push_back({TypedTrace{{}, {s.obs}}, m0});
    out.traces.push_back(level[0].t);
    for (int d = 0; d < depth && !level.empty(); ++d) {
        std::vector<Item> next;
        for (auto& it : level) {
            std::string mk = std::to_string(d) + "#" + it.mc.key;
            auto f = memo.find(mk);
            if (f == memo.end()) f = memo.emplace(mk, detail::expandMacro(m, it.mc, d + 1, values, tauBound)).first;
            for (auto& [a, mc] : f->second) {
                out.truncated = out.truncated || mc.truncated;
                Item n{it.t, mc};
                n.t.trace.push_back(a);
                n.t.obs.push_back(mc.obs);
                next.push_back(std::move(n));
            }
        }
        std::sort(next.begin(), next.end(),
                  [](const Item& x, const Item& y) { return showTrace(x.t.trace) < showTrace(y.t.trace); });
        for (auto& it : next) out.traces.push_back(it.t);
        level = std::move(next);
    }
    return out;
}

namespace {

struct SRMacro {
    std::map<std::string, std::pair<TypingEnv, ProcP>> states;
    std::string key;
    bool truncated = false;
};

SRMacro srClose(Mode m, const std::vector<std::pair<TypingEnv, ProcP>>& seeds, int tauBound) {
    SRMacro mc;
    std::vector<std::pair<TypingEnv, ProcP>> frontier;
    auto add = [&](const TypingEnv& e, const ProcP& p, std::vector<std::pair<TypingEnv, ProcP>>& into) {
        ProcP c = canonicalize(p).proc;
        std::string k = e.show() + "\n" + show(c);
        if (mc.states.emplace(k, std::make_pair(e, c)).second) into.push_back({e, c});
    };
    for (auto& [e, p] : seeds) add(e, p, frontier);
    for (int d = 0; !frontier.empty(); ++d) {
        std::vector<std::pair<TypingEnv, ProcP>> next;
        for (auto& [e, p] : frontier)
            for (auto& q : tauSteps(p)) {
                Action tau;
                SRWitness w = subjectReductionWitness(m, e, p, tau, q);
                if (!w.env) continue;
                if (d >= tauBound) {
                    mc.truncated = true;
                    continue;
                }
                add(*w.env, q, next);
            }
        frontier = std::move(next);
    }
    for (auto& [k, _] : mc.states) mc.key += k + "\n";
    return mc;
}

}  // namespace

EmanatingSet emanatingTraces(Mode m, const TypingEnv& env, const ProcP& p, int depth, const std::vector<Value>& values,
                             int tauBound) {
    EmanatingSet out;
    struct Item {
        Trace t;
        SRMacro mc;
    };
    std::vector<Item> level{{{}, srClose(m, {{env, p}}, tauBound)}};
    out.truncated = level[0].mc.truncated;
    out.traces.push_back({});
    for (int d = 0; d < depth && !level.empty(); ++d) {
        std::vector<Item> next;
        std::set<std::string> seen;
        for (auto& it : level) {
            std::map<Action, std::vector<std::pair<TypingEnv, ProcP>>> seeds;
            for (auto& [k, st] : it.mc.states)
                for (auto& step : strongSteps(st.second, values, d + 1)) {
                    if (!step.act.interaction() || step.act.kind == Action::Omega) continue;
                    SRWitness w = subjectReductionWitness(m, st.first, st.second, step.act, step.proc);
                    if (w.env) seeds[step.act].push_back({*w.env, step.proc});
                }
            for (auto& [a, sd] : seeds) {
                SRMacro mc = srClose(m, sd, tauBound);
                out.truncated = out.truncated || mc.truncated;
                Trace t = it.t;
                t.push_back(a);
                out.traces.push_back(t);
                if (seen.insert(showTrace(t)).second) next.push_back({std::move(t), std::move(mc)});
            }
        }
        level = std::move(next);
    }
    return out;
}

}  // namespace vispi
