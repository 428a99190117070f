#include "vispi/equiv.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

namespace vispi {

const char* showVerdict(VerdictKind k) {
    switch (k) {
        case VerdictKind::Equivalent: return "equivalent";
        case VerdictKind::Distinguished: return "distinguished";
        case VerdictKind::Inconclusive: return "inconclusive";
    }
    return "?";
}

std::string Verdict::witnessText() const {
    if (!moves.empty()) {
        std::string o;
        for (size_t i = 0; i < moves.size(); ++i) o += (i ? " ; " : "") + moves[i];
        return o;
    }
    if (kind == VerdictKind::Distinguished) return showTrace(trace) + (side == 1 ? " (left only)" : " (right only)");
    return "";
}

void requireTyped(Mode m, const ProcP& p, const ProcP& q, const TypingEnv& delta, const TypingEnv& theta) {
    if (!compatible(delta, theta, m))
        throw Error("environments are not compatible: " + delta.show() + " vs " + theta.show());
    if (auto r = check(m, delta, p); !r) throw Error("left process does not type: " + r.err->show());
    if (auto r = check(m, delta, q); !r) throw Error("right process does not type: " + r.err->show());
}

Verdict traceEquivUnchecked(Mode m, const ProcP& p, const ProcP& q, const TypingEnv& theta, const Bounds& b) {
    using detail::Macro;
    Verdict v;
    v.depth = b.depth;
    v.tauBound = b.tauBound;
    struct Pair {
        Trace t;
        Macro l, r;
    };
    Macro l0 = detail::closeMacro(m, theta, {p}, b.tauBound);
    Macro r0 = detail::closeMacro(m, theta, {q}, b.tauBound);
    bool trunc = l0.truncated || r0.truncated;
    std::vector<Pair> level{{{}, l0, r0}};
    for (int d = 0; d < b.depth && !level.empty(); ++d) {
        std::vector<Pair> next;
        std::set<std::string> seen;
        std::optional<std::pair<Trace, int>> best;
        auto offer = [&](Trace t, int side) {
            if (!best || showTrace(t) < showTrace(best->first)) best = {std::move(t), side};
        };
        for (auto& pr : level) {
            auto L = detail::expandMacro(m, pr.l, d + 1, b.values, b.tauBound);
            auto R = detail::expandMacro(m, pr.r, d + 1, b.values, b.tauBound);
            for (auto& [a, mc] : L) {
                trunc = trunc || mc.truncated;
                Trace t = pr.t;
                t.push_back(a);
                auto it = R.find(a);
                if (it == R.end()) {
                    offer(std::move(t), 1);
                    continue;
                }
                if (seen.insert(mc.key + '\x01' + it->second.key).second) next.push_back({std::move(t), mc, it->second});
            }
            for (auto& [a, mc] : R) {
                trunc = trunc || mc.truncated;
                if (L.count(a)) continue;
                Trace t = pr.t;
                t.push_back(a);
                offer(std::move(t), 2);
            }
        }
        if (best) {
            v.trace = best->first;
            v.side = best->second;
            if (trunc) {
                v.kind = VerdictKind::Inconclusive;
                v.note = "tau closure truncated; candidate witness " + v.witnessText();
            } else {
                v.kind = VerdictKind::Distinguished;
            }
            return v;
        }
        level = std::move(next);
    }
    if (trunc) {
        v.kind = VerdictKind::Inconclusive;
        v.note = "tau closure truncated at bound " + std::to_string(b.tauBound);
    }
    return v;
}

Verdict traceEquiv(Mode m, const ProcP& p, const ProcP& q, const TypingEnv& delta, const TypingEnv& theta,
                   const Bounds& b) {
    requireTyped(m, p, q, delta, theta);
    return traceEquivUnchecked(m, p, q, theta, b);
}

namespace {

struct BisimGame {
    Mode m;
    const Bounds& b;
    bool truncated = false;
    std::unordered_map<std::string, bool> memo;
    std::unordered_map<std::string, size_t> onStack;
    size_t height = 0;
    size_t lowest = SIZE_MAX;  // shallowest stack position assumed during the current subtree

    BisimGame(Mode mode, const Bounds& bounds) : m(mode), b(bounds) {}

    static std::string key(int k, int idx, const TypedState& l, const TypedState& r) {
        return std::to_string(k) + "," + std::to_string(idx) + "|" + l.obs.show() + "|" + show(l.proc) + "|" +
               show(r.proc);
    }

    // can every move of x (strong) be answered by y (weak)?
    bool challenge(int k, int idx, int tauRun, const TypedState& x, const TypedState& y, bool xLeft,
                   std::vector<std::string>& why) {
        for (auto& st : typedSteps(m, x, b.values, idx)) {
            bool inter = st.act.interaction();
            if (!inter && tauRun >= b.tauBound) {
                truncated = true;
                continue;
            }
            TypedWeak ans = typedWeakSteps(m, y, st.act, b.values, b.tauBound);
            truncated = truncated || ans.truncated;
            int nk = inter ? k - 1 : k;
            int ni = inter ? idx + 1 : idx;
            int nt = inter ? 0 : tauRun + 1;
            TypedState x2{st.next.obs, canonicalize(st.next.proc).proc};
            bool matched = false;
            std::vector<std::string> firstWhy;
            for (auto& y2 : ans.states) {
                std::vector<std::string> w;
                bool ok = xLeft ? play(nk, ni, nt, x2, y2, w) : play(nk, ni, nt, y2, x2, w);
                if (ok) {
                    matched = true;
                    break;
                }
                if (firstWhy.empty()) firstWhy = std::move(w);
            }
            if (!matched) {
                why.push_back(std::string(xLeft ? "left: " : "right: ") + showAction(st.act));
                why.insert(why.end(), firstWhy.begin(), firstWhy.end());
                return false;
            }
        }
        return true;
    }

    bool play(int k, int idx, int tauRun, const TypedState& l, const TypedState& r, std::vector<std::string>& why) {
        if (k <= 0) return true;
        std::string kk = key(k, idx, l, r);
        if (auto it = memo.find(kk); it != memo.end()) return it->second;
        if (auto it = onStack.find(kk); it != onStack.end()) {
            lowest = std::min(lowest, it->second);
            return true;
        }
        size_t me = height++;
        onStack.emplace(kk, me);
        size_t savedLowest = lowest;
        lowest = SIZE_MAX;
        bool ok = challenge(k, idx, tauRun, l, r, true, why) && challenge(k, idx, tauRun, r, l, false, why);
        onStack.erase(kk);
        --height;
        // positive answers that leaned on an ancestor's assumption are not cached
        if (!ok || lowest >= me) memo.emplace(kk, ok);
        lowest = std::min(savedLowest, lowest < me ? lowest : SIZE_MAX);
        return ok;
    }
};

}  // namespace

Verdict bisimUnchecked(Mode m, const ProcP& p, const ProcP& q, const TypingEnv& theta, const Bounds& b) {
    Verdict v;
    v.depth = b.depth;
    v.tauBound = b.tauBound;
    BisimGame g{m, b};
    TypedState l{theta, canonicalize(p).proc}, r{theta, canonicalize(q).proc};
    int idx = std::max(nextTraceIndex(p), nextTraceIndex(q));
    // iterative deepening so the reported witness is as short as possible
    for (int k = 1; k <= b.depth; ++k) {
        std::vector<std::string> why;
        if (!g.play(k, idx, 0, l, r, why)) {
            v.moves = why;
            v.depth = k;
            if (g.truncated) {
                v.kind = VerdictKind::Inconclusive;
                v.note = "tau bound reached; candidate witness " + v.witnessText();
            } else {
                v.kind = VerdictKind::Distinguished;
            }
            return v;
        }
    }
    if (g.truncated) {
        v.kind = VerdictKind::Inconclusive;
        v.note = "tau bound " + std::to_string(b.tauBound) + " reached";
    }
    return v;
}

Verdict bisim(Mode m, const ProcP& p, const ProcP& q, const TypingEnv& delta, const TypingEnv& theta, const Bounds& b) {
    requireTyped(m, p, q, delta, theta);
    return bisimUnchecked(m, p, q, theta, b);
}

bool MayReport::anyDistinguishes() const {
    return std::any_of(rows.begin(), rows.end(), [](const MayRow& r) { return r.distinguishes(); });
}
bool MayReport::anyUnknown() const {
    return std::any_of(rows.begin(), rows.end(), [](const MayRow& r) {
        return r.error.empty() && (r.left == Barb::Unknown || r.right == Barb::Unknown);
    });
}
bool MayReport::anyError() const {
    return std::any_of(rows.begin(), rows.end(), [](const MayRow& r) { return !r.error.empty(); });
}

MayReport mayTest(Mode m, const ProcP& p, const ProcP& q, const TypingEnv& delta, const std::vector<Observer>& observers,
                  Name omega, int tauBound) {
    MayReport rep;
    for (auto& o : observers) {
        MayRow row;
        row.observer = o.name;
        if (!compatible(delta, o.env, m)) {
            row.error = "environment " + o.env.show() + " is not compatible with " + delta.show();
        } else if (auto r = check(m, o.env, o.proc); !r) {
            row.error = "observer does not type: " + r.err->show();
        } else {
            row.left = barb(par2(o.proc, p), omega, tauBound);
            row.right = barb(par2(o.proc, q), omega, tauBound);
        }
        rep.rows.push_back(row);
    }
    return rep;
}

namespace {

std::set<Name> successNames(const ProcP& p) {
    std::set<Name> o;
    for (Name n : freeNames(p))
        if (cls(n) == NClass::Succ) o.insert(n);
    return o;
}

struct BarbGame {
    int tauBound;
    std::vector<Name> omegas;
    bool exhausted = false, truncated = false;
    std::unordered_map<std::string, std::string> barbMemo;
    std::unordered_map<std::string, bool> memo;
    std::unordered_map<std::string, size_t> onStack;
    size_t height = 0, lowest = SIZE_MAX;

    BarbGame(int tb, std::vector<Name> ws) : tauBound(tb), omegas(std::move(ws)) {}

    std::string barbs(const ProcP& p) {
        std::string k = show(p);
        if (auto it = barbMemo.find(k); it != barbMemo.end()) return it->second;
        std::string o;
        for (Name w : omegas) {
            Barb x = barb(p, w, tauBound);
            if (x == Barb::Unknown) truncated = true;
            o += str(w) + "=" + showBarb(x) + " ";
        }
        barbMemo.emplace(k, o);
        return o;
    }

    bool side(int k, const ProcP& x, const ProcP& y, bool xLeft, std::vector<std::string>& why) {
        for (auto& t : tauSteps(x)) {
            ProcP x2 = canonicalize(t).proc;
            Closure ys = tauClosure(y, tauBound);
            truncated = truncated || ys.truncated;
            bool matched = false;
            std::vector<std::string> firstWhy;
            for (auto& y2 : ys.states) {
                std::vector<std::string> w;
                if (xLeft ? play(k - 1, x2, y2, w) : play(k - 1, y2, x2, w)) {
                    matched = true;
                    break;
                }
                if (firstWhy.empty()) firstWhy = std::move(w);
            }
            if (!matched) {
                why.push_back(std::string(xLeft ? "left: tau" : "right: tau"));
                why.insert(why.end(), firstWhy.begin(), firstWhy.end());
                return false;
            }
        }
        return true;
    }

    bool play(int k, const ProcP& l, const ProcP& r, std::vector<std::string>& why) {
        std::string bl = barbs(l), br = barbs(r);
        if (bl != br) {
            why.push_back("barbs differ: left " + bl + "/ right " + br);
            return false;
        }
        std::string kk = show(l) + "|" + show(r);
        if (auto it = memo.find(kk); it != memo.end()) return it->second;
        if (auto it = onStack.find(kk); it != onStack.end()) {
            lowest = std::min(lowest, it->second);
            return true;
        }
        if (k <= 0) {
            if (!tauSteps(l).empty() || !tauSteps(r).empty()) exhausted = true;
            return true;
        }
        size_t me = height++;
        onStack.emplace(kk, me);
        size_t savedLowest = lowest;
        lowest = SIZE_MAX;
        bool ok = side(k, l, r, true, why) && side(k, r, l, false, why);
        onStack.erase(kk);
        --height;
        if (!ok || lowest >= me) memo.emplace(kk, ok);
        lowest = std::min(savedLowest, lowest < me ? lowest : SIZE_MAX);
        return ok;
    }
};

}  // namespace

Verdict barbedBisim(const ProcP& p, const ProcP& q, int depth, int tauBound) {
    Verdict v;
    v.depth = depth;
    v.tauBound = tauBound;
    std::set<Name> ws = successNames(p);
    for (Name w : successNames(q)) ws.insert(w);
    BarbGame g{tauBound, std::vector<Name>(ws.begin(), ws.end())};
    std::vector<std::string> why;
    bool ok = g.play(depth, canonicalize(p).proc, canonicalize(q).proc, why);
    if (!ok) {
        v.moves = why;
        v.kind = g.truncated ? VerdictKind::Inconclusive : VerdictKind::Distinguished;
        if (g.truncated) v.note = "tau bound reached while computing barbs";
        return v;
    }
    if (g.exhausted || g.truncated) {
        v.kind = VerdictKind::Inconclusive;
        v.note = g.exhausted ? "game depth exhausted" : "tau bound reached while computing barbs";
    }
    return v;
}

}  // namespace vispi
