#include "vispi/lts.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <unordered_set>

namespace vispi {

std::string showAction(const Action& a) {
    auto val = [&] { return a.v.kind == Value::Unit ? std::string("<>") : "<" + a.v.show() + ">"; };
    switch (a.kind) {
        case Action::Tau: return "tau";
        case Action::Omega: return str(a.subj);
        case Action::In:
        case Action::Out: {
            std::string o = str(a.subj) + (a.kind == Action::In ? "?" : "!") + val();
            if (a.b != kNone) {
                o += "(" + str(a.b);
                if (a.p != kNone) o += "," + str(a.p);
                o += ")";
            }
            return o;
        }
    }
    return "?";
}

std::string showTrace(const Trace& t) {
    if (t.empty()) return "eps";
    std::string o;
    for (size_t i = 0; i < t.size(); ++i) o += (i ? " . " : "") + showAction(t[i]);
    return o;
}

Action parseAction(const std::string& text, const Decls& d) {
    std::string s;
    for (char c : text)
        if (!std::isspace((unsigned char)c)) s += c;
    Action a;
    if (s == "tau") return a;
    auto fail = [&](const std::string& m) -> Action { throw Error("bad action '" + text + "': " + m); };
    auto nameOf = [&](const std::string& w, NClass want) {
        auto it = d.classes.find(w);
        if (it != d.classes.end()) return intern(w, it->second);
        if (isReservedSpelling(w)) return intern(w, w[0] == 'p' ? NClass::Cont : NClass::Server);
        (void)want;
        throw Error("bad action '" + text + "': undeclared name " + w);
    };
    size_t i = 0;
    while (i < s.size() && (std::isalnum((unsigned char)s[i]) || s[i] == '_' || s[i] == '\'')) ++i;
    if (i == 0) return fail("missing subject");
    std::string subj = s.substr(0, i);
    if (i == s.size()) {
        a.kind = Action::Omega;
        a.subj = nameOf(subj, NClass::Succ);
        if (cls(a.subj) != NClass::Succ) return fail("not a success name");
        return a;
    }
    a.subj = nameOf(subj, NClass::Server);
    if (s[i] == '?') a.kind = Action::In;
    else if (s[i] == '!') a.kind = Action::Out;
    else return fail("expected ? or !");
    ++i;
    if (i < s.size() && s[i] == '<') {
        size_t j = s.find('>', i);
        if (j == std::string::npos) return fail("unclosed value");
        std::string v = s.substr(i + 1, j - i - 1);
        if (v.empty() || v == "()") a.v = Value::unit();
        else if (v == "true") a.v = Value::boolean(true);
        else if (v == "false") a.v = Value::boolean(false);
        else {
            try {
                a.v = Value::integer(std::stoll(v));
            } catch (...) {
                return fail("bad value");
            }
        }
        i = j + 1;
    }
    if (i < s.size() && s[i] == '(') {
        size_t j = s.find(')', i);
        if (j == std::string::npos) return fail("unclosed names");
        std::string inner = s.substr(i + 1, j - i - 1);
        auto comma = inner.find(',');
        a.b = nameOf(inner.substr(0, comma), NClass::Server);
        if (comma != std::string::npos) a.p = nameOf(inner.substr(comma + 1), NClass::Cont);
        i = j + 1;
    }
    if (i != s.size()) return fail("trailing characters");
    if (a.isHO() && a.b == kNone) return fail("higher-order action needs a bound name");
    return a;
}

std::vector<Name> boundNames(const Action& a) {
    std::vector<Name> o;
    if (a.b != kNone) o.push_back(a.b);
    if (a.p != kNone) o.push_back(a.p);
    return o;
}

std::vector<Name> freeNamesOf(const Action& a) {
    if (a.kind == Action::Tau) return {};
    return {a.subj};
}

int nextTraceIndex(const ProcP& p) {
    int k = 1;
    for (Name n : freeNames(p)) {
        NClass c = cls(n);
        if (c != NClass::Server && c != NClass::Cont) continue;
        const std::string& s = str(n);
        if (isReservedSpelling(s)) k = std::max(k, std::stoi(s.substr(1)) + 1);
    }
    return k;
}

namespace {

using Wrap = std::function<ProcP(ProcP)>;

struct Commit {
    Action::Kind kind;
    const Proc* node;  // prefix node (In/Out/Succ)
    ProcP self;        // the prefix node itself, needed for replication
    Value outVal;      // evaluated payload of outputs
    Wrap wrap;         // residual of the prefix -> derivative of the collected process
};

Wrap compose(const Wrap& outer, const Wrap& inner) {
    return [outer, inner](ProcP r) { return outer(inner(std::move(r))); };
}

void collect(const ProcP& p, std::vector<Commit>& vis, std::vector<ProcP>* taus, const std::set<Name>& avoid);

// residual of an input commit after receiving v with carried names b, pp
ProcP inputResidual(const Commit& c, Value v, Name b, Name pp) {
    const Proc& n = *c.node;
    ProcP k = n.cont();
    if (n.b != kNone && b != kNone) k = rename(k, n.b, b);
    if (n.p != kNone && pp != kNone) k = rename(k, n.p, pp);
    if (n.x != kNone) k = subst(k, n.x, v);
    return k;
}

ProcP outputResidual(const Commit& c, Name b, Name pp) {
    const Proc& n = *c.node;
    ProcP k = n.cont();
    if (n.b != kNone && b != kNone) k = rename(k, n.b, b);
    if (n.p != kNone && pp != kNone) k = rename(k, n.p, pp);
    return k;
}

void collect(const ProcP& p, std::vector<Commit>& vis, std::vector<ProcP>* taus, const std::set<Name>& avoid) {
    switch (p->k) {
        case PK::Nil: return;
        case PK::Succ:
            vis.push_back({Action::Omega, p.get(), p, {}, [](ProcP) { return nil(); }});
            return;
        case PK::In: {
            Wrap w = [](ProcP r) { return r; };
            if (p->rep) w = [self = p](ProcP r) { return par2(std::move(r), self); };
            vis.push_back({Action::In, p.get(), p, {}, w});
            return;
        }
        case PK::Out: {
            Value v;
            try {
                v = evalExpr(p->e);
            } catch (const Error&) {
                return;
            }
            vis.push_back({Action::Out, p.get(), p, v, [](ProcP r) { return r; }});
            return;
        }
        case PK::If: {
            bool eq;
            try {
                eq = evalExpr(p->e) == evalExpr(p->f);
            } catch (const Error&) {
                return;
            }
            collect(eq ? p->kids[0] : p->kids[1], vis, taus, avoid);
            return;
        }
        case PK::Sum:
            for (auto& k : p->kids) collect(k, vis, taus, avoid);
            return;
        case PK::Res: {
            std::vector<Commit> inner;
            std::vector<ProcP> innerTau;
            collect(p->cont(), inner, taus ? &innerTau : nullptr, avoid);
            Name a = p->subj;
            Wrap w = [node = p](ProcP r) {
                auto c = std::make_shared<Proc>(*node);
                c->kids = {std::move(r)};
                return ProcP(c);
            };
            for (auto& c : inner) {
                if (c.kind != Action::Omega && c.node->subj == a) continue;
                c.wrap = compose(w, c.wrap);
                vis.push_back(std::move(c));
            }
            if (taus)
                for (auto& t : innerTau) taus->push_back(w(t));
            return;
        }
        case PK::Par: {
            size_t n = p->kids.size();
            std::vector<std::vector<Commit>> per(n);
            for (size_t i = 0; i < n; ++i) {
                std::vector<ProcP> kt;
                collect(p->kids[i], per[i], taus ? &kt : nullptr, avoid);
                auto place = [p, i](ProcP r) {
                    auto ks = p->kids;
                    ks[i] = std::move(r);
                    return par(std::move(ks));
                };
                if (taus)
                    for (auto& t : kt) taus->push_back(place(t));
            }
            if (taus) {
                Name tb = freshFor(avoid, "_t", NClass::Server);
                for (size_t i = 0; i < n; ++i)
                    for (size_t j = 0; j < n; ++j) {
                        if (i == j) continue;
                        for (auto& ci : per[i]) {
                            if (ci.kind != Action::In) continue;
                            Name a = ci.node->subj;
                            bool ho = isHO(a);
                            for (auto& cj : per[j]) {
                                if (cj.kind != Action::Out || cj.node->subj != a) continue;
                                // unit patterns only accept unit
                                if (ci.node->x == kNone && cj.outVal.kind != Value::Unit) continue;
                                Name tp = kNone;
                                if (ho && cj.node->p != kNone) tp = freshFor(avoid, "_u", NClass::Cont);
                                ProcP li = ci.wrap(inputResidual(ci, cj.outVal, ho ? tb : kNone, tp));
                                ProcP rj = cj.wrap(outputResidual(cj, ho ? tb : kNone, tp));
                                ProcP pair = par2(li, rj);
                                if (ho) {
                                    if (tp != kNone) pair = res(tp, pair);
                                    pair = res(tb, pair);
                                }
                                auto ks = p->kids;
                                size_t lo = std::min(i, j), hi = std::max(i, j);
                                ks[lo] = pair;
                                ks.erase(ks.begin() + long(hi));
                                taus->push_back(par(std::move(ks)));
                            }
                        }
                    }
            }
            for (size_t i = 0; i < n; ++i) {
                Wrap place = [p, i](ProcP r) {
                    auto ks = p->kids;
                    ks[i] = std::move(r);
                    return par(std::move(ks));
                };
                for (auto& c : per[i]) {
                    c.wrap = compose(place, c.wrap);
                    vis.push_back(std::move(c));
                }
            }
            return;
        }
    }
}

}  // namespace

std::vector<Step> strongSteps(const ProcP& p, const std::vector<Value>& values, int freshIdx) {
    std::set<Name> avoid = allNames(p);
    if (freshIdx < 0) freshIdx = nextTraceIndex(p);
    std::vector<Commit> vis;
    std::vector<ProcP> taus;
    collect(p, vis, &taus, avoid);
    std::vector<Step> out;
    for (auto& t : taus) out.push_back({Action{}, t});
    Name fb = traceName(freshIdx, NClass::Server);
    Name fp = traceName(freshIdx, NClass::Cont);
    for (auto& c : vis) {
        Action a;
        a.kind = c.kind;
        if (c.kind == Action::Omega) {
            a.subj = c.node->subj;
            out.push_back({a, c.wrap(nil())});
            continue;
        }
        a.subj = c.node->subj;
        bool ho = isHO(a.subj);
        Name b = ho ? fb : kNone;
        Name pp = ho && c.node->p != kNone ? fp : kNone;
        a.b = b;
        a.p = pp;
        if (c.kind == Action::Out) {
            a.v = c.outVal;
            out.push_back({a, c.wrap(outputResidual(c, b, pp))});
            continue;
        }
        if (c.node->x == kNone) {
            a.v = Value::unit();
            out.push_back({a, c.wrap(inputResidual(c, a.v, b, pp))});
            continue;
        }
        for (auto& v : values) {
            a.v = v;
            out.push_back({a, c.wrap(inputResidual(c, v, b, pp))});
        }
    }
    return out;
}

std::vector<ProcP> tauSteps(const ProcP& p) {
    std::set<Name> avoid = allNames(p);
    std::vector<Commit> vis;
    std::vector<ProcP> taus;
    collect(p, vis, &taus, avoid);
    return taus;
}

Closure tauClosure(const ProcP& p, int tauBound) {
    Closure out;
    std::unordered_set<std::string> seen;
    Canon c0 = canonicalize(p);
    seen.insert(c0.key);
    out.states.push_back(c0.proc);
    std::vector<ProcP> frontier{c0.proc};
    for (int depth = 0; !frontier.empty(); ++depth) {
        std::vector<ProcP> next;
        for (auto& s : frontier) {
            auto ts = tauSteps(s);
            if (depth >= tauBound) {
                for (auto& t : ts)
                    if (!seen.count(canonKey(t))) {
                        out.truncated = true;
                        break;
                    }
                continue;
            }
            for (auto& t : ts) {
                Canon c = canonicalize(t);
                if (seen.insert(c.key).second) {
                    out.states.push_back(c.proc);
                    next.push_back(c.proc);
                }
            }
        }
        frontier = std::move(next);
    }
    return out;
}

WeakResult weakSteps(const ProcP& p, const Action& mu, const std::vector<Value>& values, int tauBound) {
    WeakResult out;
    Closure pre = tauClosure(p, tauBound);
    out.truncated = pre.truncated;
    if (mu.kind == Action::Tau) {
        out.states = pre.states;
        return out;
    }
    std::unordered_set<std::string> seen;
    int idx = 1;
    for (Name n : boundNames(mu)) {
        const std::string& s = str(n);
        if (isReservedSpelling(s)) idx = std::stoi(s.substr(1));
    }
    for (auto& s : pre.states) {
        for (auto& st : strongSteps(s, values, idx)) {
            if (!(st.act == mu)) continue;
            Closure post = tauClosure(st.proc, tauBound);
            out.truncated = out.truncated || post.truncated;
            for (auto& q : post.states)
                if (seen.insert(show(q)).second) out.states.push_back(q);
        }
    }
    return out;
}

const char* showBarb(Barb b) {
    switch (b) {
        case Barb::Yes: return "yes";
        case Barb::No: return "no";
        case Barb::Unknown: return "unknown";
    }
    return "?";
}

bool hasBarbNow(const ProcP& p, Name omega) {
    std::set<Name> avoid;
    std::vector<Commit> vis;
    collect(p, vis, nullptr, avoid);
    for (auto& c : vis)
        if (c.kind == Action::Omega && (omega == kNone || c.node->subj == omega)) return true;
    return false;
}

Barb barb(const ProcP& p, Name omega, int tauBound) {
    std::unordered_set<std::string> seen;
    Canon c0 = canonicalize(p);
    seen.insert(c0.key);
    std::vector<ProcP> frontier{c0.proc};
    bool truncated = false;
    for (int depth = 0; !frontier.empty(); ++depth) {
        std::vector<ProcP> next;
        for (auto& s : frontier) {
            if (hasBarbNow(s, omega)) return Barb::Yes;
            auto ts = tauSteps(s);
            if (depth >= tauBound) {
                for (auto& t : ts)
                    if (!seen.count(canonKey(t))) truncated = true;
                continue;
            }
            for (auto& t : ts) {
                Canon c = canonicalize(t);
                if (seen.insert(c.key).second) next.push_back(c.proc);
            }
        }
        frontier = std::move(next);
    }
    return truncated ? Barb::Unknown : Barb::No;
}

}  // namespace vispi
