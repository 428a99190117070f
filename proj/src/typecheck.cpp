#include "vispi/typecheck.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <tuple>

namespace vispi {

std::string TypeError::show() const {
    return rule + " at " + (path.empty() ? std::string("<root>") : path) + ": " + witness;
}

namespace {

using Err = std::optional<TypeError>;

std::string join(const std::string& path, const std::string& seg) { return path.empty() ? seg : path + "/" + seg; }

std::set<Name> envNames(const VisEnv& d, const Stack& s) {
    std::set<Name> o;
    for (auto& [k, v] : d.m) {
        if (k != kStar) o.insert(k);
        o.insert(v.begin(), v.end());
    }
    for (auto& e : s) o.insert(e.n);
    return o;
}

VisEnv dropStar(const VisEnv& d) {
    VisEnv o = d;
    o.m.erase(kStar);
    return o;
}

// α-rename binders of a prefix or restriction that clash with names already in the environment
ProcP freshen(const ProcP& p, const std::set<Name>& avoid) {
    ProcP q = p;
    auto slots = p->k == PK::Res ? std::vector<Name Proc::*>{&Proc::subj} : std::vector<Name Proc::*>{&Proc::b, &Proc::p};
    for (auto slot : slots) {
        Name n = (*q).*slot;
        if (n == kNone || !avoid.count(n)) continue;
        std::set<Name> av = avoid;
        for (Name a : allNames(q)) av.insert(a);
        Name f = freshFor(av, "_k", cls(n));
        auto c = std::make_shared<Proc>(*q);
        (*c).*slot = f;
        c->kids = {rename(q->cont(), n, f)};
        q = c;
    }
    return q;
}

// keep the error that got furthest into the term
void keepDeeper(Err& best, const Err& e) {
    if (e && (!best || e->path.size() > best->path.size())) best = e;
}

std::string transWitness(const VisEnv& d, const TransWitness& w) {
    return str(w.a) + " in Delta(" + str(w.o) + ") = " + showSet(d.at(w.o)) + " but Delta(" + str(w.a) +
           ") = " + showSet(d.at(w.a)) + " is not included";
}

struct Checker {
    Mode mode;
    CheckOptions opt;
    int budget;

    static Err fail(const std::string& rule, const std::string& path, const std::string& w) {
        return TypeError{rule, path, w};
    }

    Err gate(const VisEnv& d, const std::string& path) const {
        if (!opt.transitivityGate) return {};
        if (auto w = transitivityViolation(d)) return fail("TRANS", path, "environment not transitive: " + transWitness(d, *w));
        return {};
    }

    // candidate environments for a restricted higher-order name, most generous first
    void forEachResCandidate(const VisEnv& d, const ProcP& node, const std::function<bool(const VisEnv&)>& f) {
        Name a = node->subj;
        NameSet A;
        if (node->hasAnnot) A = setInsert(mkSet(node->annot), a);
        else A = setInsert(d.hasStar() ? d.at(kStar) : d.ranUnion(), a);
        auto place = [&](const NameSet& S) {
            VisEnv o = d;
            NameSet core = setErase(S, a);
            for (auto& [k, v] : o.m)
                if (setSubset(core, v)) v = setInsert(v, a);
            o.m[a] = S;
            return o;
        };
        if (f(place(A))) return;
        if (node->hasAnnot) return;
        {
            VisEnv o = d;
            for (auto& [k, v] : o.m) v = setInsert(v, a);
            if (--budget < 0 || f(o)) return;
        }
        if (subsetsOf(d, a, A, {}, place, f)) return;
        // the hidden entry may mention any name: widen to the body's free names and the environment's
        NameSet wide = setUnion(A, d.ranUnion());
        for (auto& [k, v] : d.m)
            if (k != kStar) wide = setUnion(setInsert(wide, k), v);
        for (Name x : freeNames(node->cont()))
            if (isHO(x)) wide = setInsert(wide, x);
        if (wide != A) subsetsOf(d, a, wide, A, place, f);
    }

    // closed subsets of pool containing a, largest first, skipping those inside `seen`; true once f accepts
    bool subsetsOf(const VisEnv& d, Name a, const NameSet& pool, const NameSet& seen,
                   const std::function<VisEnv(const NameSet&)>& place, const std::function<bool(const VisEnv&)>& f) {
        NameSet rest = setErase(pool, a);
        size_t n = rest.size();
        if (n == 0 || n > 20) return false;
        for (size_t size = n; size-- > 0;) {
            // subsets of the given size, lexicographic
            std::vector<size_t> idx(size);
            for (size_t i = 0; i < size; ++i) idx[i] = i;
            while (true) {
                NameSet S{a};
                for (size_t i : idx) S.push_back(rest[i]);
                S = mkSet(S);
                bool closed = true;
                for (Name x : S)
                    if (x != a && d.has(x) && !setSubset(setErase(d.at(x), a), S)) closed = false;
                if (closed && !(seen.size() && setSubset(S, seen))) {
                    if (--budget < 0) return true;
                    if (f(place(S))) return true;
                }
                size_t i = size;
                while (i > 0 && idx[i - 1] == n - size + i - 1) --i;
                if (i == 0) break;
                ++idx[i - 1];
                for (size_t j = i; j < size; ++j) idx[j] = idx[j - 1] + 1;
            }
        }
        return false;
    }

    // ---------- sequential ----------
    Err seq(const VisEnv& d, const ProcP& p0, const std::string& path) {
        switch (p0->k) {
            case PK::Nil:
                if (d.hasStar())
                    return fail("NIL", path, "inactive 0 under an environment holding the thread (Delta(*) = " +
                                                 showSet(d.at(kStar)) + ")");
                return {};
            case PK::Succ: return {};
            case PK::Out: {
                Name a = p0->subj;
                std::string here = join(path, str(a) + "!");
                if (!isHO(a)) {
                    if (d.hasStar()) return fail("O-FO", here, "first-order output while active (* in dom)");
                    return seq(d, p0->cont(), here);
                }
                if (!d.hasStar()) return fail("O-HO", here, "output needs the thread but * is not in dom");
                NameSet V = d.at(kStar);
                if (!setHas(V, a)) return fail("O-HO", here, str(a) + " not in Delta(*) = " + showSet(V));
                ProcP p = freshen(p0, envNames(d, {}));
                VisEnv d2 = extend(dropStar(d), p->b, setInsert(V, p->b));
                if (auto e = gate(d2, here)) return e;
                return seq(d2, p->cont(), here);
            }
            case PK::In: {
                Name a = p0->subj;
                std::string here = join(path, (p0->rep ? "!" : "") + str(a) + "?");
                if (p0->rep && d.hasStar()) return fail("REP", here, "replicated input while active (* in dom)");
                if (!isHO(a)) {
                    if (!d.hasStar()) return fail("I-FO", here, "first-order input needs the thread but * is not in dom");
                    return seq(d, p0->cont(), here);
                }
                if (!d.has(a)) return fail("I-HO", here, str(a) + " not in dom(Delta)");
                if (d.hasStar()) return fail("I-HO", here, "input while active (* in dom)");
                ProcP p = freshen(p0, envNames(d, {}));
                VisEnv d2 = extend(d, kStar, setInsert(d.at(a), p->b));
                if (auto e = gate(d2, here)) return e;
                return seq(d2, p->cont(), here);
            }
            case PK::Sum:
                for (size_t i = 0; i < p0->kids.size(); ++i)
                    if (auto e = seq(d, p0->kids[i], join(path, "sum." + std::to_string(i)))) return e;
                return {};
            case PK::If:
                if (auto e = seq(d, p0->kids[0], join(path, "then"))) return e;
                return seq(d, p0->kids[1], join(path, "else"));
            case PK::Res: {
                std::string here = join(path, "new " + str(p0->subj));
                if (!isHO(p0->subj)) return seq(d, p0->cont(), here);
                // a binder with nothing left to bind is congruent to its body
                if (!occursFree(p0->cont(), p0->subj)) return seq(d, p0->cont(), here);
                ProcP p = freshen(p0, envNames(d, {}));
                Err first;
                bool ok = false;
                forEachResCandidate(d, p, [&](const VisEnv& cand) {
                    Err e = gate(cand, here);
                    if (!e) e = seq(cand, p->cont(), here);
                    if (!e) return ok = true;
                    keepDeeper(first, e);
                    return false;
                });
                if (ok) return {};
                return first ? first : fail("RES-HO", here, "no entry for " + str(p->subj) + " types the body");
            }
            case PK::Par: {
                size_t n = p0->kids.size();
                auto kidPath = [&](size_t i) { return join(path, "par." + std::to_string(i)); };
                if (!d.hasStar()) {
                    for (size_t i = 0; i < n; ++i)
                        if (auto e = seq(d, p0->kids[i], kidPath(i))) return e;
                    return {};
                }
                VisEnv dn = dropStar(d);
                std::vector<std::optional<Err>> withStar(n), without(n);
                auto W = [&](size_t i) -> const Err& {
                    if (!withStar[i]) withStar[i] = seq(d, p0->kids[i], kidPath(i));
                    return *withStar[i];
                };
                auto N = [&](size_t i) -> const Err& {
                    if (!without[i]) without[i] = seq(dn, p0->kids[i], kidPath(i));
                    return *without[i];
                };
                Err first;
                for (size_t i = 0; i < n; ++i) {
                    Err e;
                    // leftmost component first so the reported error is deterministic
                    for (size_t j = 0; j < n && !e; ++j) e = j == i ? W(j) : N(j);
                    if (!e) return {};
                    keepDeeper(first, e);
                }
                return first;
            }
        }
        return {};
    }

    // ---------- well-bracketed ----------
    Err wb(const VisEnv& d, const Stack& s, const ProcP& p0, const std::string& path) {
        switch (p0->k) {
            case PK::Nil:
                if (!s.empty()) return fail("NIL", path, "0 with pending stack " + showStack(s));
                if (!duplicable(d)) {
                    for (auto& [k, _] : d.m)
                        if (k == kStar || cls(k) != NClass::Server)
                            return fail("NIL", path, "environment not duplicable: entry for " + str(k));
                }
                return {};
            case PK::Succ: return {};
            case PK::Out: {
                Name a = p0->subj;
                std::string here = join(path, str(a) + "!");
                if (!isHO(a)) {
                    if (d.hasStar()) return fail("O-FO", here, "first-order output while active (* in dom)");
                    return wb(d, s, p0->cont(), here);
                }
                bool server = cls(a) == NClass::Server;
                const char* rule = server ? "O-ser" : "O-con";
                if (!server && (s.empty() || s[0] != sOut(a)))
                    return fail(rule, here, "linearity: continuation " + str(a) + " is not the top output of stack " + showStack(s));
                if (!d.hasStar()) return fail(rule, here, "output needs the thread but * is not in dom");
                NameSet V = d.at(kStar);
                if (!setHas(V, a)) return fail(rule, here, str(a) + " not in Delta(*) = " + showSet(V));
                ProcP p = freshen(p0, envNames(d, s));
                VisEnv d2 = extend(dropStar(d), p->b, setInsert(V, p->b));
                Stack s2;
                if (server) {
                    d2 = extend(d2, p->p, setInsert(V, p->b));
                    s2 = push(s, sIn(p->p));
                    if (!isStack(s2)) return fail(rule, here, "pushing " + str(p->p) + "? breaks stack " + showStack(s));
                } else {
                    s2.assign(s.begin() + 1, s.end());
                }
                if (auto e = gate(d2, here)) return e;
                return wb(d2, s2, p->cont(), here);
            }
            case PK::In: {
                Name a = p0->subj;
                std::string here = join(path, (p0->rep ? "!" : "") + str(a) + "?");
                if (!isHO(a)) {
                    if (p0->rep && d.hasStar()) return fail("REP", here, "replicated input while active (* in dom)");
                    if (!d.hasStar()) return fail("I-FO", here, "first-order input needs the thread but * is not in dom");
                    return wb(d, s, p0->cont(), here);
                }
                if (cls(a) == NClass::Server) {
                    const char* rule = p0->rep ? "I-ser2" : "I-ser1";
                    if (!d.has(a)) return fail(rule, here, str(a) + " not in dom(Delta)");
                    if (d.hasStar()) return fail(rule, here, "input while active (* in dom)");
                    if (p0->rep) {
                        if (!s.empty()) return fail(rule, here, "replicated input with non-empty stack " + showStack(s));
                        if (!duplicable(d)) return fail(rule, here, "environment not duplicable");
                    }
                    ProcP p = freshen(p0, envNames(d, s));
                    VisEnv d2 = extend(d, kStar, setUnion(d.at(a), mkSet({p->b, p->p})));
                    Stack s2 = p0->rep ? Stack{sOut(p->p)} : push(s, sOut(p->p));
                    if (!isStack(s2)) return fail(rule, here, "pushing " + str(p->p) + "! breaks stack " + showStack(s));
                    if (auto e = gate(d2, here)) return e;
                    return wb(d2, s2, p->cont(), here);
                }
                if (!d.has(a)) return fail("I-con", here, str(a) + " not in dom(Delta)");
                if (d.hasStar()) return fail("I-con", here, "input while active (* in dom)");
                if (s.size() < 2 || s[0] != sIn(a) || !s[1].out)
                    return fail("I-con", here, "stack " + showStack(s) + " does not start with " + str(a) + "? followed by an output");
                ProcP p = freshen(p0, envNames(d, s));
                VisEnv d2 = restrict(d, a);
                d2 = extend(d2, kStar, setInsert(setErase(d.at(a), a), p->b));
                Stack s2(s.begin() + 1, s.end());
                if (auto e = gate(d2, here)) return e;
                return wb(d2, s2, p->cont(), here);
            }
            case PK::Sum:
                for (size_t i = 0; i < p0->kids.size(); ++i)
                    if (auto e = wb(d, s, p0->kids[i], join(path, "sum." + std::to_string(i)))) return e;
                return {};
            case PK::If:
                if (auto e = wb(d, s, p0->kids[0], join(path, "then"))) return e;
                return wb(d, s, p0->kids[1], join(path, "else"));
            case PK::Res: {
                std::string here = join(path, "new " + str(p0->subj));
                if (!isHO(p0->subj)) return wb(d, s, p0->cont(), here);
                if (!occursFree(p0->cont(), p0->subj)) return wb(d, s, p0->cont(), here);
                ProcP p = freshen(p0, envNames(d, s));
                Name a = p->subj;
                std::vector<Stack> stacks;
                if (cls(a) == NClass::Server) {
                    stacks.push_back(s);
                } else {
                    for (size_t i = 0; i <= s.size(); ++i) {
                        Stack t(s.begin(), s.begin() + long(i));
                        t.push_back(sOut(a));
                        t.push_back(sIn(a));
                        t.insert(t.end(), s.begin() + long(i), s.end());
                        if (isStack(t)) stacks.push_back(t);
                    }
                    stacks.push_back(s);
                }
                Err first;
                bool ok = false;
                for (auto& st : stacks) {
                    forEachResCandidate(d, p, [&](const VisEnv& cand) {
                        Err e = gate(cand, here);
                        if (!e) e = wb(cand, st, p->cont(), here);
                        if (!e) return ok = true;
                        keepDeeper(first, e);
                        return false;
                    });
                    if (ok) return {};
                    if (budget < 0) break;
                }
                return first ? first : fail(cls(a) == NClass::Server ? "RES-ser" : "RES-con", here, "no environment types the body");
            }
            case PK::Par: return wbPar(d, s, p0, path);
        }
        return {};
    }

    Err wbPar(const VisEnv& d, const Stack& s, const ProcP& p0, const std::string& path) {
        size_t n = p0->kids.size();
        std::vector<std::set<Name>> fns(n);
        for (size_t i = 0; i < n; ++i) fns[i] = freeNames(p0->kids[i]);
        auto homes = [&](Name x) {
            std::vector<size_t> h;
            for (size_t i = 0; i < n; ++i)
                if (fns[i].count(x)) h.push_back(i);
            if (h.empty())
                for (size_t i = 0; i < n; ++i) h.push_back(i);
            return h;
        };
        VisEnv shared;
        std::vector<Name> linearKeys;
        for (auto& [k, v] : d.m) {
            if (k == kStar || cls(k) == NClass::Cont) linearKeys.push_back(k);
            else shared.m.emplace(k, v);
        }
        // choice lists: linear entries then stack elements
        std::vector<std::vector<size_t>> options;
        for (Name k : linearKeys) {
            if (k == kStar) {
                std::vector<size_t> all(n);
                for (size_t i = 0; i < n; ++i) all[i] = i;
                options.push_back(all);
            } else {
                options.push_back(homes(k));
            }
        }
        for (auto& e : s) options.push_back(homes(e.n));
        std::map<std::tuple<size_t, VisEnv, Stack>, Err> memo;
        auto kidCheck = [&](size_t i, const VisEnv& e, const Stack& st) -> Err {
            auto key = std::make_tuple(i, e, st);
            auto it = memo.find(key);
            if (it != memo.end()) return it->second;
            Err r = wb(e, st, p0->kids[i], join(path, "par." + std::to_string(i)));
            memo.emplace(key, r);
            return r;
        };
        std::vector<size_t> pick(options.size(), 0);
        Err first;
        bool anyValid = false;
        int tries = 0;
        while (true) {
            std::vector<VisEnv> envs(n, shared);
            std::vector<Stack> stacks(n);
            for (size_t j = 0; j < linearKeys.size(); ++j) {
                Name k = linearKeys[j];
                envs[options[j][pick[j]]].m.emplace(k, d.at(k));
            }
            for (size_t j = 0; j < s.size(); ++j) stacks[options[linearKeys.size() + j][pick[linearKeys.size() + j]]].push_back(s[j]);
            bool valid = true;
            for (auto& st : stacks)
                if (!isStack(st)) valid = false;
            if (valid) {
                anyValid = true;
                Err e;
                for (size_t i = 0; i < n && !e; ++i) e = kidCheck(i, envs[i], stacks[i]);
                if (!e) return {};
                keepDeeper(first, e);
            }
            if (++tries > 4096) break;
            size_t j = 0;
            for (; j < pick.size(); ++j) {
                if (++pick[j] < options[j].size()) break;
                pick[j] = 0;
            }
            if (j == pick.size()) break;
        }
        if (first) return first;
        if (!anyValid) return fail("PAR", path, "no interleaving of stack " + showStack(s) + " fits the components");
        return fail("PAR", path, "search budget exhausted");
    }
};

}  // namespace

CheckResult checkSeq(const VisEnv& d, const ProcP& p, const CheckOptions& o) {
    Checker c{Mode::Seq, o, o.resBudget};
    if (auto e = c.gate(d, "")) return {e};
    return {c.seq(d, p, "")};
}

CheckResult checkWB(const VisEnv& d, const Stack& s, const ProcP& p, const CheckOptions& o) {
    Checker c{Mode::WB, o, o.resBudget};
    if (auto e = c.gate(d, "")) return {e};
    if (!isStack(s)) return {TypeError{"STACK", "", showStack(s) + " is not a stack"}};
    return {c.wb(d, s, p, "")};
}

CheckResult check(Mode m, const TypingEnv& env, const ProcP& p, const CheckOptions& o) {
    if (m == Mode::Seq) {
        if (!env.stack.empty()) return {TypeError{"STACK", "", "sequential typing takes no stack"}};
        return checkSeq(env.vis, p, o);
    }
    return checkWB(env.vis, env.stack, p, o);
}

std::optional<Stack> someInterleaving(const Stack& a, const Stack& b) {
    for (auto& e : a)
        if (stackHasTagged(b, e)) return std::nullopt;
    Stack cur;
    std::function<bool(size_t, size_t)> go = [&](size_t i, size_t j) {
        if (i == a.size() && j == b.size()) return isStack(cur);
        for (int side = 0; side < 2; ++side) {
            const Stack& src = side ? b : a;
            size_t k = side ? j : i;
            if (k >= src.size()) continue;
            if (!cur.empty() && cur.back().out == src[k].out) continue;
            cur.push_back(src[k]);
            if (side ? go(i, j + 1) : go(i + 1, j)) return true;
            cur.pop_back();
        }
        return false;
    };
    if (go(0, 0)) return cur;
    return std::nullopt;
}

bool compatible(const TypingEnv& a, const TypingEnv& b, Mode m) {
    if (m == Mode::Seq) return !(a.vis.hasStar() && b.vis.hasStar());
    return duplicable(intersectEnv(a.vis, b.vis)) && someInterleaving(a.stack, b.stack).has_value();
}

SRWitness subjectReductionWitness(Mode m, const TypingEnv& env, const ProcP&, const Action& mu, const ProcP& next) {
    const VisEnv& d = env.vis;
    const Stack& s = env.stack;
    bool star = d.hasStar();
    auto none = [](const std::string& why) { return SRWitness{std::nullopt, why}; };
    switch (mu.kind) {
        case Action::Omega: return none("success actions are not covered");
        case Action::Tau:
            if (m == Mode::WB && s.size() >= 2 && s[0].out && !s[1].out && s[0].n == s[1].n &&
                !occursFree(next, s[0].n))
                return {TypingEnv{restrict(d, s[0].n), Stack(s.begin() + 2, s.end())}, "tau at continuation"};
            return {env, "tau"};
        case Action::In:
            if (mu.isFO()) return {env, "first-order input"};
            if (star) return none("input while the thread token is held");
            if (cls(mu.subj) == NClass::Server) {
                if (!d.has(mu.subj)) return none("input subject not in dom");
                NameSet V = setInsert(d.at(mu.subj), mu.b);
                if (mu.p != kNone) V = setInsert(V, mu.p);
                TypingEnv o{extend(d, kStar, V), s};
                if (m == Mode::WB) o.stack = push(s, sOut(mu.p));
                return {o, "higher-order input"};
            } else {
                if (s.size() < 2 || s[0] != sIn(mu.subj) || !s[1].out) return none("stack does not start with p?, q!");
                VisEnv d2 = restrict(d, mu.subj);
                d2 = extend(d2, kStar, setInsert(setErase(d.at(mu.subj), mu.subj), mu.b));
                return {TypingEnv{d2, Stack(s.begin() + 1, s.end())}, "continuation input"};
            }
        case Action::Out: {
            if (mu.isFO()) {
                if (star) return none("first-order output while active");
                return {env, "first-order output"};
            }
            if (!star) return none("output without the thread token");
            NameSet V = d.at(kStar);
            if (!setHas(V, mu.subj)) return none("output subject not in Delta(*)");
            VisEnv d2 = extend(dropStar(d), mu.b, setInsert(V, mu.b));
            if (m == Mode::Seq) return {TypingEnv{d2, {}}, "higher-order output"};
            if (cls(mu.subj) == NClass::Server) {
                d2 = extend(d2, mu.p, setInsert(V, mu.b));
                return {TypingEnv{d2, push(s, sIn(mu.p))}, "server output"};
            }
            if (s.empty() || s[0] != sOut(mu.subj)) return none("stack does not start with the answered continuation");
            return {TypingEnv{d2, Stack(s.begin() + 1, s.end())}, "continuation output"};
        }
    }
    return none("unknown action");
}

bool meets(const Proc& in, const NameSet& s, const VisEnv& d) {
    if (in.k != PK::In || !isHO(in.subj)) return false;
    if (setHas(s, in.subj)) return true;
    return d.has(in.subj) && !setIntersect(d.at(in.subj), s).empty();
}

ProcP prune(const NameSet& s, const VisEnv& d, const ProcP& p0) {
    std::set<Name> avoid = envNames(d, {});
    avoid.insert(s.begin(), s.end());
    std::function<ProcP(const ProcP&)> go = [&](const ProcP& p) -> ProcP {
        switch (p->k) {
            case PK::Nil:
            case PK::Succ: return p;
            case PK::In:
                if (meets(*p, s, d)) return nil();
                [[fallthrough]];
            case PK::Out:
            case PK::Res: {
                ProcP q = freshen(p, avoid);
                auto c = std::make_shared<Proc>(*q);
                c->kids = {go(q->cont())};
                return c;
            }
            default: {
                auto c = std::make_shared<Proc>(*p);
                for (auto& k : c->kids) k = go(k);
                return c;
            }
        }
    };
    return go(p0);
}

}  // namespace vispi
