#include "vispi/testkit.hpp"

#include <algorithm>
#include <functional>

#include "vispi/typecheck.hpp"

namespace vispi {

std::vector<Name> serverPool(int n) {
    static const char* names[] = {"a", "c", "d", "e", "f", "i", "j", "m"};
    std::vector<Name> o;
    for (int i = 0; i < n && i < 8; ++i) o.push_back(intern(names[i], NClass::Server));
    return o;
}

std::vector<Name> foPool(int n) {
    static const char* names[] = {"h", "g", "l"};
    std::vector<Name> o;
    for (int i = 0; i < n && i < 3; ++i) o.push_back(intern(names[i], NClass::FO));
    return o;
}

namespace {

Name contS() { return intern("s", NClass::Cont); }
Name contT() { return intern("t", NClass::Cont); }

template <class T>
const T& choose(const std::vector<T>& v, Rng& rng) {
    return v[std::uniform_int_distribution<size_t>(0, v.size() - 1)(rng)];
}

bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

NameSet randomSubset(const std::vector<Name>& pool, Rng& rng, double p = 0.4) {
    NameSet o;
    for (Name n : pool)
        if (coin(rng, p)) o.push_back(n);
    return mkSet(o);
}

VisEnv dropStar(VisEnv d) {
    d.m.erase(kStar);
    return d;
}

VisEnv serversOnly(const VisEnv& d) {
    VisEnv o;
    for (auto& [k, v] : d.m)
        if (k != kStar && cls(k) == NClass::Server) o.m.emplace(k, v);
    return o;
}

// the environment the checker tries first for a restricted name
VisEnv place(const VisEnv& d, Name a, const NameSet& S) {
    VisEnv o = d;
    NameSet core = setErase(S, a);
    for (auto& [k, v] : o.m)
        if (setSubset(core, v)) v = setInsert(v, a);
    o.m[a] = S;
    return o;
}

std::vector<Name> homeNames(const NameSet& s, NClass c) {
    std::vector<Name> o;
    for (Name n : s)
        if (n >= 0 && cls(n) == c) o.push_back(n);
    return o;
}

std::vector<Name> domOf(const VisEnv& d, NClass c) {
    std::vector<Name> o;
    for (auto& [k, _] : d.m)
        if (k != kStar && cls(k) == c) o.push_back(k);
    return o;
}

struct Gen {
    const GenConfig& cfg;
    Rng& rng;
    int counter = 0;
    int reps = 0;

    struct Scope {
        std::vector<Name> vars;
        std::vector<Name> fos;
    };

    Name fresh(const std::string& stem, NClass c) { return intern(stem + std::to_string(++counter), c); }

    ExprP expr(const Scope& sc) {
        if (!sc.vars.empty() && coin(rng, 0.5)) {
            ExprP v = evar(choose(sc.vars, rng));
            if (coin(rng, 0.2)) return bin(Expr::Add, v, lit(Value::integer(1)));
            return v;
        }
        return lit(choose(cfg.values, rng));
    }

    ExprP payload(const Scope& sc) { return coin(rng, 0.6) ? lit(Value::unit()) : expr(sc); }

    int pick(const std::vector<std::pair<int, int>>& opts) {
        int total = 0;
        for (auto& [w, _] : opts) total += std::max(0, w);
        if (total == 0) return -1;
        int r = std::uniform_int_distribution<int>(0, total - 1)(rng);
        for (auto& [w, id] : opts) {
            r -= std::max(0, w);
            if (r < 0) return id;
        }
        return -1;
    }

    Name omega() { return intern("w", NClass::Succ); }

    // ---------- sequential ----------
    ProcP seqTerminal(const VisEnv& d) {
        if (!d.hasStar()) return nil();
        auto hs = homeNames(d.at(kStar), NClass::Server);
        if (!hs.empty() && coin(rng, 0.7)) {
            Name b = fresh("n", NClass::Server);
            return out(choose(hs, rng), lit(Value::unit()), b, kNone, nil());
        }
        return stuck();
    }

    ProcP stuck() {
        Name z = fresh("z", NClass::Server);
        Name y = fresh("n", NClass::Server);
        return res(z, out(z, lit(Value::unit()), y, kNone, nil()));
    }

    ProcP seq(const VisEnv& d, int depth, const Scope& sc) {
        if (depth <= 0) return seqTerminal(d);
        bool active = d.hasStar();
        const GenWeights& w = cfg.w;
        enum { OUT, FOIN, FOOUT, PAR, SUM, IF, RES, SUCC, IN, REP, NIL };
        std::vector<std::pair<int, int>> opts;
        auto domHO = domOf(d, NClass::Server);
        if (active) {
            if (!homeNames(d.at(kStar), NClass::Server).empty()) opts.push_back({w.out, OUT});
            if (!sc.fos.empty()) opts.push_back({w.fo, FOIN});
        } else {
            opts.push_back({w.nil, NIL});
            if (!domHO.empty()) opts.push_back({w.in, IN});
            if (!domHO.empty() && reps < cfg.maxRep) opts.push_back({w.rep, REP});
            if (!sc.fos.empty()) opts.push_back({w.fo, FOOUT});
        }
        opts.push_back({w.par, PAR});
        opts.push_back({w.sum, SUM});
        opts.push_back({w.ifte, IF});
        opts.push_back({w.res, RES});
        opts.push_back({w.succ, SUCC});
        int choice = pick(opts);
        switch (choice) {
            case OUT: {
                NameSet V = d.at(kStar);
                Name a = choose(homeNames(V, NClass::Server), rng);
                Name b = fresh("n", NClass::Server);
                VisEnv d2 = extend(dropStar(d), b, setInsert(V, b));
                return out(a, payload(sc), b, kNone, seq(d2, depth - 1, sc));
            }
            case FOIN: {
                Name x = fresh("x", NClass::Var);
                Scope s2 = sc;
                s2.vars.push_back(x);
                return inp(choose(sc.fos, rng), x, kNone, kNone, seq(d, depth - 1, s2));
            }
            case FOOUT: return out(choose(sc.fos, rng), expr(sc), kNone, kNone, seq(d, depth - 1, sc));
            case IN:
            case REP: {
                bool rep = choice == REP;
                Name a = choose(domHO, rng);
                Name b = fresh("n", NClass::Server);
                Name x = coin(rng) ? fresh("x", NClass::Var) : kNone;
                Scope s2 = sc;
                if (x != kNone) s2.vars.push_back(x);
                if (rep) ++reps;
                VisEnv d2 = extend(d, kStar, setInsert(d.at(a), b));
                return inp(a, x, b, kNone, seq(d2, depth - 1, s2), rep);
            }
            case PAR: {
                ProcP l = seq(d, depth - 1, sc);
                ProcP r = seq(dropStar(d), depth - 1, sc);
                if (coin(rng)) std::swap(l, r);
                return par2(l, r);
            }
            case SUM: return sum({seq(d, depth - 1, sc), seq(d, depth - 1, sc)});
            case IF: return ifte(expr(sc), expr(sc), seq(d, depth - 1, sc), seq(d, depth - 1, sc));
            case RES: {
                if (coin(rng, 0.25)) {
                    Name g = fresh("m", NClass::FO);
                    Scope s2 = sc;
                    s2.fos.push_back(g);
                    ProcP cell = out(g, lit(choose(cfg.values, rng)), kNone, kNone, nil());
                    ProcP body = seq(d, depth - 1, s2);
                    return res(g, par2(cell, body));
                }
                Name n = fresh("n", NClass::Server);
                NameSet A = setInsert(active ? d.at(kStar) : d.ranUnion(), n);
                return res(n, seq(place(d, n, A), depth - 1, sc));
            }
            case SUCC: return succ(omega(), nil());
            case NIL:
            default: return active ? seqTerminal(d) : nil();
        }
    }

    // ---------- well-bracketed ----------
    // invariant: active => stack starts with p! and p in Delta(*);
    // inactive => stack empty with a duplicable environment, or it starts with p?, q! and q in Delta(p)
    ProcP wbTerminal(const VisEnv& d, const Stack& s, const Scope& sc) {
        if (d.hasStar()) {
            Name p = s.at(0).n;
            Name b = fresh("n", NClass::Server);
            VisEnv d2 = extend(dropStar(d), b, setInsert(d.at(kStar), b));
            return out(p, payload(sc), b, kNone, wbTerminal(d2, Stack(s.begin() + 1, s.end()), sc));
        }
        if (s.empty()) return nil();
        Name p = s[0].n;
        Name b = fresh("n", NClass::Server);
        VisEnv d2 = extend(restrict(d, p), kStar, setInsert(setErase(d.at(p), p), b));
        return inp(p, kNone, b, kNone, wbTerminal(d2, Stack(s.begin() + 1, s.end()), sc));
    }

    ProcP wbStuck(const VisEnv& d, const Stack& s, const Scope& sc) {
        // call a private server; the answer never comes, so the code after it is dead
        Name z = fresh("z", NClass::Server);
        NameSet A = setInsert(d.at(kStar), z);
        VisEnv d1 = place(d, z, A);
        Name b = fresh("n", NClass::Server);
        Name r = fresh("k", NClass::Cont);
        NameSet V = d1.at(kStar);
        VisEnv d2 = extend(extend(dropStar(d1), b, setInsert(V, b)), r, setInsert(V, b));
        Stack s2 = push(s, sIn(r));
        return res(z, out(z, lit(Value::unit()), b, r, wbTerminal(d2, s2, sc)));
    }

    ProcP wb(const VisEnv& d, const Stack& s, int depth, const Scope& sc) {
        if (depth <= 0) {
            if (d.hasStar() && coin(rng, 0.2)) return wbStuck(d, s, sc);
            return wbTerminal(d, s, sc);
        }
        bool active = d.hasStar();
        const GenWeights& w = cfg.w;
        enum { OSER, OCON, FOIN, FOOUT, PAR, SUM, IF, RES, RESCON, SUCC, ISER, REP, ICON, NIL };
        std::vector<std::pair<int, int>> opts;
        auto domSer = domOf(d, NClass::Server);
        if (active) {
            if (!homeNames(d.at(kStar), NClass::Server).empty()) opts.push_back({w.out, OSER});
            opts.push_back({w.out, OCON});
            if (!sc.fos.empty()) opts.push_back({w.fo, FOIN});
            opts.push_back({w.res, RESCON});
        } else {
            if (s.empty()) {
                opts.push_back({w.nil, NIL});
                if (!domSer.empty() && reps < cfg.maxRep) opts.push_back({w.rep, REP});
            } else {
                opts.push_back({w.in, ICON});
            }
            if (!domSer.empty()) opts.push_back({w.in, ISER});
            if (!sc.fos.empty()) opts.push_back({w.fo, FOOUT});
        }
        opts.push_back({w.par, PAR});
        opts.push_back({w.sum, SUM});
        opts.push_back({w.ifte, IF});
        opts.push_back({w.res, RES});
        opts.push_back({w.succ, SUCC});
        int choice = pick(opts);
        switch (choice) {
            case OSER: {
                NameSet V = d.at(kStar);
                Name a = choose(homeNames(V, NClass::Server), rng);
                Name b = fresh("n", NClass::Server);
                Name r = fresh("k", NClass::Cont);
                VisEnv d2 = extend(extend(dropStar(d), b, setInsert(V, b)), r, setInsert(V, b));
                return out(a, payload(sc), b, r, wb(d2, push(s, sIn(r)), depth - 1, sc));
            }
            case OCON: {
                Name p = s.at(0).n;
                Name b = fresh("n", NClass::Server);
                VisEnv d2 = extend(dropStar(d), b, setInsert(d.at(kStar), b));
                return out(p, payload(sc), b, kNone, wb(d2, Stack(s.begin() + 1, s.end()), depth - 1, sc));
            }
            case FOIN: {
                Name x = fresh("x", NClass::Var);
                Scope s2 = sc;
                s2.vars.push_back(x);
                return inp(choose(sc.fos, rng), x, kNone, kNone, wb(d, s, depth - 1, s2));
            }
            case FOOUT: return out(choose(sc.fos, rng), expr(sc), kNone, kNone, wb(d, s, depth - 1, sc));
            case ISER:
            case REP: {
                bool rep = choice == REP;
                Name a = choose(domSer, rng);
                Name b = fresh("n", NClass::Server);
                Name r = fresh("k", NClass::Cont);
                Name x = coin(rng) ? fresh("x", NClass::Var) : kNone;
                Scope s2 = sc;
                if (x != kNone) s2.vars.push_back(x);
                if (rep) ++reps;
                VisEnv d2 = extend(d, kStar, setUnion(d.at(a), mkSet({b, r})));
                Stack st = rep ? Stack{sOut(r)} : push(s, sOut(r));
                return inp(a, x, b, r, wb(d2, st, depth - 1, s2), rep);
            }
            case ICON: {
                Name p = s[0].n;
                Name b = fresh("n", NClass::Server);
                Name x = coin(rng) ? fresh("x", NClass::Var) : kNone;
                Scope s2 = sc;
                if (x != kNone) s2.vars.push_back(x);
                VisEnv d2 = extend(restrict(d, p), kStar, setInsert(setErase(d.at(p), p), b));
                return inp(p, x, b, kNone, wb(d2, Stack(s.begin() + 1, s.end()), depth - 1, s2));
            }
            case PAR: {
                ProcP l = wb(d, s, depth - 1, sc);
                ProcP r = wb(serversOnly(d), {}, depth - 1, sc);
                if (coin(rng)) std::swap(l, r);
                return par2(l, r);
            }
            case SUM: return sum({wb(d, s, depth - 1, sc), wb(d, s, depth - 1, sc)});
            case IF: return ifte(expr(sc), expr(sc), wb(d, s, depth - 1, sc), wb(d, s, depth - 1, sc));
            case RES: {
                if (coin(rng, 0.25)) {
                    Name g = fresh("m", NClass::FO);
                    Scope s2 = sc;
                    s2.fos.push_back(g);
                    ProcP cell = out(g, lit(choose(cfg.values, rng)), kNone, kNone, nil());
                    return res(g, par2(cell, wb(d, s, depth - 1, s2)));
                }
                Name n = fresh("n", NClass::Server);
                NameSet A = setInsert(active ? d.at(kStar) : d.ranUnion(), n);
                return res(n, wb(place(d, n, A), s, depth - 1, sc));
            }
            case RESCON: {
                // new r (r!.P1 | r?.P2): P1 finishes inactive, P2 carries on with the stack
                Name r = fresh("k", NClass::Cont);
                NameSet A = setInsert(d.at(kStar), r);
                VisEnv d1 = place(d, r, A);
                NameSet V = d1.at(kStar);
                Name b1 = fresh("n", NClass::Server);
                VisEnv env1 = extend(serversOnly(d1), b1, setInsert(V, b1));
                ProcP left = out(r, payload(sc), b1, kNone, wb(env1, {}, depth - 1, sc));
                Name b2 = fresh("n", NClass::Server);
                Name x = coin(rng) ? fresh("x", NClass::Var) : kNone;
                Scope s2 = sc;
                if (x != kNone) s2.vars.push_back(x);
                VisEnv env2 = extend(restrict(dropStar(d1), r), kStar, setInsert(setErase(d1.at(r), r), b2));
                ProcP right = inp(r, x, b2, kNone, wb(env2, s, depth - 1, s2));
                return res(r, par2(left, right));
            }
            case SUCC: return succ(omega(), nil());
            case NIL:
            default: return wbTerminal(d, s, sc);
        }
    }
};

}  // namespace

TypingEnv genEnv(const GenConfig& cfg, Rng& rng, bool active) {
    auto servers = serverPool(cfg.servers);
    TypingEnv env;
    for (Name a : servers)
        if (coin(rng, 0.7)) env.vis.m[a] = randomSubset(servers, rng);
    if (env.vis.m.empty() && !servers.empty()) env.vis.m[servers[0]] = {servers[0]};
    if (cfg.mode == Mode::Seq) {
        if (active) env.vis.m[kStar] = randomSubset(servers, rng, 0.6);
    } else if (active) {
        // t is what an observer holding [s?, t!] returns to, so transitivity puts it here too
        env.vis.m[kStar] = setUnion(randomSubset(servers, rng, 0.6), mkSet({contS(), contT()}));
        env.stack = {sOut(contS())};
    } else if (coin(rng, 0.4)) {
        env.vis.m[contS()] = setInsert(randomSubset(servers, rng), contT());
        env.stack = {sIn(contS()), sOut(contT())};
    }
    env.vis = transitiveClosure(env.vis);
    return env;
}

TypingEnv genObserver(const GenConfig& cfg, const TypingEnv& player, Rng& rng) {
    auto servers = serverPool(cfg.servers);
    const VisEnv& d = player.vis;
    bool playerActive = d.hasStar();
    // an active player fixes what the union sees from *, so the observer may only point inside it
    std::vector<Name> pool = servers;
    if (playerActive) pool = homeNames(d.at(kStar), NClass::Server);
    auto valid = [&](const TypingEnv& th) {
        return checkTransitive(unionEnv(d, th.vis)) && checkTransitive(th.vis) && compatible(player, th, cfg.mode);
    };
    for (int attempt = 0; attempt < 50; ++attempt) {
        TypingEnv th;
        for (Name a : servers)
            if (coin(rng, 0.5)) th.vis.m[a] = randomSubset(pool, rng);
        if (cfg.mode == Mode::Seq) {
            if (!playerActive && coin(rng, 0.8)) th.vis.m[kStar] = randomSubset(servers, rng, 0.6);
        } else if (playerActive) {
            th.vis.m[contS()] = setInsert(randomSubset(pool, rng), contT());
            th.stack = {sIn(contS()), sOut(contT())};
        } else if (!player.stack.empty()) {
            th.vis.m[kStar] = setInsert(randomSubset(servers, rng, 0.6), player.stack[0].n);
            th.stack = {sOut(player.stack[0].n)};
        } else {
            th.vis.m[kStar] = setInsert(randomSubset(servers, rng, 0.6), contT());
            th.stack = {sOut(contT())};
        }
        bool ok = true;
        for (int round = 0; round < 10 && ok; ++round) {
            VisEnv u = unionEnv(d, th.vis);
            VisEnv c = transitiveClosure(u);
            if (c == u) break;
            for (auto& [k, v] : c.m) {
                if (u.at(k) == v) continue;
                if (d.has(k) && !th.vis.has(k) && (k == kStar || cls(k) != NClass::Server)) {
                    ok = false;
                    break;
                }
                th.vis.m[k] = v;
            }
        }
        if (ok && valid(th)) return th;
    }
    // fallback: see as little as possible
    TypingEnv th;
    if (cfg.mode == Mode::Seq) {
        if (!playerActive) th.vis.m[kStar] = {};
    } else if (playerActive) {
        th.vis.m[contS()] = {contT()};
        th.stack = {sIn(contS()), sOut(contT())};
    } else if (!player.stack.empty()) {
        th.vis.m[kStar] = transitiveClosure(extend(d, kStar, {player.stack[0].n})).at(kStar);
        th.stack = {sOut(player.stack[0].n)};
    } else {
        th.vis.m[kStar] = {contT()};
        th.stack = {sOut(contT())};
    }
    if (!valid(th)) throw Error("no compatible observer for " + player.show());
    return th;
}

ProcP genTypable(const GenConfig& cfg, const TypingEnv& env, Rng& rng) {
    for (int attempt = 0; attempt < std::max(1, cfg.retries); ++attempt) {
        Gen g{cfg, rng};
        Gen::Scope sc;
        sc.fos = foPool(cfg.fo);
        ProcP p = cfg.mode == Mode::Seq ? g.seq(env.vis, cfg.depth, sc) : g.wb(env.vis, env.stack, cfg.depth, sc);
        if (check(cfg.mode, env, p)) return p;
    }
    throw Error("generation failed for " + env.show());
}

ProcP genTypable(const GenConfig& cfg, const TypingEnv& env) {
    Rng rng(cfg.seed);
    return genTypable(cfg, env, rng);
}

Instance genInstance(const GenConfig& cfg, Rng& rng) {
    Instance in;
    in.player = genEnv(cfg, rng, coin(rng));
    in.proc = genTypable(cfg, in.player, rng);
    in.observer = genObserver(cfg, in.player, rng);
    return in;
}

ProcP stuckActive(Mode m, const TypingEnv& env) {
    GenConfig cfg;
    cfg.mode = m;
    Rng rng(0);
    Gen g{cfg, rng};
    if (m == Mode::Seq) return g.stuck();
    return g.wbStuck(env.vis, env.stack, {});
}

// ---------- brute-force oracle ----------

namespace {

struct Move {
    Action a;
    ProcP next;
};

struct Brute {
    Mode mode;
    const std::vector<Value>& values;
    int tauBound;
    size_t cap;
    size_t explored = 0;
    std::set<std::string> out;

    Brute(Mode m, const std::vector<Value>& v, int t, size_t c) : mode(m), values(v), tauBound(t), cap(c) {}

    std::vector<Move> moves(const ProcP& p, Name fb, Name fp, const std::vector<Value>& vals) {
        std::vector<Move> o;
        switch (p->k) {
            case PK::Nil: break;
            case PK::Succ: {
                Action a;
                a.kind = Action::Omega;
                a.subj = p->subj;
                o.push_back({a, nil()});
                break;
            }
            case PK::In: {
                std::vector<Value> vs = p->x == kNone ? std::vector<Value>{Value::unit()} : vals;
                for (auto& v : vs) {
                    ProcP k = p->cont();
                    Action a;
                    a.kind = Action::In;
                    a.subj = p->subj;
                    a.v = v;
                    if (p->b != kNone) {
                        k = rename(k, p->b, fb);
                        a.b = fb;
                    }
                    if (p->p != kNone) {
                        k = rename(k, p->p, fp);
                        a.p = fp;
                    }
                    if (p->x != kNone) k = subst(k, p->x, v);
                    o.push_back({a, p->rep ? par({k, p}) : k});
                }
                break;
            }
            case PK::Out: {
                Value v;
                try {
                    v = evalExpr(p->e);
                } catch (const Error&) {
                    break;
                }
                ProcP k = p->cont();
                Action a;
                a.kind = Action::Out;
                a.subj = p->subj;
                a.v = v;
                if (p->b != kNone) {
                    k = rename(k, p->b, fb);
                    a.b = fb;
                }
                if (p->p != kNone) {
                    k = rename(k, p->p, fp);
                    a.p = fp;
                }
                o.push_back({a, k});
                break;
            }
            case PK::Sum:
                for (auto& k : p->kids)
                    for (auto& m : moves(k, fb, fp, vals)) o.push_back(m);
                break;
            case PK::If: {
                bool eq;
                try {
                    eq = evalExpr(p->e) == evalExpr(p->f);
                } catch (const Error&) {
                    break;
                }
                o = moves(eq ? p->kids[0] : p->kids[1], fb, fp, vals);
                break;
            }
            case PK::Res:
                for (auto& m : moves(p->cont(), fb, fp, vals)) {
                    if (m.a.kind != Action::Omega && m.a.kind != Action::Tau && m.a.subj == p->subj) continue;
                    auto c = std::make_shared<Proc>(*p);
                    c->kids = {m.next};
                    o.push_back({m.a, c});
                }
                break;
            case PK::Par: {
                size_t n = p->kids.size();
                for (size_t i = 0; i < n; ++i)
                    for (auto& m : moves(p->kids[i], fb, fp, vals)) {
                        auto ks = p->kids;
                        ks[i] = m.next;
                        o.push_back({m.a, par(ks)});
                    }
                std::set<Name> all = allNames(p);
                Name tb = freshFor(all, "_z", NClass::Server);
                Name tp = freshFor(all, "_y", NClass::Cont);
                for (size_t j = 0; j < n; ++j) {
                    std::vector<Move> outs;
                    std::vector<Value> sent;
                    for (auto& m : moves(p->kids[j], tb, tp, vals))
                        if (m.a.kind == Action::Out) {
                            outs.push_back(m);
                            sent.push_back(m.a.v);
                        }
                    if (outs.empty()) continue;
                    for (size_t i = 0; i < n; ++i) {
                        if (i == j) continue;
                        for (auto& mi : moves(p->kids[i], tb, tp, sent)) {
                            if (mi.a.kind != Action::In) continue;
                            for (auto& mo : outs) {
                                if (mo.a.subj != mi.a.subj || mo.a.v != mi.a.v) continue;
                                auto ks = p->kids;
                                ks[i] = mi.next;
                                ks[j] = mo.next;
                                ProcP r = par(ks);
                                if (mo.a.p != kNone) r = res(tp, r);
                                if (mo.a.b != kNone) r = res(tb, r);
                                o.push_back({Action{}, r});
                            }
                        }
                    }
                }
                break;
            }
        }
        return o;
    }

    // the observer rules, written out once more
    std::optional<ObserverEnv> allowed(const ObserverEnv& th, const Action& a) {
        bool star = th.vis.m.count(kStar) > 0;
        auto entry = [&](Name n) { return th.vis.m.count(n) ? th.vis.m.at(n) : NameSet{}; };
        if (a.kind == Action::Omega) return std::nullopt;
        if (a.kind == Action::Tau) return star ? std::nullopt : std::optional<ObserverEnv>(th);
        bool ho = isHO(a.subj);
        if (!ho) {
            if (a.kind == Action::Out) return star ? std::optional<ObserverEnv>(th) : std::nullopt;
            return star ? std::nullopt : std::optional<ObserverEnv>(th);
        }
        ObserverEnv o = th;
        bool server = cls(a.subj) == NClass::Server;
        if (a.kind == Action::Out) {
            if (star || !th.vis.m.count(a.subj)) return std::nullopt;
            NameSet v = entry(a.subj);
            v.push_back(a.b);
            if (mode == Mode::Seq) {
                o.vis.m[kStar] = mkSet(v);
                return o;
            }
            if (server) {
                v.push_back(a.p);
                o.vis.m[kStar] = mkSet(v);
                o.stack.insert(o.stack.begin(), sOut(a.p));
                return o;
            }
            if (th.stack.size() < 2 || !(th.stack[0] == sIn(a.subj)) || !th.stack[1].out) return std::nullopt;
            o.vis.m.erase(a.subj);
            for (auto& [k, s] : o.vis.m) s.erase(std::remove(s.begin(), s.end(), a.subj), s.end());
            o.vis.m[kStar] = mkSet(v);
            o.stack.erase(o.stack.begin());
            return o;
        }
        if (!star) return std::nullopt;
        NameSet cur = entry(kStar);
        if (std::find(cur.begin(), cur.end(), a.subj) == cur.end()) return std::nullopt;
        cur.push_back(a.b);
        cur = mkSet(cur);
        o.vis.m.erase(kStar);
        if (mode == Mode::Seq) {
            o.vis.m[a.b] = cur;
            return o;
        }
        if (server) {
            o.vis.m[a.b] = cur;
            o.vis.m[a.p] = cur;
            o.stack.insert(o.stack.begin(), sIn(a.p));
            return o;
        }
        if (th.stack.empty() || !(th.stack[0] == sOut(a.subj))) return std::nullopt;
        o.vis.m[a.b] = cur;
        o.stack.erase(o.stack.begin());
        return o;
    }

    void explore(const ProcP& p, const ObserverEnv& th, int left, int idx, int tauRun, const std::string& prefix) {
        if (++explored > cap) throw Error("brute-force trace enumeration exceeded its cap");
        out.insert(prefix.empty() ? "eps" : prefix);
        Name fb = traceName(idx, NClass::Server), fp = traceName(idx, NClass::Cont);
        for (auto& m : moves(p, fb, fp, values)) {
            if (m.a.kind == Action::Omega) continue;
            auto th2 = allowed(th, m.a);
            if (!th2) continue;
            if (m.a.kind == Action::Tau) {
                if (tauRun < tauBound) explore(m.next, *th2, left, idx, tauRun + 1, prefix);
                continue;
            }
            if (left == 0) continue;
            explore(m.next, *th2, left - 1, idx + 1, 0, (prefix.empty() ? "" : prefix + " . ") + showAction(m.a));
        }
    }
};

}  // namespace

std::set<std::string> bruteTraces(Mode m, const ProcP& p, const ObserverEnv& theta, int depth,
                                  const std::vector<Value>& values, int tauBound, size_t cap) {
    Brute b{m, values, tauBound, cap};
    b.explore(p, theta, depth, 1, 0, "");
    return b.out;
}

}  // namespace vispi
