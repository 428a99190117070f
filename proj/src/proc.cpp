#include <algorithm>
#include <functional>

#include "vispi/syntax.hpp"

namespace vispi {

namespace {

std::shared_ptr<Proc> mk(PK k) {
    auto p = std::make_shared<Proc>();
    p->k = k;
    return p;
}

bool bindsName(const Proc& n, Name a) {
    if (n.k == PK::In || n.k == PK::Out) return n.b == a || n.p == a;
    if (n.k == PK::Res) return n.subj == a;
    return false;
}

}  // namespace

ProcP nil() {
    static ProcP z = mk(PK::Nil);
    return z;
}

ProcP inp(Name a, Name x, Name b, Name p, ProcP cont, bool rep) {
    auto n = mk(PK::In);
    n->subj = a;
    n->x = x;
    n->b = b;
    n->p = p;
    n->rep = rep;
    n->kids = {std::move(cont)};
    return n;
}

ProcP out(Name a, ExprP e, Name b, Name p, ProcP cont) {
    auto n = mk(PK::Out);
    n->subj = a;
    n->e = e ? std::move(e) : lit(Value::unit());
    n->b = b;
    n->p = p;
    n->kids = {std::move(cont)};
    return n;
}

ProcP succ(Name w, ProcP cont) {
    auto n = mk(PK::Succ);
    n->subj = w;
    n->kids = {cont ? std::move(cont) : nil()};
    return n;
}

ProcP par(std::vector<ProcP> ks) {
    if (ks.empty()) return nil();
    if (ks.size() == 1) return ks[0];
    auto n = mk(PK::Par);
    n->kids = std::move(ks);
    return n;
}

ProcP par2(ProcP l, ProcP r) { return par({std::move(l), std::move(r)}); }

ProcP sum(std::vector<ProcP> ks) {
    if (ks.empty()) return nil();
    if (ks.size() == 1) return ks[0];
    auto n = mk(PK::Sum);
    n->kids = std::move(ks);
    return n;
}

ProcP res(Name a, ProcP body) {
    auto n = mk(PK::Res);
    n->subj = a;
    n->kids = {std::move(body)};
    return n;
}

ProcP resAnnot(Name a, std::vector<Name> annot, ProcP body) {
    auto n = mk(PK::Res);
    n->subj = a;
    n->hasAnnot = true;
    std::sort(annot.begin(), annot.end());
    annot.erase(std::unique(annot.begin(), annot.end()), annot.end());
    n->annot = std::move(annot);
    n->kids = {std::move(body)};
    return n;
}

ProcP ifte(ExprP e, ExprP f, ProcP t, ProcP el) {
    auto n = mk(PK::If);
    n->e = std::move(e);
    n->f = std::move(f);
    n->kids = {std::move(t), std::move(el)};
    return n;
}

bool isHOPrefix(const Proc& p) {
    return (p.k == PK::In || p.k == PK::Out) && isHO(p.subj);
}

namespace {

void fnRec(const ProcP& p, std::set<Name>& bound, std::set<Name>& out) {
    auto see = [&](Name a) {
        if (a >= 0 && !bound.count(a)) out.insert(a);
    };
    switch (p->k) {
        case PK::Nil: return;
        case PK::Succ: see(p->subj); return;
        case PK::In:
        case PK::Out: {
            see(p->subj);
            std::vector<Name> added;
            for (Name a : {p->b, p->p})
                if (a >= 0 && bound.insert(a).second) added.push_back(a);
            fnRec(p->cont(), bound, out);
            for (Name a : added) bound.erase(a);
            return;
        }
        case PK::Res: {
            bool added = bound.insert(p->subj).second;
            fnRec(p->cont(), bound, out);
            if (added) bound.erase(p->subj);
            return;
        }
        default:
            for (auto& k : p->kids) fnRec(k, bound, out);
    }
}

void fvRec(const ProcP& p, std::set<Name>& bound, std::set<Name>& out) {
    auto seeE = [&](const ExprP& e) {
        if (!e) return;
        std::set<Name> vs;
        exprVars(e, vs);
        for (Name v : vs)
            if (!bound.count(v)) out.insert(v);
    };
    seeE(p->e);
    seeE(p->f);
    if (p->k == PK::In && p->x >= 0) {
        bool added = bound.insert(p->x).second;
        fvRec(p->cont(), bound, out);
        if (added) bound.erase(p->x);
        return;
    }
    for (auto& k : p->kids) fvRec(k, bound, out);
}

void allRec(const ProcP& p, std::set<Name>& out) {
    for (Name a : {p->subj, p->x, p->b, p->p})
        if (a >= 0) out.insert(a);
    for (Name a : p->annot) out.insert(a);
    for (auto& k : p->kids) allRec(k, out);
}

}  // namespace

std::set<Name> freeNames(const ProcP& p) {
    std::set<Name> bound, out;
    fnRec(p, bound, out);
    return out;
}

std::set<Name> freeVars(const ProcP& p) {
    std::set<Name> bound, out;
    fvRec(p, bound, out);
    return out;
}

std::set<Name> allNames(const ProcP& p) {
    std::set<Name> out;
    allRec(p, out);
    return out;
}

bool occursFree(const ProcP& p, Name a) { return freeNames(p).count(a) > 0; }

size_t procSize(const ProcP& p) {
    size_t n = 1;
    for (auto& k : p->kids) n += procSize(k);
    return n;
}

ProcP subst(const ProcP& p, Name x, Value v) {
    if (p->k == PK::Nil) return p;
    bool shadow = p->k == PK::In && p->x == x;
    ExprP e = substExpr(p->e, x, v), f = substExpr(p->f, x, v);
    std::vector<ProcP> ks = p->kids;
    bool changed = e != p->e || f != p->f;
    if (!shadow) {
        for (auto& k : ks) {
            auto nk = subst(k, x, v);
            if (nk != k) changed = true;
            k = nk;
        }
    }
    if (!changed) return p;
    auto c = std::make_shared<Proc>(*p);
    c->e = e;
    c->f = f;
    c->kids = std::move(ks);
    return c;
}

ProcP rename(const ProcP& p, Name from, Name to) {
    if (from == to || p->k == PK::Nil) return p;
    auto c = std::make_shared<Proc>(*p);
    bool changed = false;
    if (c->subj == from && p->k != PK::Res) {
        c->subj = to;
        changed = true;
    }
    for (auto& a : c->annot)
        if (a == from) {
            a = to;
            changed = true;
        }
    if (bindsName(*p, from)) {
        // scope of from ends here; only the prefix subject could mention it
        return changed ? ProcP(c) : p;
    }
    if (bindsName(*p, to) && occursFree(p->kids[0], from)) {
        std::set<Name> avoid = allNames(p);
        avoid.insert(from);
        avoid.insert(to);
        Name fresh = freshFor(avoid, "_r", cls(to));
        ProcP body = rename(p->kids[0], to, fresh);
        if (c->b == to) c->b = fresh;
        if (c->p == to) c->p = fresh;
        if (p->k == PK::Res && c->subj == to) c->subj = fresh;
        c->kids = {rename(body, from, to)};
        return c;
    }
    for (auto& k : c->kids) {
        auto nk = rename(k, from, to);
        if (nk != k) changed = true;
        k = nk;
    }
    return changed ? ProcP(c) : p;
}

namespace {

void showRec(const ProcP& p, int ctx, std::string& o);

// ctx: 0 = sum level, 1 = par level, 2 = unary
void showUnary(const ProcP& p, std::string& o) { showRec(p, 2, o); }

void showArgs(std::string& o, std::initializer_list<Name> ns) {
    o += '(';
    bool first = true;
    for (Name n : ns) {
        if (n == kNone) continue;
        if (!first) o += ',';
        first = false;
        o += str(n);
    }
    o += ')';
}

void showRec(const ProcP& p, int ctx, std::string& o) {
    switch (p->k) {
        case PK::Nil: o += '0'; return;
        case PK::Succ:
            o += str(p->subj);
            o += '.';
            showUnary(p->cont(), o);
            return;
        case PK::In: {
            if (p->rep) o += '!';
            o += str(p->subj);
            o += '?';
            o += '(';
            o += p->x == kNone ? "_" : str(p->x);
            if (p->b != kNone) o += "," + str(p->b);
            if (p->p != kNone) o += "," + str(p->p);
            o += ')';
            o += '.';
            showUnary(p->cont(), o);
            return;
        }
        case PK::Out: {
            o += str(p->subj);
            o += "!(";
            if (!(p->e->op == Expr::Lit && p->e->v.kind == Value::Unit)) o += showExpr(p->e);
            o += ')';
            if (p->b != kNone) showArgs(o, {p->b, p->p});
            o += '.';
            showUnary(p->cont(), o);
            return;
        }
        case PK::Res:
            o += "new ";
            o += str(p->subj);
            if (p->hasAnnot) {
                o += ":{";
                for (size_t i = 0; i < p->annot.size(); ++i) {
                    if (i) o += ',';
                    o += str(p->annot[i]);
                }
                o += '}';
            }
            o += ' ';
            showUnary(p->cont(), o);
            return;
        case PK::If:
            o += "if " + showExpr(p->e) + " = " + showExpr(p->f) + " then ";
            showUnary(p->kids[0], o);
            o += " else ";
            showUnary(p->kids[1], o);
            return;
        case PK::Par:
        case PK::Sum: {
            bool isPar = p->k == PK::Par;
            int mine = isPar ? 1 : 0;
            bool paren = ctx > mine;
            if (paren) o += '(';
            for (size_t i = 0; i < p->kids.size(); ++i) {
                if (i) o += isPar ? " | " : " + ";
                showRec(p->kids[i], isPar ? 2 : 1, o);
            }
            if (paren) o += ')';
            return;
        }
    }
}

}  // namespace

std::string show(const ProcP& p) {
    std::string o;
    showRec(p, 0, o);
    return o;
}

void sortCheck(const ProcP& root, Mode m) {
    std::function<void(const ProcP&, std::set<Name>&)> go = [&](const ProcP& p, std::set<Name>& recv) {
        auto fail = [&](const std::string& msg) { throw Error("sort error: " + msg + " in " + show(p)); };
        switch (p->k) {
            case PK::Nil: return;
            case PK::Succ:
                if (cls(p->subj) != NClass::Succ) fail("success prefix on non-success name");
                go(p->cont(), recv);
                return;
            case PK::In:
            case PK::Out: {
                NClass c = cls(p->subj);
                if (c == NClass::Succ || c == NClass::Var) fail("bad subject class");
                if (p->k == PK::Out && p->rep) fail("replicated output");
                if (c == NClass::Cont && m == Mode::Seq) fail("continuation name in sequential mode");
                if (c == NClass::FO) {
                    if (p->b != kNone || p->p != kNone) fail("first-order names are monadic");
                } else {
                    if (p->b == kNone || cls(p->b) != NClass::Server) fail("missing carried name");
                    bool wantP = m == Mode::WB && c == NClass::Server;
                    if (wantP != (p->p != kNone)) fail("wrong payload arity");
                    if (wantP && cls(p->p) != NClass::Cont) fail("carried continuation has wrong class");
                    if (p->rep && c == NClass::Cont) fail("replicated continuation input");
                }
                if (p->k == PK::In && recv.count(p->subj))
                    throw Error("output-capability violation: received name " + str(p->subj) +
                                " used as input subject");
                if (p->k == PK::In && p->x != kNone && cls(p->x) != NClass::Var) fail("bad variable");
                std::set<Name> inner = recv;
                for (Name a : {p->b, p->p}) {
                    if (a == kNone) continue;
                    if (p->k == PK::In) inner.insert(a);
                    else inner.erase(a);
                }
                go(p->cont(), inner);
                return;
            }
            case PK::Res: {
                NClass c = cls(p->subj);
                if (c == NClass::Succ || c == NClass::Var) fail("restriction of a success name");
                if (c == NClass::Cont && m == Mode::Seq) fail("continuation name in sequential mode");
                std::set<Name> inner = recv;
                inner.erase(p->subj);
                go(p->cont(), inner);
                return;
            }
            default:
                for (auto& k : p->kids) go(k, recv);
        }
    };
    std::set<Name> recv;
    go(root, recv);
}

ProcP ProcFile::get(const std::string& name) const {
    for (auto& [n, p] : procs)
        if (n == name) return p;
    throw Error("no process named " + name);
}

}  // namespace vispi
