#include <algorithm>
#include <map>

#include "vispi/syntax.hpp"

namespace vispi {

namespace {

ProcP withKids(const ProcP& n, std::vector<ProcP> ks) {
    auto c = std::make_shared<Proc>(*n);
    c->kids = std::move(ks);
    return c;
}

ProcP rewrap(const ProcP& resNode, ProcP body) { return withKids(resNode, {std::move(body)}); }

ProcP normalize(const ProcP& p);

// push a restriction as deep as the scope-extrusion law allows
ProcP pushRes(const ProcP& resNode, const ProcP& body) {
    Name a = resNode->subj;
    if (!occursFree(body, a)) return body;
    if (body->k == PK::Par) {
        std::vector<ProcP> with, without;
        for (auto& k : body->kids) (occursFree(k, a) ? with : without).push_back(k);
        if (with.size() == 1) {
            without.push_back(pushRes(resNode, with[0]));
            return par(std::move(without));
        }
        if (!without.empty()) {
            without.push_back(rewrap(resNode, par(std::move(with))));
            return par(std::move(without));
        }
        return rewrap(resNode, body);
    }
    if (body->k == PK::Res) {
        ProcP inner = pushRes(resNode, body->cont());
        // a is stuck on top; push b under it
        if (inner->k == PK::Res && inner->subj == a) return rewrap(resNode, pushRes(body, inner->cont()));
        return pushRes(body, inner);
    }
    return rewrap(resNode, body);
}

ProcP normalize(const ProcP& p) {
    switch (p->k) {
        case PK::Nil: return p;
        case PK::In:
        case PK::Out:
        case PK::Succ: return withKids(p, {normalize(p->cont())});
        case PK::If: return withKids(p, {normalize(p->kids[0]), normalize(p->kids[1])});
        case PK::Res: return pushRes(p, normalize(p->cont()));
        case PK::Par:
        case PK::Sum: {
            std::vector<ProcP> ks;
            for (auto& k : p->kids) {
                auto n = normalize(k);
                if (n->k == PK::Nil) continue;
                if (n->k == p->k)
                    for (auto& g : n->kids) ks.push_back(g);
                else
                    ks.push_back(n);
            }
            return p->k == PK::Par ? par(std::move(ks)) : sum(std::move(ks));
        }
    }
    return p;
}

using Ren = std::map<Name, Name>;

Name look(const Ren& r, Name a) {
    auto it = r.find(a);
    return it == r.end() ? a : it->second;
}

Name binderName(NClass c, int d) {
    const char* stem = "_a";
    switch (c) {
        case NClass::Cont: stem = "_p"; break;
        case NClass::FO: stem = "_h"; break;
        case NClass::Var: stem = "_x"; break;
        default: break;
    }
    return intern(stem + std::to_string(d), c);
}

ExprP renE(const ExprP& e, const Ren& r) {
    if (!e) return e;
    switch (e->op) {
        case Expr::Lit: return e;
        case Expr::Var: return evar(look(r, e->var));
        default: return bin(e->op, renE(e->l, r), renE(e->r, r));
    }
}

ProcP canonR(const ProcP& p, int d, Ren& r);

ProcP canonResChain(const ProcP& p, int d, Ren& r) {
    std::vector<ProcP> chain;
    ProcP body = p;
    while (body->k == PK::Res) {
        chain.push_back(body);
        body = body->cont();
    }
    std::vector<size_t> perm(chain.size());
    for (size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    bool tryAll = chain.size() <= 5;
    ProcP best;
    std::string bestKey;
    do {
        Ren saved = r;
        std::vector<Name> fresh(chain.size());
        for (size_t i = 0; i < perm.size(); ++i) {
            auto& node = chain[perm[i]];
            fresh[i] = binderName(cls(node->subj), d + int(i));
            r[node->subj] = fresh[i];
        }
        ProcP built = canonR(body, d + int(chain.size()), r);
        for (size_t i = perm.size(); i-- > 0;) {
            auto& node = chain[perm[i]];
            auto c = std::make_shared<Proc>(*node);
            c->subj = fresh[i];
            for (auto& a : c->annot) a = look(r, a);
            std::sort(c->annot.begin(), c->annot.end());
            c->kids = {built};
            built = c;
        }
        r = std::move(saved);
        std::string key = show(built);
        if (!best || key < bestKey) {
            best = built;
            bestKey = std::move(key);
        }
    } while (tryAll && std::next_permutation(perm.begin(), perm.end()));
    return best;
}

ProcP canonR(const ProcP& p, int d, Ren& r) {
    switch (p->k) {
        case PK::Nil: return p;
        case PK::Succ: {
            auto c = std::make_shared<Proc>(*p);
            c->kids = {canonR(p->cont(), d, r)};
            return c;
        }
        case PK::In:
        case PK::Out: {
            auto c = std::make_shared<Proc>(*p);
            c->subj = look(r, p->subj);
            if (p->e) c->e = renE(p->e, r);
            Ren saved = r;
            int dd = d;
            if (p->k == PK::In && p->x != kNone) {
                c->x = binderName(NClass::Var, dd++);
                r[p->x] = c->x;
            }
            for (Name* slot : {&c->b, &c->p}) {
                if (*slot == kNone) continue;
                Name old = *slot;
                *slot = binderName(cls(old), dd++);
                r[old] = *slot;
            }
            c->kids = {canonR(p->cont(), dd, r)};
            r = std::move(saved);
            return c;
        }
        case PK::Res: return canonResChain(p, d, r);
        case PK::If: {
            auto c = std::make_shared<Proc>(*p);
            c->e = renE(p->e, r);
            c->f = renE(p->f, r);
            c->kids = {canonR(p->kids[0], d, r), canonR(p->kids[1], d, r)};
            return c;
        }
        case PK::Par:
        case PK::Sum: {
            std::vector<std::pair<std::string, ProcP>> ks;
            for (auto& k : p->kids) {
                auto c = canonR(k, d, r);
                ks.emplace_back(show(c), c);
            }
            std::sort(ks.begin(), ks.end(), [](auto& a, auto& b) { return a.first < b.first; });
            std::vector<ProcP> out;
            for (auto& [_, c] : ks) out.push_back(c);
            return withKids(p, std::move(out));
        }
    }
    return p;
}

}  // namespace

Canon canonicalize(const ProcP& p) {
    Ren r;
    ProcP c = canonR(normalize(p), 0, r);
    return {c, show(c)};
}

namespace {

std::vector<ProcP> rootRewrites(const ProcP& p) {
    std::vector<ProcP> out;
    auto& ks = p->kids;
    switch (p->k) {
        case PK::Par:
        case PK::Sum: {
            bool isPar = p->k == PK::Par;
            auto build = [&](std::vector<ProcP> v) { return isPar ? par(std::move(v)) : sum(std::move(v)); };
            for (size_t i = 0; i < ks.size(); ++i) {
                if (ks[i]->k == PK::Nil) {
                    auto v = ks;
                    v.erase(v.begin() + long(i));
                    out.push_back(build(v));
                }
                if (i + 1 < ks.size()) {
                    auto v = ks;
                    std::swap(v[i], v[i + 1]);
                    out.push_back(withKids(p, v));
                    if (ks.size() > 2) {
                        auto g = ks;
                        ProcP grp = withKids(p, {ks[i], ks[i + 1]});
                        g.erase(g.begin() + long(i), g.begin() + long(i) + 2);
                        g.insert(g.begin() + long(i), grp);
                        out.push_back(withKids(p, g));
                    }
                }
                if (ks[i]->k == p->k) {
                    auto v = ks;
                    v.erase(v.begin() + long(i));
                    v.insert(v.begin() + long(i), ks[i]->kids.begin(), ks[i]->kids.end());
                    out.push_back(withKids(p, v));
                }
            }
            {
                auto v = ks;
                v.push_back(nil());
                out.push_back(withKids(p, v));
            }
            if (isPar) {
                for (size_t i = 0; i < ks.size(); ++i) {
                    if (ks[i]->k == PK::Res) {
                        Name a = ks[i]->subj;
                        bool ok = true;
                        for (size_t j = 0; j < ks.size() && ok; ++j)
                            if (j != i && occursFree(ks[j], a)) ok = false;
                        if (ok) {
                            auto v = ks;
                            v[i] = ks[i]->cont();
                            out.push_back(withKids(ks[i], {par(v)}));
                        }
                    }
                    if (ks[i]->k == PK::In && ks[i]->rep) {
                        auto unrolled = std::make_shared<Proc>(*ks[i]);
                        unrolled->rep = false;
                        std::string u = show(unrolled);
                        for (size_t j = 0; j < ks.size(); ++j)
                            if (j != i && show(ks[j]) == u) {
                                auto v = ks;
                                v.erase(v.begin() + long(j));
                                out.push_back(par(v));
                                break;
                            }
                    }
                }
            }
            break;
        }
        case PK::Res: {
            auto& b = p->cont();
            if (b->k == PK::Res) out.push_back(withKids(b, {withKids(p, {b->cont()})}));
            if (b->k == PK::Par) {
                for (size_t j = 0; j < b->kids.size(); ++j) {
                    if (occursFree(b->kids[j], p->subj)) continue;
                    auto v = b->kids;
                    ProcP q = v[j];
                    v.erase(v.begin() + long(j));
                    out.push_back(par2(withKids(p, {par(v)}), q));
                }
            }
            break;
        }
        case PK::In:
            if (p->rep) {
                auto unrolled = std::make_shared<Proc>(*p);
                unrolled->rep = false;
                out.push_back(par2(p, unrolled));
            }
            break;
        default: break;
    }
    if (p->k != PK::Par && p->k != PK::Sum) {
        out.push_back(par2(p, nil()));
        out.push_back(sum({p, nil()}));
    }
    return out;
}

void allRewrites(const ProcP& p, std::vector<ProcP>& out, bool root) {
    for (auto& q : rootRewrites(p)) {
        if (!root && (q->k == PK::Par || q->k == PK::Sum) && q->kids.size() == 2 && q->kids[1]->k == PK::Nil &&
            p->k != PK::Par && p->k != PK::Sum)
            continue;
        out.push_back(q);
    }
    for (size_t i = 0; i < p->kids.size(); ++i) {
        std::vector<ProcP> sub;
        allRewrites(p->kids[i], sub, false);
        for (auto& s : sub) {
            auto ks = p->kids;
            ks[i] = s;
            out.push_back(withKids(p, ks));
        }
    }
}

}  // namespace

std::vector<ProcP> structCongruentStep(const ProcP& p) {
    std::vector<ProcP> out;
    allRewrites(p, out, true);
    return out;
}

}  // namespace vispi
