#include <cctype>
#include <functional>

#include "vispi/syntax.hpp"

namespace vispi {

namespace {

struct Tok {
    enum K { Ident, Int, Sym, End } k = End;
    std::string s;
    long long n = 0;
    int line = 1, col = 1;
};

std::vector<Tok> lex(const std::string& t) {
    std::vector<Tok> out;
    int line = 1, col = 1;
    size_t i = 0;
    auto adv = [&](size_t n) {
        for (size_t j = 0; j < n; ++j) {
            if (t[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++i;
        }
    };
    while (i < t.size()) {
        char c = t[i];
        if (std::isspace((unsigned char)c)) {
            adv(1);
            continue;
        }
        if (c == '#' || (c == '/' && i + 1 < t.size() && t[i + 1] == '/')) {
            while (i < t.size() && t[i] != '\n') adv(1);
            continue;
        }
        Tok k;
        k.line = line;
        k.col = col;
        if (std::isalpha((unsigned char)c) || c == '_') {
            size_t j = i;
            while (j < t.size() && (std::isalnum((unsigned char)t[j]) || t[j] == '_' || t[j] == '\''))
                ++j;
            k.k = Tok::Ident;
            k.s = t.substr(i, j - i);
            if (k.s == "_") k.k = Tok::Sym;
            adv(j - i);
        } else if (std::isdigit((unsigned char)c)) {
            size_t j = i;
            while (j < t.size() && std::isdigit((unsigned char)t[j])) ++j;
            k.k = Tok::Int;
            k.s = t.substr(i, j - i);
            k.n = std::stoll(k.s);
            adv(j - i);
        } else if (c == '=' && i + 1 < t.size() && t[i + 1] == '=') {
            k.k = Tok::Sym;
            k.s = "=";
            adv(2);
        } else {
            k.k = Tok::Sym;
            k.s = std::string(1, c);
            adv(1);
        }
        out.push_back(k);
    }
    Tok e;
    e.line = line;
    e.col = col;
    out.push_back(e);
    return out;
}

struct Parser {
    std::vector<Tok> toks;
    size_t pos = 0;
    Decls decls;
    // innermost last
    std::vector<std::pair<std::string, Name>> scope;
    int freshCount = 0;

    const Tok& peek(size_t o = 0) const { return toks[std::min(pos + o, toks.size() - 1)]; }

    [[noreturn]] void fail(const std::string& m) const {
        auto& t = peek();
        throw Error("syntax error at " + std::to_string(t.line) + ":" + std::to_string(t.col) + ": " + m +
                    (t.k == Tok::End ? " (at end of input)" : " near '" + t.s + "'"));
    }
    bool isSym(const std::string& s, size_t o = 0) const { return peek(o).k == Tok::Sym && peek(o).s == s; }
    bool isKw(const std::string& s, size_t o = 0) const { return peek(o).k == Tok::Ident && peek(o).s == s; }
    void expectSym(const std::string& s) {
        if (!isSym(s)) fail("expected '" + s + "'");
        ++pos;
    }
    void expectKw(const std::string& s) {
        if (!isKw(s)) fail("expected '" + s + "'");
        ++pos;
    }
    std::string ident() {
        if (peek().k != Tok::Ident) fail("expected identifier");
        return toks[pos++].s;
    }

    Name fresh(NClass c) { return intern("_f" + std::to_string(++freshCount), c); }

    std::optional<Name> lookupBound(const std::string& s, bool wantVar) const {
        for (size_t i = scope.size(); i-- > 0;) {
            if (scope[i].first != s) continue;
            bool v = cls(scope[i].second) == NClass::Var;
            if (v == wantVar) return scope[i].second;
        }
        return std::nullopt;
    }

    Name resolve(const std::string& s) {
        if (auto b = lookupBound(s, false)) return *b;
        auto it = decls.classes.find(s);
        if (it == decls.classes.end()) fail("undeclared name '" + s + "'");
        return intern(s, it->second);
    }

    void parseHeader() {
        expectKw("mode");
        std::string m = ident();
        if (m == "seq") decls.mode = Mode::Seq;
        else if (m == "wb") decls.mode = Mode::WB;
        else fail("mode must be seq or wb");
        expectSym(";");
        while (isKw("ho") || isKw("ser") || isKw("fo") || isKw("con") || isKw("succ")) {
            std::string kw = ident();
            NClass c = kw == "fo" ? NClass::FO : kw == "con" ? NClass::Cont : kw == "succ" ? NClass::Succ : NClass::Server;
            if (c == NClass::Cont && decls.mode == Mode::Seq) fail("continuation names need mode wb");
            do {
                std::string n = ident();
                if ((c == NClass::Server || c == NClass::Cont) && isReservedSpelling(n))
                    fail("name '" + n + "' is reserved for fresh names");
                auto [it, ins] = decls.classes.emplace(n, c);
                if (!ins && it->second != c) fail("name '" + n + "' declared with two classes");
                if (ins) decls.order.push_back(n);
            } while (isSym(",") && (++pos, true));
            expectSym(";");
        }
    }

    ExprP atom() {
        if (peek().k == Tok::Int) return lit(Value::integer(toks[pos++].n));
        if (isSym("-") && peek(1).k == Tok::Int) {
            pos += 2;
            return lit(Value::integer(-toks[pos - 1].n));
        }
        if (isKw("true")) {
            ++pos;
            return lit(Value::boolean(true));
        }
        if (isKw("false")) {
            ++pos;
            return lit(Value::boolean(false));
        }
        if (isSym("(")) {
            ++pos;
            if (isSym(")")) {
                ++pos;
                return lit(Value::unit());
            }
            ExprP e = cmp();
            expectSym(")");
            return e;
        }
        if (peek().k == Tok::Ident) {
            std::string s = ident();
            auto v = lookupBound(s, true);
            if (!v) {
                --pos;
                fail("free variable '" + s + "'");
            }
            return evar(*v);
        }
        fail("expected expression");
    }
    ExprP term() {
        ExprP e = atom();
        while (isSym("*")) {
            ++pos;
            e = bin(Expr::Mul, e, atom());
        }
        return e;
    }
    ExprP expr() {
        ExprP e = term();
        while (isSym("+") || isSym("-")) {
            auto op = toks[pos++].s == "+" ? Expr::Add : Expr::Sub;
            e = bin(op, e, term());
        }
        return e;
    }
    ExprP cmp() {
        ExprP e = expr();
        if (isSym("=")) {
            ++pos;
            e = bin(Expr::Eq, e, expr());
        }
        return e;
    }

    // identifiers or '_' inside parentheses
    std::vector<std::string> argList() {
        std::vector<std::string> out;
        expectSym("(");
        if (isSym(")")) {
            ++pos;
            return out;
        }
        while (true) {
            if (isSym("_")) {
                ++pos;
                out.push_back("");
            } else {
                out.push_back(ident());
            }
            if (isSym(",")) {
                ++pos;
                continue;
            }
            expectSym(")");
            return out;
        }
    }

    std::vector<NClass> slotsFor(NClass subj) const {
        if (subj == NClass::FO) return {NClass::Var};
        if (subj == NClass::Cont) return {NClass::Var, NClass::Server};
        if (decls.mode == Mode::WB) return {NClass::Var, NClass::Server, NClass::Cont};
        return {NClass::Var, NClass::Server};
    }

    ProcP continuation() {
        if (isSym(".")) {
            ++pos;
            return unary();
        }
        return nil();
    }

    ProcP prefix(bool rep) {
        std::string s = ident();
        Name a = resolve(s);
        NClass c = cls(a);
        if (c == NClass::Succ) {
            if (rep) fail("replicated success prefix");
            return succ(a, continuation());
        }
        if (c == NClass::Var) fail("variable used as channel");
        if (isSym("?")) {
            ++pos;
            auto slots = slotsFor(c);
            std::vector<std::string> args;
            if (isSym("(")) args = argList();
            if (args.size() > slots.size()) fail("too many components for " + std::string(className(c)) + " input");
            std::vector<Name> bound(slots.size(), kNone);
            size_t off = slots.size() - args.size();
            size_t mark = scope.size();
            for (size_t i = 0; i < slots.size(); ++i) {
                std::string arg = i >= off ? args[i - off] : "";
                if (slots[i] == NClass::Var) {
                    if (!arg.empty()) bound[i] = intern(arg, NClass::Var);
                } else {
                    bound[i] = arg.empty() ? fresh(slots[i]) : intern(arg, slots[i]);
                }
                if (bound[i] != kNone) scope.emplace_back(arg.empty() ? "" : arg, bound[i]);
            }
            ProcP k = continuation();
            scope.resize(mark);
            Name b = slots.size() > 1 ? bound[1] : kNone;
            Name p = slots.size() > 2 ? bound[2] : kNone;
            return inp(a, bound[0], b, p, k, rep);
        }
        if (rep) fail("replication must guard an input");
        if (!isSym("!")) fail("expected '?' or '!' after channel");
        ++pos;
        ExprP e = lit(Value::unit());
        if (isSym("(")) {
            ++pos;
            if (!isSym(")")) e = cmp();
            expectSym(")");
        }
        auto slots = slotsFor(c);
        slots.erase(slots.begin());
        std::vector<std::string> args;
        if (isSym("(")) args = argList();
        if (args.size() > slots.size()) fail("too many names for output");
        if (c == NClass::FO && !args.empty()) fail("first-order names are monadic");
        std::vector<Name> bound(slots.size(), kNone);
        size_t off = slots.size() - args.size();
        size_t mark = scope.size();
        for (size_t i = 0; i < slots.size(); ++i) {
            std::string arg = i >= off ? args[i - off] : "";
            bound[i] = arg.empty() ? fresh(slots[i]) : intern(arg, slots[i]);
            scope.emplace_back(arg, bound[i]);
        }
        ProcP k = continuation();
        scope.resize(mark);
        return out(a, e, bound.size() > 0 ? bound[0] : kNone, bound.size() > 1 ? bound[1] : kNone, k);
    }

    ProcP unary() {
        if (peek().k == Tok::Int && peek().n == 0) {
            ++pos;
            return nil();
        }
        if (isSym("(")) {
            ++pos;
            ProcP p = sumP();
            expectSym(")");
            return p;
        }
        if (isSym("!")) {
            ++pos;
            return prefix(true);
        }
        if (isKw("new")) {
            ++pos;
            std::string s = ident();
            auto it = decls.classes.find(s);
            if (it == decls.classes.end()) fail("restricted name '" + s + "' needs a class declaration");
            if (it->second == NClass::Succ) fail("success names cannot be restricted");
            Name a = intern(s, it->second);
            bool annot = false;
            std::vector<Name> vs;
            if (isSym(":")) {
                ++pos;
                annot = true;
                expectSym("{");
                scope.emplace_back(s, a);
                while (!isSym("}")) {
                    vs.push_back(resolve(ident()));
                    if (isSym(",")) ++pos;
                }
                scope.pop_back();
                expectSym("}");
            }
            scope.emplace_back(s, a);
            ProcP body = unary();
            scope.pop_back();
            return annot ? resAnnot(a, vs, body) : res(a, body);
        }
        if (isKw("if")) {
            ++pos;
            ExprP e = expr();
            expectSym("=");
            ExprP f = expr();
            expectKw("then");
            ProcP t = unary();
            expectKw("else");
            ProcP el = unary();
            return ifte(e, f, t, el);
        }
        if (peek().k == Tok::Ident) return prefix(false);
        fail("expected process");
    }

    ProcP parP() {
        std::vector<ProcP> ks{unary()};
        while (isSym("|")) {
            ++pos;
            ks.push_back(unary());
        }
        return ks.size() == 1 ? ks[0] : par(std::move(ks));
    }

    ProcP sumP() {
        std::vector<ProcP> ks{parP()};
        while (isSym("+")) {
            ++pos;
            ks.push_back(parP());
        }
        return ks.size() == 1 ? ks[0] : sum(std::move(ks));
    }
};

}  // namespace

ProcFile parseFile(const std::string& text) {
    Parser ps;
    ps.toks = lex(text);
    ps.parseHeader();
    ProcFile f;
    while (ps.isKw("proc")) {
        ++ps.pos;
        std::string name = ps.ident();
        ps.expectSym("=");
        ProcP p = ps.sumP();
        ps.expectSym(";");
        sortCheck(p, ps.decls.mode);
        f.procs.emplace_back(name, p);
    }
    if (ps.peek().k != Tok::End) ps.fail("expected 'proc' definition");
    f.decls = ps.decls;
    return f;
}

ProcP parseProc(const std::string& text, const Decls& decls) {
    Parser ps;
    ps.toks = lex(text);
    ps.decls = decls;
    ProcP p = ps.sumP();
    if (ps.peek().k != Tok::End) ps.fail("trailing input");
    sortCheck(p, decls.mode);
    return p;
}

Name resolveName(const Decls& d, const std::string& s) {
    auto it = d.classes.find(s);
    if (it == d.classes.end()) throw Error("undeclared name '" + s + "'");
    return intern(s, it->second);
}

std::string declHeader(Mode m, const std::vector<ProcP>& ps, const std::vector<Name>& extra) {
    std::map<NClass, std::set<std::string>> byClass;
    for (Name a : extra)
        if (a >= 0 && !isReservedSpelling(str(a))) byClass[cls(a)].insert(str(a));
    std::function<void(const ProcP&)> restricted = [&](const ProcP& p) {
        if (p->k == PK::Res) byClass[cls(p->subj)].insert(str(p->subj));
        for (auto& k : p->kids) restricted(k);
    };
    for (auto& p : ps) {
        for (Name a : freeNames(p)) byClass[cls(a)].insert(str(a));
        restricted(p);
    }
    std::string o = std::string("mode ") + (m == Mode::Seq ? "seq" : "wb") + ";\n";
    for (NClass c : {NClass::Server, NClass::Cont, NClass::FO, NClass::Succ}) {
        auto& s = byClass[c];
        if (s.empty()) continue;
        o += className(c);
        o += ' ';
        bool first = true;
        for (auto& n : s) {
            if (!first) o += ',';
            first = false;
            o += n;
        }
        o += ";\n";
    }
    return o;
}

}  // namespace vispi
