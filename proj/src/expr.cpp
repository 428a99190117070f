#include "vispi/syntax.hpp"

namespace vispi {

std::string Value::show() const {
    switch (kind) {
        case Unit: return "()";
        case Bool: return n ? "true" : "false";
        case Int: return std::to_string(n);
    }
    return "?";
}

ExprP lit(Value v) {
    auto e = std::make_shared<Expr>();
    e->op = Expr::Lit;
    e->v = v;
    return e;
}

ExprP evar(Name x) {
    auto e = std::make_shared<Expr>();
    e->op = Expr::Var;
    e->var = x;
    return e;
}

ExprP bin(Expr::Op op, ExprP l, ExprP r) {
    auto e = std::make_shared<Expr>();
    e->op = op;
    e->l = std::move(l);
    e->r = std::move(r);
    return e;
}

Value evalExpr(const ExprP& e) {
    switch (e->op) {
        case Expr::Lit: return e->v;
        case Expr::Var: throw Error("open expression: free variable " + str(e->var));
        case Expr::Eq: return Value::boolean(evalExpr(e->l) == evalExpr(e->r));
        default: break;
    }
    Value a = evalExpr(e->l), b = evalExpr(e->r);
    if (a.kind != Value::Int || b.kind != Value::Int)
        throw Error("type mismatch in " + showExpr(e));
    switch (e->op) {
        case Expr::Add: return Value::integer(a.n + b.n);
        case Expr::Sub: return Value::integer(a.n - b.n);
        case Expr::Mul: return Value::integer(a.n * b.n);
        default: break;
    }
    throw Error("bad expression");
}

ExprP substExpr(const ExprP& e, Name x, Value v) {
    if (!e) return e;
    switch (e->op) {
        case Expr::Lit: return e;
        case Expr::Var: return e->var == x ? lit(v) : e;
        default: {
            auto l = substExpr(e->l, x, v), r = substExpr(e->r, x, v);
            if (l == e->l && r == e->r) return e;
            return bin(e->op, l, r);
        }
    }
}

ExprP renameExpr(const ExprP& e, Name from, Name to) {
    if (!e) return e;
    switch (e->op) {
        case Expr::Lit: return e;
        case Expr::Var: return e->var == from ? evar(to) : e;
        default: {
            auto l = renameExpr(e->l, from, to), r = renameExpr(e->r, from, to);
            if (l == e->l && r == e->r) return e;
            return bin(e->op, l, r);
        }
    }
}

void exprVars(const ExprP& e, std::set<Name>& out) {
    if (!e) return;
    if (e->op == Expr::Var) out.insert(e->var);
    if (e->l) exprVars(e->l, out);
    if (e->r) exprVars(e->r, out);
}

std::string showExpr(const ExprP& e) {
    switch (e->op) {
        case Expr::Lit: return e->v.show();
        case Expr::Var: return str(e->var);
        case Expr::Add: return "(" + showExpr(e->l) + "+" + showExpr(e->r) + ")";
        case Expr::Sub: return "(" + showExpr(e->l) + "-" + showExpr(e->r) + ")";
        case Expr::Mul: return "(" + showExpr(e->l) + "*" + showExpr(e->r) + ")";
        case Expr::Eq: return "(" + showExpr(e->l) + " = " + showExpr(e->r) + ")";
    }
    return "?";
}

}  // namespace vispi
