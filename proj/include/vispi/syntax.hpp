#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace vispi {

enum class Mode { Seq, WB };

// HO names are Server in sequential mode; Cont only exists in WB mode.
enum class NClass : uint8_t { Server, Cont, FO, Succ, Var };

using Name = int;
inline constexpr Name kNone = -1;
inline constexpr Name kStar = -2;

Name intern(const std::string& s, NClass c);
const std::string& str(Name n);
NClass cls(Name n);
inline bool isHO(Name n) { return n >= 0 && (cls(n) == NClass::Server || cls(n) == NClass::Cont); }
const char* className(NClass c);

// Names b<k> / p<k> are handed out to bound positions of actions.
Name traceName(int k, NClass c);
bool isReservedSpelling(const std::string& s);

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Value {
    enum Kind : uint8_t { Unit, Int, Bool } kind = Unit;
    long long n = 0;

    static Value unit() { return {}; }
    static Value integer(long long v) { return {Int, v}; }
    static Value boolean(bool b) { return {Bool, b ? 1 : 0}; }
    auto operator<=>(const Value&) const = default;
    std::string show() const;
};

struct Expr;
using ExprP = std::shared_ptr<const Expr>;

struct Expr {
    enum Op : uint8_t { Lit, Var, Add, Sub, Mul, Eq } op = Lit;
    Value v;
    Name var = kNone;
    ExprP l, r;
};

ExprP lit(Value v);
ExprP evar(Name x);
ExprP bin(Expr::Op op, ExprP l, ExprP r);
Value evalExpr(const ExprP& e);
ExprP substExpr(const ExprP& e, Name x, Value v);
ExprP renameExpr(const ExprP& e, Name from, Name to);
void exprVars(const ExprP& e, std::set<Name>& out);
std::string showExpr(const ExprP& e);

struct Proc;
using ProcP = std::shared_ptr<const Proc>;

enum class PK : uint8_t { Nil, In, Out, Succ, Par, Sum, Res, If };

struct Proc {
    PK k = PK::Nil;
    Name subj = kNone;  // prefix subject, success name, or restricted name
    Name x = kNone;     // input variable; kNone = unit pattern
    Name b = kNone;
    Name p = kNone;
    bool rep = false;
    ExprP e, f;
    std::vector<ProcP> kids;
    bool hasAnnot = false;
    std::vector<Name> annot;

    const ProcP& cont() const { return kids[0]; }
};

ProcP nil();
ProcP inp(Name a, Name x, Name b, Name p, ProcP cont, bool rep = false);
ProcP out(Name a, ExprP e, Name b, Name p, ProcP cont);
ProcP succ(Name w, ProcP cont);
ProcP par(std::vector<ProcP> ks);
ProcP par2(ProcP l, ProcP r);
ProcP sum(std::vector<ProcP> ks);
ProcP res(Name a, ProcP body);
ProcP resAnnot(Name a, std::vector<Name> annot, ProcP body);
ProcP ifte(ExprP e, ExprP f, ProcP t, ProcP el);

// payload arity classes
bool isHOPrefix(const Proc& p);

std::set<Name> freeNames(const ProcP& p);
std::set<Name> freeVars(const ProcP& p);
std::set<Name> allNames(const ProcP& p);
bool occursFree(const ProcP& p, Name a);
size_t procSize(const ProcP& p);

ProcP subst(const ProcP& p, Name x, Value v);
// capture-avoiding renaming of a free name
ProcP rename(const ProcP& p, Name from, Name to);
Name freshFor(const std::set<Name>& avoid, const std::string& stem, NClass c);

std::string show(const ProcP& p);

// structural congruence: every single-axiom rewrite at every position
std::vector<ProcP> structCongruentStep(const ProcP& p);

struct Canon {
    ProcP proc;
    std::string key;
};
Canon canonicalize(const ProcP& p);
inline std::string canonKey(const ProcP& p) { return canonicalize(p).key; }

struct Decls {
    Mode mode = Mode::Seq;
    std::map<std::string, NClass> classes;
    std::vector<std::string> order;
};

struct ProcFile {
    Decls decls;
    std::vector<std::pair<std::string, ProcP>> procs;
    ProcP get(const std::string& name) const;
};

ProcFile parseFile(const std::string& text);
ProcP parseProc(const std::string& text, const Decls& decls);
Name resolveName(const Decls& d, const std::string& s);
// header text reproducing the declarations needed for p
std::string declHeader(Mode m, const std::vector<ProcP>& ps, const std::vector<Name>& extra = {});
// structural sort check; throws Error on violation
void sortCheck(const ProcP& p, Mode m);

}  // namespace vispi
