#pragma once

#include <string>
#include <vector>

#include "vispi/syntax.hpp"

namespace vispi {

struct Action {
    enum Kind : uint8_t { Tau, In, Out, Omega } kind = Tau;
    Name subj = kNone;
    Value v;
    Name b = kNone, p = kNone;

    bool isHO() const { return (kind == In || kind == Out) && vispi::isHO(subj); }
    bool isFO() const { return (kind == In || kind == Out) && subj >= 0 && cls(subj) == NClass::FO; }
    bool interaction() const { return kind != Tau; }
    auto operator<=>(const Action&) const = default;
    bool operator==(const Action&) const = default;
};

// tau, omega, a?<v>(b,p), a!<v>(b,p), h?<v>, h!<v>; unit prints as <>
std::string showAction(const Action& a);
std::string showTrace(const std::vector<Action>& t);
Action parseAction(const std::string& text, const Decls& d);
std::vector<Name> boundNames(const Action& a);
std::vector<Name> freeNamesOf(const Action& a);

using Trace = std::vector<Action>;

struct Step {
    Action act;
    ProcP proc;
};

// smallest k such that b<k>/p<k> are not free in p
int nextTraceIndex(const ProcP& p);

// all strong transitions; bound names of visible HO actions are traceName(freshIdx, ·),
// freshIdx < 0 picks nextTraceIndex(p)
std::vector<Step> strongSteps(const ProcP& p, const std::vector<Value>& values, int freshIdx = -1);
std::vector<ProcP> tauSteps(const ProcP& p);

struct Closure {
    std::vector<ProcP> states;  // canonical, first is the start
    bool truncated = false;
};
Closure tauClosure(const ProcP& p, int tauBound);

// ⇒ (mu = tau) or ⇒μ⇒; derivatives canonicalised and deduplicated
struct WeakResult {
    std::vector<ProcP> states;
    bool truncated = false;
};
WeakResult weakSteps(const ProcP& p, const Action& mu, const std::vector<Value>& values, int tauBound);

enum class Barb { Yes, No, Unknown };
const char* showBarb(Barb b);
// omega = kNone accepts any success name
bool hasBarbNow(const ProcP& p, Name omega);
Barb barb(const ProcP& p, Name omega, int tauBound);

}  // namespace vispi
