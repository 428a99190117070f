#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vispi/lts.hpp"
#include "vispi/visenv.hpp"

namespace vispi {

using ObserverEnv = TypingEnv;

struct TypedState {
    ObserverEnv obs;
    ProcP proc;
};

struct TypedStep {
    Action act;
    TypedState next;
};

// observer environment after the process performs a; nullopt when the rules forbid it
std::optional<ObserverEnv> observe(Mode m, const ObserverEnv& obs, const Action& a);

// freshIdx < 0 picks nextTraceIndex
std::vector<TypedStep> typedSteps(Mode m, const TypedState& s, const std::vector<Value>& values, int freshIdx = -1);

struct TypedWeak {
    std::vector<TypedState> states;  // canonical processes
    bool truncated = false;
};
// tau closure around at most one mu step; tau alone gives the reflexive-transitive closure
TypedWeak typedWeakSteps(Mode m, const TypedState& s, const Action& mu, const std::vector<Value>& values, int tauBound);
// states reachable by typed tau steps (just s when the observer holds the thread)
TypedWeak typedTauClosure(Mode m, const TypedState& s, int tauBound);

struct TypedTrace {
    Trace trace;
    std::vector<ObserverEnv> obs;  // obs[0] initial, obs[i] after trace[i-1]
};

struct TraceSet {
    std::vector<TypedTrace> traces;  // sorted by length then text, eps first
    int depth = 0;
    bool truncated = false;
    std::vector<std::string> keys() const;
    bool contains(const Trace& t) const;
};

// bound names of the i-th interaction are b<i>/p<i>, so traces are already canonical
TraceSet typedTraces(Mode m, const TypedState& s, int depth, const std::vector<Value>& values, int tauBound);

// traces a process can perform on its own while every step stays within a case of subject
// reduction, starting from its typing environment
struct EmanatingSet {
    std::vector<Trace> traces;
    bool truncated = false;
};
EmanatingSet emanatingTraces(Mode m, const TypingEnv& env, const ProcP& p, int depth, const std::vector<Value>& values,
                             int tauBound);

namespace detail {
// a set of tau-closed states sharing one observer environment
struct Macro {
    ObserverEnv obs;
    std::vector<ProcP> states;
    std::string key;
    bool truncated = false;
};
Macro closeMacro(Mode m, const ObserverEnv& obs, const std::vector<ProcP>& seeds, int tauBound);
std::map<Action, Macro> expandMacro(Mode m, const Macro& mc, int idx, const std::vector<Value>& values, int tauBound);
}  // namespace detail

}  // namespace vispi
