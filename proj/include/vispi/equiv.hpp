#pragma once

#include <string>
#include <vector>

#include "vispi/typecheck.hpp"
#include "vispi/typedlts.hpp"

namespace vispi {

enum class VerdictKind { Equivalent, Distinguished, Inconclusive };
const char* showVerdict(VerdictKind k);

struct Verdict {
    VerdictKind kind = VerdictKind::Equivalent;
    int depth = 0;
    int tauBound = 0;
    // trace equivalence: the distinguishing trace; side 1 = only the left process has it, 2 = only the right
    Trace trace;
    int side = 0;
    // bisimulation games: challenger moves, e.g. "left: a?<>(b1)"
    std::vector<std::string> moves;
    std::string note;
    bool equivalent() const { return kind == VerdictKind::Equivalent; }
    bool distinguished() const { return kind == VerdictKind::Distinguished; }
    std::string witnessText() const;
};

struct Bounds {
    int depth = 8;
    int tauBound = 64;
    std::vector<Value> values{Value::integer(0), Value::integer(1), Value::integer(2)};
};

// throws Error when the environments are incompatible or a process does not type
void requireTyped(Mode m, const ProcP& p, const ProcP& q, const TypingEnv& delta, const TypingEnv& theta);

Verdict traceEquiv(Mode m, const ProcP& p, const ProcP& q, const TypingEnv& delta, const TypingEnv& theta,
                   const Bounds& b = {});
// same, skipping requireTyped
Verdict traceEquivUnchecked(Mode m, const ProcP& p, const ProcP& q, const TypingEnv& theta, const Bounds& b = {});

// weak typed bisimulation; depth counts interactions, tau runs are capped by tauBound
Verdict bisim(Mode m, const ProcP& p, const ProcP& q, const TypingEnv& delta, const TypingEnv& theta,
              const Bounds& b = {});
Verdict bisimUnchecked(Mode m, const ProcP& p, const ProcP& q, const TypingEnv& theta, const Bounds& b = {});

struct Observer {
    std::string name;
    ProcP proc;
    TypingEnv env;
};

struct MayRow {
    std::string observer;
    std::string error;  // type or compatibility failure of the observer
    Barb left = Barb::No, right = Barb::No;
    bool distinguishes() const {
        return error.empty() && left != Barb::Unknown && right != Barb::Unknown && left != right;
    }
};

struct MayReport {
    std::vector<MayRow> rows;
    bool anyDistinguishes() const;
    bool anyUnknown() const;
    bool anyError() const;
};

// omega = kNone accepts any success name
MayReport mayTest(Mode m, const ProcP& p, const ProcP& q, const TypingEnv& delta, const std::vector<Observer>& observers,
                  Name omega, int tauBound);

// closed systems: bisimulation game on tau steps with weak barbs on every success name
Verdict barbedBisim(const ProcP& p, const ProcP& q, int depth, int tauBound);

}  // namespace vispi
