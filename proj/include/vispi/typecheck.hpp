#pragma once

#include <optional>
#include <string>

#include "vispi/lts.hpp"
#include "vispi/visenv.hpp"

namespace vispi {

struct TypeError {
    std::string rule;
    std::string path;  // '/'-separated constructor path from the root
    std::string witness;
    std::string show() const;
};

struct CheckResult {
    std::optional<TypeError> err;
    bool ok() const { return !err; }
    explicit operator bool() const { return ok(); }
};

struct CheckOptions {
    bool transitivityGate = true;
    int resBudget = 1024;
};

CheckResult checkSeq(const VisEnv& d, const ProcP& p, const CheckOptions& o = {});
CheckResult checkWB(const VisEnv& d, const Stack& s, const ProcP& p, const CheckOptions& o = {});
CheckResult check(Mode m, const TypingEnv& env, const ProcP& p, const CheckOptions& o = {});

bool compatible(const TypingEnv& a, const TypingEnv& b, Mode m);
// some stack that interleaves a and b
std::optional<Stack> someInterleaving(const Stack& a, const Stack& b);

struct SRWitness {
    std::optional<TypingEnv> env;  // empty when no case of the theorem applies
    std::string reason;
};
SRWitness subjectReductionWitness(Mode m, const TypingEnv& env, const ProcP& p, const Action& mu, const ProcP& next);

bool meets(const Proc& input, const NameSet& s, const VisEnv& d);
ProcP prune(const NameSet& s, const VisEnv& d, const ProcP& p);

}  // namespace vispi
