#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <string>

#include "vispi/typedlts.hpp"

namespace vispi {

struct GenWeights {
    int out = 4, in = 4, fo = 1, par = 2, sum = 1, ifte = 1, res = 2, succ = 0, rep = 1, nil = 1;
};

struct GenConfig {
    Mode mode = Mode::Seq;
    int depth = 4;
    int servers = 3;  // free server names a, c, d, e, ...
    int fo = 1;       // free first-order names h, g, ...
    std::vector<Value> values{Value::integer(0), Value::integer(1), Value::integer(2)};
    GenWeights w;
    uint64_t seed = 1;
    int maxRep = 2;
    int retries = 100;
};

using Rng = std::mt19937_64;

// a transitive environment over the configured free names; in wb mode, active environments carry
// the stack [s!] and inactive ones either [] or [s?, t!]
TypingEnv genEnv(const GenConfig& cfg, Rng& rng, bool active);
// an environment compatible with the player's, with the union of both transitive
TypingEnv genObserver(const GenConfig& cfg, const TypingEnv& player, Rng& rng);

// a process typable under env by construction; throws Error when the retry budget runs out
ProcP genTypable(const GenConfig& cfg, const TypingEnv& env);
ProcP genTypable(const GenConfig& cfg, const TypingEnv& env, Rng& rng);

struct Instance {
    TypingEnv player, observer;
    ProcP proc;
};
Instance genInstance(const GenConfig& cfg, Rng& rng);

// the active dead end: a call on a private server that nobody serves
ProcP stuckActive(Mode m, const TypingEnv& env);

// naive recursive interpreter; throws Error past `cap` explored nodes
std::set<std::string> bruteTraces(Mode m, const ProcP& p, const ObserverEnv& theta, int depth,
                                  const std::vector<Value>& values, int tauBound, size_t cap = 200000);

// names used by the generators, so callers can build observers over the same pool
std::vector<Name> serverPool(int n);
std::vector<Name> foPool(int n);

}  // namespace vispi
