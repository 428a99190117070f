#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vispi/syntax.hpp"

namespace vispi {

// sorted, duplicate-free
using NameSet = std::vector<Name>;

NameSet mkSet(std::vector<Name> v);
bool setHas(const NameSet& s, Name a);
NameSet setUnion(const NameSet& a, const NameSet& b);
NameSet setIntersect(const NameSet& a, const NameSet& b);
NameSet setInsert(NameSet s, Name a);
NameSet setErase(NameSet s, Name a);
bool setSubset(const NameSet& a, const NameSet& b);
std::string showSet(const NameSet& s);

struct VisEnv {
    std::map<Name, NameSet> m;

    bool has(Name a) const { return m.count(a) > 0; }
    // empty set when a is not in the domain
    const NameSet& at(Name a) const;
    bool hasStar() const { return has(kStar); }
    NameSet dom() const;
    NameSet ranUnion() const;
    bool empty() const { return m.empty(); }
    auto operator<=>(const VisEnv&) const = default;
    bool operator==(const VisEnv&) const = default;
    std::string show() const;
};

VisEnv extend(const VisEnv& d, Name p, NameSet v);
VisEnv restrict(const VisEnv& d, Name p);
VisEnv addTo(const VisEnv& d, Name p, Name q);
// overwrite or create an entry
VisEnv assign(const VisEnv& d, Name p, NameSet v);

struct TransWitness {
    Name o, a;
};
std::optional<TransWitness> transitivityViolation(const VisEnv& d);
bool checkTransitive(const VisEnv& d);
VisEnv transitiveClosure(const VisEnv& d);

// pointwise union / intersection of entries
VisEnv unionEnv(const VisEnv& a, const VisEnv& b);
VisEnv intersectEnv(const VisEnv& a, const VisEnv& b);
bool subsetOf(const VisEnv& a, const VisEnv& b);
bool duplicable(const VisEnv& d);
VisEnv projection(const NameSet& n, const VisEnv& th);

// every (Δ1, Δ2) with Δ1 ∪ Δ2 = Δ, ⋆ on at most one side, and in wb mode
// continuation entries on one side only; codomains are kept whole
std::vector<std::pair<VisEnv, VisEnv>> split(const VisEnv& d, Mode m);

struct StackElem {
    Name n;
    bool out;  // true = output tag
    auto operator<=>(const StackElem&) const = default;
    bool operator==(const StackElem&) const = default;
};
// front = top
using Stack = std::vector<StackElem>;

inline StackElem sOut(Name p) { return {p, true}; }
inline StackElem sIn(Name p) { return {p, false}; }
Stack push(const Stack& s, StackElem e);

bool isStack(const Stack& s);
bool isClean(const Stack& s);
bool stackHas(const Stack& s, Name p);
bool stackHasTagged(const Stack& s, StackElem e);
bool isInterleaving(const Stack& s, const Stack& s1, const Stack& s2);
std::vector<std::pair<Stack, Stack>> interleavings(const Stack& s);
std::string showStack(const Stack& s);

struct TypingEnv {
    VisEnv vis;
    Stack stack;
    auto operator<=>(const TypingEnv&) const = default;
    bool operator==(const TypingEnv&) const = default;
    std::string show() const;
};

// `vis { *: {a,b}; a: {a,c} }` and `stack [ p!, q? ]`
VisEnv parseVis(const std::string& text, const Decls& d);
Stack parseStack(const std::string& text, const Decls& d);

struct EnvFile {
    TypingEnv player, observer;
    bool hasObserver = false;
};
// `player vis {...} stack [...]; observer vis {...} stack [...];`
EnvFile parseEnvFile(const std::string& text, const Decls& d);
// one environment per entry, e.g. a family of observers: `vis {...} stack [...]`, optionally `;`-separated
std::vector<TypingEnv> parseEnvFamily(const std::string& text, const Decls& d);

}  // namespace vispi
