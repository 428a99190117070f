#pragma once

#include "vispi/lts.hpp"
#include "vispi/visenv.hpp"

namespace vispi {

// interactions at a server name / at a continuation name
bool isQuestion(const Action& a);
bool isAnswer(const Action& a);

// m2 uses, with the opposite polarity, a name bound by m1
bool justifies(const Action& m1, const Action& m2);
// index of the justifier of t[j], or -1
int justifierOf(const Trace& t, size_t j);

// higher-order names of an action, bound ones included
NameSet fnHO(const Action& a);

NameSet view(const NameSet& start, const Trace& t);
bool respectsViews(const NameSet& start, const Trace& t);
// first position whose free names escape the view, or -1
int viewViolation(const NameSet& start, const Trace& t);

bool wellBracketed(const Trace& t);
// offending (question, answer) positions, or {-1,-1}
std::pair<int, int> bracketViolation(const Trace& t);

}  // namespace vispi
