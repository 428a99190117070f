#include <doctest.h>

#include "helpers.hpp"
#include "vispi/traceprops.hpp"

using namespace vispi;

namespace {
const char* W = "mode wb;\nho a, c, d;\ncon s;\nfo h;";
Trace tr(std::initializer_list<const char*> xs) {
    Decls d = th::decls(W);
    Trace t;
    for (auto x : xs) t.push_back(parseAction(x, d));
    return t;
}
NameSet names(std::initializer_list<const char*> xs) {
    Decls d = th::decls(W);
    std::vector<Name> v;
    for (auto x : xs) v.push_back(isReservedSpelling(x) ? traceName(std::stoi(x + 1), x[0] == 'p' ? NClass::Cont : NClass::Server) : resolveName(d, x));
    return mkSet(v);
}
}

TEST_CASE("questions and answers") {
    Trace t = tr({"a?<>(b1,p1)", "p1!<>(b2)", "s!<>(b3)"});
    CHECK(isQuestion(t[0]));
    CHECK_FALSE(isAnswer(t[0]));
    CHECK(isAnswer(t[1]));
    CHECK(isAnswer(t[2]));
}

TEST_CASE("justification pairs a binder with a use of the opposite polarity") {
    Trace t = tr({"a?<>(b1,p1)", "b1!<>(b2,p2)", "b1?<>(b3,p3)"});
    CHECK(justifies(t[0], t[1]));
    CHECK_FALSE(justifies(t[0], t[2]));
    CHECK_FALSE(justifies(t[1], t[0]));
    CHECK(justifierOf(t, 1) == 0);
    CHECK(justifierOf(t, 0) == -1);
    CHECK(justifierOf(t, 2) == -1);
}

TEST_CASE("views") {
    NameSet start = names({"a"});
    Trace good = tr({"a?<>(b1,p1)", "b1!<>(b2,p2)", "b2?<>(b3,p3)"});
    CHECK(respectsViews(start, good));
    CHECK(viewViolation(start, good) == -1);
    Trace bad = tr({"a?<>(b1,p1)", "c!<>(b2,p2)"});
    CHECK_FALSE(respectsViews(start, bad));
    CHECK(viewViolation(start, bad) == 1);
    CHECK(respectsViews(names({"a", "c"}), bad));
    NameSet v = view(start, tr({"a?<>(b1,p1)"}));
    CHECK(setHas(v, names({"b1"})[0]));
}

TEST_CASE("well-bracketing") {
    CHECK(wellBracketed({}));
    CHECK(wellBracketed(tr({"a?<>(b1,p1)", "a?<>(b2,p2)", "p2!<>(b3)", "p1!<>(b4)"})));
    Trace crossed = tr({"a?<>(b1,p1)", "a?<>(b2,p2)", "p1!<>(b3)"});
    CHECK_FALSE(wellBracketed(crossed));
    CHECK(bracketViolation(crossed) == std::pair<int, int>{1, 2});
    CHECK(wellBracketed(tr({"a?<>(b1,p1)", "b1!<>(b2,p2)", "p2?<>(b3)", "p1!<>(b4)"})));
    CHECK_FALSE(wellBracketed(tr({"a?<>(b1,p1)", "b1!<>(b2,p2)", "p1!<>(b3)"})));
}

TEST_CASE("first-order actions do not reset the view") {
    // a call on d, a memory read, a nested call, then the answer to the first call
    Trace t = tr({"d?<0>(b1)", "h?<0>", "d!<>(b3)", "b3?<0>(b4)", "b1!<>(b5)"});
    NameSet start = names({"a", "c", "d"});
    CHECK(setHas(view(start, Trace(t.begin(), t.begin() + 4)), names({"b1"})[0]));
    CHECK(respectsViews(start, t));
    Trace noRead = tr({"d?<0>(b1)", "d!<>(b3)", "b3?<0>(b4)", "b1!<>(b5)"});
    CHECK(view(start, Trace(t.begin(), t.begin() + 4)) == view(start, Trace(noRead.begin(), noRead.begin() + 3)));
}
