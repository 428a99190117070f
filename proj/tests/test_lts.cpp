#include <doctest.h>

#include "helpers.hpp"

using namespace vispi;

namespace {
const char* H = "mode seq;\nho a, c, d;\nfo h;\nsucc w;";
}

TEST_CASE("bound output is labelled with the next trace name") {
    auto steps = strongSteps(th::term(H, "a!(1)(c).0"), th::vals012());
    REQUIRE(steps.size() == 1);
    CHECK(showAction(steps[0].act) == "a!<1>(b1)");
}

TEST_CASE("trace names avoid those already free") {
    ProcP p = th::term("mode seq;\nho a;", "a!()(c).c?(e).0");
    auto s1 = strongSteps(p, th::vals012());
    REQUIRE(s1.size() == 1);
    CHECK(nextTraceIndex(s1[0].proc) == 2);
    auto s2 = strongSteps(s1[0].proc, th::vals012());
    REQUIRE(s2.size() == 1);
    CHECK(showAction(s2[0].act) == "b1?<>(b2)");
}

TEST_CASE("first-order input is instantiated over the value set") {
    auto steps = strongSteps(th::term(H, "h?(x).h!(x).0"), th::vals012());
    CHECK(th::actions(steps) == std::set<std::string>{"h?<0>", "h?<1>", "h?<2>"});
    for (auto& s : steps) {
        auto next = strongSteps(s.proc, th::vals012());
        REQUIRE(next.size() == 1);
        CHECK(showAction(next[0].act) == "h!<" + std::to_string(s.act.v.n) + ">");
    }
}

TEST_CASE("communication is internal and carries the value") {
    ProcP p = th::term(H, "h!(1) | h?(x).a!(x)(c).0");
    auto taus = tauSteps(p);
    REQUIRE(taus.size() == 1);
    CHECK(th::actions(strongSteps(taus[0], th::vals012())) == std::set<std::string>{"a!<1>(b1)"});
}

TEST_CASE("a value outside the instantiation set still flows through communication") {
    ProcP p = th::term(H, "h!(7) | h?(x).a!(x)(c).0");
    auto taus = tauSteps(p);
    REQUIRE(taus.size() == 1);
    CHECK(th::actions(strongSteps(taus[0], th::vals012())) == std::set<std::string>{"a!<7>(b1)"});
}

TEST_CASE("replicated input stays available") {
    auto s1 = strongSteps(th::term(H, "!a?().c!().0"), th::vals012());
    REQUIRE(s1.size() == 1);
    CHECK(th::actions(strongSteps(s1[0].proc, th::vals012())) == std::set<std::string>{"a?<>(b1)", "c!<>(b1)"});
}

TEST_CASE("restriction hides its name") {
    CHECK(strongSteps(th::term(H, "new d d!().0"), th::vals012()).empty());
    CHECK(strongSteps(th::term(H, "new h h!(1).0"), th::vals012()).empty());
}

TEST_CASE("higher-order communication creates private names") {
    ProcP p = th::term(H, "a!()(c).c?().0 | a?(_,e).e!().0");
    Closure c = tauClosure(p, 10);
    CHECK_FALSE(c.truncated);
    CHECK(c.states.size() == 3);
    // the received name stays private, so once both exchanges are done nothing is left
    int inert = 0;
    for (auto& s : c.states) inert += strongSteps(s, th::vals012()).empty();
    CHECK(inert == 1);
}

TEST_CASE("conditional chooses a branch") {
    CHECK(th::actions(strongSteps(th::term(H, "if 1 = 1 then a!().0 else c!().0"), th::vals012())) ==
          std::set<std::string>{"a!<>(b1)"});
    CHECK(th::actions(strongSteps(th::term(H, "if 1 = 2 then a!().0 else c!().0"), th::vals012())) ==
          std::set<std::string>{"c!<>(b1)"});
}

TEST_CASE("weak steps absorb internal moves") {
    ProcP p = th::term(H, "h!(1) | h?(x).a!(x)(c).0");
    Action mu = parseAction("a!<1>(b1)", th::decls(H));
    WeakResult r = weakSteps(p, mu, th::vals012(), 8);
    CHECK_FALSE(r.states.empty());
    CHECK(weakSteps(p, parseAction("a!<2>(b1)", th::decls(H)), th::vals012(), 8).states.empty());
}

TEST_CASE("barbs") {
    CHECK(barb(th::term(H, "w.0"), kNone, 4) == Barb::Yes);
    CHECK(barb(th::term(H, "h?().w.0"), kNone, 4) == Barb::No);
    CHECK(barb(th::term(H, "h!() | h?().w.0"), kNone, 4) == Barb::Yes);
    CHECK(barb(th::term(H, "h!() | h?().w.0"), kNone, 0) == Barb::Unknown);
    CHECK(barb(th::term(H, "new h (h!() | h?().w.0)"), intern("w", NClass::Succ), 4) == Barb::Yes);
}

TEST_CASE("action syntax round-trips") {
    Decls d = th::decls("mode wb;\nho a;\ncon q;\nfo h;");
    for (const char* s : {"a?<>(b1,p1)", "p1!<2>(b3)", "h!<0>", "tau", "q?<true>(b2)"})
        CHECK(showAction(parseAction(s, d)) == s);
    CHECK_THROWS_AS(parseAction("zz!<>(b1)", d), Error);
}
