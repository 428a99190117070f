#include <doctest.h>

#include "helpers.hpp"

using namespace vispi;

namespace {
const char* H = "mode seq;\nho a, c, d, e;\nfo h;\nsucc w;";
}

TEST_CASE("printing and reparsing gives the same term") {
    for (const char* t : {"a!(1)(c).c?(d).0", "!a?(x,b).h!(x+1).0 | c!()(e).0", "new d (d?().0 | a!()(b).d!()(e).0)",
                          "if 1 = 2 then w.0 else h?(y).0", "a?().0 + c?().0"}) {
        ProcP p = th::term(H, t);
        ProcP q = th::term(H, show(p));
        CHECK(show(q) == show(p));
    }
}

TEST_CASE("sum binds weaker than parallel") {
    ProcP p = th::term(H, "a!().0 | c!().0 + d!().0");
    REQUIRE(p->k == PK::Sum);
    CHECK(p->kids[0]->k == PK::Par);
}

TEST_CASE("binders of an output are not free") {
    ProcP p = th::term(H, "new d (a!(1)(c).c?(e).d!()(f).0)");
    std::set<Name> fn = freeNames(p);
    CHECK(fn == std::set<Name>{intern("a", NClass::Server)});
}

TEST_CASE("canonical keys identify structurally congruent terms") {
    CHECK(canonKey(th::term(H, "a!().0 | 0")) == canonKey(th::term(H, "a!().0")));
    CHECK(canonKey(th::term(H, "new d d?().0 | a!().0")) == canonKey(th::term(H, "a!().0 | new e e?().0")));
    CHECK(canonKey(th::term(H, "new d (a!().0)")) == canonKey(th::term(H, "a!().0")));
    CHECK(canonKey(th::term(H, "a?(x,b).b!(x).0")) == canonKey(th::term(H, "a?(y,e).e!(y).0")));
    CHECK(canonKey(th::term(H, "a!().0")) != canonKey(th::term(H, "c!().0")));
    CHECK(canonKey(th::term(H, "h!(1).0")) != canonKey(th::term(H, "h!(2).0")));
}

TEST_CASE("nested restrictions that cannot move terminate") {
    ProcP p = th::term(H, "new d new e (d?().e!().0 | e?().d!().0)");
    CHECK(canonKey(p) == canonKey(th::term(H, "new e new d (d?().e!().0 | e?().d!().0)")));
}

TEST_CASE("every one-step congruence rewrite keeps the canonical key") {
    ProcP p = th::term(H, "new d (d?().0 | a!()(b).d!()(e).0) | 0 | (h!(1).0 + 0)");
    auto rewrites = structCongruentStep(p);
    CHECK(!rewrites.empty());
    for (auto& q : rewrites) CHECK(canonKey(q) == canonKey(p));
}

TEST_CASE("substitution replaces the variable in expressions") {
    ProcP p = th::term(H, "h?(x).h!(x+1).0");
    ProcP body = subst(p->cont(), p->x, Value::integer(2));
    REQUIRE(body->k == PK::Out);
    CHECK(evalExpr(body->e) == Value::integer(3));
    CHECK(freeVars(body).empty());
}

TEST_CASE("malformed input is rejected with a position") {
    CHECK_THROWS_AS(th::term(H, "q!().0"), Error);
    CHECK_THROWS_AS(th::term(H, "h!(x).0"), Error);
    CHECK_THROWS_AS(parseFile("mode seq;\ncon p;\nproc P = 0;"), Error);
    CHECK_THROWS_AS(th::term(H, "a!().0 |"), Error);
    try {
        th::term(H, "a!().(0 | q!())");
        FAIL("accepted an undeclared name");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("at ") != std::string::npos);
    }
}

TEST_CASE("trace names are reserved") {
    CHECK(isReservedSpelling("b1"));
    CHECK(isReservedSpelling("p12"));
    CHECK_FALSE(isReservedSpelling("b"));
    CHECK_FALSE(isReservedSpelling("a1"));
    CHECK(str(traceName(3, NClass::Server)) == "b3");
    CHECK(str(traceName(3, NClass::Cont)) == "p3");
}

TEST_CASE("declaration header round-trips a printed process") {
    ProcP p = th::term("mode wb;\nho a;\ncon s;\nfo h;", "a?(x,b,p).new h (h!(x) | h?(y).p!(y)(e).0) | s!()(f).0");
    std::string text = declHeader(Mode::WB, {p}) + "proc P = " + show(p) + ";";
    CHECK(show(parseFile(text).get("P")) == show(p));
}

TEST_CASE("expressions evaluate over integers and booleans") {
    ProcP p = th::term(H, "if 2 + 3 = 5 then a!().0 else c!().0");
    CHECK(evalExpr(p->e) == evalExpr(p->f));
}
