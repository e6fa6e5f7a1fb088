#include <doctest.h>

#include <random>

#include "gen.hpp"
#include "reference.hpp"
#include "wandkit/oracle.hpp"
#include "wandkit/parse.hpp"
#include "wandkit/semantics.hpp"

using namespace wandkit;
using namespace wandkit::testkit;

namespace {

// Universe of the two-case wand.
Universe u_b() {
    return parse_universe("universe v1\ngranularity 2\nrefs x y z\nfield f : Ref {y, z}\nfield g : Int {0}\n"
                          "loc x.f\nloc y.g\nloc z.g\n");
}

std::optional<Value> ev(const std::string& e, const State& s, const Universe& u, const Store& st = {}) {
    return eval(parse_expr(e), EvalContext{u, st, s});
}

bool holds(const std::string& a, const std::string& s, const Universe& u) {
    return sat(parse_state(s, u), parse_assertion(a), u, Store{});
}

} // namespace

TEST_CASE("expression evaluation") {
    const Universe u = u_b();
    const Store st{{"x", Value{*u.find_ref("x")}}};
    const State h = parse_state("{x.f@0=y}", u);
    CHECK(*ev("x.f", h, u, st) == Value{*u.find_ref("y")});
    CHECK_FALSE(ev("x.f.g", h, u, st));
    const State hy = parse_state("{x.f@0=y, y.g@0=0, z.g@0=0}", u);
    CHECK(*ev("x.f == y ? y.g : z.g", hy, u) == Value{std::int64_t{0}});
    CHECK(*ev("x.f == y ? true : false", hy, u) == Value{true});
    CHECK(*ev("x.f == z ? true : false", hy, u) == Value{false});
    CHECK_THROWS_AS(ev("perm(x.f) == write", hy, u), EvalError);
    const State full = parse_state("{x.f@1/2=y}", u);
    CHECK(*eval(parse_expr("perm(x.f)"), EvalContext{u, st, full, false, true}) == Value{Perm(1, 2)});
}

TEST_CASE("satisfaction") {
    const Universe u2 = corpus_universe("u2.universe");
    CHECK(holds("acc(x.f)", "{x.f@1=y}", u2));
    CHECK(holds("x.b ==> acc(x.f)", "{x.b@1=false}", u2));
    CHECK_FALSE(holds("x.b ==> acc(x.f)", "{x.b@1=true}", u2));
    CHECK(holds("acc(x.f, 1/2) * acc(x.f, 1/2)", "{x.f@1=y}", u2));
    CHECK_FALSE(holds("acc(x.f) * acc(x.f)", "{x.f@1=y}", u2));
    CHECK(holds("acc(y.g) || acc(z.g)", "{z.g@1=0}", u2));
    // The footprint {x.f@1} makes the left-hand side impossible.
    Oracle o(u2);
    CHECK(o.holds(parse_state("{x.f@1=y}", u2), parse_assertion("acc(x.f, 1/2) --* acc(x.g)")));
    CHECK_FALSE(o.holds(parse_state("{x.f@1/2=y}", u2), parse_assertion("acc(x.f, 1/2) --* acc(x.g)")));
}

TEST_CASE("demands") {
    const Universe u = u_b();
    const Store st;
    const State heap = parse_state("{x.f@0=y, y.g@0=0, z.g@0=0}", u);
    auto d1 = demands(parse_assertion("acc(x.f) * acc(x.f.g)"), u, st, heap);
    REQUIRE(d1.size() == 1);
    CHECK(d1[0] == parse_state("{x.f@1=y, y.g@1=0}", u));
    auto d2 = demands(parse_assertion("x.f == y || x.f == z"), u, st, heap);
    REQUIRE(d2.size() == 1);
    CHECK(d2[0].mask_empty());
    auto d3 = demands(parse_assertion("acc(y.g) || acc(z.g)"), u, st, heap);
    REQUIRE(d3.size() == 2);
    CHECK(d3[0] == parse_state("{y.g@1=0}", u));
    CHECK(d3[1] == parse_state("{z.g@1=0}", u));
    CHECK(demands(parse_assertion("x.f == z"), u, st, heap).empty());
}

TEST_CASE("well-formedness") {
    CHECK(wf(parse_assertion("acc(x.f) * x.f == y")));
    CHECK_FALSE(wf(parse_assertion("x.f == y")));
    CHECK(wf(parse_assertion("acc(x.f) * acc(x.f.g)")));
    CHECK_FALSE(wf(parse_assertion("acc(x.f.g) * acc(x.f)")));
    CHECK(wf(parse_assertion("acc(x.f) * (x.f == y || x.f == z) --* acc(x.f) * acc(x.f.g)")));
    CHECK_FALSE(wf(parse_assertion("acc(x.f) --* x.f == y")));
    std::string why;
    CHECK_FALSE(wf(parse_assertion("acc(x.f) --* acc(x.f) * perm(x.f) == write"), &why));
    CHECK_FALSE(why.empty());
}

TEST_CASE("guards are monotonically pure") {
    const Universe u = corpus_universe("u2.universe");
    Oracle o(u);
    CHECK(o.check_mono_pure(parse_expr("x.b")).holds);
    CHECK(o.check_mono_pure(parse_expr("x.b"), true).holds);
}

TEST_CASE("assertion text round trip") {
    Rng rng(11);
    for (int i = 0; i < 200; ++i) {
        const Universe u = random_universe(rng);
        const Assertion w = random_wand(rng, u, AssertionShape{3, true, true, true}, coin(rng) ? WandKind::Combinable : WandKind::Standard);
        const std::string text = to_string(w);
        INFO(text);
        CHECK(to_string(parse_assertion(text)) == text);
    }
    CHECK_THROWS_AS(parse_assertion("acc(x.f"), ParseError);
    CHECK_THROWS_AS(parse_assertion("acc(x.f) ==> acc(x.g)"), ParseError);
}

TEST_CASE("demands agree with satisfaction") {
    Rng rng(3);
    for (int i = 0; i < 40; ++i) {
        const Universe u = random_universe(rng);
        const Assertion a = random_assertion(rng, u);
        INFO(to_string(a));
        const auto states = all_states(u);
        for (const auto& s : states) {
            bool via_demands = false;
            for (const auto& d : demands(a, u, Store{}, s)) via_demands = via_demands || geq(s, d);
            CHECK(sat(s, a, u, Store{}) == via_demands);
        }
    }
}

TEST_CASE("assertions are intuitionistic") {
    Rng rng(5);
    for (int i = 0; i < 25; ++i) {
        const Universe u = random_universe(rng, 2);
        const Assertion a = random_assertion(rng, u);
        INFO(to_string(a));
        const auto states = all_states(u);
        for (const auto& s : states) {
            if (!sat(s, a, u, Store{})) continue;
            for (const auto& t : states) {
                if (geq(t, s)) CHECK(sat(t, a, u, Store{}));
            }
        }
    }
}

TEST_CASE("star matches the split definition") {
    Rng rng(9);
    for (int i = 0; i < 20; ++i) {
        const Universe u = random_universe(rng, 2);
        AssertionShape shape;
        shape.depth = 1;
        const Assertion a = random_assertion(rng, u, shape);
        const Assertion b = random_assertion(rng, u, shape);
        INFO(to_string(a) << " * " << to_string(b));
        const auto states = all_states(u);
        for (const auto& s : states) {
            const bool direct = sat(s, Assertion::star(a, b), u, Store{});
            CHECK(direct == sat(s, Assertion::star(b, a), u, Store{}));
            CHECK(direct == sat_star_by_splits(s, a, b, u, states));
        }
    }
}
