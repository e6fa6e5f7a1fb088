#include <doctest.h>

#include "reference.hpp"
#include "wandkit/parse.hpp"
#include "wandkit/package_logic.hpp"

using namespace wandkit;
using namespace wandkit::testkit;

namespace {

Universe u_b() {
    return parse_universe("universe v1\ngranularity 2\nrefs x y z\nfield f : Ref {y, z}\nfield g : Int {0}\n"
                          "loc x.f\nloc y.g\nloc z.g\n");
}

const char* kWandB = "acc(x.f) * (x.f == y || x.f == z) --* acc(x.f) * acc(x.f.g)";

Derivation parse_tree(const std::string& text, const Universe& u) {
    TokenStream ts(tokenize(text));
    Derivation d = parse_derivation(ts, u);
    REQUIRE(ts.at_end());
    return d;
}

// Atom for acc(x.f) from the left-hand side, then Extract of both g fields and
// Atom for acc(x.f.g).
const char* kTreeB = R"((star
  (atom
    ({x.f@1=y} {} {x.f@1=y})
    ({x.f@1=z} {} {x.f@1=z}))
  (extract {y.g@1=0, z.g@1=0}
    (atom
      ({x.f@0=y, y.g@1=0, z.g@1=0} {x.f@1=y} {x.f@0=y, y.g@1=0})
      ({x.f@0=z, y.g@1=0, z.g@1=0} {x.f@1=z} {x.f@0=z, z.g@1=0})))))";

struct Fixture {
    Universe u = u_b();
    Store st;
    Assertion wand = parse_assertion(kWandB);
    State outer = parse_state("{x.f@1=y, y.g@1=0, z.g@1=0}", u);

    Context ctx() const { return Context{outer, init_witness_set(wand->left, u, st, true), State{}}; }
};

} // namespace

TEST_CASE("initial witness sets") {
    Fixture f;
    const WitnessSet s = init_witness_set(f.wand->left, f.u, f.st, true);
    REQUIRE(s.size() == 2);
    CHECK(s[0].a == parse_state("{x.f@1=y}", f.u));
    CHECK(s[1].a == parse_state("{x.f@1=z}", f.u));
    CHECK(s[0].b.is_unit());
    CHECK(init_witness_set(parse_assertion("false"), f.u, f.st, true).empty());
    const Universe u2 = corpus_universe("u2.universe");
    const WitnessSet half = init_witness_set(parse_assertion("acc(x.b, 1/2)"), u2, f.st, true);
    REQUIRE(half.size() == 2);
    CHECK(half[0].a == parse_state("{x.b@1/2=false}", u2));
    CHECK(half[1].a == parse_state("{x.b@1/2=true}", u2));
    // The non-minimal set holds every stable state above them.
    CHECK(init_witness_set(f.wand->left, f.u, f.st, false).size() > 2);
}

TEST_CASE("the worked derivation for the two-case wand") {
    Fixture f;
    const Derivation d = parse_tree(kTreeB, f.u);
    CheckEnv env{f.u, f.st, false};
    const CheckResult r = check_derivation(f.wand->right, PathCondition{}, f.ctx(), d, env);
    INFO(r.error << " at " << r.path);
    REQUIRE(r.ok);
    CHECK(*extract_footprint(f.outer, r.context.outer) == parse_state("{y.g@1=0, z.g@1=0}", f.u));
    // Round trip through the printer.
    CHECK(print_derivation(parse_tree(print_derivation(d, f.u), f.u), f.u) == print_derivation(d, f.u));
}

TEST_CASE("rejections name the failing premise") {
    Fixture f;
    CheckEnv env{f.u, f.st, false};
    std::string bad_choice = kTreeB;
    bad_choice.replace(bad_choice.find("{x.f@1=y} {} {x.f@1=y}"), 22, "{x.f@1=y} {} {x.f@1=z}");
    CheckResult r = check_derivation(f.wand->right, PathCondition{}, f.ctx(), parse_tree(bad_choice, f.u), env);
    CHECK_FALSE(r.ok);
    CHECK(r.path == "star.1/atom");

    const Derivation unstable = Derivation::extract(parse_state("{y.g@0=0}", f.u), Derivation::atom({}));
    r = check_derivation(parse_assertion("true"), PathCondition{}, f.ctx(), unstable, env);
    CHECK_FALSE(r.ok);
    CHECK(r.path == "extract");

    const Derivation too_much = Derivation::extract(parse_state("{y.g@1=0}", f.u), Derivation::atom({}));
    Context small = f.ctx();
    small.outer = parse_state("{x.f@1=y}", f.u);
    CHECK_FALSE(check_derivation(parse_assertion("true"), PathCondition{}, small, too_much, env).ok);

    // An atom missing a pair that satisfies the path condition.
    const Derivation partial = parse_tree("(atom ({x.f@1=y} {} {x.f@1=y}))", f.u);
    CHECK_FALSE(check_derivation(parse_assertion("acc(x.f)"), PathCondition{}, f.ctx(), partial, env).ok);
}

TEST_CASE("extract drops exactly the incompatible pairs") {
    const Universe u = corpus_universe("u2.universe");
    const Store st;
    const Assertion lhs = parse_assertion("acc(x.b, 1/2)");
    for (const auto& w : stable_states(u)) {
        Context ctx{w, init_witness_set(lhs, u, st, true), State{}};
        auto next = apply_extract(ctx, w, false);
        REQUIRE(next);
        std::size_t kept = 0;
        for (const auto& p : ctx.witnesses) kept += compatible(*add(p.a, p.b), w) ? 1 : 0;
        CHECK(next->witnesses.size() == kept);
        CHECK(next->outer == core(w));
    }
}

TEST_CASE("implication rule with a false guard needs no atom choices") {
    const Universe u = corpus_universe("u2.universe");
    const Store st;
    const Assertion w = parse_assertion("acc(x.b, 1/2) --* acc(x.b, 1/2) * (x.b ==> acc(x.f))");
    Context ctx{parse_state("{x.f@1=y, x.b@1=false}", u), init_witness_set(w->left, u, st, true), State{}};
    const Derivation d = parse_tree(R"((extract {x.b@1/2=false}
      (star (atom ({x.b@1=false} {} {x.b@1/2=false})) (implication (atom)))))",
                                     u);
    const CheckResult r = check_derivation(w->right, PathCondition{}, ctx, d, CheckEnv{u, st, false});
    INFO(r.error << " at " << r.path);
    REQUIRE(r.ok);
    CHECK(*extract_footprint(ctx.outer, r.context.outer) == parse_state("{x.b@1/2=false}", u));
}

TEST_CASE("disjunction rule") {
    const Universe u = u_b();
    const Store st;
    const Assertion w = parse_assertion("acc(y.g) || acc(z.g) --* acc(y.g) || acc(z.g)");
    Context ctx{State{}, init_witness_set(w->left, u, st, true), State{}};
    REQUIRE(ctx.witnesses.size() == 2);
    const Derivation d = parse_tree(R"((disjunction (left ({y.g@1=0} {}))
      (atom ({y.g@1=0} {} {y.g@1=0}))
      (atom ({z.g@1=0} {} {z.g@1=0}))))",
                                     u);
    CheckEnv env{u, st, false};
    CheckResult r = check_derivation(w->right, PathCondition{}, ctx, d, env);
    INFO(r.error << " at " << r.path);
    CHECK(r.ok);
    // Sending the z pair left cannot be justified by acc(y.g).
    const Derivation wrong = parse_tree(R"((disjunction (left ({z.g@1=0} {}))
      (atom ({z.g@1=0} {} {z.g@1=0}))
      (atom ({y.g@1=0} {} {y.g@1=0}))))",
                                        u);
    CHECK_FALSE(check_derivation(w->right, PathCondition{}, ctx, wrong, env).ok);
}

TEST_CASE("lifted checking") {
    Fixture f;
    const Derivation d = parse_tree(kTreeB, f.u);
    Context ctx = f.ctx();
    const CheckResult plain = check_derivation(f.wand->right, PathCondition{}, ctx, d, CheckEnv{f.u, f.st, false});
    const CheckResult lifted = check_derivation(f.wand->right, PathCondition{}, ctx, d, CheckEnv{f.u, f.st, true});
    REQUIRE(plain.ok);
    REQUIRE(lifted.ok);
    CHECK(plain.context.outer == lifted.context.outer);
    CHECK(plain.context.witnesses == lifted.context.witnesses);

    // A combinable anchor of half x.f receives only half of an extracted full x.f.
    const Universe u = corpus_universe("u2.universe");
    WitnessPair p;
    p.a = parse_state("{x.f@1/2=y}", u);
    p.t.kind = TransformerKind::CombinableR;
    p.t.anchor = p.a;
    Context c{parse_state("{x.f@1/2=y, x.g@1=0}", u), {p}, State{}};
    auto next = apply_extract(c, parse_state("{x.f@1/2=y, x.g@1=0}", u), true);
    REQUIRE(next);
    REQUIRE(next->witnesses.size() == 1);
    CHECK(next->witnesses[0].a == parse_state("{x.f@1=y, x.g@1=0}", u));
    CHECK(next->extracted == parse_state("{x.f@1/2=y, x.g@1=0}", u));
}

TEST_CASE("the R transformer is monotone") {
    const Universe u = parse_universe("universe v1\ngranularity 2\nrefs x\nfield f : Int {0}\nfield g : Int {0}\n"
                                      "loc x.f\nloc x.g\n");
    const auto states = all_states(u);
    for (const auto& anchor : stable_states(u)) {
        Transformer t{TransformerKind::CombinableR, anchor};
        for (const auto& s1 : states) {
            for (const auto& s2 : states) {
                if (geq(s2, s1)) CHECK(geq(t(s2), t(s1)));
            }
        }
    }
}

TEST_CASE("footprint extraction") {
    const Universe u = u_b();
    const State s = parse_state("{x.f@1=y, y.g@1=0, z.g@1=0}", u);
    CHECK(extract_footprint(s, s)->is_unit());
    CHECK(*extract_footprint(s, parse_state("{x.f@1=y, y.g@0=0, z.g@0=0}", u)) ==
          parse_state("{y.g@1=0, z.g@1=0}", u));
    const auto states = all_states(u);
    for (const auto& a : states) {
        for (const auto& b : states) {
            if (!geq(a, b)) continue;
            const State fp = *extract_footprint(a, b);
            CHECK(is_stable(fp));
            if (is_stable(a)) CHECK(*add(b, fp) == a);
        }
    }
    CHECK_FALSE(extract_footprint(parse_state("{y.g@1/2=0}", u), s));
}

TEST_CASE("canonical derivations") {
    Fixture f;
    CheckEnv env{f.u, f.st, false};
    const State w = parse_state("{y.g@1=0, z.g@1=0}", f.u);
    auto d = canonical_derivation(f.wand->right, f.ctx(), w, env);
    REQUIRE(d);
    CHECK(d->rule == Rule::Extract);
    const CheckResult r = check_derivation(f.wand->right, PathCondition{}, f.ctx(), *d, env);
    REQUIRE(r.ok);
    CHECK(*extract_footprint(f.outer, r.context.outer) == w);
    CHECK_FALSE(canonical_derivation(f.wand->right, f.ctx(), parse_state("{y.g@1=0}", f.u), env));
}
