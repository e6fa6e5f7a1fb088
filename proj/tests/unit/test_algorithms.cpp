#include <doctest.h>

#include "reference.hpp"
#include "wandkit/algorithms.hpp"
#include "wandkit/oracle.hpp"
#include "wandkit/parse.hpp"

using namespace wandkit;
using namespace wandkit::testkit;

namespace {

Universe u_b() {
    return parse_universe("universe v1\ngranularity 2\nrefs x y z\nfield f : Ref {y, z}\nfield g : Int {0}\n"
                          "loc x.f\nloc y.g\nloc z.g\n");
}

const char* kWandB = "acc(x.f) * (x.f == y || x.f == z) --* acc(x.f) * acc(x.f.g)";
const char* kWand31 = "acc(x.b, 1/2) --* acc(x.b, 1/2) * (x.b ==> acc(x.f))";

ScriptStmt script_stmt(ScriptKind k, const std::string& a) {
    ScriptStmt s;
    s.kind = k;
    s.assertion = parse_assertion(a);
    return s;
}

bool checker_accepts(const PackageOutcome& o, const Assertion& wand, const Universe& u, bool lifted) {
    const Store st;
    if (!o.derivation) return false;
    const CheckResult r =
        check_derivation(wand->right, PathCondition{}, o.derivation_context, *o.derivation, CheckEnv{u, st, lifted});
    return r.ok;
}

} // namespace

TEST_CASE("minimal left-hand-side states") {
    const Universe u = u_b();
    const Store st;
    AlgoEnv env{u, st};
    const auto t0 = empty_total_states(u);
    for (const auto& s : t0) CHECK(s.mask_empty());
    const auto cases = lhs_cases(parse_assertion("acc(x.f) * (x.f == y || x.f == z)"), env);
    REQUIRE(cases.size() == 2);
    CHECK(cases[0] == parse_state("{x.f@1=y}", u));
    CHECK(cases[1] == parse_state("{x.f@1=z}", u));

    const auto filtered = cons_lhs(t0, PathCondition{}, parse_assertion("x.f == y"), env);
    CHECK(filtered.size() == t0.size() / 2);
    for (const auto& s : filtered) {
        CHECK(s.mask_empty());
        CHECK(*s.value(*u.find_loc(*u.find_ref("x"), "f")) == Value{*u.find_ref("y")});
    }

    const Universe u2 = corpus_universe("u2.universe");
    AlgoEnv env2{u2, st};
    const auto half = lhs_cases(parse_assertion("acc(x.b, 1/2)"), env2);
    REQUIRE(half.size() == 2);
    CHECK(half[0].perm(*u2.find_loc(*u2.find_ref("x"), "b")) == Perm(1, 2));
}

TEST_CASE("sound packaging") {
    const Universe u = u_b();
    const Store st;
    AlgoEnv env{u, st};
    const Assertion w = parse_assertion(kWandB);
    const State outer = parse_state("{x.f@1=y, y.g@1=0, z.g@1=0}", u);
    const PackageOutcome o = package_sound(outer, w, {}, env);
    REQUIRE(o.ok);
    CHECK(o.footprint == parse_state("{y.g@1=0, z.g@1=0}", u));
    CHECK(checker_accepts(o, w, u, false));
    Oracle oracle(u);
    CHECK(oracle.is_footprint(o.footprint, w));
    REQUIRE(o.post_states.size() == 1);

    const Assertion id = parse_assertion("acc(x.f) --* acc(x.f)");
    const PackageOutcome trivial = package_sound(outer, id, {}, env);
    REQUIRE(trivial.ok);
    CHECK(trivial.footprint.is_unit());
    CHECK(trivial.derivation->rule != Rule::Extract);

    const PackageOutcome missing = package_sound(parse_state("{x.f@1=y}", u), parse_assertion("true --* acc(y.g)"), {}, env);
    CHECK_FALSE(missing.ok);
    CHECK(missing.diagnostic.find("y.g") != std::string::npos);
}

TEST_CASE("the default strategy for the two-footprint wand") {
    const Universe u = corpus_universe("u2.universe");
    const Store st;
    AlgoEnv env{u, st};
    const Assertion w = parse_assertion(kWand31);
    const PackageOutcome o = package_sound(parse_state("{x.f@1=y, x.b@1=false}", u), w, {}, env);
    REQUIRE(o.ok);
    CHECK(o.footprint == parse_state("{x.f@1=y}", u));
    CHECK(Oracle(u).is_footprint(o.footprint, w));
}

TEST_CASE("combinable packaging") {
    const Universe u = corpus_universe("u2.universe");
    const Store st;
    AlgoEnv env{u, st};
    const PackageOutcome same =
        package_combinable(parse_state("{x.f@1=y}", u), parse_assertion("acc(x.f, 1/2) --*c acc(x.f, 1/2)"), {}, env);
    REQUIRE(same.ok);
    CHECK(same.footprint.is_unit());
    const Assertion w = parse_assertion("acc(x.f, 1/2) --*c acc(x.g)");
    CHECK_FALSE(package_combinable(parse_state("{x.f@1=y}", u), w, {}, env).ok);
    const PackageOutcome g = package_combinable(parse_state("{x.g@1=0}", u), w, {}, env);
    REQUIRE(g.ok);
    CHECK(g.footprint == parse_state("{x.g@1=0}", u));
    CHECK(checker_accepts(g, w, u, true));
    CHECK(Oracle(u).is_footprint(g.footprint, w, WandKind::Combinable));
    // The standard algorithm takes the footprint that rules out the left-hand side.
    const PackageOutcome s = package_sound(parse_state("{x.f@1=y}", u), w, {}, env);
    REQUIRE(s.ok);
    CHECK(s.footprint == parse_state("{x.f@1=y}", u));
}

TEST_CASE("per-case packaging") {
    const Universe u = u_b();
    const Store st;
    AlgoEnv env{u, st};
    const State outer = parse_state("{x.f@1=y, y.g@1=0, z.g@1=0}", u);
    const PackageOutcome o = package_fia(outer, parse_assertion(kWandB), {}, env);
    REQUIRE(o.ok);
    REQUIRE(o.case_footprints.size() == 2);
    CHECK(o.case_footprints[0].second == parse_state("{y.g@1=0}", u));
    CHECK(o.case_footprints[1].second == parse_state("{z.g@1=0}", u));
    CHECK(o.post_states.size() == 2);
    CHECK_FALSE(o.derivation);
    Oracle oracle(u);
    for (const auto& [c, fp] : o.case_footprints) CHECK_FALSE(oracle.is_footprint(fp, parse_assertion(kWandB)));

    const PackageOutcome id = package_fia(outer, parse_assertion("acc(x.f) --* acc(x.f)"), {}, env);
    REQUIRE(id.ok);
    REQUIRE(id.case_footprints.size() == 2);
    for (const auto& [c, fp] : id.case_footprints) CHECK(fp.is_unit());

    // One left-hand-side case: FIA and the sound algorithm agree.
    const Assertion single = parse_assertion("acc(y.g) --* acc(y.g) * acc(z.g)");
    const PackageOutcome a = package_fia(outer, single, {}, env);
    const PackageOutcome b = package_sound(outer, single, {}, env);
    REQUIRE(a.ok);
    REQUIRE(b.ok);
    REQUIRE(a.case_footprints.size() == 1);
    CHECK(a.case_footprints[0].second == b.footprint);
}

TEST_CASE("proof scripts") {
    const Universe u = u_b();
    const Store st;
    AlgoEnv env{u, st};
    const Assertion w = parse_assertion(kWandB);
    const State outer = parse_state("{x.f@1=y, y.g@1=0, z.g@1=0}", u);
    Context ctx{outer, with_transformers(lhs_cases(w->left, env), false), State{}};
    const ScriptResult none = run_script(ctx, {}, Algorithm::Sound, env);
    REQUIRE(none.ok);
    CHECK(none.context.outer == ctx.outer);
    CHECK(none.context.witnesses == ctx.witnesses);

    const ProofScript script{script_stmt(ScriptKind::Assert, "x.f == y ? acc(y.g) : acc(z.g)")};
    const PackageOutcome o = package_sound(outer, w, script, env);
    REQUIRE(o.ok);
    CHECK(o.footprint == parse_state("{y.g@1=0, z.g@1=0}", u));
    CHECK(checker_accepts(o, w, u, false));

    const Universe up = parse_universe("universe v1\nrefs x\nfield f : Int {0}\nfield g : Int {0}\nloc x.f\nloc x.g\n"
                                       "predicate P(r) := acc(r.f)\n");
    AlgoEnv envp{up, st};
    const Assertion wp = parse_assertion("acc(x.g) --* acc(x.g) * P(x)");
    const PackageOutcome folded =
        package_sound(parse_state("{x.f@1=0}", up), wp, {script_stmt(ScriptKind::Fold, "P(x)")}, envp);
    REQUIRE(folded.ok);
    CHECK(folded.footprint == parse_state("{x.f@1=0}", up));
    CHECK(Oracle(up).is_footprint(folded.footprint, wp));
    CHECK(checker_accepts(folded, wp, up, false));
    CHECK_FALSE(package_sound(parse_state("{x.f@1=0}", up), wp, {}, envp).ok);
    CHECK_FALSE(package_sound(State{}, wp, {script_stmt(ScriptKind::Fold, "P(x)")}, envp).ok);
}
