#include "campaigns.hpp"

#include <sstream>

#include "wandkit/algorithms.hpp"
#include "wandkit/oracle.hpp"
#include "wandkit/package_logic.hpp"
#include "wandkit/semantics.hpp"

namespace wandkit::testkit {

std::string CampaignResult::summary() const {
    std::ostringstream os;
    os << cases << " cases, " << checked << " checked";
    if (skipped) os << ", " << skipped << " skipped";
    os << ", " << failures.size() << " failures";
    if (!failures.empty()) os << " (first: " << failures.front() << ")";
    return os.str();
}

CampaignResult soundness_campaign(Rng& rng, std::size_t cases) {
    CampaignResult res;
    const Store st;
    for (std::size_t i = 0; i < cases; ++i) {
        const Universe u = random_universe(rng);
        const Assertion w = random_wand(rng, u);
        const State outer = random_stable_state(rng, u, 0.8);
        ++res.cases;
        const AlgoEnv env{u, st};
        const Oracle oracle(u);
        for (const Algorithm algo : {Algorithm::Sound, Algorithm::Combinable}) {
            const PackageOutcome o = package(algo, outer, w, {}, env);
            if (!o.ok) continue;
            ++res.checked;
            const bool comb = algo == Algorithm::Combinable;
            const std::string tag = to_string(algo) + " " + to_string(w) + " from " + to_string(outer, u);
            if (!oracle.is_footprint(o.footprint, w, comb ? WandKind::Combinable : WandKind::Standard)) {
                res.failures.push_back(tag + ": " + to_string(o.footprint, u) + " is not a footprint");
                continue;
            }
            if (!o.derivation) {
                res.failures.push_back(tag + ": no derivation");
                continue;
            }
            const CheckResult r =
                check_derivation(w->right, PathCondition{}, o.derivation_context, *o.derivation, CheckEnv{u, st, comb});
            if (!r.ok) {
                res.failures.push_back(tag + ": rejected at " + r.path + ": " + r.error);
                continue;
            }
            const auto fp = extract_footprint(outer, r.context.outer);
            if (!fp || *fp != o.footprint) res.failures.push_back(tag + ": derivation footprint differs");
        }
    }
    return res;
}

namespace {

void derive_each(const Assertion& w, const Universe& u, const std::vector<State>& fps, bool minimal_witnesses,
                 CampaignResult& res) {
    const Store st;
    const CheckEnv env{u, st, false};
    for (const State& f : fps) {
        ++res.checked;
        const Context ctx{f, init_witness_set(w->left, u, st, minimal_witnesses), State{}};
        const auto d = canonical_derivation(w->right, ctx, f, env);
        bool good = false;
        if (d) {
            const CheckResult r = check_derivation(w->right, PathCondition{}, ctx, *d, env);
            const auto got = r.ok ? extract_footprint(f, r.context.outer) : std::nullopt;
            good = got && *got == f;
        }
        if (!good) res.failures.push_back(to_string(w) + " footprint " + to_string(f, u));
    }
}

} // namespace

CampaignResult completeness_campaign(Rng& rng, std::size_t wands) {
    CampaignResult res;
    for (std::size_t i = 0; i < wands; ++i) {
        const Universe u = random_universe(rng);
        const Assertion w = random_wand(rng, u);
        ++res.cases;
        const Oracle oracle(u);
        derive_each(w, u, oracle.minimal_footprints(w, WandKind::Standard, std::nullopt, false), true, res);
    }
    return res;
}

CampaignResult full_witness_campaign(Rng& rng, std::size_t wands) {
    CampaignResult res;
    for (std::size_t i = 0; i < wands; ++i) {
        const Universe u = random_universe(rng, 2);
        AssertionShape shape;
        shape.depth = 1;
        const Assertion w = random_wand(rng, u, shape);
        ++res.cases;
        const Oracle oracle(u);
        derive_each(w, u, oracle.minimal_footprints(w, WandKind::Standard, std::nullopt, false), false, res);
    }
    return res;
}

CampaignResult combinable_campaign(Rng& rng, std::size_t pairs) {
    CampaignResult res;
    for (std::size_t i = 0; i < pairs; ++i) {
        const Universe u = random_universe(rng, 3);
        const Assertion a = random_assertion(rng, u);
        const Assertion b = random_assertion(rng, u);
        ++res.cases;
        const Oracle oracle(u);
        const Assertion wc = Assertion::wand(a, b, WandKind::Combinable);
        const Assertion ws = Assertion::wand(a, b, WandKind::Standard);
        if (oracle.check_combinable(b).combinable) {
            ++res.checked;
            if (!oracle.check_combinable(wc).combinable) res.failures.push_back("not combinable: " + to_string(wc));
        } else {
            ++res.skipped;
        }
        ++res.checked;
        const Verdict e = oracle.check_entailment(wc, ws);
        if (!e.holds) res.failures.push_back("no entailment: " + to_string(wc) + " at " + to_string(*e.counterexample, u));
        if (oracle.is_binary(a).holds) {
            ++res.checked;
            EnumerationPlan plan(u);
            plan.stable_only = true;
            for (const State& s : plan.states()) {
                if (oracle.is_footprint(s, ws, WandKind::Standard) != oracle.is_footprint(s, ws, WandKind::Combinable)) {
                    res.failures.push_back("binary LHS disagreement: " + to_string(ws) + " at " + to_string(s, u));
                    break;
                }
            }
        } else {
            ++res.skipped;
        }
    }
    return res;
}

} // namespace wandkit::testkit
