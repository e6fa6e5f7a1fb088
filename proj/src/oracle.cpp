#include "wandkit/oracle.hpp"

#include <algorithm>

namespace wandkit {

Assertion expand_predicates(const Assertion& a, const Universe& u) {
    const auto& n = a.node();
    switch (n.kind) {
    case AssertionKind::Star: return Assertion::star(expand_predicates(n.left, u), expand_predicates(n.right, u));
    case AssertionKind::Or: return Assertion::disj(expand_predicates(n.left, u), expand_predicates(n.right, u));
    case AssertionKind::Imp: return Assertion::imp(n.expr, expand_predicates(n.left, u));
    case AssertionKind::Wand:
        return Assertion::wand(expand_predicates(n.left, u), expand_predicates(n.right, u), n.wand_kind);
    case AssertionKind::Pred: {
        const PredicateDef* def = u.find_predicate(n.name);
        if (!def) throw EvalError("unknown predicate " + n.name);
        if (def->params.size() != n.args.size()) throw EvalError("wrong number of arguments to " + n.name);
        std::map<std::string, Expr> bindings;
        for (std::size_t i = 0; i < n.args.size(); ++i) bindings.emplace(def->params[i], n.args[i]);
        return expand_predicates(scale(substitute(def->body, bindings), n.amount), u);
    }
    default: return a;
    }
}

namespace {

void collect_pred_keys(const Assertion& a, const Universe& u, const Store& store, std::vector<ResourceId>& out) {
    switch (a.kind()) {
    case AssertionKind::Pred: {
        State empty;
        EvalContext ctx{u, store, empty};
        try {
            if (auto k = pred_key(a, ctx)) out.push_back(*k);
        } catch (const EvalError&) {
        }
        return;
    }
    case AssertionKind::Star:
    case AssertionKind::Or:
    case AssertionKind::Wand:
        collect_pred_keys(a->left, u, store, out);
        collect_pred_keys(a->right, u, store, out);
        return;
    case AssertionKind::Imp: collect_pred_keys(a->left, u, store, out); return;
    default: return;
    }
}

} // namespace

Oracle::Oracle(const Universe& u, Store store, OracleOptions opts)
    : universe_(u), store_(std::move(store)), opts_(opts) {
    semantics_ = [this](const State& s, const Assertion& w) { return wand_holds(s, w); };
}

Assertion Oracle::prepare(const Assertion& a) const {
    return opts_.unfold_predicates ? expand_predicates(a, universe_) : a;
}

EnumerationPlan Oracle::plan_for(const Assertion& a, bool stable_only) const {
    EnumerationPlan plan(universe_);
    plan.granularity = opts_.granularity;
    plan.budget = opts_.budget;
    plan.stable_only = stable_only;
    if (!opts_.unfold_predicates) {
        collect_pred_keys(a, universe_, store_, plan.extra_resources);
        std::sort(plan.extra_resources.begin(), plan.extra_resources.end());
        plan.extra_resources.erase(std::unique(plan.extra_resources.begin(), plan.extra_resources.end()),
                                   plan.extra_resources.end());
    }
    return plan;
}

bool Oracle::holds(const State& s, const Assertion& a) const {
    return sat(s, prepare(a), universe_, store_, &semantics_);
}

std::vector<State> Oracle::sat_states(const Assertion& a, const EnumerationPlan& plan) const {
    const Assertion p = prepare(a);
    std::vector<State> out;
    for (auto& s : plan.states()) {
        if (sat(s, p, universe_, store_, &semantics_)) out.push_back(std::move(s));
    }
    return out;
}

std::vector<State> Oracle::sat_states(const Assertion& a) const { return sat_states(a, plan_for(a)); }

std::shared_ptr<const std::vector<State>> Oracle::lhs_states(const Assertion& lhs) const {
    const std::string key = to_string(lhs);
    {
        std::lock_guard<std::mutex> lock(mu_);
        if (auto it = lhs_cache_.find(key); it != lhs_cache_.end()) return it->second;
    }
    auto states = std::make_shared<const std::vector<State>>(sat_states(lhs, plan_for(lhs, opts_.stable_lhs_only)));
    std::lock_guard<std::mutex> lock(mu_);
    return lhs_cache_.emplace(key, states).first->second;
}

bool Oracle::wand_holds(const State& s, const Assertion& wand) const {
    auto key = std::make_pair(to_string(wand), s);
    {
        std::lock_guard<std::mutex> lock(mu_);
        if (auto it = wand_cache_.find(key); it != wand_cache_.end()) return it->second;
    }
    const bool result = is_footprint(s, wand, wand->wand_kind);
    std::lock_guard<std::mutex> lock(mu_);
    wand_cache_.emplace(std::move(key), result);
    return result;
}

bool Oracle::is_footprint(const State& w, const Assertion& wand, WandKind kind, std::optional<State>* witness) const {
    const Assertion rhs = prepare(wand->right);
    for (const auto& a : *lhs_states(wand->left)) {
        const State part = kind == WandKind::Combinable ? restrict(a, w) : w;
        auto combined = add(a, part);
        if (!combined) continue;
        if (!sat(*combined, rhs, universe_, store_, &semantics_)) {
            if (witness) *witness = a;
            return false;
        }
    }
    return true;
}

std::vector<State> Oracle::minimal_footprints(const Assertion& wand, WandKind kind, const std::optional<State>& below,
                                              bool applicable_only) const {
    EnumerationPlan plan = plan_for(wand, true);
    plan.below = below;
    auto lhs = lhs_states(wand->left);
    std::vector<State> found;
    for (auto& w : plan.states()) {
        if (applicable_only) {
            bool applicable = false;
            for (const auto& a : *lhs) {
                const State part = kind == WandKind::Combinable ? restrict(a, w) : w;
                if (compatible(a, part)) {
                    applicable = true;
                    break;
                }
            }
            if (!applicable) continue;
        }
        if (is_footprint(w, wand, kind)) found.push_back(std::move(w));
    }
    return prune_dominated(std::move(found));
}

CombinableVerdict Oracle::check_combinable(const Assertion& a) const {
    const auto states = sat_states(a, plan_for(a, opts_.stable_lhs_only));
    const int g = opts_.granularity > 0 ? opts_.granularity : universe_.granularity;
    const auto fractions = lattice(g);
    CombinableVerdict v;
    for (const auto& p : fractions) {
        for (const auto& q : fractions) {
            if (p + q > kFullPerm) continue;
            const Perm back = kFullPerm / (p + q);
            for (const auto& s1 : states) {
                const State x = *mult(p, s1);
                for (const auto& s2 : states) {
                    const State y = *mult(q, s2);
                    auto sum = add(x, y);
                    if (!sum) continue;
                    auto target = mult(back, *sum);
                    if (!target || !holds(*target, a)) {
                        v.combinable = false;
                        v.counterexample = std::make_tuple(p, q, x, y);
                        return v;
                    }
                }
            }
        }
    }
    return v;
}

Verdict Oracle::check_entailment(const Assertion& a, const Assertion& b) const {
    Verdict v;
    EnumerationPlan plan = plan_for(Assertion::star(a, b));
    for (const auto& s : plan.states()) {
        if (holds(s, a) && !holds(s, b)) {
            v.holds = false;
            v.counterexample = s;
            return v;
        }
    }
    return v;
}

Verdict Oracle::check_mono_pure(const Expr& e, bool negated) const {
    const Assertion a = Assertion::pure(e);
    auto value = [&](const State& s) {
        bool r = false;
        try {
            EvalContext ctx{universe_, store_, s, false, true};
            auto b = eval_bool(e, ctx);
            r = b && *b != negated;
        } catch (const EvalError&) {
            r = false;
        }
        return r;
    };
    EnumerationPlan all = plan_for(a);
    EnumerationPlan pure_plan = plan_for(a);
    pure_plan.zero_mask_only = true;
    const auto pure_states = pure_plan.states();
    Verdict v;
    for (const auto& s : all.states()) {
        if (!value(s)) continue;
        for (const auto& p : pure_states) {
            auto t = add(s, p);
            if (t && !value(*t)) {
                v.holds = false;
                v.counterexample = s;
                return v;
            }
        }
    }
    return v;
}

Verdict Oracle::is_binary(const Assertion& a) const {
    Verdict v;
    for (const auto& s : sat_states(a)) {
        if (!holds(bin(s), a)) {
            v.holds = false;
            v.counterexample = s;
            return v;
        }
    }
    return v;
}

} // namespace wandkit
