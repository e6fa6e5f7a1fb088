#include "wandkit/algorithms.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "wandkit/enumerate.hpp"

namespace wandkit {

std::string to_string(Algorithm a) {
    switch (a) {
    case Algorithm::Fia: return "fia";
    case Algorithm::Sound: return "sound";
    case Algorithm::Combinable: return "combinable";
    }
    return "?";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) {
    if (name == "fia") return Algorithm::Fia;
    if (name == "sound") return Algorithm::Sound;
    if (name == "combinable") return Algorithm::Combinable;
    return std::nullopt;
}

std::string print_script(const ProofScript& ps, int indent) {
    const std::string pad(static_cast<std::size_t>(indent), ' ');
    std::ostringstream os;
    for (const auto& s : ps) {
        switch (s.kind) {
        case ScriptKind::Assert: os << pad << "assert " << to_string(s.assertion) << "\n"; break;
        case ScriptKind::Fold: os << pad << "fold " << to_string(s.assertion) << "\n"; break;
        case ScriptKind::Unfold: os << pad << "unfold " << to_string(s.assertion) << "\n"; break;
        case ScriptKind::Apply: os << pad << "apply " << to_string(s.assertion) << "\n"; break;
        case ScriptKind::If:
            os << pad << "if (" << to_string(s.cond) << ") {\n"
               << print_script(s.then_branch, indent + 2) << pad << "} else {\n"
               << print_script(s.else_branch, indent + 2) << pad << "}\n";
            break;
        }
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Inhaling into states
// ---------------------------------------------------------------------------

namespace {

std::optional<bool> guard_value(const Expr& e, const State& s, const AlgoEnv& env) {
    EvalContext ctx{env.universe, env.store, s, false, env.allow_perm};
    return eval_bool(e, ctx);
}

void add_resource(std::vector<State>& out, State s, const ResourceId& id, const Perm& amount) {
    const Perm total = s.perm(id) + amount;
    if (total > kFullPerm) return;
    s.set_perm(id, total);
    out.push_back(std::move(s));
}

void inhale_rec(std::vector<State>& states, const Assertion& a, const AlgoEnv& env) {
    const auto& n = a.node();
    switch (n.kind) {
    case AssertionKind::Star:
        inhale_rec(states, n.left, env);
        inhale_rec(states, n.right, env);
        return;
    case AssertionKind::Or: {
        std::vector<State> right = states;
        inhale_rec(states, n.left, env);
        inhale_rec(right, n.right, env);
        states.insert(states.end(), right.begin(), right.end());
        return;
    }
    case AssertionKind::Imp: {
        std::vector<State> on;
        std::vector<State> off;
        for (auto& s : states) {
            auto g = guard_value(n.expr, s, env);
            if (!g) throw EvalError("condition " + to_string(n.expr) + " is not framed");
            (*g ? on : off).push_back(std::move(s));
        }
        inhale_rec(on, n.left, env);
        off.insert(off.end(), on.begin(), on.end());
        states = std::move(off);
        return;
    }
    case AssertionKind::Pure: {
        std::vector<State> out;
        for (auto& s : states) {
            auto g = guard_value(n.expr, s, env);
            if (!g) throw EvalError("expression " + to_string(n.expr) + " is not framed");
            if (*g) out.push_back(std::move(s));
        }
        states = std::move(out);
        return;
    }
    case AssertionKind::Acc: {
        std::vector<State> out;
        for (auto& s : states) {
            EvalContext ctx{env.universe, env.store, s, false, env.allow_perm};
            auto r = eval(n.expr, ctx);
            if (!r) throw EvalError("receiver " + to_string(n.expr) + " is not framed");
            const Ref* ref = std::get_if<Ref>(&*r);
            if (!ref) throw EvalError("field access on a non-reference " + to_string(n.expr));
            if (ref->is_null()) continue;
            auto l = env.universe.find_loc(*ref, n.name);
            if (!l) throw EvalError("undeclared location " + env.universe.ref_name(*ref) + "." + n.name);
            if (n.amount <= kNoPerm) {
                out.push_back(std::move(s));
                continue;
            }
            if (s.value(*l)) {
                add_resource(out, std::move(s), *l, n.amount);
                continue;
            }
            for (const auto& v : env.universe.loc(*l).domain) {
                State t = s;
                t.set_value(*l, v);
                add_resource(out, std::move(t), *l, n.amount);
            }
        }
        states = std::move(out);
        return;
    }
    case AssertionKind::Pred: {
        std::vector<State> out;
        for (auto& s : states) {
            EvalContext ctx{env.universe, env.store, s, false, env.allow_perm};
            auto key = pred_key(a, ctx);
            if (!key) throw EvalError("arguments of " + to_string(a) + " are not framed");
            if (n.amount <= kNoPerm) {
                out.push_back(std::move(s));
                continue;
            }
            add_resource(out, std::move(s), *key, n.amount);
        }
        states = std::move(out);
        return;
    }
    case AssertionKind::Wand: {
        const ResourceId key = wand_key(a, env.universe, env.store);
        std::vector<State> out;
        for (auto& s : states) add_resource(out, std::move(s), key, kFullPerm);
        states = std::move(out);
        return;
    }
    }
}

void sort_unique(std::vector<State>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

} // namespace

std::vector<State> inhale_states(const State& base, const Assertion& a, const AlgoEnv& env) {
    std::vector<State> states{base};
    inhale_rec(states, a, env);
    sort_unique(states);
    return states;
}

std::vector<State> empty_total_states(const Universe& u) {
    EnumerationPlan plan(u);
    plan.total_heap_only = true;
    plan.zero_mask_only = true;
    return plan.states();
}

std::vector<State> cons_lhs(const std::vector<State>& t, const PathCondition& pc, const Assertion& a,
                            const AlgoEnv& env) {
    std::vector<State> out;
    std::vector<State> active;
    for (const auto& s : t) {
        if (holds(pc, s, env.universe, env.store)) {
            active.push_back(s);
        } else {
            out.push_back(s);
        }
    }
    inhale_rec(active, a, env);
    out.insert(out.end(), active.begin(), active.end());
    sort_unique(out);
    return out;
}

std::vector<State> lhs_cases(const Assertion& lhs, const AlgoEnv& env) {
    std::vector<State> cases;
    for (const auto& s : cons_lhs(empty_total_states(env.universe), PathCondition{}, lhs, env)) {
        cases.push_back(stabilize(s));
    }
    sort_unique(cases);
    cases = prune_dominated(std::move(cases));
    sort_unique(cases);
    return cases;
}

// ---------------------------------------------------------------------------
// Proof search
// ---------------------------------------------------------------------------

namespace {

struct ProveFailure {
    std::string message;
};

// FIA never drops a case: the increment is added even where heaps disagree.
std::optional<State> force_add(const State& a, const State& w) {
    State r = a;
    for (const auto& [id, p] : w.mask()) {
        const Perm s = r.perm(id) + p;
        if (s > kFullPerm) return std::nullopt;
        r.set_perm(id, s);
    }
    for (const auto& [l, v] : w.heap()) {
        if (!r.value(l)) r.set_value(l, v);
    }
    return r;
}

bool heap_conflict(const State& a, const State& b, const ResourceId& id) {
    const LocId* l = std::get_if<LocId>(&id);
    if (!l) return false;
    const Value* x = a.value(*l);
    const Value* y = b.value(*l);
    return x && y && *x != *y;
}

class Prover {
public:
    Prover(Algorithm algo, const AlgoEnv& env) : algo_(algo), env_(env) {}

    Derivation prove(Context& ctx, const PathCondition& pc, const Assertion& b) {
        switch (b.kind()) {
        case AssertionKind::Star: {
            Derivation l = prove(ctx, pc, b->left);
            Derivation r = prove(ctx, pc, b->right);
            return Derivation::star(std::move(l), std::move(r));
        }
        case AssertionKind::Imp: return Derivation::implication(prove(ctx, pc.with(b->expr), b->left));
        case AssertionKind::Pure: return pure_atom(ctx, pc, b);
        default: return resource_atom(ctx, pc, b);
        }
    }

    void extract(Context& ctx, const State& w) {
        if (w.is_unit()) return;
        if (algo_ == Algorithm::Fia) {
            auto outer = sub(ctx.outer, w);
            if (!outer) throw ProveFailure{"outer state does not contain " + to_string(w, env_.universe)};
            WitnessSet next;
            for (const auto& p : ctx.witnesses) {
                auto a = force_add(p.a, w);
                if (!a) throw ProveFailure{"LHS state " + to_string(p.a, env_.universe) + " cannot hold more permission"};
                next.push_back({std::move(*a), p.b, p.t});
            }
            normalize(next);
            ctx.outer = std::move(*outer);
            ctx.extracted = *add(ctx.extracted, w);
            ctx.witnesses = std::move(next);
            return;
        }
        auto next = apply_extract(ctx, w, algo_ == Algorithm::Combinable);
        if (!next) throw ProveFailure{"cannot extract " + to_string(w, env_.universe)};
        ctx = std::move(*next);
    }

private:
    std::string state_text(const State& s) const { return to_string(s, env_.universe); }

    std::vector<State> demands_of(const Assertion& b, const State& a) const {
        return demands(b, env_.universe, env_.store, a);
    }

    std::optional<State> covered_demand(const Assertion& b, const State& a) const {
        for (const auto& d : demands_of(b, a)) {
            if (geq(a, d)) return d;
        }
        return std::nullopt;
    }

    Derivation pure_atom(Context& ctx, const PathCondition& pc, const Assertion& b) {
        std::vector<AtomChoice> choices;
        for (const auto& p : ctx.witnesses) {
            if (!holds(pc, p.a, env_.universe, env_.store)) continue;
            const State c = core(p.a);
            if (!sat(c, b, env_.universe, env_.store)) {
                throw ProveFailure{"assertion " + to_string(b) + " does not hold for LHS state " + state_text(p.a)};
            }
            choices.push_back({p.a, p.b, c});
        }
        return Derivation::atom(std::move(choices));
    }

    Derivation resource_atom(Context& ctx, const PathCondition& pc, const Assertion& b) {
        bool covered = true;
        for (const auto& p : ctx.witnesses) {
            if (holds(pc, p.a, env_.universe, env_.store) && !covered_demand(b, p.a)) {
                covered = false;
                break;
            }
        }
        State w;
        if (!covered) {
            w = algo_ == Algorithm::Fia ? fia_increment(ctx, pc, b) : minimal_increment(ctx, pc, b);
            extract(ctx, w);
        }
        std::vector<AtomChoice> choices;
        WitnessSet next;
        for (const auto& p : ctx.witnesses) {
            if (!holds(pc, p.a, env_.universe, env_.store)) {
                next.push_back(p);
                continue;
            }
            auto d = covered_demand(b, p.a);
            if (!d) {
                if (algo_ == Algorithm::Combinable) {
                    throw ProveFailure{"no combinable footprint covers " + to_string(b) + " for LHS state " +
                                       state_text(p.a)};
                }
                throw ProveFailure{"insufficient permission for " + to_string(b) + " in LHS state " + state_text(p.a)};
            }
            State choice = *add(*d, core(p.a));
            auto a = sub(p.a, choice);
            auto nb = add(p.b, choice);
            if (!a || !nb) throw ProveFailure{"cannot move " + state_text(choice) + " out of " + state_text(p.a)};
            choices.push_back({p.a, p.b, choice});
            next.push_back({std::move(*a), std::move(*nb), p.t});
        }
        normalize(next);
        ctx.witnesses = std::move(next);
        Derivation atom = Derivation::atom(std::move(choices));
        if (w.is_unit()) return atom;
        return Derivation::extract(std::move(w), std::move(atom));
    }

    // Shortfall of `a` for demand `d`, per resource.
    static std::vector<std::pair<ResourceId, Perm>> shortfall(const State& a, const State& d) {
        std::vector<std::pair<ResourceId, Perm>> out;
        for (const auto& [id, p] : d.mask()) {
            const Perm s = p - a.perm(id);
            if (s > kNoPerm) out.emplace_back(id, s);
        }
        return out;
    }

    bool coverable(const State& a, const State& d, const State& outer) const {
        for (const auto& [id, s] : shortfall(a, d)) {
            if (outer.perm(id) < s || heap_conflict(a, outer, id)) return false;
        }
        return true;
    }

    const State& pick_demand(const std::vector<State>& ds, const State& a, const State& outer) const {
        for (const auto& d : ds) {
            if (coverable(a, d, outer)) return d;
        }
        return ds.front();
    }

    std::optional<ResourceId> killer(const WitnessPair& p, const State& outer) const {
        const State ab = *add(p.a, p.b);
        for (const auto& [id, amount] : outer.mask()) {
            if (heap_conflict(ab, outer, id)) return id;
            if (algo_ != Algorithm::Combinable && ab.perm(id) + amount > kFullPerm) return id;
        }
        return std::nullopt;
    }

    State build(const std::map<ResourceId, Perm>& need, const State& outer) const {
        State w;
        for (const auto& [id, p] : need) {
            w.set_perm(id, p);
            if (const LocId* l = std::get_if<LocId>(&id)) {
                if (const Value* v = outer.value(*l)) w.set_value(*l, *v);
            }
        }
        return w;
    }

    State minimal_increment(const Context& ctx, const PathCondition& pc, const Assertion& b) const {
        std::map<ResourceId, Perm> need;
        auto raise = [&](const ResourceId& id, const Perm& p) {
            auto [it, fresh] = need.emplace(id, p);
            if (!fresh) it->second = max_perm(it->second, p);
        };
        for (const auto& p : ctx.witnesses) {
            if (!holds(pc, p.a, env_.universe, env_.store)) continue;
            const auto ds = demands_of(b, p.a);
            if (ds.empty()) {
                throw ProveFailure{"assertion " + to_string(b) + " cannot hold for LHS state " + state_text(p.a)};
            }
            if (covered_demand(b, p.a)) continue;
            const State& d = pick_demand(ds, p.a, ctx.outer);
            std::vector<std::pair<ResourceId, Perm>> take;
            std::optional<std::pair<ResourceId, Perm>> kill;
            for (const auto& [id, s] : shortfall(p.a, d)) {
                const Perm avail = ctx.outer.perm(id);
                if (heap_conflict(p.a, ctx.outer, id) && avail > kNoPerm) {
                    kill = {id, min_perm(s, avail)};
                    break;
                }
                if (!heap_conflict(p.a, ctx.outer, id) && avail >= s) {
                    take.emplace_back(id, s);
                    continue;
                }
                if (auto k = killer(p, ctx.outer)) {
                    kill = {*k, ctx.outer.perm(*k)};
                    break;
                }
                throw ProveFailure{"insufficient permission for " + to_string(b) + " in LHS state " + state_text(p.a) +
                                   ": outer state lacks " + resource_name(id, env_.universe)};
            }
            if (kill) {
                raise(kill->first, kill->second);
            } else {
                for (const auto& [id, s] : take) raise(id, s);
            }
        }
        return build(need, ctx.outer);
    }

    State fia_increment(const Context& ctx, const PathCondition& pc, const Assertion& b) const {
        std::map<ResourceId, Perm> need;
        for (const auto& p : ctx.witnesses) {
            if (!holds(pc, p.a, env_.universe, env_.store)) continue;
            if (covered_demand(b, p.a)) continue;
            const auto ds = demands_of(b, p.a);
            const State* chosen = nullptr;
            for (const auto& d : ds) {
                bool ok = true;
                for (const auto& [id, s] : shortfall(p.a, d)) ok = ok && ctx.outer.perm(id) >= s;
                if (ok) {
                    chosen = &d;
                    break;
                }
            }
            if (!chosen) {
                throw ProveFailure{"insufficient permission for " + to_string(b) + " in LHS state " + state_text(p.a)};
            }
            for (const auto& [id, s] : shortfall(p.a, *chosen)) {
                auto [it, fresh] = need.emplace(id, s);
                if (!fresh) it->second = max_perm(it->second, s);
            }
        }
        return build(need, ctx.outer);
    }

    Algorithm algo_;
    const AlgoEnv& env_;
};

} // namespace

ProveResult prove_rhs(const Context& ctx, const PathCondition& pc, const Assertion& b, Algorithm algo,
                      const AlgoEnv& env) {
    ProveResult r;
    r.context = ctx;
    try {
        Prover prover(algo, env);
        r.derivation = prover.prove(r.context, pc, b);
        r.ok = true;
    } catch (const ProveFailure& f) {
        r.error = f.message;
    } catch (const EvalError& e) {
        r.error = e.what();
    }
    return r;
}

// ---------------------------------------------------------------------------
// Proof scripts
// ---------------------------------------------------------------------------

namespace {

class ScriptRunner {
public:
    ScriptRunner(Algorithm algo, const AlgoEnv& env) : algo_(algo), env_(env), prover_(algo, env) {}

    bool transformed = false;

    void run(Context& ctx, const ProofScript& script) {
        for (const auto& s : script) exec(ctx, s);
    }

private:
    std::string state_text(const State& s) const { return to_string(s, env_.universe); }

    // Extracts whatever proving `a` would extract, without consuming anything.
    void require(Context& ctx, const Assertion& a) {
        Context probe = ctx;
        prover_.prove(probe, PathCondition{}, a);
        auto w = extract_footprint(ctx.outer, probe.outer);
        if (!w) throw ProveFailure{"proof of " + to_string(a) + " grew the outer state"};
        prover_.extract(ctx, *w);
    }

    State take_demand(const State& a, const Assertion& what) const {
        for (const auto& d : demands(what, env_.universe, env_.store, a)) {
            if (geq(a, d)) return *sub(a, d);
        }
        throw ProveFailure{"LHS state " + state_text(a) + " does not hold " + to_string(what)};
    }

    void add_states(WitnessSet& out, const WitnessPair& p, const std::vector<State>& as) const {
        for (const auto& a : as) {
            if (compatible(a, p.b)) out.push_back({a, p.b, p.t});
        }
    }

    Assertion instantiate_body(const Assertion& pred) const {
        const PredicateDef* def = env_.universe.find_predicate(pred->name);
        if (!def) throw ProveFailure{"unknown predicate " + pred->name};
        if (def->params.size() != pred->args.size()) throw ProveFailure{"wrong number of arguments to " + pred->name};
        std::map<std::string, Expr> bindings;
        for (std::size_t i = 0; i < def->params.size(); ++i) bindings.emplace(def->params[i], pred->args[i]);
        return scale(substitute(def->body, bindings), pred->amount);
    }

    void exec(Context& ctx, const ScriptStmt& s) {
        switch (s.kind) {
        case ScriptKind::Assert: require(ctx, s.assertion); return;
        case ScriptKind::Fold: {
            const Assertion body = instantiate_body(s.assertion);
            require(ctx, body);
            WitnessSet next;
            for (const auto& p : ctx.witnesses) {
                State a = take_demand(p.a, body);
                EvalContext ectx{env_.universe, env_.store, a};
                auto key = pred_key(s.assertion, ectx);
                if (!key) throw ProveFailure{"arguments of " + to_string(s.assertion) + " are not framed"};
                add_resource_checked(a, *key, s.assertion->amount, p.a);
                if (compatible(a, p.b)) next.push_back({std::move(a), p.b, p.t});
            }
            normalize(next);
            ctx.witnesses = std::move(next);
            transformed = true;
            return;
        }
        case ScriptKind::Unfold: {
            const Assertion body = instantiate_body(s.assertion);
            require(ctx, s.assertion);
            WitnessSet next;
            for (const auto& p : ctx.witnesses) {
                State a = take_demand(p.a, s.assertion);
                add_states(next, p, inhale_states(a, body, env_));
            }
            normalize(next);
            ctx.witnesses = std::move(next);
            transformed = true;
            return;
        }
        case ScriptKind::Apply: {
            const Assertion& w = s.assertion;
            const Assertion needed = Assertion::star(w, w->left);
            require(ctx, needed);
            WitnessSet next;
            for (const auto& p : ctx.witnesses) {
                State a = take_demand(p.a, needed);
                add_states(next, p, inhale_states(a, w->right, env_));
            }
            normalize(next);
            ctx.witnesses = std::move(next);
            transformed = true;
            return;
        }
        case ScriptKind::If: {
            WitnessSet on;
            WitnessSet off;
            for (const auto& p : ctx.witnesses) {
                EvalContext ectx{env_.universe, env_.store, p.a};
                auto g = eval_bool(s.cond, ectx);
                if (!g) {
                    throw ProveFailure{"condition " + to_string(s.cond) + " is not framed in LHS state " +
                                       state_text(p.a)};
                }
                (*g ? on : off).push_back(p);
            }
            Context c1{ctx.outer, on, ctx.extracted};
            run(c1, s.then_branch);
            Context rest{ctx.outer, off, ctx.extracted};
            prover_.extract(rest, *extract_footprint(ctx.outer, c1.outer));
            Context c2{c1.outer, rest.witnesses, c1.extracted};
            run(c2, s.else_branch);
            Context back{c1.outer, c1.witnesses, c1.extracted};
            prover_.extract(back, *extract_footprint(c1.outer, c2.outer));
            ctx.outer = c2.outer;
            ctx.extracted = c2.extracted;
            ctx.witnesses = back.witnesses;
            ctx.witnesses.insert(ctx.witnesses.end(), c2.witnesses.begin(), c2.witnesses.end());
            normalize(ctx.witnesses);
            return;
        }
        }
    }

    void add_resource_checked(State& a, const ResourceId& id, const Perm& amount, const State& original) const {
        const Perm total = a.perm(id) + amount;
        if (total > kFullPerm) {
            throw ProveFailure{"LHS state " + state_text(original) + " would hold more than full permission to " +
                               resource_name(id, env_.universe)};
        }
        a.set_perm(id, total);
    }

    Algorithm algo_;
    const AlgoEnv& env_;
    Prover prover_;
};

} // namespace

ScriptResult run_script(const Context& ctx, const ProofScript& script, Algorithm algo, const AlgoEnv& env) {
    ScriptResult r;
    r.context = ctx;
    try {
        ScriptRunner runner(algo, env);
        runner.run(r.context, script);
        r.transformed = runner.transformed;
        r.ok = true;
    } catch (const ProveFailure& f) {
        r.error = f.message;
    } catch (const EvalError& e) {
        r.error = e.what();
    }
    return r;
}

// ---------------------------------------------------------------------------
// Packaging
// ---------------------------------------------------------------------------

namespace {

std::optional<State> record_wand(const State& s, const Assertion& wand, const AlgoEnv& env) {
    const ResourceId key = wand_key(wand, env.universe, env.store);
    const Perm total = s.perm(key) + kFullPerm;
    if (total > kFullPerm) return std::nullopt;
    State r = s;
    r.set_perm(key, total);
    return r;
}

PackageOutcome failure(std::string msg) {
    PackageOutcome out;
    out.diagnostic = std::move(msg);
    return out;
}

PackageOutcome package_fia_impl(const State& outer, const Assertion& wand, const ProofScript& script,
                                const std::vector<State>& cases, const AlgoEnv& env) {
    PackageOutcome out;
    std::vector<std::pair<State, State>> footprints;
    if (cases.empty()) footprints.emplace_back(State{}, State{});
    for (const auto& c : cases) {
        Context ctx{outer, with_transformers({c}, false), State{}};
        ScriptResult sr = run_script(ctx, script, Algorithm::Fia, env);
        if (!sr.ok) return failure("case " + to_string(c, env.universe) + ": " + sr.error);
        ProveResult pr = prove_rhs(sr.context, PathCondition{}, wand->right, Algorithm::Fia, env);
        if (!pr.ok) return failure("case " + to_string(c, env.universe) + ": " + pr.error);
        footprints.emplace_back(c, *extract_footprint(outer, pr.context.outer));
    }
    for (const auto& [c, fp] : footprints) {
        auto post = record_wand(*sub(outer, fp), wand, env);
        if (!post) return failure("the current state already holds an instance of " + to_string(wand));
        out.post_states.push_back(std::move(*post));
    }
    if (!cases.empty()) out.case_footprints = std::move(footprints);
    sort_unique(out.post_states);
    out.ok = true;
    return out;
}

} // namespace

PackageOutcome package(Algorithm algo, const State& outer, const Assertion& wand, const ProofScript& script,
                       const AlgoEnv& env) {
    if (wand.kind() != AssertionKind::Wand) return failure("not a wand: " + to_string(wand));
    std::vector<State> cases;
    try {
        cases = lhs_cases(wand->left, env);
    } catch (const BudgetExceeded& e) {
        return failure(e.what());
    } catch (const EvalError& e) {
        return failure(e.what());
    }
    if (algo == Algorithm::Fia) return package_fia_impl(outer, wand, script, cases, env);

    const bool combinable = algo == Algorithm::Combinable;
    Context ctx0{outer, with_transformers(cases, combinable), State{}};
    ScriptResult sr = run_script(ctx0, script, algo, env);
    if (!sr.ok) return failure(sr.error);
    ProveResult pr = prove_rhs(sr.context, PathCondition{}, wand->right, algo, env);
    if (!pr.ok) return failure(pr.error);

    PackageOutcome out;
    out.footprint = *extract_footprint(outer, pr.context.outer);
    if (sr.transformed) {
        out.witness_mode = WitnessMode::Explicit;
        out.derivation_context = sr.context;
        out.derivation = std::move(pr.derivation);
    } else {
        out.witness_mode = WitnessMode::Minimal;
        out.derivation_context = ctx0;
        State w = *extract_footprint(outer, sr.context.outer);
        out.derivation = w.is_unit() ? std::move(pr.derivation) : Derivation::extract(w, std::move(pr.derivation));
    }
    auto post = record_wand(pr.context.outer, wand, env);
    if (!post) return failure("the current state already holds an instance of " + to_string(wand));
    out.post_states.push_back(std::move(*post));
    out.ok = true;
    return out;
}

PackageOutcome package_sound(const State& outer, const Assertion& wand, const ProofScript& script,
                             const AlgoEnv& env) {
    return package(Algorithm::Sound, outer, wand, script, env);
}

PackageOutcome package_combinable(const State& outer, const Assertion& wand, const ProofScript& script,
                                  const AlgoEnv& env) {
    return package(Algorithm::Combinable, outer, wand, script, env);
}

PackageOutcome package_fia(const State& outer, const Assertion& wand, const ProofScript& script, const AlgoEnv& env) {
    return package(Algorithm::Fia, outer, wand, script, env);
}

} // namespace wandkit
