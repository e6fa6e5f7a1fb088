#include "wandkit/package_logic.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "wandkit/enumerate.hpp"
#include "wandkit/parse.hpp"

namespace wandkit {

bool holds(const PathCondition& pc, const State& sigma, const Universe& u, const Store& store) {
    EvalContext ctx{u, store, sigma};
    for (const auto& c : pc.conjuncts) {
        auto b = eval_bool(c, ctx);
        if (b && !*b) return false;
    }
    return true;
}

State Transformer::operator()(const State& s) const {
    if (kind == TransformerKind::Identity) return s;
    return restrict(anchor, s);
}

bool operator<(const WitnessPair& x, const WitnessPair& y) {
    if (!(x.a == y.a)) return x.a < y.a;
    if (!(x.b == y.b)) return x.b < y.b;
    return x.t < y.t;
}

void normalize(WitnessSet& s) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
}

std::string to_string(Rule r) {
    switch (r) {
    case Rule::Implication: return "implication";
    case Rule::Star: return "star";
    case Rule::Atom: return "atom";
    case Rule::Extract: return "extract";
    case Rule::Disjunction: return "disjunction";
    }
    return "?";
}

Derivation Derivation::atom(std::vector<AtomChoice> choices) {
    Derivation d;
    d.rule = Rule::Atom;
    d.choices = std::move(choices);
    return d;
}

Derivation Derivation::extract(State w, Derivation child) {
    Derivation d;
    d.rule = Rule::Extract;
    d.extracted = std::move(w);
    d.children.push_back(std::move(child));
    return d;
}

Derivation Derivation::star(Derivation l, Derivation r) {
    Derivation d;
    d.rule = Rule::Star;
    d.children.push_back(std::move(l));
    d.children.push_back(std::move(r));
    return d;
}

Derivation Derivation::implication(Derivation child) {
    Derivation d;
    d.rule = Rule::Implication;
    d.children.push_back(std::move(child));
    return d;
}

Derivation Derivation::disjunction(std::vector<std::pair<State, State>> left, Derivation l, Derivation r) {
    Derivation d;
    d.rule = Rule::Disjunction;
    d.left_pairs = std::move(left);
    d.children.push_back(std::move(l));
    d.children.push_back(std::move(r));
    return d;
}

// ---------------------------------------------------------------------------
// Extract
// ---------------------------------------------------------------------------

std::optional<Context> apply_extract(const Context& ctx, const State& w, bool lifted) {
    auto outer = sub(ctx.outer, w);
    if (!outer) return std::nullopt;
    auto total = add(ctx.extracted, w);
    if (!total) return std::nullopt;
    Context out;
    out.outer = std::move(*outer);
    out.extracted = *total;
    for (const auto& p : ctx.witnesses) {
        State delta = w;
        if (lifted) {
            auto d = sub(p.t(*total), p.t(ctx.extracted));
            if (!d) return std::nullopt;
            delta = std::move(*d);
        }
        auto ab = add(p.a, p.b);
        if (!ab || !compatible(*ab, delta)) continue;
        auto a = add(p.a, delta);
        if (!a) continue;
        out.witnesses.push_back({std::move(*a), p.b, p.t});
    }
    normalize(out.witnesses);
    return out;
}

// ---------------------------------------------------------------------------
// Checker
// ---------------------------------------------------------------------------

namespace {

struct CheckFailure {
    std::string message;
    std::string path;
};

std::string pair_text(const State& a, const State& b, const Universe& u) {
    return "(" + to_string(a, u) + ", " + to_string(b, u) + ")";
}

Context check_rec(const Assertion& b, const PathCondition& pc, const Context& ctx, const Derivation& d,
                  const CheckEnv& env, const std::string& path) {
    const Universe& u = env.universe;
    const std::string here = path.empty() ? to_string(d.rule) : path + "/" + to_string(d.rule);
    auto fail = [&](const std::string& msg) -> CheckFailure { return CheckFailure{msg, here}; };
    auto arity = [&](std::size_t n) {
        if (d.children.size() != n) {
            throw fail("rule " + to_string(d.rule) + " expects " + std::to_string(n) + " premise(s)");
        }
    };

    switch (d.rule) {
    case Rule::Implication: {
        arity(1);
        if (b.kind() != AssertionKind::Imp) throw fail("implication rule applied to " + to_string(b));
        return check_rec(b->left, pc.with(b->expr), ctx, d.children[0], env, here);
    }
    case Rule::Star: {
        arity(2);
        if (b.kind() != AssertionKind::Star) throw fail("star rule applied to " + to_string(b));
        Context mid = check_rec(b->left, pc, ctx, d.children[0], env, here + ".1");
        return check_rec(b->right, pc, mid, d.children[1], env, here + ".2");
    }
    case Rule::Extract: {
        arity(1);
        if (!d.extracted.valid()) throw fail("extracted state is not valid");
        if (!is_stable(d.extracted)) throw fail("extracted state " + to_string(d.extracted, u) + " is not stable");
        if (!geq(ctx.outer, d.extracted)) {
            throw fail("outer state " + to_string(ctx.outer, u) + " does not contain " + to_string(d.extracted, u));
        }
        auto next = apply_extract(ctx, d.extracted, env.lifted);
        if (!next) throw fail("transformed footprint increment is undefined");
        return check_rec(b, pc, *next, d.children[0], env, here);
    }
    case Rule::Atom: {
        arity(0);
        std::map<std::pair<State, State>, const State*> table;
        for (const auto& c : d.choices) {
            if (!table.emplace(std::make_pair(c.a, c.b), &c.choice).second) {
                throw fail("duplicate choice for pair " + pair_text(c.a, c.b, u));
            }
        }
        Context out;
        out.outer = ctx.outer;
        out.extracted = ctx.extracted;
        for (const auto& p : ctx.witnesses) {
            if (!holds(pc, p.a, u, env.store)) {
                out.witnesses.push_back(p);
                continue;
            }
            auto it = table.find({p.a, p.b});
            if (it == table.end()) throw fail("no choice for pair " + pair_text(p.a, p.b, u));
            const State& choice = *it->second;
            if (!geq(p.a, choice)) {
                throw fail("choice " + to_string(choice, u) + " is not below sigma_A of pair " + pair_text(p.a, p.b, u));
            }
            bool ok = false;
            try {
                ok = sat(choice, b, u, env.store);
            } catch (const EvalError& e) {
                throw fail(std::string("evaluation error: ") + e.what());
            }
            if (!ok) {
                throw fail("choice " + to_string(choice, u) + " does not satisfy " + to_string(b) + " for pair " +
                           pair_text(p.a, p.b, u));
            }
            auto a = sub(p.a, choice);
            auto nb = add(p.b, choice);
            if (!a || !nb) throw fail("choice cannot be moved for pair " + pair_text(p.a, p.b, u));
            out.witnesses.push_back({std::move(*a), std::move(*nb), p.t});
        }
        normalize(out.witnesses);
        return out;
    }
    case Rule::Disjunction: {
        arity(2);
        if (b.kind() != AssertionKind::Or) throw fail("disjunction rule applied to " + to_string(b));
        std::set<std::pair<State, State>> left(d.left_pairs.begin(), d.left_pairs.end());
        WitnessSet ls;
        WitnessSet rs;
        WitnessSet untouched;
        std::size_t matched = 0;
        for (const auto& p : ctx.witnesses) {
            if (!holds(pc, p.a, u, env.store)) {
                untouched.push_back(p);
            } else if (left.count({p.a, p.b})) {
                ls.push_back(p);
                ++matched;
            } else {
                rs.push_back(p);
            }
        }
        if (matched != left.size()) throw fail("partition names pairs outside the witness set");
        Context c1 = check_rec(b->left, pc, Context{ctx.outer, ls, ctx.extracted}, d.children[0], env, here + ".1");
        auto w1 = extract_footprint(ctx.outer, c1.outer);
        if (!w1) throw fail("left disjunct grew the outer state");
        auto r1 = apply_extract(Context{ctx.outer, rs, ctx.extracted}, *w1, env.lifted);
        if (!r1) throw fail("cannot transfer the left partial footprint");
        Context c2 = check_rec(b->right, pc, Context{c1.outer, r1->witnesses, c1.extracted}, d.children[1], env,
                               here + ".2");
        auto w2 = extract_footprint(c1.outer, c2.outer);
        if (!w2) throw fail("right disjunct grew the outer state");
        auto l2 = apply_extract(Context{c1.outer, c1.witnesses, c1.extracted}, *w2, env.lifted);
        if (!l2) throw fail("cannot transfer the right partial footprint");
        Context out;
        out.outer = c2.outer;
        out.extracted = c2.extracted;
        out.witnesses = l2->witnesses;
        out.witnesses.insert(out.witnesses.end(), c2.witnesses.begin(), c2.witnesses.end());
        out.witnesses.insert(out.witnesses.end(), untouched.begin(), untouched.end());
        normalize(out.witnesses);
        return out;
    }
    }
    throw fail("unknown rule");
}

} // namespace

CheckResult check_derivation(const Assertion& b, const PathCondition& pc, const Context& ctx, const Derivation& d,
                             const CheckEnv& env) {
    CheckResult r;
    try {
        r.context = check_rec(b, pc, ctx, d, env, "");
        r.ok = true;
    } catch (const CheckFailure& f) {
        r.ok = false;
        r.error = f.message;
        r.path = f.path;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Initial witness sets
// ---------------------------------------------------------------------------

namespace {

void collect_resources(const Assertion& a, const Universe& u, const Store& store, std::vector<ResourceId>& out) {
    switch (a.kind()) {
    case AssertionKind::Pred: {
        State empty;
        EvalContext ctx{u, store, empty};
        try {
            if (auto k = pred_key(a, ctx)) out.push_back(*k);
        } catch (const EvalError&) {
        }
        break;
    }
    case AssertionKind::Wand: out.push_back(wand_key(a, u, store)); break;
    case AssertionKind::Star:
    case AssertionKind::Or:
        collect_resources(a->left, u, store, out);
        collect_resources(a->right, u, store, out);
        break;
    case AssertionKind::Imp: collect_resources(a->left, u, store, out); break;
    default: break;
    }
}

} // namespace

WitnessSet with_transformers(const std::vector<State>& lhs_states, bool combinable) {
    WitnessSet s;
    for (const auto& a : lhs_states) {
        Transformer t;
        if (combinable) {
            t.kind = TransformerKind::CombinableR;
            t.anchor = a;
        }
        s.push_back({a, State{}, t});
    }
    normalize(s);
    return s;
}

WitnessSet init_witness_set(const Assertion& a, const Universe& u, const Store& store, bool minimal,
                            bool combinable) {
    EnumerationPlan plan(u);
    plan.stable_only = true;
    collect_resources(a, u, store, plan.extra_resources);
    std::sort(plan.extra_resources.begin(), plan.extra_resources.end());
    plan.extra_resources.erase(std::unique(plan.extra_resources.begin(), plan.extra_resources.end()),
                               plan.extra_resources.end());
    std::vector<State> sat_states;
    for (auto& s : plan.states()) {
        if (sat(s, a, u, store)) sat_states.push_back(std::move(s));
    }
    if (minimal) sat_states = prune_dominated(std::move(sat_states));
    return with_transformers(sat_states, combinable);
}

// ---------------------------------------------------------------------------
// Canonical Extract-first derivations
// ---------------------------------------------------------------------------

namespace {

struct Leaf {
    Assertion atom;
    PathCondition pc;
};

void flatten(const Assertion& b, const PathCondition& pc, std::vector<Leaf>& out) {
    switch (b.kind()) {
    case AssertionKind::Star:
        flatten(b->left, pc, out);
        flatten(b->right, pc, out);
        break;
    case AssertionKind::Imp: flatten(b->left, pc.with(b->expr), out); break;
    default: out.push_back({b, pc});
    }
}

class ChoiceSearch {
public:
    ChoiceSearch(std::vector<Leaf> leaves, const CheckEnv& env) : leaves_(std::move(leaves)), env_(env) {}

    bool solve(std::size_t i, const State& a, const State& b) {
        if (i == leaves_.size()) return true;
        const Key key{i, a, b};
        if (auto it = memo_.find(key); it != memo_.end()) return it->second.has_value();
        const Leaf& leaf = leaves_[i];
        std::optional<std::optional<State>> result;
        if (!holds(leaf.pc, a, env_.universe, env_.store)) {
            if (solve(i + 1, a, b)) result = std::optional<State>{};
        } else {
            for (const auto& d : demands(leaf.atom, env_.universe, env_.store, a)) {
                if (!geq(a, d)) continue;
                auto choice = add(d, core(a));
                if (!choice) continue;
                auto na = sub(a, *choice);
                auto nb = add(b, *choice);
                if (!na || !nb) continue;
                if (solve(i + 1, *na, *nb)) {
                    result = std::optional<State>{*choice};
                    break;
                }
            }
        }
        memo_[key] = result;
        return result.has_value();
    }

    // Choice recorded for a pair reaching leaf i; nullopt when the path condition is false.
    std::optional<State> choice_at(std::size_t i, const State& a, const State& b) const {
        return *memo_.at(Key{i, a, b});
    }

private:
    using Key = std::tuple<std::size_t, State, State>;
    std::vector<Leaf> leaves_;
    const CheckEnv& env_;
    std::map<Key, std::optional<std::optional<State>>> memo_;
};

Derivation replay(const Assertion& b, const PathCondition& pc, WitnessSet& pairs, std::size_t& leaf,
                  const ChoiceSearch& search) {
    switch (b.kind()) {
    case AssertionKind::Star: {
        Derivation l = replay(b->left, pc, pairs, leaf, search);
        Derivation r = replay(b->right, pc, pairs, leaf, search);
        return Derivation::star(std::move(l), std::move(r));
    }
    case AssertionKind::Imp: return Derivation::implication(replay(b->left, pc.with(b->expr), pairs, leaf, search));
    default: {
        std::vector<AtomChoice> choices;
        WitnessSet next;
        for (const auto& p : pairs) {
            auto c = search.choice_at(leaf, p.a, p.b);
            if (!c) {
                next.push_back(p);
                continue;
            }
            choices.push_back({p.a, p.b, *c});
            next.push_back({*sub(p.a, *c), *add(p.b, *c), p.t});
        }
        normalize(next);
        pairs = std::move(next);
        ++leaf;
        return Derivation::atom(std::move(choices));
    }
    }
}

} // namespace

std::optional<Derivation> canonical_derivation(const Assertion& b, const Context& ctx, const State& w,
                                               const CheckEnv& env) {
    if (!is_stable(w)) return std::nullopt;
    auto after = apply_extract(ctx, w, env.lifted);
    if (!after) return std::nullopt;
    std::vector<Leaf> leaves;
    flatten(b, PathCondition{}, leaves);
    ChoiceSearch search(leaves, env);
    for (const auto& p : after->witnesses) {
        if (!search.solve(0, p.a, p.b)) return std::nullopt;
    }
    WitnessSet pairs = after->witnesses;
    std::size_t leaf = 0;
    Derivation body = replay(b, PathCondition{}, pairs, leaf, search);
    return Derivation::extract(w, std::move(body));
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

std::string print_derivation(const Derivation& d, const Universe& u, int indent) {
    const std::string pad(static_cast<std::size_t>(indent), ' ');
    std::ostringstream os;
    os << pad << "(" << to_string(d.rule);
    switch (d.rule) {
    case Rule::Extract: os << " " << to_string(d.extracted, u); break;
    case Rule::Atom:
        for (const auto& c : d.choices) {
            os << "\n" << pad << "  (" << to_string(c.a, u) << " " << to_string(c.b, u) << " " << to_string(c.choice, u)
               << ")";
        }
        break;
    case Rule::Disjunction:
        os << "\n" << pad << "  (left";
        for (const auto& [a, b] : d.left_pairs) os << "\n" << pad << "    (" << to_string(a, u) << " " << to_string(b, u) << ")";
        os << ")";
        break;
    default: break;
    }
    for (const auto& c : d.children) os << "\n" << print_derivation(c, u, indent + 2);
    os << ")";
    return os.str();
}

Derivation parse_derivation(TokenStream& ts, const Universe& u) {
    ts.expect("(");
    const std::string tag = ts.expect_ident();
    Derivation d;
    if (tag == "extract") {
        d.rule = Rule::Extract;
        d.extracted = parse_state(ts, u);
        d.children.push_back(parse_derivation(ts, u));
    } else if (tag == "star") {
        d.rule = Rule::Star;
        d.children.push_back(parse_derivation(ts, u));
        d.children.push_back(parse_derivation(ts, u));
    } else if (tag == "implication") {
        d.rule = Rule::Implication;
        d.children.push_back(parse_derivation(ts, u));
    } else if (tag == "atom") {
        d.rule = Rule::Atom;
        while (ts.accept("(")) {
            AtomChoice c;
            c.a = parse_state(ts, u);
            c.b = parse_state(ts, u);
            c.choice = parse_state(ts, u);
            ts.expect(")");
            d.choices.push_back(std::move(c));
        }
    } else if (tag == "disjunction") {
        d.rule = Rule::Disjunction;
        ts.expect("(");
        ts.expect("left");
        while (ts.accept("(")) {
            State a = parse_state(ts, u);
            State b = parse_state(ts, u);
            ts.expect(")");
            d.left_pairs.emplace_back(std::move(a), std::move(b));
        }
        ts.expect(")");
        d.children.push_back(parse_derivation(ts, u));
        d.children.push_back(parse_derivation(ts, u));
    } else {
        ts.fail("unknown rule '" + tag + "'");
    }
    ts.expect(")");
    return d;
}

} // namespace wandkit
