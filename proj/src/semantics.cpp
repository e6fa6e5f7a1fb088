#include "wandkit/semantics.hpp"

#include <algorithm>
#include <set>

namespace wandkit {

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

namespace {

std::optional<Perm> as_number(const Value& v) {
    if (auto i = std::get_if<std::int64_t>(&v)) return Perm(*i);
    if (auto p = std::get_if<Perm>(&v)) return *p;
    return std::nullopt;
}

std::optional<LocId> resolve_loc(const Expr& receiver, const std::string& field, const EvalContext& ctx,
                                 bool& unframed) {
    auto r = eval(receiver, ctx);
    if (!r) {
        unframed = true;
        return std::nullopt;
    }
    const Ref* ref = std::get_if<Ref>(&*r);
    if (!ref) throw EvalError("field access on a non-reference in " + to_string(receiver) + "." + field);
    if (!ctx.universe.find_field(field)) throw EvalError("unknown field " + field);
    if (ref->is_null()) return std::nullopt;
    return ctx.universe.find_loc(*ref, field);
}

bool compare(BinOp op, const Value& a, const Value& b) {
    if (op == BinOp::Eq || op == BinOp::Ne) {
        bool eq = false;
        if (a.index() == b.index()) {
            eq = a == b;
        } else {
            auto na = as_number(a);
            auto nb = as_number(b);
            if (!na || !nb) throw EvalError("comparison of values of different sorts");
            eq = *na == *nb;
        }
        return op == BinOp::Eq ? eq : !eq;
    }
    auto na = as_number(a);
    auto nb = as_number(b);
    if (!na || !nb) throw EvalError("ordering comparison on non-numeric values");
    switch (op) {
    case BinOp::Lt: return *na < *nb;
    case BinOp::Le: return *na <= *nb;
    case BinOp::Gt: return *na > *nb;
    case BinOp::Ge: return *na >= *nb;
    default: return false;
    }
}

} // namespace

std::optional<Value> eval(const Expr& e, const EvalContext& ctx) {
    const auto& n = e.node();
    switch (n.kind) {
    case ExprKind::Var: {
        auto it = ctx.store.find(n.name);
        if (it != ctx.store.end()) return it->second;
        if (auto r = ctx.universe.find_ref(n.name)) return Value{*r};
        throw EvalError("unbound variable " + n.name);
    }
    case ExprKind::RefLit: {
        if (auto r = ctx.universe.find_ref(n.name)) return Value{*r};
        throw EvalError("unknown reference " + n.name);
    }
    case ExprKind::IntLit: return Value{n.int_value};
    case ExprKind::BoolLit: return Value{n.bool_value};
    case ExprKind::PermLit: return Value{n.perm_value};
    case ExprKind::Field: {
        bool unframed = false;
        auto l = resolve_loc(n.kids[0], n.name, ctx, unframed);
        if (!l) return std::nullopt;
        if (ctx.require_perm && ctx.state.perm(*l) == kNoPerm) return std::nullopt;
        const Value* v = ctx.state.value(*l);
        if (!v) return std::nullopt;
        return *v;
    }
    case ExprKind::PermOf: {
        if (!ctx.allow_perm) throw EvalError("perm() is not allowed here");
        bool unframed = false;
        auto l = resolve_loc(n.kids[0], n.name, ctx, unframed);
        if (unframed) return std::nullopt;
        if (!l) return Value{kNoPerm};
        return Value{ctx.state.perm(*l)};
    }
    case ExprKind::Not: {
        auto b = eval_bool(n.kids[0], ctx);
        if (!b) return std::nullopt;
        return Value{!*b};
    }
    case ExprKind::Ternary: {
        auto c = eval_bool(n.kids[0], ctx);
        if (!c) return std::nullopt;
        return eval(*c ? n.kids[1] : n.kids[2], ctx);
    }
    case ExprKind::Binary: {
        if (n.op == BinOp::And || n.op == BinOp::Or || n.op == BinOp::Implies) {
            auto l = eval_bool(n.kids[0], ctx);
            if (!l) return std::nullopt;
            if (n.op == BinOp::And && !*l) return Value{false};
            if (n.op == BinOp::Or && *l) return Value{true};
            if (n.op == BinOp::Implies && !*l) return Value{true};
            auto r = eval_bool(n.kids[1], ctx);
            if (!r) return std::nullopt;
            return Value{*r};
        }
        auto l = eval(n.kids[0], ctx);
        if (!l) return std::nullopt;
        auto r = eval(n.kids[1], ctx);
        if (!r) return std::nullopt;
        return Value{compare(n.op, *l, *r)};
    }
    }
    return std::nullopt;
}

std::optional<bool> eval_bool(const Expr& e, const EvalContext& ctx) {
    auto v = eval(e, ctx);
    if (!v) return std::nullopt;
    const bool* b = std::get_if<bool>(&*v);
    if (!b) throw EvalError("expected a boolean: " + to_string(e));
    return *b;
}

// ---------------------------------------------------------------------------
// Closing and resource keys
// ---------------------------------------------------------------------------

Assertion close_over(const Assertion& a, const Universe& u, const Store& store) {
    std::map<std::string, Expr> bindings;
    for (const auto& [name, v] : store) {
        switch (sort_of(v)) {
        case Sort::Ref: bindings.emplace(name, Expr::ref_lit(u.ref_name(std::get<Ref>(v)))); break;
        case Sort::Int: bindings.emplace(name, Expr::int_lit(std::get<std::int64_t>(v))); break;
        case Sort::Bool: bindings.emplace(name, Expr::bool_lit(std::get<bool>(v))); break;
        case Sort::Perm: bindings.emplace(name, Expr::perm_lit(std::get<Perm>(v))); break;
        }
    }
    return substitute(a, bindings);
}

WandKey wand_key(const Assertion& wand, const Universe& u, const Store& store) {
    return WandKey{to_string(close_over(wand, u, store))};
}

std::optional<PredKey> pred_key(const Assertion& pred, const EvalContext& ctx) {
    const PredicateDef* def = ctx.universe.find_predicate(pred->name);
    if (!def) throw EvalError("unknown predicate " + pred->name);
    if (def->params.size() != pred->args.size()) throw EvalError("wrong number of arguments to " + pred->name);
    PredKey key{pred->name, {}};
    for (const auto& arg : pred->args) {
        auto v = eval(arg, ctx);
        if (!v) return std::nullopt;
        if (!std::holds_alternative<Ref>(*v)) throw EvalError("predicate arguments must be references");
        key.args.push_back(*v);
    }
    return key;
}

// ---------------------------------------------------------------------------
// Demands
// ---------------------------------------------------------------------------

std::vector<State> prune_dominated(std::vector<State> states) {
    std::vector<State> out;
    for (std::size_t i = 0; i < states.size(); ++i) {
        bool drop = false;
        for (std::size_t j = 0; j < states.size() && !drop; ++j) {
            if (i == j) continue;
            if (states[i] == states[j]) {
                drop = j < i;
            } else if (geq(states[i], states[j])) {
                drop = true;
            }
        }
        if (!drop) out.push_back(states[i]);
    }
    return out;
}

namespace {

std::vector<State> demands_rec(const Assertion& a, const EvalContext& ctx) {
    const auto& n = a.node();
    switch (n.kind) {
    case AssertionKind::Pure: {
        auto b = eval_bool(n.expr, ctx);
        if (b && *b) return {unit()};
        return {};
    }
    case AssertionKind::Acc: {
        bool unframed = false;
        auto l = resolve_loc(n.expr, n.name, ctx, unframed);
        if (!l) return {};
        if (n.amount <= kNoPerm) return {unit()};
        if (n.amount > kFullPerm) return {};
        State d;
        d.set_perm(*l, n.amount);
        if (const Value* v = ctx.state.value(*l)) d.set_value(*l, *v);
        return {d};
    }
    case AssertionKind::Pred: {
        auto key = pred_key(a, ctx);
        if (!key) return {};
        if (n.amount <= kNoPerm) return {unit()};
        if (n.amount > kFullPerm) return {};
        State d;
        d.set_perm(*key, n.amount);
        return {d};
    }
    case AssertionKind::Wand: {
        State d;
        d.set_perm(wand_key(a, ctx.universe, ctx.store), kFullPerm);
        return {d};
    }
    case AssertionKind::Imp: {
        auto g = eval_bool(n.expr, ctx);
        if (g && !*g) return {unit()};
        return demands_rec(n.left, ctx);
    }
    case AssertionKind::Or: {
        auto l = demands_rec(n.left, ctx);
        auto r = demands_rec(n.right, ctx);
        l.insert(l.end(), r.begin(), r.end());
        return prune_dominated(std::move(l));
    }
    case AssertionKind::Star: {
        auto l = demands_rec(n.left, ctx);
        if (l.empty()) return {};
        auto r = demands_rec(n.right, ctx);
        std::vector<State> out;
        for (const auto& x : l) {
            for (const auto& y : r) {
                if (auto s = add(x, y)) out.push_back(std::move(*s));
            }
        }
        return prune_dominated(std::move(out));
    }
    }
    return {};
}

} // namespace

std::vector<State> demands(const Assertion& a, const Universe& u, const Store& store, const State& heap,
                           bool allow_perm) {
    EvalContext ctx{u, store, heap, false, allow_perm};
    return demands_rec(a, ctx);
}

// ---------------------------------------------------------------------------
// Satisfaction
// ---------------------------------------------------------------------------

bool contains_wand(const Assertion& a) {
    switch (a.kind()) {
    case AssertionKind::Wand: return true;
    case AssertionKind::Star:
    case AssertionKind::Or: return contains_wand(a->left) || contains_wand(a->right);
    case AssertionKind::Imp: return contains_wand(a->left);
    default: return false;
    }
}

namespace {

bool sat_demands(const State& s, const Assertion& a, const EvalContext& ctx) {
    for (const auto& d : demands_rec(a, ctx)) {
        if (geq(s, d)) return true;
    }
    return false;
}

bool sat_rec(const State& s, const Assertion& a, const EvalContext& ctx, const WandSemantics* ws) {
    if (!ws || !contains_wand(a)) return sat_demands(s, a, ctx);
    switch (a.kind()) {
    case AssertionKind::Wand: return (*ws)(s, close_over(a, ctx.universe, ctx.store));
    case AssertionKind::Imp: {
        auto g = eval_bool(a->expr, ctx);
        if (g && !*g) return true;
        return sat_rec(s, a->left, ctx, ws);
    }
    case AssertionKind::Or: return sat_rec(s, a->left, ctx, ws) || sat_rec(s, a->right, ctx, ws);
    case AssertionKind::Star:
        throw EvalError("semantic wand atoms under a separating conjunction are not supported: " + to_string(a));
    default: return sat_demands(s, a, ctx);
    }
}

} // namespace

bool sat(const State& s, const Assertion& a, const Universe& u, const Store& store, const WandSemantics* ws,
         bool allow_perm) {
    EvalContext ctx{u, store, s, false, allow_perm};
    return sat_rec(s, a, ctx, ws);
}

// ---------------------------------------------------------------------------
// Well-formedness
// ---------------------------------------------------------------------------

namespace {

using Framed = std::set<std::string>;

bool expr_framed(const Expr& e, const Framed& framed, std::string* diag) {
    const auto& n = e.node();
    switch (n.kind) {
    case ExprKind::Field:
        if (!expr_framed(n.kids[0], framed, diag)) return false;
        if (!framed.count(to_string(e))) {
            if (diag) *diag = "unframed dereference " + to_string(e);
            return false;
        }
        return true;
    case ExprKind::PermOf: return expr_framed(n.kids[0], framed, diag);
    default:
        for (const auto& k : n.kids) {
            if (!expr_framed(k, framed, diag)) return false;
        }
        return true;
    }
}

std::optional<Framed> wf_rec(const Assertion& a, const Framed& framed, bool in_wand, std::string* diag) {
    const auto& n = a.node();
    switch (n.kind) {
    case AssertionKind::Pure:
        if (in_wand && mentions_perm(n.expr)) {
            if (diag) *diag = "perm() inside a wand";
            return std::nullopt;
        }
        if (!expr_framed(n.expr, framed, diag)) return std::nullopt;
        return framed;
    case AssertionKind::Acc: {
        if (in_wand && mentions_perm(n.expr)) {
            if (diag) *diag = "perm() inside a wand";
            return std::nullopt;
        }
        if (!expr_framed(n.expr, framed, diag)) return std::nullopt;
        Framed out = framed;
        if (n.amount > kNoPerm) out.insert(to_string(Expr::field(n.expr, n.name)));
        return out;
    }
    case AssertionKind::Pred:
        for (const auto& arg : n.args) {
            if ((in_wand && mentions_perm(arg)) || !expr_framed(arg, framed, diag)) return std::nullopt;
        }
        return framed;
    case AssertionKind::Star: {
        auto l = wf_rec(n.left, framed, in_wand, diag);
        if (!l) return std::nullopt;
        return wf_rec(n.right, *l, in_wand, diag);
    }
    case AssertionKind::Imp:
        if (in_wand && mentions_perm(n.expr)) {
            if (diag) *diag = "perm() inside a wand";
            return std::nullopt;
        }
        if (!expr_framed(n.expr, framed, diag)) return std::nullopt;
        if (!wf_rec(n.left, framed, in_wand, diag)) return std::nullopt;
        return framed;
    case AssertionKind::Or: {
        auto l = wf_rec(n.left, framed, in_wand, diag);
        if (!l) return std::nullopt;
        auto r = wf_rec(n.right, framed, in_wand, diag);
        if (!r) return std::nullopt;
        Framed out;
        std::set_intersection(l->begin(), l->end(), r->begin(), r->end(), std::inserter(out, out.begin()));
        return out;
    }
    case AssertionKind::Wand:
        if (!wf_rec(n.left, {}, true, diag)) return std::nullopt;
        if (!wf_rec(n.right, {}, true, diag)) return std::nullopt;
        return framed;
    }
    return std::nullopt;
}

} // namespace

bool wf(const Assertion& a, std::string* diagnostic) { return wf_rec(a, {}, false, diagnostic).has_value(); }

} // namespace wandkit
