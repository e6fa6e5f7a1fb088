#include "gen.hpp"

#include <algorithm>
#include <set>

#include "wandkit/enumerate.hpp"

namespace wandkit::testkit {

namespace {

Perm random_amount(Rng& rng, const Universe& u, bool fractions) {
    if (!fractions || coin(rng)) return kFullPerm;
    return pick(rng, lattice(u.granularity));
}

Expr receiver(const Universe& u, LocId l) { return Expr::var(u.ref_name(u.loc(l).receiver)); }

Expr read(const Universe& u, LocId l) { return Expr::field(receiver(u, l), u.loc(l).field); }

Expr literal(const Universe& u, const Value& v) {
    if (auto r = std::get_if<Ref>(&v)) return Expr::var(u.ref_name(*r));
    if (auto i = std::get_if<std::int64_t>(&v)) return Expr::int_lit(*i);
    if (auto b = std::get_if<bool>(&v)) return Expr::bool_lit(*b);
    return Expr::perm_lit(std::get<Perm>(v));
}

Expr random_guard(Rng& rng, const Universe& u, const std::set<LocId>& framed) {
    std::vector<LocId> ls(framed.begin(), framed.end());
    const LocId l = pick(rng, ls);
    const Value v = pick(rng, u.loc(l).domain);
    return Expr::binary(coin(rng) ? BinOp::Eq : BinOp::Ne, read(u, l), literal(u, v));
}

struct Gen {
    Rng& rng;
    const Universe& u;
    const AssertionShape& shape;

    std::vector<LocId> all_locs() const {
        std::vector<LocId> out;
        for (std::uint32_t i = 0; i < u.num_locations(); ++i) out.push_back(LocId{i});
        return out;
    }

    Assertion atom(std::set<LocId>& framed) {
        const bool pure = !framed.empty() && coin(rng, 0.35);
        if (pure) return Assertion::pure(random_guard(rng, u, framed));
        const LocId l = pick(rng, all_locs());
        // Dereferencing a held reference field reaches a location chosen by the heap.
        for (LocId via : framed) {
            const auto& loc = u.loc(via);
            const FieldDecl* fd = u.find_field(loc.field);
            if (fd->sort != Sort::Ref || !coin(rng, 0.5)) continue;
            const std::string field = u.loc(l).field;
            bool total = true;
            for (const auto& v : loc.domain) {
                const Ref r = std::get<Ref>(v);
                total = total && !r.is_null() && u.find_loc(r, field);
            }
            if (total) return Assertion::acc(read(u, via), field, random_amount(rng, u, shape.fractions));
        }
        framed.insert(l);
        return Assertion::acc(receiver(u, l), u.loc(l).field, random_amount(rng, u, shape.fractions));
    }

    Assertion gen(int depth, std::set<LocId>& framed) {
        if (depth <= 0) return atom(framed);
        const int choice = std::uniform_int_distribution<int>(0, 5)(rng);
        if (choice <= 1) return atom(framed);
        if (choice == 2 || choice == 3) {
            Assertion l = gen(depth - 1, framed);
            Assertion r = gen(depth - 1, framed);
            return Assertion::star(l, r);
        }
        if (choice == 4 && shape.allow_or) {
            std::set<LocId> fl = framed, fr = framed;
            Assertion l = gen(depth - 1, fl);
            Assertion r = gen(depth - 1, fr);
            std::set<LocId> both;
            std::set_intersection(fl.begin(), fl.end(), fr.begin(), fr.end(), std::inserter(both, both.begin()));
            framed = both;
            return Assertion::disj(l, r);
        }
        if (shape.allow_imp && !framed.empty()) {
            Expr g = random_guard(rng, u, framed);
            std::set<LocId> inner = framed;
            return Assertion::imp(g, gen(depth - 1, inner));
        }
        return atom(framed);
    }
};

} // namespace

Universe random_universe(Rng& rng, int max_locations) {
    Universe u;
    u.granularity = 2;
    u.refs = {"null", "x", "y"};
    FieldDecl f{"f", Sort::Int, {}};
    f.domain = coin(rng) ? std::vector<Value>{std::int64_t{0}, std::int64_t{1}} : std::vector<Value>{std::int64_t{0}};
    FieldDecl g{"g", Sort::Int, {std::int64_t{0}}};
    FieldDecl n{"n", Sort::Ref, {Ref{1}, Ref{2}}};
    u.fields = {f, g, n};
    std::vector<std::pair<std::string, std::string>> candidates{{"x", "f"}, {"y", "f"}, {"x", "g"}, {"y", "g"}};
    std::shuffle(candidates.begin(), candidates.end(), rng);
    const int count = std::uniform_int_distribution<int>(2, std::max(2, max_locations))(rng);
    const bool with_ref = coin(rng, 0.3) && count >= 3;
    if (with_ref) {
        // x.n points at x or y; both targets carry f so derefs stay in the universe.
        u.add_location("x", "n");
        u.add_location("x", "f");
        u.add_location("y", "f");
        return u;
    }
    for (int i = 0; i < count; ++i) u.add_location(candidates[i].first, candidates[i].second);
    return u;
}

Assertion random_assertion(Rng& rng, const Universe& u, const AssertionShape& shape) {
    Gen g{rng, u, shape};
    std::set<LocId> framed;
    return g.gen(shape.depth, framed);
}

Assertion random_wand(Rng& rng, const Universe& u, const AssertionShape& shape, WandKind kind) {
    Assertion lhs = random_assertion(rng, u, shape);
    Assertion rhs = random_assertion(rng, u, shape);
    return Assertion::wand(lhs, rhs, kind);
}

State random_stable_state(Rng& rng, const Universe& u, double hold_chance) {
    State s;
    const auto amounts = lattice(u.granularity);
    for (std::uint32_t i = 0; i < u.num_locations(); ++i) {
        if (!coin(rng, hold_chance)) continue;
        const LocId l{i};
        s.set_value(l, pick(rng, u.loc(l).domain));
        s.set_perm(l, coin(rng) ? kFullPerm : pick(rng, amounts));
    }
    return s;
}

} // namespace wandkit::testkit
