#include "wandkit/state.hpp"

#include <algorithm>

#include "wandkit/parse.hpp"

namespace wandkit {

bool operator==(const PredKey& a, const PredKey& b) { return a.name == b.name && a.args == b.args; }
bool operator<(const PredKey& a, const PredKey& b) {
    if (a.name != b.name) return a.name < b.name;
    return a.args < b.args;
}
bool operator==(const WandKey& a, const WandKey& b) { return a.text == b.text; }
bool operator<(const WandKey& a, const WandKey& b) { return a.text < b.text; }

std::string resource_name(const ResourceId& id, const Universe& u) {
    if (auto l = std::get_if<LocId>(&id)) return u.loc_name(*l);
    if (auto p = std::get_if<PredKey>(&id)) {
        std::string out = p->name + "(";
        for (std::size_t i = 0; i < p->args.size(); ++i) {
            if (i) out += ", ";
            out += u.value_to_string(p->args[i]);
        }
        return out + ")";
    }
    return "wand\"" + std::get<WandKey>(id).text + "\"";
}

// ---------------------------------------------------------------------------
// State
// ---------------------------------------------------------------------------

namespace {

template <class Vec, class Key>
auto find_key(Vec& v, const Key& k) {
    return std::lower_bound(v.begin(), v.end(), k, [](const auto& e, const Key& key) { return e.first < key; });
}

} // namespace

Perm State::perm(const ResourceId& id) const {
    auto it = find_key(mask_, id);
    return (it != mask_.end() && it->first == id) ? it->second : kNoPerm;
}

const Value* State::value(LocId l) const {
    auto it = find_key(heap_, l);
    return (it != heap_.end() && it->first == l) ? &it->second : nullptr;
}

void State::set_perm(const ResourceId& id, const Perm& amount) {
    auto it = find_key(mask_, id);
    const bool present = it != mask_.end() && it->first == id;
    if (amount == kNoPerm) {
        if (present) mask_.erase(it);
    } else if (present) {
        it->second = amount;
    } else {
        mask_.insert(it, {id, amount});
    }
}

void State::set_value(LocId l, const Value& v) {
    auto it = find_key(heap_, l);
    if (it != heap_.end() && it->first == l) {
        it->second = v;
    } else {
        heap_.insert(it, {l, v});
    }
}

void State::erase_value(LocId l) {
    auto it = find_key(heap_, l);
    if (it != heap_.end() && it->first == l) heap_.erase(it);
}

bool State::valid() const {
    return std::all_of(mask_.begin(), mask_.end(),
                       [](const MaskEntry& e) { return e.second > kNoPerm && e.second <= kFullPerm; });
}

bool operator<(const State& a, const State& b) {
    if (a.mask_ != b.mask_) {
        return std::lexicographical_compare(a.mask_.begin(), a.mask_.end(), b.mask_.begin(), b.mask_.end());
    }
    return std::lexicographical_compare(a.heap_.begin(), a.heap_.end(), b.heap_.begin(), b.heap_.end());
}

// ---------------------------------------------------------------------------
// Algebra operations
// ---------------------------------------------------------------------------

namespace {

bool heaps_agree(const State& a, const State& b) {
    auto i = a.heap().begin();
    auto j = b.heap().begin();
    while (i != a.heap().end() && j != b.heap().end()) {
        if (i->first < j->first) {
            ++i;
        } else if (j->first < i->first) {
            ++j;
        } else {
            if (i->second != j->second) return false;
            ++i;
            ++j;
        }
    }
    return true;
}

} // namespace

std::optional<State> add(const State& a, const State& b) {
    if (!heaps_agree(a, b)) return std::nullopt;
    State r = a;
    for (const auto& [id, p] : b.mask()) {
        const Perm sum = r.perm(id) + p;
        if (sum > kFullPerm) return std::nullopt;
        r.set_perm(id, sum);
    }
    for (const auto& [l, v] : b.heap()) r.set_value(l, v);
    return r;
}

bool compatible(const State& a, const State& b) {
    if (!heaps_agree(a, b)) return false;
    for (const auto& [id, p] : b.mask()) {
        if (a.perm(id) + p > kFullPerm) return false;
    }
    return true;
}

State core(const State& a) {
    State r;
    for (const auto& [l, v] : a.heap()) r.set_value(l, v);
    return r;
}

State heap_only(const State& sigma) { return core(sigma); }

bool is_stable(const State& a) {
    for (const auto& [id, p] : a.mask()) {
        if (auto l = std::get_if<LocId>(&id); l && !a.value(*l)) return false;
    }
    for (const auto& [l, v] : a.heap()) {
        if (a.perm(l) == kNoPerm) return false;
    }
    return true;
}

bool geq(const State& a, const State& b) {
    for (const auto& [id, p] : b.mask()) {
        if (a.perm(id) < p) return false;
    }
    for (const auto& [l, v] : b.heap()) {
        const Value* av = a.value(l);
        if (!av || *av != v) return false;
    }
    return true;
}

std::optional<State> sub(const State& a, const State& b) {
    if (!geq(a, b)) return std::nullopt;
    State r = a;
    for (const auto& [id, p] : b.mask()) r.set_perm(id, a.perm(id) - p);
    return r;
}

std::optional<State> mult(const Perm& alpha, const State& sigma) {
    State r = sigma;
    for (const auto& [id, p] : sigma.mask()) {
        const Perm scaled = alpha * p;
        if (scaled > kFullPerm) return std::nullopt;
        r.set_perm(id, scaled);
    }
    return r;
}

bool in_scaled(const State& candidate, const State& sigma) {
    if (candidate.heap() != sigma.heap()) return false;
    if (candidate.mask().size() != sigma.mask().size()) return false;
    std::optional<Perm> alpha;
    for (std::size_t i = 0; i < sigma.mask().size(); ++i) {
        const auto& [id, p] = sigma.mask()[i];
        const auto& [cid, cp] = candidate.mask()[i];
        if (!(id == cid)) return false;
        const Perm ratio = cp / p;
        if (alpha && *alpha != ratio) return false;
        alpha = ratio;
    }
    return !alpha || (*alpha > kNoPerm && *alpha <= kFullPerm);
}

// Scaling never changes heaps, so a compatible copy exists iff the heaps agree and
// alpha can be taken small enough: alpha * pi_w(l) <= 1 - pi_A(l) has a positive
// solution exactly when pi_A(l) < 1 for every l in the support of pi_w.
bool exists_compatible_scaled(const State& sigma_A, const State& sigma_w) {
    if (!heaps_agree(sigma_A, sigma_w)) return false;
    for (const auto& [id, p] : sigma_w.mask()) {
        if (sigma_A.perm(id) >= kFullPerm) return false;
    }
    return true;
}

State restrict(const State& sigma_A, const State& sigma_w) {
    if (!exists_compatible_scaled(sigma_A, sigma_w)) return sigma_w;
    State r = sigma_w;
    for (const auto& [id, p] : sigma_w.mask()) r.set_perm(id, min_perm(p, kFullPerm - sigma_A.perm(id)));
    return r;
}

State bin(const State& sigma) {
    State r = sigma;
    for (const auto& [id, p] : sigma.mask()) {
        if (p != kFullPerm) r.set_perm(id, kNoPerm);
    }
    return r;
}

State stabilize(const State& sigma) {
    State r = sigma;
    for (const auto& [l, v] : sigma.heap()) {
        if (sigma.perm(l) == kNoPerm) r.erase_value(l);
    }
    return r;
}

std::optional<State> extract_footprint(const State& initial, const State& final_state) {
    auto d = sub(initial, final_state);
    if (!d) return std::nullopt;
    return stabilize(*d);
}

State join(const State& a, const State& b) {
    State r = a;
    for (const auto& [id, p] : b.mask()) r.set_perm(id, max_perm(r.perm(id), p));
    for (const auto& [l, v] : b.heap()) {
        if (!r.value(l)) r.set_value(l, v);
    }
    return r;
}

// ---------------------------------------------------------------------------
// Text form
// ---------------------------------------------------------------------------

std::string to_string(const State& s, const Universe& u) {
    std::vector<std::string> parts;
    auto m = s.mask().begin();
    auto h = s.heap().begin();
    // Field locations come first in resource order; merge them with heap entries.
    while (m != s.mask().end() || h != s.heap().end()) {
        const LocId* ml = (m != s.mask().end()) ? std::get_if<LocId>(&m->first) : nullptr;
        if (h != s.heap().end() && (!ml || h->first < *ml)) {
            parts.push_back(u.loc_name(h->first) + "@0=" + u.value_to_string(h->second));
            ++h;
        } else if (ml && h != s.heap().end() && h->first == *ml) {
            parts.push_back(u.loc_name(*ml) + "@" + to_string(m->second) + "=" + u.value_to_string(h->second));
            ++m;
            ++h;
        } else {
            parts.push_back(resource_name(m->first, u) + "@" + to_string(m->second));
            ++m;
        }
    }
    std::string out = "{";
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += ", ";
        out += parts[i];
    }
    return out + "}";
}

namespace {

Value parse_value_tokens(TokenStream& ts, const Universe& u, Sort sort) {
    std::string text;
    if (ts.accept("-")) text = "-";
    text += ts.next().text;
    auto v = u.parse_value(text, sort);
    if (!v) ts.fail("bad " + to_string(sort) + " value '" + text + "'");
    return *v;
}

} // namespace

State parse_state(TokenStream& ts, const Universe& u) {
    State s;
    ts.expect("{");
    if (ts.accept("}")) return s;
    do {
        if (ts.is("wand") && ts.peek(1).kind == TokKind::String) {
            ts.next();
            WandKey key{ts.next().text};
            ts.expect("@");
            s.set_perm(key, parse_perm_amount(ts));
            continue;
        }
        const std::string head = ts.expect_ident();
        if (ts.is("(")) {
            PredKey key{head, {}};
            const PredicateDef* def = u.find_predicate(head);
            if (!def) ts.fail("unknown predicate " + head);
            ts.expect("(");
            if (!ts.is(")")) {
                do {
                    key.args.push_back(parse_value_tokens(ts, u, Sort::Ref));
                } while (ts.accept(","));
            }
            ts.expect(")");
            if (key.args.size() != def->params.size()) ts.fail("wrong predicate arity");
            ts.expect("@");
            s.set_perm(key, parse_perm_amount(ts));
            continue;
        }
        ts.expect(".");
        const std::string field = ts.expect_ident();
        auto r = u.find_ref(head);
        if (!r) ts.fail("unknown reference " + head);
        auto l = u.find_loc(*r, field);
        if (!l) ts.fail("unknown location " + head + "." + field);
        ts.expect("@");
        const Perm p = parse_perm_amount(ts);
        if (p < kNoPerm || p > kFullPerm) ts.fail("permission amount out of range");
        s.set_perm(*l, p);
        if (ts.accept("=")) {
            const Location& loc = u.loc(*l);
            const Value v = parse_value_tokens(ts, u, u.find_field(loc.field)->sort);
            if (std::find(loc.domain.begin(), loc.domain.end(), v) == loc.domain.end()) {
                ts.fail("value outside the domain of " + head + "." + field);
            }
            s.set_value(*l, v);
        }
    } while (ts.accept(","));
    ts.expect("}");
    return s;
}

State parse_state(std::string_view text, const Universe& u) {
    TokenStream ts(tokenize(text));
    State s = parse_state(ts, u);
    if (!ts.at_end()) ts.fail("trailing input");
    return s;
}

} // namespace wandkit
