#include "wandkit/universe.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "wandkit/parse.hpp"

namespace wandkit {

std::optional<Ref> Universe::find_ref(std::string_view name) const {
    for (std::size_t i = 0; i < refs.size(); ++i) {
        if (refs[i] == name) return Ref{static_cast<std::uint16_t>(i)};
    }
    return std::nullopt;
}

const FieldDecl* Universe::find_field(std::string_view name) const {
    for (const auto& f : fields) {
        if (f.name == name) return &f;
    }
    return nullptr;
}

std::optional<LocId> Universe::find_loc(Ref receiver, std::string_view field) const {
    for (std::size_t i = 0; i < locations.size(); ++i) {
        if (locations[i].receiver == receiver && locations[i].field == field) {
            return LocId{static_cast<std::uint32_t>(i)};
        }
    }
    return std::nullopt;
}

std::string Universe::loc_name(LocId id) const {
    const Location& l = loc(id);
    return ref_name(l.receiver) + "." + l.field;
}

const PredicateDef* Universe::find_predicate(std::string_view name) const {
    for (const auto& p : predicates) {
        if (p.name == name) return &p;
    }
    return nullptr;
}

std::string Universe::value_to_string(const Value& v) const {
    switch (sort_of(v)) {
    case Sort::Ref: return ref_name(std::get<Ref>(v));
    case Sort::Int: return std::to_string(std::get<std::int64_t>(v));
    case Sort::Bool: return std::get<bool>(v) ? "true" : "false";
    case Sort::Perm: return to_string(std::get<Perm>(v));
    }
    return "?";
}

std::optional<Value> Universe::parse_value(std::string_view text, Sort sort) const {
    switch (sort) {
    case Sort::Ref:
        if (auto r = find_ref(text)) return Value{*r};
        return std::nullopt;
    case Sort::Int:
        try {
            std::size_t used = 0;
            const std::string s(text);
            const std::int64_t v = std::stoll(s, &used);
            if (used != s.size()) return std::nullopt;
            return Value{v};
        } catch (const std::exception&) {
            return std::nullopt;
        }
    case Sort::Bool:
        if (text == "true") return Value{true};
        if (text == "false") return Value{false};
        return std::nullopt;
    case Sort::Perm:
        if (auto p = wandkit::parse_perm(text)) return Value{*p};
        return std::nullopt;
    }
    return std::nullopt;
}

LocId Universe::add_location(std::string_view receiver, std::string_view field,
                             std::optional<std::vector<Value>> domain) {
    auto r = find_ref(receiver);
    if (!r) throw std::invalid_argument("unknown reference " + std::string(receiver));
    if (r->is_null()) throw std::invalid_argument("null carries no locations");
    const FieldDecl* f = find_field(field);
    if (!f) throw std::invalid_argument("unknown field " + std::string(field));
    if (find_loc(*r, field)) throw std::invalid_argument("duplicate location " + std::string(receiver) + "." + std::string(field));
    Location l{*r, std::string(field), domain ? *domain : f->domain};
    for (const auto& v : l.domain) {
        if (sort_of(v) != f->sort) throw std::invalid_argument("domain value of wrong sort for " + l.field);
    }
    if (l.domain.empty()) throw std::invalid_argument("empty value domain");
    locations.push_back(std::move(l));
    return LocId{static_cast<std::uint32_t>(locations.size() - 1)};
}

std::optional<std::string> Universe::validate() const {
    if (granularity < 1) return "granularity must be positive";
    std::map<std::string, std::set<std::string>> calls;
    for (const auto& p : predicates) {
        std::set<std::string> vars;
        collect_vars(p.body, vars);
        for (const auto& v : vars) {
            const bool is_param = std::find(p.params.begin(), p.params.end(), v) != p.params.end();
            if (!is_param && !find_ref(v)) return "predicate " + p.name + " mentions unbound " + v;
        }
        std::function<void(const Assertion&)> visit = [&](const Assertion& a) {
            switch (a.kind()) {
            case AssertionKind::Pred: calls[p.name].insert(a->name); break;
            case AssertionKind::Star:
            case AssertionKind::Or:
            case AssertionKind::Wand:
                visit(a->left);
                visit(a->right);
                break;
            case AssertionKind::Imp: visit(a->left); break;
            default: break;
            }
        };
        visit(p.body);
        for (const auto& callee : calls[p.name]) {
            if (!find_predicate(callee)) return "predicate " + p.name + " calls undeclared " + callee;
        }
    }
    // Reject cycles in the call graph.
    std::map<std::string, int> color;
    std::function<bool(const std::string&)> cyclic = [&](const std::string& n) {
        if (color[n] == 1) return true;
        if (color[n] == 2) return false;
        color[n] = 1;
        for (const auto& c : calls[n]) {
            if (cyclic(c)) return true;
        }
        color[n] = 2;
        return false;
    };
    for (const auto& p : predicates) {
        if (cyclic(p.name)) return "predicate " + p.name + " is recursive";
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Text format
// ---------------------------------------------------------------------------

namespace {

bool is_directive(const TokenStream& ts) {
    return ts.is("granularity") || ts.is("refs") || ts.is("field") || ts.is("loc") || ts.is("predicate") ||
           ts.is("}") || ts.at_end();
}

std::vector<Value> parse_domain(TokenStream& ts, const Universe& u, Sort sort) {
    std::vector<Value> out;
    ts.expect("{");
    if (!ts.is("}")) {
        do {
            std::string text;
            if (ts.accept("-")) text = "-";
            text += ts.next().text;
            auto v = u.parse_value(text, sort);
            if (!v) ts.fail("bad " + to_string(sort) + " value '" + text + "'");
            if (std::find(out.begin(), out.end(), *v) == out.end()) out.push_back(*v);
        } while (ts.accept(","));
    }
    ts.expect("}");
    return out;
}

} // namespace

Universe parse_universe_directives(TokenStream& ts) {
    Universe u;
    bool have_refs = false;
    while (!ts.is("}") && !ts.at_end()) {
        const Token head = ts.peek();
        if (ts.accept("granularity")) {
            u.granularity = static_cast<int>(ts.expect_int());
            if (u.granularity < 1) throw ParseError(head.pos, "granularity must be positive");
        } else if (ts.accept("refs")) {
            if (have_refs) throw ParseError(head.pos, "duplicate refs directive");
            have_refs = true;
            while (!is_directive(ts)) {
                std::string name = ts.expect_ident();
                if (name == "null" || u.find_ref(name)) throw ParseError(head.pos, "duplicate reference " + name);
                u.refs.push_back(std::move(name));
            }
        } else if (ts.accept("field")) {
            FieldDecl f;
            f.name = ts.expect_ident();
            if (u.find_field(f.name)) throw ParseError(head.pos, "duplicate field " + f.name);
            ts.expect(":");
            const std::string sort = ts.expect_ident();
            if (sort == "Ref") {
                f.sort = Sort::Ref;
                for (std::size_t i = 0; i < u.refs.size(); ++i) f.domain.push_back(Ref{static_cast<std::uint16_t>(i)});
            } else if (sort == "Int") {
                f.sort = Sort::Int;
                f.domain = {std::int64_t{0}};
            } else if (sort == "Bool") {
                f.sort = Sort::Bool;
                f.domain = {false, true};
            } else {
                throw ParseError(head.pos, "unknown sort " + sort);
            }
            if (ts.is("{")) f.domain = parse_domain(ts, u, f.sort);
            if (f.domain.empty()) throw ParseError(head.pos, "empty value domain");
            u.fields.push_back(std::move(f));
        } else if (ts.accept("loc")) {
            const std::string recv = ts.expect_ident();
            ts.expect(".");
            const std::string field = ts.expect_ident();
            std::optional<std::vector<Value>> domain;
            const FieldDecl* f = u.find_field(field);
            if (!f) throw ParseError(head.pos, "unknown field " + field);
            if (ts.is("{")) domain = parse_domain(ts, u, f->sort);
            try {
                u.add_location(recv, field, domain);
            } catch (const std::invalid_argument& e) {
                throw ParseError(head.pos, e.what());
            }
        } else if (ts.accept("predicate")) {
            PredicateDef p;
            p.name = ts.expect_ident();
            if (u.find_predicate(p.name)) throw ParseError(head.pos, "duplicate predicate " + p.name);
            ts.expect("(");
            if (!ts.is(")")) {
                do {
                    p.params.push_back(ts.expect_ident());
                    if (ts.accept(":")) {
                        if (ts.expect_ident() != "Ref") ts.fail("predicate parameters must be Ref");
                    }
                } while (ts.accept(","));
            }
            ts.expect(")");
            ts.expect(":=");
            p.body = parse_assertion(ts);
            u.predicates.push_back(std::move(p));
        } else {
            ts.fail("expected universe directive");
        }
    }
    if (auto err = u.validate()) throw ParseError(ts.peek().pos, *err);
    return u;
}

Universe parse_universe(std::string_view text) {
    TokenStream ts(tokenize(text));
    ts.expect("universe");
    if (ts.expect_ident() != "v1") ts.fail("unsupported universe format version");
    Universe u = parse_universe_directives(ts);
    if (!ts.at_end()) ts.fail("trailing input");
    return u;
}

namespace {

std::string print_domain(const Universe& u, const std::vector<Value>& d) {
    std::string out = "{";
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (i) out += ", ";
        out += u.value_to_string(d[i]);
    }
    return out + "}";
}

} // namespace

std::string print_universe(const Universe& u) {
    std::ostringstream os;
    os << "universe v1\n";
    os << "granularity " << u.granularity << "\n";
    os << "refs";
    for (std::size_t i = 1; i < u.refs.size(); ++i) os << " " << u.refs[i];
    os << "\n";
    for (const auto& f : u.fields) {
        os << "field " << f.name << " : " << to_string(f.sort);
        std::vector<Value> all_refs;
        for (std::size_t i = 0; i < u.refs.size(); ++i) all_refs.push_back(Ref{static_cast<std::uint16_t>(i)});
        if (f.sort != Sort::Ref || f.domain != all_refs) os << " " << print_domain(u, f.domain);
        os << "\n";
    }
    for (std::size_t i = 0; i < u.locations.size(); ++i) {
        const LocId id{static_cast<std::uint32_t>(i)};
        const Location& l = u.loc(id);
        os << "loc " << u.loc_name(id);
        const FieldDecl* f = u.find_field(l.field);
        if (!f || l.domain != f->domain) os << " " << print_domain(u, l.domain);
        os << "\n";
    }
    for (const auto& p : u.predicates) {
        os << "predicate " << p.name << "(";
        for (std::size_t i = 0; i < p.params.size(); ++i) os << (i ? ", " : "") << p.params[i];
        os << ") := " << to_string(p.body) << "\n";
    }
    return os.str();
}

Universe load_universe_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_universe(ss.str());
}

} // namespace wandkit
